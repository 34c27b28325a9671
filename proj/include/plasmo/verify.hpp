#pragma once

#include <string>
#include <vector>

#include "plasmo/greens.hpp"

namespace plasmo {

struct VerifyOptions {
  double k = 1.0;
  double tol_homogeneous = 1e-12;
  double tol_single_voxel = 1e-10;
  double tol_smooth = 1e-3;
  double tol_symmetry = 1e-10;
  double amplitude = 0.1;        // peak of the smooth contrast
  int smooth_order = 3;
  std::vector<int> refinement{4, 8, 16};
  int symmetry_resolution = 8;
  int symmetry_max_order = 3;
};

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Kernel on [-0.5, 0.5]^3 whose contrast is amplitude * (1 - |y|^2 / R^2)^2
/// inside the ball of radius R = 0.5 and zero outside.
HeterogeneousKernel smooth_contrast_kernel(int resolution, double k, double amplitude, int born_order);

/// Kernel with one voxel of contrast `value` at the center of a `resolution`^3 grid on [-0.5, 0.5]^3.
HeterogeneousKernel single_voxel_kernel(int resolution, double k, cplx value, int born_order);

/// Worst reciprocity residual over a fixed set of directions, polarizations and source points.
double reciprocity_sweep(const HeterogeneousKernel& kernel, IncidentQuadrature quad);

/// Worst symmetry residual over a fixed set of point pairs.
double symmetry_sweep(const HeterogeneousKernel& kernel);

/// Reciprocity and kernel-symmetry suites with pass/fail per line.
std::vector<VerifyCheck> run_verification(const VerifyOptions& opts = {});

}  // namespace plasmo
