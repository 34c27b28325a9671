#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "plasmo/media.hpp"
#include "plasmo/types.hpp"

namespace plasmo {

/// Dipole-type eigen-data of the reference shape: eigenvalue of the
/// magnetization operator and the moment vectors of its (clustered) modes.
struct EigenMode {
  double lambda = 0.0;
  std::vector<Vec3> moments;
  int multiplicity = 0;
  Mat3 moment_gram = Mat3::Zero();
};

/// Analytic data for the unit ball. Only n0 = 1 is available; larger
/// indices throw `unsupported-mode`.
EigenMode unit_ball_eigen_data(int n0);

/// Occupancy grid over [-1, 1]^3 with `resolution` cubic voxels per axis,
/// x index fastest.
struct VoxelShape {
  int resolution = 0;
  std::vector<std::uint8_t> occupancy;
  double voxel_volume = 0.0;

  double spacing() const { return 2.0 / resolution; }
  Vec3 center(int i, int j, int k) const;
  Vec3 center(std::size_t flat) const;
  std::vector<std::size_t> occupied() const;
  std::size_t occupied_count() const;
  double volume() const { return voxel_volume * static_cast<double>(occupied_count()); }
};

VoxelShape voxelize_ball(int resolution);
VoxelShape voxelize_ellipsoid(int resolution, const Vec3& semi_axes);
VoxelShape voxelize_cube(int resolution, double half_width);
/// One occupied voxel (the one nearest the origin) in an otherwise empty grid.
VoxelShape single_voxel(int resolution = 8);
VoxelShape voxelize(const VoxelShapeSpec& spec);

/// Vector field sampled at the occupied voxels, in `VoxelShape::occupied()` order.
using VoxelField = std::vector<Vec3>;

/// Discrete gradient-magnetization operator on a voxel shape. Off-diagonal
/// voxel pairs use midpoint quadrature of (I - 3 r^ r^)/(4 pi r^3); the self
/// cell contributes I/3. Applied through a zero-padded FFT convolution.
class MagnetizationOperator {
 public:
  explicit MagnetizationOperator(const VoxelShape& shape);
  ~MagnetizationOperator();
  MagnetizationOperator(const MagnetizationOperator&) = delete;
  MagnetizationOperator& operator=(const MagnetizationOperator&) = delete;

  VoxelField apply(const VoxelField& field) const;
  const VoxelShape& shape() const { return shape_; }

 private:
  struct Impl;
  VoxelShape shape_;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper; throws `resolution-too-low` below 8^3.
VoxelField magnetization_apply(const VoxelShape& shape, const VoxelField& field);

struct SpectrumOptions {
  int max_degree = 0;          // 0 picks count + 2, raised as needed
  double cluster_tol = 1e-3;   // relative gap that separates two modes
};

/// Leading `count` eigen-clusters of the operator restricted (Rayleigh-Ritz)
/// to gradients of harmonic polynomials, in ascending eigenvalue order.
std::vector<EigenMode> magnetization_spectrum(const VoxelShape& shape, int count, const SpectrumOptions& opts = {});

}  // namespace plasmo
