#include "plasmo/verify.hpp"

#include <algorithm>
#include <cmath>

namespace plasmo {

namespace {

const Box kUnitCube{Vec3::Constant(-0.5), Vec3::Constant(0.5)};

struct Probe {
  Vec3 xhat;
  Vec3 q;
  Vec3 z;
};

std::vector<Probe> probes() {
  const Vec3 d1 = Vec3(1.0, 2.0, 2.0).normalized();
  const Vec3 q1 = Vec3(2.0, -1.0, 0.0).normalized();
  const Vec3 d2 = Vec3(-0.3, 0.4, -0.866).normalized();
  const Vec3 q2 = d2.cross(Vec3(1.0, 0.0, 0.0)).normalized();
  return {
      {Vec3(0.0, 0.0, 1.0), Vec3(1.0, 0.0, 0.0), Vec3(0.05, -0.1, 0.9)},
      {d1, q1, Vec3(1.2, 0.3, -0.4)},
      {d2, q2, Vec3(-0.2, 1.1, 0.6)},
  };
}

}  // namespace

HeterogeneousKernel smooth_contrast_kernel(int resolution, double k, double amplitude, int born_order) {
  VoxelGrid grid{kUnitCube, resolution};
  std::vector<cplx> contrast(grid.size(), 0.0);
  const double radius = 0.5;
  for (std::size_t v = 0; v < grid.size(); ++v) {
    const double r2 = grid.center(v).squaredNorm() / (radius * radius);
    if (r2 < 1.0) contrast[v] = amplitude * (1.0 - r2) * (1.0 - r2);
  }
  return HeterogeneousKernel(grid, k, std::move(contrast), born_order);
}

HeterogeneousKernel single_voxel_kernel(int resolution, double k, cplx value, int born_order) {
  VoxelGrid grid{kUnitCube, resolution};
  std::vector<cplx> contrast(grid.size(), 0.0);
  const auto c = static_cast<std::size_t>(resolution / 2);
  const auto n = static_cast<std::size_t>(resolution);
  contrast[c + n * (c + n * c)] = value;
  return HeterogeneousKernel(grid, k, std::move(contrast), born_order);
}

double reciprocity_sweep(const HeterogeneousKernel& kernel, IncidentQuadrature quad) {
  double worst = 0.0;
  for (const auto& p : probes()) worst = std::max(worst, verify_reciprocity(kernel, p.xhat, p.z, p.q, quad).residual);
  return worst;
}

double symmetry_sweep(const HeterogeneousKernel& kernel) {
  const std::vector<std::pair<Vec3, Vec3>> pairs{
      {Vec3(0.9, 0.1, -0.2), Vec3(-0.7, 0.4, 0.8)},
      {Vec3(0.11, -0.23, 0.07), Vec3(-0.31, 0.18, -0.26)},  // both inside the contrast
      {Vec3(0.2, 0.2, 0.2), Vec3(1.5, -1.0, 0.3)},
  };
  double worst = 0.0;
  for (const auto& [x, y] : pairs) worst = std::max(worst, verify_symmetry(kernel, x, y));
  return worst;
}

std::vector<VerifyCheck> run_verification(const VerifyOptions& opts) {
  std::vector<VerifyCheck> out;
  auto add = [&](std::string name, double value, double tol) { out.push_back({std::move(name), value, tol, value <= tol}); };

  const auto empty = HeterogeneousKernel(VoxelGrid{kUnitCube, 4}, opts.k, std::vector<cplx>(64, 0.0), 1);
  add("reciprocity.homogeneous", reciprocity_sweep(empty, IncidentQuadrature::center), opts.tol_homogeneous);

  const auto voxel = single_voxel_kernel(8, opts.k, cplx(0.3, 0.01), 1);
  add("reciprocity.single_voxel.order1", reciprocity_sweep(voxel, IncidentQuadrature::center), opts.tol_single_voxel);

  double previous = 0.0;
  bool decreasing = true;
  for (std::size_t i = 0; i < opts.refinement.size(); ++i) {
    const int n = opts.refinement[i];
    const auto kernel = smooth_contrast_kernel(n, opts.k, opts.amplitude, opts.smooth_order);
    const double matched = reciprocity_sweep(kernel, IncidentQuadrature::center);
    const double crossed = reciprocity_sweep(kernel, IncidentQuadrature::gauss2);
    add("reciprocity.smooth.matched." + std::to_string(n), matched, opts.tol_smooth);
    add("reciprocity.smooth.gauss." + std::to_string(n), crossed, opts.tol_smooth);
    if (i > 0 && !(crossed < previous)) decreasing = false;
    previous = crossed;
  }
  out.push_back({"reciprocity.smooth.refinement_decreasing", decreasing ? 0.0 : 1.0, 0.0, decreasing});

  for (int order = 0; order <= opts.symmetry_max_order; ++order) {
    const auto kernel = smooth_contrast_kernel(opts.symmetry_resolution, opts.k, opts.amplitude, order);
    add("symmetry.order" + std::to_string(order), symmetry_sweep(kernel), opts.tol_symmetry);
  }
  return out;
}

}  // namespace plasmo
