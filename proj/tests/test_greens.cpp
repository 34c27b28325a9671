#include <gtest/gtest.h>

#include <cmath>

#include "plasmo/greens.hpp"
#include "plasmo/verify.hpp"
#include "support.hpp"

using namespace plasmo;
using plasmo::testing::max_abs;
using plasmo::testing::throws_tag;

namespace {

const Box kCube{Vec3::Constant(-0.5), Vec3::Constant(0.5)};

// Second-order finite differences of the scalar kernel; independent of the
// closed-form dyadic.
CMat3 dyadic_by_differences(double k, const Vec3& x, const Vec3& y, double h) {
  CMat3 out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Vec3 ei = Vec3::Zero(), ej = Vec3::Zero();
      ei[i] = h;
      ej[j] = h;
      const cplx d2 = (scalar_green(k, x + ei + ej, y) - scalar_green(k, x + ei - ej, y) -
                       scalar_green(k, x - ei + ej, y) + scalar_green(k, x - ei - ej, y)) /
                      (4.0 * h * h);
      out(i, j) = d2 / (k * k) + (i == j ? scalar_green(k, x, y) : cplx(0.0));
    }
  }
  return out;
}

// Self cell: integral of the dyadic kernel over the equal-volume ball.
cplx sphere_self_term(double k, double vol) {
  const double R = std::cbrt(3.0 * vol / (4.0 * pi));
  const cplx ikR = I_unit * k * R;
  return 2.0 / (3.0 * k * k) * ((1.0 - ikR) * std::exp(ikR) - 1.0) - 1.0 / (3.0 * k * k);
}

// Dense Born series written out with explicit matrices over all active
// voxels, for comparison with the Toeplitz-table implementation.
CMat3 dense_born_green(const HeterogeneousKernel& kernel, const Vec3& x, const Vec3& z, int order) {
  const auto& grid = kernel.grid();
  const double k = kernel.wavenumber();
  const double vol = grid.voxel_volume();
  std::vector<std::size_t> act;
  for (std::size_t v = 0; v < grid.size(); ++v)
    if (kernel.contrast()[v] != cplx(0.0)) act.push_back(v);
  const long n = static_cast<long>(act.size());
  auto A = [&](const Vec3& p, std::size_t v) -> CMat3 {
    if (grid.locate(p) == static_cast<long>(v)) return sphere_self_term(k, vol) * CMat3::Identity();
    return vol * dyadic_green(k, p, grid.center(v));
  };
  Eigen::MatrixXcd T(3 * n, 3 * n);
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) T.block<3, 3>(3 * a, 3 * b) = A(grid.center(act[a]), act[b]) * kernel.contrast()[act[b]];
  Eigen::MatrixXcd F0(3 * n, 3);
  for (long a = 0; a < n; ++a) F0.block<3, 3>(3 * a, 0) = A(z, act[a]).transpose() / vol;
  Eigen::MatrixXcd F = F0;
  for (int m = 1; m < order; ++m) F = F0 + T * F;
  CMat3 g = dyadic_green(k, x, z);
  if (order == 0) return g;
  for (long a = 0; a < n; ++a) g += A(x, act[a]) * kernel.contrast()[act[a]] * F.block<3, 3>(3 * a, 0);
  return g;
}

}  // namespace

TEST(ScalarKernel, Examples) {
  EXPECT_NEAR(std::abs(scalar_green(0.0, Vec3(1, 0, 0), Vec3::Zero()) - 1.0 / (4.0 * pi)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(scalar_green(1.0, Vec3(0, pi, 0), Vec3::Zero()) + 1.0 / (4.0 * pi * pi)), 0.0, 1e-16);
  const cplx expected = cplx(std::cos(1.0), std::sin(1.0)) / (2.0 * pi);
  EXPECT_NEAR(std::abs(scalar_green(2.0, Vec3(0.3, 0.4, 0.0), Vec3::Zero()) - expected), 0.0, 1e-15);
  EXPECT_TRUE(throws_tag([] { scalar_green(1.0, Vec3::Zero(), Vec3::Zero()); }, "coincident-points"));
}

TEST(DyadicKernel, MatchesFiniteDifferences) {
  const double k = 1.3;
  const Vec3 x(0.3, -0.1, 0.2), y(-0.05, 0.1, 0.0);
  const CMat3 exact = dyadic_green(k, x, y);
  const CMat3 fd = dyadic_by_differences(k, x, y, 1e-4);
  EXPECT_LT(max_abs(exact - fd) / max_abs(exact), 1e-6);
}

TEST(DyadicKernel, SymmetryAndErrors) {
  const Vec3 x(0.3, 1.0, -2.0), y(0.7, 0.2, 0.1);
  const CMat3 g = dyadic_green(2.0, x, y);
  EXPECT_LT(max_abs(g - g.transpose()), 1e-16);
  EXPECT_LT(max_abs(g - dyadic_green(2.0, y, x)), 1e-16);
  EXPECT_TRUE(throws_tag([&] { dyadic_green(0.0, x, y); }, "zero-wavenumber"));
  EXPECT_TRUE(throws_tag([&] { dyadic_green(1.0, x, x); }, "coincident-points"));
}

TEST(DyadicKernel, RadiationZoneIsTransverse) {
  const double k = 1.0;
  double previous = 1.0;
  for (double r : {1e2, 1e3, 1e4}) {
    const Vec3 x(0.0, 0.0, r);
    const CMat3 g = dyadic_green(k, x, Vec3::Zero());
    const cplx phi = scalar_green(k, x, Vec3::Zero());
    Mat3 proj = Mat3::Identity();
    proj(2, 2) = 0.0;
    const double err = max_abs(g - phi * proj.cast<cplx>()) / std::abs(phi);
    EXPECT_LT(err, 2.5 / (k * r));  // leading correction is 2/(kr) on the zz entry
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(FarField, ProjectorAndAsymptotics) {
  const Vec3 xhat = Vec3(1.0, -2.0, 0.5).normalized();
  const CMat3 at_origin = dyadic_farfield(1.0, xhat, Vec3::Zero());
  const Mat3 proj = (Mat3::Identity() - xhat * xhat.transpose()) / (4.0 * pi);
  EXPECT_LT(max_abs(at_origin - proj.cast<cplx>()), 1e-16);

  const Vec3 y(0.2, 0.1, -0.3);
  const double k = 1.7;
  const CMat3 far = dyadic_farfield(k, xhat, y);
  EXPECT_LT((far * xhat.cast<cplx>()).norm(), 1e-15);
  double previous = 1.0;
  for (double r : {1e3, 2e3, 4e3}) {
    const CMat3 scaled = r * std::exp(-I_unit * k * r) * dyadic_green(k, r * xhat, y);
    const double err = max_abs(scaled - far);
    EXPECT_LT(err, 2.0 / r);
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(HeterogeneousKernel, ZeroContrastReducesToHomogeneous) {
  const VoxelGrid grid{kCube, 4};
  const Vec3 x(0.9, 0.1, 0.3), z(-0.2, 0.1, 0.05);
  for (int order : {0, 1, 3}) {
    HeterogeneousKernel kernel(grid, 1.2, std::vector<cplx>(grid.size(), 0.0), order);
    EXPECT_EQ(max_abs(kernel.green(x, z) - dyadic_green(1.2, x, z)), 0.0);
  }
  const auto busy = smooth_contrast_kernel(4, 1.2, 0.1, 0);
  EXPECT_EQ(max_abs(busy.green(x, z) - dyadic_green(1.2, x, z)), 0.0);
}

TEST(HeterogeneousKernel, SingleVoxelFirstOrderTerm) {
  const double k = 1.0;
  const cplx c(0.3, 0.01);
  const auto kernel = single_voxel_kernel(8, k, c, 1);
  const auto& grid = kernel.grid();
  const std::size_t v = kernel.active().at(0);
  const Vec3 yv = grid.center(v);
  const double vol = grid.voxel_volume();
  const Vec3 x(0.9, -0.7, 0.2), z(-0.6, 0.4, 0.8);
  const CMat3 expected = dyadic_green(k, x, z) + dyadic_green(k, x, yv) * c * dyadic_green(k, yv, z) * vol;
  EXPECT_LT(max_abs(kernel.green(x, z) - expected) / max_abs(expected), 1e-12);
  EXPECT_NEAR(std::abs(kernel.self_term() - sphere_self_term(k, vol)), 0.0, 1e-15);
}

TEST(HeterogeneousKernel, SingleVoxelIncidentCorrection) {
  const double k = 1.0;
  const cplx c(0.3, 0.01);
  const auto kernel = single_voxel_kernel(8, k, c, 1);
  const Vec3 theta(0.0, 0.0, 1.0), q(1.0, 0.0, 0.0);
  const Vec3 yv = kernel.grid().center(kernel.active().at(0));
  const Vec3 x(0.4, 0.9, -0.3);
  const CVec3 expected = incident_field(k, x, theta, q) +
                         kernel.grid().voxel_volume() * dyadic_green(k, x, yv) * c * incident_field(k, yv, theta, q);
  EXPECT_LT((kernel.field(x, theta, q) - expected).norm(), 1e-14);
}

TEST(HeterogeneousKernel, MatchesDenseBornSeries) {
  const auto kernel = smooth_contrast_kernel(4, 1.1, 0.3, 3);
  // The smooth bump is zero on a 4^3 grid's voxel centers near the corners,
  // so add contrast everywhere to exercise the full table.
  std::vector<cplx> contrast(kernel.grid().size());
  for (std::size_t v = 0; v < contrast.size(); ++v) contrast[v] = cplx(0.1 + 0.01 * (v % 7), 0.02);
  const HeterogeneousKernel full(kernel.grid(), 1.1, contrast, 3);
  for (const auto& [x, z] : std::vector<std::pair<Vec3, Vec3>>{{Vec3(0.9, 0.2, -0.1), Vec3(-0.8, 0.3, 0.6)},
                                                               {Vec3(0.1, -0.2, 0.3), Vec3(-0.3, 0.1, -0.1)}}) {
    const CMat3 ref = dense_born_green(full, x, z, 3);
    EXPECT_LT(max_abs(full.green(x, z) - ref) / max_abs(ref), 1e-12);
  }
}

TEST(HeterogeneousKernel, FlagsDivergentSeries) {
  BornDiagnostics calm, wild;
  smooth_contrast_kernel(8, 1.0, 0.1, 4).green(Vec3(1.0, 0.0, 0.0), Vec3::Zero(), &calm);
  smooth_contrast_kernel(8, 1.0, 400.0, 4).green(Vec3(1.0, 0.0, 0.0), Vec3::Zero(), &wild);
  EXPECT_FALSE(calm.diverging);
  EXPECT_TRUE(wild.diverging);
}

TEST(BackgroundField, PlaneWaveAtOrigin) {
  const VoxelGrid grid{kCube, 4};
  const HeterogeneousKernel kernel(grid, 1.0, std::vector<cplx>(grid.size(), 0.0), 2);
  const Vec3 theta = Vec3(1.0, 1.0, 0.0).normalized(), q(0.0, 0.0, 1.0);
  const CVec3 v = background_field(kernel, Vec3::Zero(), theta, q);
  EXPECT_LT((v - to_complex(theta.cross(q))).norm(), 1e-16);
}

TEST(Reciprocity, ThreeRegimes) {
  const VoxelGrid grid{kCube, 4};
  const HeterogeneousKernel empty(grid, 1.0, std::vector<cplx>(grid.size(), 0.0), 1);
  EXPECT_LE(reciprocity_sweep(empty, IncidentQuadrature::center), 1e-12);
  EXPECT_LE(reciprocity_sweep(single_voxel_kernel(8, 1.0, cplx(0.3, 0.01), 1), IncidentQuadrature::center), 1e-10);
  const auto smooth = smooth_contrast_kernel(8, 1.0, 0.1, 3);
  EXPECT_LE(reciprocity_sweep(smooth, IncidentQuadrature::center), 1e-3);
  EXPECT_LE(reciprocity_sweep(smooth, IncidentQuadrature::gauss2), 1e-3);
}

TEST(Reciprocity, ResidualShrinksUnderRefinement) {
  double previous = 1.0;
  for (int n : {4, 8, 16}) {
    const double r = reciprocity_sweep(smooth_contrast_kernel(n, 1.0, 0.1, 3), IncidentQuadrature::gauss2);
    EXPECT_LT(r, previous) << n;
    previous = r;
  }
}

TEST(Symmetry, TransposeSymmetricAtEveryOrder) {
  const VoxelGrid grid{kCube, 4};
  const HeterogeneousKernel empty(grid, 1.0, std::vector<cplx>(grid.size(), 0.0), 1);
  EXPECT_LE(symmetry_sweep(empty), 1e-14);
  EXPECT_LE(symmetry_sweep(single_voxel_kernel(8, 1.0, cplx(0.3, 0.01), 1)), 1e-12);
  for (int order = 0; order <= 3; ++order) EXPECT_LE(symmetry_sweep(smooth_contrast_kernel(8, 1.0, 0.1, order)), 1e-10);
}
