#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plasmo/forward.hpp"
#include "support.hpp"

using namespace plasmo;
using plasmo::testing::rel_diff;
using plasmo::testing::throws_tag;

namespace {

Scene base_scene(std::vector<Vec3> particles, double gamma = 1e-3) {
  Scene s;
  s.background.omega_domain = Box{Vec3::Constant(-2.5), Vec3::Constant(2.5)};
  s.background.eps0 = ConstantPermittivity{cplx(2.0, 0.0)};
  s.lorentz = LorentzModel{1.0, 1.0, 1.0, gamma};
  s.a = 0.01;
  s.t = 0.5;
  s.s = 0.5;
  s.h = 0.5;
  s.band.n_samples = 201;
  s.particles = std::move(particles);
  return s;
}

std::vector<Vec3> line(int count, double spacing) {
  std::vector<Vec3> out;
  for (int i = 0; i < count; ++i) out.emplace_back(spacing * (i - 0.5 * (count - 1)), 0.1, 0.0);
  return out;
}

const EigenMode kBall = unit_ball_eigen_data(1);

// Lambda = eps0 - (1/3)(eps0 - eps_p), written out independently.
cplx lambda_third(cplx eps0, cplx eps_p) { return (2.0 * eps0 + eps_p) / 3.0; }

}  // namespace

TEST(Polarization, ClausiusMossottiScaling) {
  const LorentzModel lorentz{1.0, 1.0, 1.0, 0.0};
  const double omega = 1.5;
  const cplx eps_p = eval_permittivity(lorentz, omega);
  const auto t = polarization_tensor(cplx(2.0), kBall, 0.01, omega, lorentz);
  const cplx expected = 4.0 * pi * 1e-6 * 2.0 / (4.0 + eps_p);
  EXPECT_LT(rel_diff(t.value(0, 0), expected), 1e-13);
  EXPECT_LT(std::abs(t.value(0, 1)), 1e-30);

  const auto doubled = polarization_tensor(cplx(2.0), kBall, 0.02, omega, lorentz);
  EXPECT_LT(rel_diff(doubled.value(1, 1), 8.0 * t.value(1, 1)), 1e-14);
}

TEST(Polarization, NoContrastGivesVolumeTensor) {
  const LorentzModel flat{2.0, 0.0, 1.0, 0.0};  // eps_p == 2 == eps0
  const auto t = polarization_tensor(cplx(2.0), kBall, 0.1, 1.3, flat);
  const Mat3 expected = 1e-3 * (4.0 * pi / 3.0) * Mat3::Identity();
  EXPECT_LT((t.value - expected.cast<cplx>()).norm(), 1e-17);
}

TEST(Polarization, SingularAtUndampedResonance) {
  EXPECT_TRUE(throws_tag([] { polarization_tensor(cplx(2.0), kBall, 0.01, std::sqrt(1.2), LorentzModel{1.0, 1.0, 1.0, 0.0}); },
                         "resonance-singularity"));
}

TEST(BornIdentity, ClausiusMossottiAtRandomPairs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const cplx eps0(2.0 + 1.5 * u(rng), 0.5 * u(rng));
    const cplx eps_p(-3.0 + 2.0 * u(rng), 0.3 * u(rng));
    Dispersion d{eps0, 1.0 / 3.0, LorentzModel{}};
    const cplx lam = lambda_third(eps0, eps_p);
    const cplx lhs = eps0 * (eps0 - lam) / (d.lambda * lam) * (4.0 * pi / 3.0);
    const cplx rhs = 4.0 * pi * eps0 * (eps0 - eps_p) / (2.0 * eps0 + eps_p);
    EXPECT_LT(rel_diff(lhs, rhs), 1e-12);
  }
}

TEST(BornIdentity, CoefficientMatchesClausiusMossotti) {
  // Same identity through the library: raw coefficient against the polarizability form.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Scene s = base_scene({Vec3::Zero()});
    const cplx eps0(1.2 + 3.0 * u(rng), 1e-3 * u(rng));
    s.background.eps0 = ConstantPermittivity{eps0};
    s.lorentz = LorentzModel{0.5 + u(rng), 0.5 + 2.0 * u(rng), 0.5 + u(rng), 0.05 * u(rng)};
    const double omega = 0.2 + 2.0 * u(rng);
    const cplx eps_p = eval_permittivity(s.lorentz, omega);
    const cplx coef = born_coefficient(s, kBall, Vec3::Zero(), omega, true);
    const cplx expected = omega * omega * 3.0 * eps0 * (eps0 - eps_p) / (2.0 * eps0 + eps_p);
    EXPECT_LT(rel_diff(coef, expected), 1e-12);
  }
}

TEST(BornBackscatter, EmptySceneAndSingleParticleMagnitude) {
  EXPECT_EQ(born_contrast_backscatter(base_scene({}), kBall, 1.2), cplx(0.0));

  const Scene s = base_scene({Vec3(0.3, -0.2, 0.7)});
  const double omega = 1.13;
  const Dispersion d{cplx(2.0), 1.0 / 3.0, s.lorentz};
  const double wp = plasmonic_resonance(d);
  const double expected = (1e-6 / (4.0 * pi)) * wp * wp * std::abs(2.0 * (2.0 - dispersion_value(d, wp))) *
                          (4.0 * pi / 3.0) / (d.lambda * std::abs(dispersion_value(d, omega)));
  EXPECT_LT(rel_diff(std::abs(born_contrast_backscatter(s, kBall, omega)), expected), 1e-13);
}

TEST(BornBackscatter, SweepPeaksAtClosedFormResonance) {
  for (double gamma : {1e-2, 1e-3, 1e-4}) {
    Scene s = base_scene({Vec3(0.2, 0.0, 0.1)}, gamma);
    const auto band = resonance_band(s.lorentz, 1.0 / 3.0, 2001);
    double best = -1.0, arg = 0.0;
    for (double w : band.samples()) {
      const double v = std::abs(born_contrast_backscatter(s, kBall, w));
      if (v > best) {
        best = v;
        arg = w;
      }
    }
    const double wp = plasmonic_resonance(Dispersion{cplx(2.0), 1.0 / 3.0, s.lorentz});
    EXPECT_LE(std::abs(arg - wp), std::max(2.0 * band.step(), 5.0 * gamma)) << "gamma " << gamma;
  }
}

TEST(BornBackscatter, SuperpositionIsExact) {
  const std::vector<Vec3> a{Vec3(0.1, 0.2, 0.3), Vec3(-1.0, 0.5, 0.0)};
  const std::vector<Vec3> b{Vec3(1.2, -0.4, 0.9)};
  std::vector<Vec3> both = a;
  both.insert(both.end(), b.begin(), b.end());
  for (double w : {1.05, 1.0954, 1.4}) {
    const cplx sum = born_contrast_backscatter(base_scene(a), kBall, w) + born_contrast_backscatter(base_scene(b), kBall, w);
    EXPECT_LT(rel_diff(born_contrast_backscatter(base_scene(both), kBall, w), sum), 1e-14);
    const Vec3 x(3.0, 1.0, -2.0);
    const CVec3 near_sum = born_scattered_near(base_scene(a), kBall, w, x) + born_scattered_near(base_scene(b), kBall, w, x);
    EXPECT_LT((born_scattered_near(base_scene(both), kBall, w, x) - near_sum).norm() / near_sum.norm(), 1e-14);
  }
}

TEST(BornNear, EmptyAndTooClose) {
  EXPECT_EQ(born_scattered_near(base_scene({}), kBall, 1.1, Vec3(1, 0, 0)).norm(), 0.0);
  EXPECT_TRUE(throws_tag([] { born_scattered_near(base_scene({Vec3::Zero()}), kBall, 1.1, Vec3(0.05, 0, 0)); },
                         "too-close-to-particle"));
}

TEST(BornNear, ApproachesFarFieldSummand) {
  const Scene s = base_scene({Vec3(0.2, -0.1, 0.3)});
  const double omega = 1.2;
  const double k = omega;
  const Vec3 xhat = Vec3(1.0, 2.0, -0.5).normalized();
  const cplx far = born_farfield(s, kBall, omega, xhat, ForwardOptions{true});
  const CVec3 pol = to_complex(xhat.cross(s.incidence.q));
  double previous = 1.0;
  for (double r : {1e2, 1e3, 1e4}) {
    const CVec3 near = born_scattered_near(s, kBall, omega, r * xhat);
    const cplx projected = r * std::exp(-I_unit * k * r) * bilinear(near, pol);
    const double err = rel_diff(projected, far);
    EXPECT_LT(err, 5.0 / r);
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(BornFarField, BackscatterDirectionAndDirectOracle) {
  const Scene s = base_scene({Vec3(0.2, -0.1, 0.3), Vec3(-0.7, 0.4, 0.0)});
  const double omega = 1.1;
  const Vec3& theta = s.incidence.theta;
  // With the leading signs of both formulas the far field at -theta is the
  // negated back-scattered contrast: the projection vector (-theta) x q flips.
  EXPECT_LT(rel_diff(born_farfield(s, kBall, omega, -theta), -born_contrast_backscatter(s, kBall, omega)), 1e-14);

  // Forward direction: V(z, theta)^T g V(z, -theta) = -(4 pi/3), no phase left.
  cplx expected = 0.0;
  for (const auto& z : s.particles) expected += born_coefficient(s, kBall, z, omega, false) * (-(4.0 * pi / 3.0));
  expected *= 1e-6 / (4.0 * pi);
  EXPECT_LT(rel_diff(born_farfield(s, kBall, omega, theta), expected), 1e-14);

  // At the origin the pattern carries no phase in any direction.
  const Scene o = base_scene({Vec3::Zero()});
  const Vec3 xhat = Vec3(0.3, -0.4, 0.5).normalized();
  const Vec3 out = (-xhat).cross(o.incidence.q);
  const cplx at_origin = (1e-6 / (4.0 * pi)) * born_coefficient(o, kBall, Vec3::Zero(), omega, false) * (4.0 * pi / 3.0) *
                         theta.cross(o.incidence.q).dot(out);
  EXPECT_LT(rel_diff(born_farfield(o, kBall, omega, xhat), at_origin), 1e-14);
}

TEST(Foldy, SingleParticleMatchesBorn) {
  const Scene s = base_scene({Vec3(0.3, 0.1, -0.2)});
  for (double omega : {1.05, 1.0954, 1.3}) {
    const auto sys = foldy_solve(s, kBall, omega);
    const BackgroundMedium medium(s, omega);
    EXPECT_EQ((sys.solution - medium.field(s.particles[0], s.incidence.theta, s.incidence.q)).norm(), 0.0);
    const Vec3 x(2.0, -1.0, 0.5);
    const CVec3 born = born_scattered_near(s, kBall, omega, x);
    EXPECT_LT((foldy_scattered(sys, s, x) - born).norm() / born.norm(), 1e-12);
    EXPECT_LT(rel_diff(foldy_backscatter(sys, s), born_contrast_backscatter(s, kBall, omega, ForwardOptions{true})), 1e-12);
  }
}

TEST(Foldy, MatchesIndependentAssembly) {
  const Scene s = base_scene({Vec3(0.0, 0.0, 0.0), Vec3(0.04, 0.02, -0.01)});
  const double omega = 1.09;
  const double k = omega;
  const cplx eps0 = 2.0;
  const cplx eps_p = eval_permittivity(s.lorentz, omega);
  const cplx lam = lambda_third(eps0, eps_p);
  const cplx c_scalar = 1e-6 * eps0 / lam * (4.0 * pi / 3.0);
  Eigen::Matrix<cplx, 6, 6> M = Eigen::Matrix<cplx, 6, 6>::Identity();
  M.block<3, 3>(0, 3) = omega * omega * (eps0 - eps_p) * c_scalar * dyadic_green(k, s.particles[0], s.particles[1]);
  M.block<3, 3>(3, 0) = omega * omega * (eps0 - eps_p) * c_scalar * dyadic_green(k, s.particles[1], s.particles[0]);
  Eigen::Matrix<cplx, 6, 1> rhs;
  rhs << incident_field(k, s.particles[0], s.incidence.theta, s.incidence.q),
      incident_field(k, s.particles[1], s.incidence.theta, s.incidence.q);
  const Eigen::Matrix<cplx, 6, 1> oracle = M.fullPivLu().solve(rhs);

  const auto sys = foldy_solve(s, kBall, omega, true);
  EXPECT_LT((sys.solution - oracle).norm() / oracle.norm(), 1e-12);
  EXPECT_GT((oracle - rhs).norm(), 1e-3);  // the coupling actually matters here
  EXPECT_EQ((sys.matrix.block<3, 3>(0, 0) - CMat3::Identity()).norm(), 0.0);
}

TEST(Foldy, CouplingFadesWithSeparation) {
  // Off resonance, so the first-order coupling term dominates.
  auto deviation = [](double d) {
    Scene s = base_scene({Vec3::Zero(), Vec3(d, 0.0, 0.0)});
    s.background.omega_domain = Box{Vec3::Constant(-1e4), Vec3::Constant(1e4)};
    const auto sys = foldy_solve(s, kBall, 1.6, true);
    return (sys.solution - sys.rhs).cwiseAbs().maxCoeff();
  };
  // Quasi-static zone: 1/d^3.
  EXPECT_NEAR(deviation(0.05) / deviation(0.1), 8.0, 0.5);
  // Radiation zone (k d >> 1): the kernel decays as 1/d.
  EXPECT_NEAR(deviation(1e3) / deviation(2e3), 2.0, 0.05);
  EXPECT_LT(deviation(1e4), 1e-9);
}

TEST(Foldy, FiveParticleLineApproachesBorn) {
  const double omega = 1.06;
  auto relative_gap = [&](double d) {
    const Scene s = base_scene(line(5, d));
    const auto sys = foldy_solve(s, kBall, omega, true);
    const cplx born = born_contrast_backscatter(s, kBall, omega, ForwardOptions{true});
    return std::abs(foldy_backscatter(sys, s) - born) / std::abs(born);
  };
  const double coarse = relative_gap(0.05), fine = relative_gap(0.1);
  EXPECT_GE(coarse / fine, 4.0) << coarse << " " << fine;
}

TEST(Foldy, NoContrastScattersNothing) {
  Scene s = base_scene({Vec3::Zero(), Vec3(0.5, 0.0, 0.0)});
  const double omega = 1.2;
  s.background.eps0 = ConstantPermittivity{eval_permittivity(s.lorentz, omega)};
  const auto sys = foldy_solve(s, kBall, omega, true);
  EXPECT_EQ(foldy_scattered(sys, s, Vec3(2.0, 2.0, 0.0)).norm(), 0.0);
}

TEST(Dominance, Cases) {
  const auto single = check_dominance(base_scene({Vec3::Zero()}), kBall, 1.1);
  EXPECT_TRUE(single.passed);
  EXPECT_EQ(single.row_sums.at(0), 0.0);

  const Scene close = base_scene({Vec3::Zero(), Vec3(0.025, 0.0, 0.0)});
  const double wp = plasmonic_resonance(Dispersion{cplx(2.0), 1.0 / 3.0, close.lorentz});
  EXPECT_FALSE(check_dominance(close, kBall, wp).passed);
  EXPECT_TRUE(throws_tag([&] { foldy_solve(close, kBall, wp); }, "dominance-violation"));

  const auto far = check_dominance(base_scene({Vec3::Zero(), Vec3(2.0, 0.0, 0.0)}), kBall, 1.9);
  EXPECT_TRUE(far.passed);
  for (double r : far.row_sums) EXPECT_LT(r, 1e-4);
}

TEST(Simulate, LevelsNoiseAndDeterminism) {
  Scene s = base_scene({Vec3(-1.0, 0.0, 0.0), Vec3(0.5, 0.5, 0.0)});
  const auto clean = simulate(s);
  ASSERT_EQ(clean.particle_count(), 2);
  for (const auto& v : clean.contrasts[0]) EXPECT_EQ(v, cplx(0.0));
  EXPECT_EQ(clean.omegas.size(), 201u);
  const auto again = simulate(s);
  EXPECT_EQ(clean.contrasts, again.contrasts);

  SimulateOptions noisy;
  noisy.noise = 0.01;
  noisy.seed = 5;
  const auto n1 = simulate(s, noisy), n2 = simulate(s, noisy);
  EXPECT_EQ(n1.contrasts, n2.contrasts);
  noisy.seed = 6;
  EXPECT_NE(simulate(s, noisy).contrasts, n1.contrasts);
  for (const auto& v : n1.contrasts[0]) EXPECT_EQ(v, cplx(0.0));

  s.t = s.s = s.h = 0.9;
  EXPECT_TRUE(throws_tag([&] { simulate(s); }, "invalid-scene"));
}

TEST(Simulate, FoldyWithOneParticleEqualsRawBorn) {
  const Scene s = base_scene({Vec3(0.4, 0.0, -0.3)});
  SimulateOptions born;
  born.raw = true;
  SimulateOptions foldy;
  foldy.model = ScatteringModel::foldy;
  const auto b = simulate(s, born), f = simulate(s, foldy);
  for (std::size_t w = 0; w < b.omegas.size(); ++w) EXPECT_LT(rel_diff(f.contrasts[1][w], b.contrasts[1][w]), 1e-12);
}

TEST(Simulate, BornBackgroundWithoutContrastIsHomogeneous) {
  Scene s = base_scene({Vec3(0.4, 0.0, -0.3)});
  s.background.eps0 = ConstantPermittivity{cplx(1.0)};  // equals eps_inf_bg
  Scene het = s;
  het.background_mode = BackgroundMode::born;
  het.born_order = 2;
  for (double w : {1.1, 1.3}) {
    EXPECT_LT(rel_diff(born_contrast_backscatter(het, kBall, w), born_contrast_backscatter(s, kBall, w)), 1e-15);
  }
}

TEST(Simulate, HeterogeneousBackgroundFoldyMatchesBorn) {
  Scene s = base_scene({Vec3(0.4, 0.2, -0.3)});
  s.background.eps0 = PolynomialPermittivity{{{cplx(1.5), 0, 0, 0}, {cplx(0.1), 1, 0, 0}}};
  s.background_mode = BackgroundMode::born;
  s.born_order = 2;
  s.born_resolution = 6;
  const double omega = 1.2;
  const auto sys = foldy_solve(s, kBall, omega);
  const cplx born = born_contrast_backscatter(s, kBall, omega, ForwardOptions{true});
  EXPECT_LT(rel_diff(foldy_backscatter(sys, s), born), 1e-12);
}
