#include "plasmo/forward.hpp"

#include <cmath>
#include <random>

namespace plasmo {

EigenMode scene_eigen_mode(const Scene& scene) {
  if (scene.shape == ShapeTag::unit_ball) return unit_ball_eigen_data(scene.mode_index);
  auto modes = magnetization_spectrum(voxelize(scene.voxel), scene.mode_index);
  return modes.at(static_cast<std::size_t>(scene.mode_index - 1));
}

ResonanceBand scene_band(const Scene& scene, double lambda) {
  ResonanceBand band = resonance_band(scene.lorentz, lambda, scene.band.n_samples);
  if (scene.band.omega_min) band.omega_min = *scene.band.omega_min;
  if (scene.band.omega_max) band.omega_max = *scene.band.omega_max;
  if (!(band.omega_min > 0.0 && band.omega_max > band.omega_min)) {
    fail(ErrorCode::config, "invalid-band", "band must satisfy 0 < omega_min < omega_max");
  }
  return band;
}

BackgroundMedium::BackgroundMedium(const Scene& scene, double omega) : k_(background_wavenumber(scene.background, omega)) {
  if (scene.background_mode == BackgroundMode::born) {
    kernel_.emplace(make_background_kernel(scene.background, omega, scene.born_resolution, scene.born_order));
  }
}

CVec3 BackgroundMedium::field(const Vec3& x, const Vec3& theta, const Vec3& q) const {
  return kernel_ ? kernel_->field(x, theta, q) : incident_field(k_, x, theta, q);
}

std::vector<CVec3> BackgroundMedium::fields(const std::vector<Vec3>& xs, const Vec3& theta, const Vec3& q) const {
  std::vector<CVec3> out;
  out.reserve(xs.size());
  if (!kernel_) {
    for (const auto& x : xs) out.push_back(incident_field(k_, x, theta, q));
    return out;
  }
  const auto& active = kernel_->active();
  std::vector<CVec3> samples(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) samples[a] = incident_field(k_, kernel_->grid().center(active[a]), theta, q);
  const auto U = kernel_->voxel_field(samples);
  for (const auto& x : xs) out.push_back(kernel_->field_from(x, incident_field(k_, x, theta, q), U));
  return out;
}

CMat3 BackgroundMedium::green(const Vec3& x, const Vec3& z) const {
  return kernel_ ? kernel_->green(x, z) : dyadic_green(k_, x, z);
}

CMat3 BackgroundMedium::green_farfield(const Vec3& xhat, const Vec3& z) const {
  return kernel_ ? kernel_->green_farfield(xhat, z) : dyadic_farfield(k_, xhat, z);
}

namespace {

cplx checked_dispersion(const Dispersion& d, double omega) {
  const cplx value = dispersion_value(d, omega);
  if (std::abs(value) < 1e-14) {
    fail(ErrorCode::numerical, "resonance-singularity", "dispersion function vanishes at omega = " + std::to_string(omega));
  }
  return value;
}

Dispersion particle_dispersion(const Scene& scene, const EigenMode& mode, const Vec3& z) {
  return Dispersion{eval_background(scene.background, z), mode.lambda, scene.lorentz};
}

void require_far_from_particles(const Scene& scene, const Vec3& x) {
  for (const auto& z : scene.particles) {
    if ((x - z).norm() < 10.0 * scene.a) {
      fail(ErrorCode::validation, "too-close-to-particle", "observation point within 10a of a particle center");
    }
  }
}

}  // namespace

PolarizationTensor polarization_tensor(cplx eps0_at_z, const EigenMode& mode, double a, double omega,
                                       const LorentzModel& lorentz) {
  const cplx lam = checked_dispersion(Dispersion{eps0_at_z, mode.lambda, lorentz}, omega);
  PolarizationTensor out;
  out.value = (a * a * a * eps0_at_z / lam) * mode.moment_gram.cast<cplx>();
  return out;
}

cplx born_coefficient(const Scene& scene, const EigenMode& mode, const Vec3& z, double omega, bool raw) {
  const Dispersion d = particle_dispersion(scene, mode, z);
  const cplx lam = checked_dispersion(d, omega);
  const double w_ref = raw ? omega : plasmonic_resonance(d);
  const cplx lam_ref = raw ? lam : dispersion_value(d, w_ref);
  return w_ref * w_ref * d.eps0 * (d.eps0 - lam_ref) / (mode.lambda * lam);
}

cplx born_contrast_backscatter(const Scene& scene, const EigenMode& mode, double omega, const ForwardOptions& opts) {
  if (scene.particles.empty()) return 0.0;
  const BackgroundMedium medium(scene, omega);
  const auto V = medium.fields(scene.particles, scene.incidence.theta, scene.incidence.q);
  const CMat3 gram = mode.moment_gram.cast<cplx>();
  cplx sum = 0.0;
  for (std::size_t j = 0; j < scene.particles.size(); ++j) {
    sum += born_coefficient(scene, mode, scene.particles[j], omega, opts.raw) * bilinear(V[j], gram * V[j]);
  }
  const double a3 = scene.a * scene.a * scene.a;
  return -(scene.background.mu * a3 / (4.0 * pi)) * sum;
}

CVec3 born_scattered_near(const Scene& scene, const EigenMode& mode, double omega, const Vec3& x) {
  if (scene.particles.empty()) return CVec3::Zero();
  require_far_from_particles(scene, x);
  const BackgroundMedium medium(scene, omega);
  const auto V = medium.fields(scene.particles, scene.incidence.theta, scene.incidence.q);
  const CMat3 gram = mode.moment_gram.cast<cplx>();
  CVec3 sum = CVec3::Zero();
  for (std::size_t j = 0; j < scene.particles.size(); ++j) {
    const Dispersion d = particle_dispersion(scene, mode, scene.particles[j]);
    const cplx lam = checked_dispersion(d, omega);
    const cplx coef = d.eps0 * (d.eps0 - lam) / (mode.lambda * lam);
    sum += coef * (medium.green(x, scene.particles[j]) * (gram * V[j]));
  }
  const double a3 = scene.a * scene.a * scene.a;
  return -(scene.background.mu * a3 * omega * omega) * sum;
}

cplx born_farfield(const Scene& scene, const EigenMode& mode, double omega, const Vec3& xhat, const ForwardOptions& opts) {
  if (scene.particles.empty()) return 0.0;
  const BackgroundMedium medium(scene, omega);
  const auto Vin = medium.fields(scene.particles, scene.incidence.theta, scene.incidence.q);
  const auto Vout = medium.fields(scene.particles, -xhat, scene.incidence.q);
  const CMat3 gram = mode.moment_gram.cast<cplx>();
  cplx sum = 0.0;
  for (std::size_t j = 0; j < scene.particles.size(); ++j) {
    sum += born_coefficient(scene, mode, scene.particles[j], omega, opts.raw) * bilinear(Vin[j], gram * Vout[j]);
  }
  const double a3 = scene.a * scene.a * scene.a;
  return (scene.background.mu * a3 / (4.0 * pi)) * sum;
}

// ---------------------------------------------------------------------------

namespace {

double operator_norm(const CMat3& m) {
  return Eigen::JacobiSVD<CMat3>(m).singularValues()[0];
}

struct Coupling {
  std::vector<CMat3> tensors;
  std::vector<cplx> contrast;
};

Coupling particle_coupling(const Scene& scene, const EigenMode& mode, double omega) {
  Coupling c;
  const cplx eps_p = eval_permittivity(scene.lorentz, omega);
  for (const auto& z : scene.particles) {
    const cplx eps0 = eval_background(scene.background, z);
    c.tensors.push_back(polarization_tensor(eps0, mode, scene.a, omega, scene.lorentz).value);
    c.contrast.push_back(eps0 - eps_p);
  }
  return c;
}

DominanceReport dominance_from(const Scene& scene, const BackgroundMedium& medium, const Coupling& c, double omega) {
  DominanceReport rep;
  const double w2mu = omega * omega * scene.background.mu;
  const std::size_t n = scene.particles.size();
  for (std::size_t m = 0; m < n; ++m) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == m) continue;
      row += operator_norm(medium.green(scene.particles[m], scene.particles[j]) * (c.contrast[j] * c.tensors[j]));
    }
    row *= w2mu;
    rep.row_sums.push_back(row);
    if (!(row < 1.0)) rep.passed = false;
  }
  return rep;
}

}  // namespace

DominanceReport check_dominance(const Scene& scene, const EigenMode& mode, double omega) {
  const BackgroundMedium medium(scene, omega);
  return dominance_from(scene, medium, particle_coupling(scene, mode, omega), omega);
}

FoldySystem foldy_solve(const Scene& scene, const EigenMode& mode, double omega, bool force) {
  const BackgroundMedium medium(scene, omega);
  const Coupling c = particle_coupling(scene, mode, omega);
  const DominanceReport dom = dominance_from(scene, medium, c, omega);
  if (!dom.passed && !force) {
    fail(ErrorCode::validation, "dominance-violation", "Foldy matrix is not block diagonally dominant at this frequency");
  }

  FoldySystem sys;
  sys.omega = omega;
  sys.centers = scene.particles;
  sys.tensors = c.tensors;
  sys.contrast = c.contrast;
  sys.dominance_ok = dom.passed;
  const long n = static_cast<long>(scene.particles.size());
  const double w2mu = omega * omega * scene.background.mu;
  sys.matrix = Eigen::MatrixXcd::Identity(3 * n, 3 * n);
  for (long m = 0; m < n; ++m) {
    for (long j = 0; j < n; ++j) {
      if (j == m) continue;
      const auto sj = static_cast<std::size_t>(j);
      sys.matrix.block<3, 3>(3 * m, 3 * j) =
          w2mu * medium.green(scene.particles[static_cast<std::size_t>(m)], scene.particles[sj]) * (c.contrast[sj] * c.tensors[sj]);
    }
  }
  const auto V = medium.fields(scene.particles, scene.incidence.theta, scene.incidence.q);
  sys.rhs.resize(3 * n);
  for (long m = 0; m < n; ++m) sys.rhs.segment<3>(3 * m) = V[static_cast<std::size_t>(m)];
  if (n == 0) {
    sys.solution = sys.rhs;
    return sys;
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
  const Eigen::MatrixXcd& packed = lu.matrixLU();
  const double pivot_min = packed.diagonal().cwiseAbs().minCoeff();
  if (!(pivot_min > 1e-14 * packed.diagonal().cwiseAbs().maxCoeff())) {
    fail(ErrorCode::numerical, "singular-matrix", "Foldy matrix is numerically singular");
  }
  sys.solution = lu.solve(sys.rhs);
  return sys;
}

CVec3 foldy_scattered(const FoldySystem& system, const Scene& scene, const Vec3& x) {
  require_far_from_particles(scene, x);
  const BackgroundMedium medium(scene, system.omega);
  CVec3 sum = CVec3::Zero();
  for (std::size_t j = 0; j < system.size(); ++j) {
    sum += system.contrast[j] * (medium.green(x, system.centers[j]) * system.moment(j));
  }
  return -(system.omega * system.omega * scene.background.mu) * sum;
}

cplx foldy_backscatter(const FoldySystem& system, const Scene& scene) {
  const BackgroundMedium medium(scene, system.omega);
  const Vec3& theta = scene.incidence.theta;
  const CVec3 pol = to_complex(theta.cross(scene.incidence.q));
  cplx sum = 0.0;
  for (std::size_t j = 0; j < system.size(); ++j) {
    sum += system.contrast[j] * bilinear(medium.green_farfield(-theta, system.centers[j]) * system.moment(j), pol);
  }
  return -(system.omega * system.omega * scene.background.mu) * sum;
}

// ---------------------------------------------------------------------------

SceneMeta scene_meta(const Scene& scene, const EigenMode& mode) {
  SceneMeta meta;
  meta.a = scene.a;
  meta.mu = scene.background.mu;
  meta.lambda = mode.lambda;
  meta.n0 = scene.mode_index;
  meta.theta = scene.incidence.theta;
  meta.q = scene.incidence.q;
  return meta;
}

namespace {

std::string first_failure(const ValidationReport& report) {
  for (const auto& c : report.checks) {
    if (!c.passed && c.hard) return c.name + " (" + c.detail + ")";
  }
  return "";
}

}  // namespace

MeasurementSeries simulate(const Scene& scene, const SimulateOptions& opts) {
  const ValidationReport report = validate_scene(scene, opts.model);
  if (!report.ok()) fail(ErrorCode::validation, "invalid-scene", "scene fails " + first_failure(report));

  const EigenMode mode = scene_eigen_mode(scene);
  const ResonanceBand band = scene_band(scene, mode.lambda);
  MeasurementSeries series;
  series.meta = scene_meta(scene, mode);
  series.omegas = band.samples();
  const std::size_t count = scene.particles.size();
  const std::size_t nw = series.omegas.size();
  series.contrasts.assign(count + 1, std::vector<cplx>(nw, 0.0));

  const double a3 = scene.a * scene.a * scene.a;
  const CMat3 gram = mode.moment_gram.cast<cplx>();
  for (std::size_t w = 0; w < nw; ++w) {
    const double omega = series.omegas[w];
    if (opts.model == ScatteringModel::born) {
      const BackgroundMedium medium(scene, omega);
      const auto V = medium.fields(scene.particles, scene.incidence.theta, scene.incidence.q);
      cplx running = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        const cplx term = born_coefficient(scene, mode, scene.particles[j], omega, opts.raw) * bilinear(V[j], gram * V[j]);
        running += -(scene.background.mu * a3 / (4.0 * pi)) * term;
        series.contrasts[j + 1][w] = running;
      }
    } else {
      Scene partial = scene;
      for (std::size_t ell = 1; ell <= count; ++ell) {
        partial.particles.assign(scene.particles.begin(), scene.particles.begin() + static_cast<long>(ell));
        const FoldySystem sys = foldy_solve(partial, mode, omega, opts.force);
        series.contrasts[ell][w] = foldy_backscatter(sys, partial);
      }
    }
  }

  if (opts.noise > 0.0) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t ell = 1; ell <= count; ++ell) {
      double peak = 0.0;
      for (const auto& v : series.contrasts[ell]) peak = std::max(peak, std::abs(v));
      const double scale = opts.noise * peak / std::sqrt(2.0);
      for (auto& v : series.contrasts[ell]) {
        const double re = normal(rng);
        const double im = normal(rng);
        v += scale * cplx(re, im);
      }
    }
  }
  return series;
}

}  // namespace plasmo
