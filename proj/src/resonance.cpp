#include "plasmo/resonance.hpp"

#include <cmath>

namespace plasmo {

cplx dispersion_value(const Dispersion& d, double omega) {
  return d.eps0 - d.lambda * (d.eps0 - eval_permittivity(d.lorentz, omega));
}

namespace {

// Coupling term omega_p^2 lambda eps_inf / (Re eps0 (1 - lambda) + lambda eps_inf).
double coupling(const Dispersion& d) {
  const auto& L = d.lorentz;
  const double denom = d.eps0.real() * (1.0 - d.lambda) + d.lambda * L.eps_inf;
  const double scale = std::abs(d.eps0.real()) * (1.0 - d.lambda) + d.lambda * std::abs(L.eps_inf);
  if (std::abs(denom) <= 1e-14 * scale) {
    fail(ErrorCode::numerical, "degenerate-denominator", "Re(eps0)(1 - lambda) + lambda * eps_inf vanishes");
  }
  return L.omega_p * L.omega_p * d.lambda * L.eps_inf / denom;
}

}  // namespace

double resonance_discriminant(const Dispersion& d) {
  const double A = coupling(d);
  const double g2 = d.lorentz.gamma * d.lorentz.gamma;
  const double w02 = d.lorentz.omega_0 * d.lorentz.omega_0;
  return A * A - g2 * (4.0 * w02 - g2 + 2.0 * A);
}

double plasmonic_resonance(const Dispersion& d) {
  const double A = coupling(d);
  const double delta = resonance_discriminant(d);
  if (delta < 0.0) {
    fail(ErrorCode::numerical, "overdamped", "damping too large for a real resonance (negative discriminant)");
  }
  const double g2 = d.lorentz.gamma * d.lorentz.gamma;
  const double w02 = d.lorentz.omega_0 * d.lorentz.omega_0;
  const double w2 = 0.5 * (2.0 * w02 - g2 + A + std::sqrt(delta));
  if (!(w2 > 0.0)) {
    fail(ErrorCode::numerical, "overdamped", "closed-form resonance is not a positive frequency");
  }
  return std::sqrt(w2);
}

std::vector<double> ResonanceBand::samples() const {
  std::vector<double> out(static_cast<std::size_t>(n_samples));
  const double span = omega_max - omega_min;
  for (int i = 0; i < n_samples; ++i) {
    out[static_cast<std::size_t>(i)] = omega_min + span * (i + 1) / (n_samples + 1);
  }
  return out;
}

ResonanceBand resonance_band(const LorentzModel& lorentz, double lambda, int n_samples) {
  if (!(lambda > 0.0 && lambda < 1.0)) fail(ErrorCode::config, "invalid-lambda", "eigenvalue must lie in (0, 1)");
  if (!(lorentz.omega_p > 0.0)) fail(ErrorCode::config, "invalid-lorentz", "plasma frequency must be positive");
  if (n_samples < 2) fail(ErrorCode::config, "invalid-band", "band needs at least 2 samples");
  ResonanceBand band;
  band.omega_min = lorentz.omega_0;
  band.omega_max = std::sqrt(lorentz.omega_0 * lorentz.omega_0 + lorentz.omega_p * lorentz.omega_p / lambda);
  band.n_samples = n_samples;
  return band;
}

cplx recover_permittivity(double omega_hat, double lambda, const LorentzModel& lorentz, bool real_only) {
  if (lambda == 1.0) fail(ErrorCode::numerical, "lambda-one", "recovery divides by lambda - 1");
  cplx eps_p = eval_permittivity(lorentz, omega_hat);
  if (real_only) eps_p = eps_p.real();
  return eps_p * lambda / (lambda - 1.0);
}

}  // namespace plasmo
