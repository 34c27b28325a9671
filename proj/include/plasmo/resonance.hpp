#pragma once

#include <vector>

#include "plasmo/media.hpp"
#include "plasmo/types.hpp"

namespace plasmo {

/// Dispersion of one particle: Lambda(w) = eps0 - lambda * (eps0 - eps_p(w)).
struct Dispersion {
  cplx eps0{1.0, 0.0};
  double lambda = 1.0 / 3.0;
  LorentzModel lorentz;
};

cplx dispersion_value(const Dispersion& d, double omega);

/// Closed-form resonance, the larger real root of Re Lambda. Throws
/// `overdamped` when the discriminant is negative and `degenerate-denominator`
/// when Re(eps0)(1 - lambda) + lambda * eps_inf vanishes.
double plasmonic_resonance(const Dispersion& d);

/// Discriminant of the closed form; exposed so callers can pre-filter draws.
double resonance_discriminant(const Dispersion& d);

/// Open frequency band (omega_0, sqrt(omega_0^2 + omega_p^2 / lambda)).
struct ResonanceBand {
  double omega_min = 0.0;
  double omega_max = 0.0;
  int n_samples = 2;

  /// Interior uniform samples: the endpoints themselves are never returned.
  std::vector<double> samples() const;
  double step() const { return (omega_max - omega_min) / (n_samples + 1); }
};

ResonanceBand resonance_band(const LorentzModel& lorentz, double lambda, int n_samples);

/// eps_p(w) * lambda / (lambda - 1); with `real_only` the real part of eps_p is used.
cplx recover_permittivity(double omega_hat, double lambda, const LorentzModel& lorentz, bool real_only = false);

}  // namespace plasmo
