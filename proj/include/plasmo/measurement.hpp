#pragma once

#include <vector>

#include "plasmo/types.hpp"

namespace plasmo {

/// Scene quantities the inversion needs alongside the raw contrasts.
struct SceneMeta {
  double a = 0.01;
  double mu = 1.0;
  double lambda = 1.0 / 3.0;
  int n0 = 1;
  Vec3 theta{0.0, 0.0, 1.0};
  Vec3 q{1.0, 0.0, 0.0};
};

/// Back-scattered contrast <(E^inf - V^inf)(-theta), theta x q> with the first
/// `ell` particles present, for ell = 0..N, on a common frequency grid.
struct MeasurementSeries {
  std::vector<double> omegas;
  std::vector<std::vector<cplx>> contrasts;  // [ell][omega index]
  SceneMeta meta;

  int particle_count() const { return static_cast<int>(contrasts.size()) - 1; }
};

}  // namespace plasmo
