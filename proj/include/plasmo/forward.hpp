#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plasmo/greens.hpp"
#include "plasmo/measurement.hpp"
#include "plasmo/media.hpp"
#include "plasmo/resonance.hpp"
#include "plasmo/shapes.hpp"

namespace plasmo {

/// Reference-shape eigen-data selected by the scene (analytic ball or voxel oracle).
EigenMode scene_eigen_mode(const Scene& scene);

/// Frequency band of the scene: explicit endpoints where given, otherwise the
/// admissible band of the Lorentz model for the scene's eigenvalue.
ResonanceBand scene_band(const Scene& scene, double lambda);

/// Background medium at one frequency: plane wave and homogeneous dyadic
/// kernel, or the Born-series kernel over the domain.
class BackgroundMedium {
 public:
  BackgroundMedium(const Scene& scene, double omega);

  double wavenumber() const { return k_; }
  CVec3 field(const Vec3& x, const Vec3& theta, const Vec3& q) const;
  /// Same as `field` at several points, sharing one Born recursion.
  std::vector<CVec3> fields(const std::vector<Vec3>& xs, const Vec3& theta, const Vec3& q) const;
  CMat3 green(const Vec3& x, const Vec3& z) const;
  CMat3 green_farfield(const Vec3& xhat, const Vec3& z) const;

 private:
  double k_;
  std::optional<HeterogeneousKernel> kernel_;
};

struct PolarizationTensor {
  CMat3 value = CMat3::Zero();
  int particle_index = -1;
};

/// a^3 eps0 / Lambda(omega) * moment_gram. Throws `resonance-singularity` if |Lambda| < 1e-14.
PolarizationTensor polarization_tensor(cplx eps0_at_z, const EigenMode& mode, double a, double omega,
                                       const LorentzModel& lorentz);

struct ForwardOptions {
  bool raw = false;  // use omega^2 and Lambda(omega) instead of the frozen resonance prefactor
};

/// Per-particle Born coefficient omega_ref^2 eps0 (eps0 - Lambda(omega_ref)) / (lambda Lambda(omega)).
cplx born_coefficient(const Scene& scene, const EigenMode& mode, const Vec3& z, double omega, bool raw);

cplx born_contrast_backscatter(const Scene& scene, const EigenMode& mode, double omega, const ForwardOptions& opts = {});
CVec3 born_scattered_near(const Scene& scene, const EigenMode& mode, double omega, const Vec3& x);
/// Projection of the far-field contrast on xhat x q.
cplx born_farfield(const Scene& scene, const EigenMode& mode, double omega, const Vec3& xhat,
                   const ForwardOptions& opts = {});

struct FoldySystem {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
  Eigen::VectorXcd solution;        // stacked Q_j
  std::vector<CMat3> tensors;       // C_j
  std::vector<cplx> contrast;       // eps0(z_j) - eps_p(omega)
  std::vector<Vec3> centers;
  double omega = 0.0;
  bool dominance_ok = true;

  std::size_t size() const { return centers.size(); }
  CVec3 moment(std::size_t j) const { return tensors[j] * solution.segment<3>(3 * static_cast<long>(j)); }
};

struct DominanceReport {
  std::vector<double> row_sums;
  bool passed = true;
};

DominanceReport check_dominance(const Scene& scene, const EigenMode& mode, double omega);

/// Dense LU solve of (I + omega^2 mu M) Q = V. Throws `dominance-violation`
/// unless the coupling is diagonally dominant or `force` is set, and
/// `singular-matrix` when the LU pivots collapse.
FoldySystem foldy_solve(const Scene& scene, const EigenMode& mode, double omega, bool force = false);
CVec3 foldy_scattered(const FoldySystem& system, const Scene& scene, const Vec3& x);
cplx foldy_backscatter(const FoldySystem& system, const Scene& scene);

struct SimulateOptions {
  ScatteringModel model = ScatteringModel::born;
  bool raw = false;
  double noise = 0.0;  // relative amplitude of additive complex Gaussian noise
  std::uint64_t seed = 1;
  bool force = false;  // Foldy: solve even without diagonal dominance
};

/// Sequential-injection experiment: contrasts for ell = 0..N over the scene band.
MeasurementSeries simulate(const Scene& scene, const SimulateOptions& opts = {});

SceneMeta scene_meta(const Scene& scene, const EigenMode& mode);

}  // namespace plasmo
