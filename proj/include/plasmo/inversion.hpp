#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plasmo/measurement.hpp"
#include "plasmo/media.hpp"
#include "plasmo/shapes.hpp"

namespace plasmo {

struct ImagingFunctional {
  int particle_index = 0;  // 1-based injection index
  std::vector<cplx> values;
};

/// J_j = -(4 pi lambda / (mu a^3)) (F_j - F_{j-1}) for j = 1..N. Throws
/// `missing-injection-level` when any level 0..N lacks a full row.
std::vector<ImagingFunctional> extract_functionals(const MeasurementSeries& meas);

struct PeakOptions {
  bool prefilter = false;       // moving median of |J| (window 5) before the search
  double min_contrast = 10.0;   // required max / median ratio
};

struct PeakEstimate {
  double omega_hat = 0.0;
  double window = 0.0;          // half-width of the confidence window (one grid step)
  std::size_t grid_index = 0;
  double peak_height = 0.0;     // |J| at the grid maximum
  bool boundary = false;        // maximum sits on the first or last sample
  bool refined = false;         // sub-grid quadratic refinement applied
};

/// Grid argmax of |J| refined by a three-point parabola through log|J|.
/// Throws `flat-signal` when max/median falls below the contrast threshold.
PeakEstimate peak_detect(const std::vector<double>& omegas, const std::vector<cplx>& values, const PeakOptions& opts = {});

std::vector<double> moving_median(const std::vector<double>& values, int window = 5);

struct PointRecovery {
  int index = 0;
  Vec3 z = Vec3::Zero();
  double omega_hat = 0.0;
  cplx eps0{0.0, 0.0};
  double peak_height = 0.0;
  double lambda_residual = 0.0;  // |Lambda(omega_hat)| for the real-part recovery
  std::string flag;              // empty when clear
  bool ok = false;
};

/// Peak detection followed by permittivity recovery for every particle. A
/// failure on one particle is recorded in its flag and the others continue.
std::vector<PointRecovery> recover_points(const MeasurementSeries& meas, const std::vector<ImagingFunctional>& functionals,
                                          const std::vector<Vec3>& centers, const LorentzModel& lorentz,
                                          const PeakOptions& opts = {});

enum class RbfBasis { linear, gaussian, thin_plate };

RbfBasis parse_basis(const std::string& tag);
std::string basis_name(RbfBasis basis);
double rbf_value(RbfBasis basis, double r, double sigma);

struct DrmOptions {
  RbfBasis basis = RbfBasis::thin_plate;
  std::uint64_t seed = 1;
  std::optional<double> sigma;    // gaussian width; default is the mean nearest-neighbour center spacing
  bool centers_at_nodes = false;  // classical interpolation instead of random collocation centers
};

struct DrmInterpolant {
  RbfBasis basis = RbfBasis::thin_plate;
  double sigma = 0.0;
  std::uint64_t seed = 1;
  Box domain;
  std::vector<Vec3> centers;
  std::vector<cplx> beta;
  double condition = 0.0;
};

/// Random collocation centers in the domain drawn from `seed`.
std::vector<Vec3> drm_centers(const Box& domain, std::size_t count, std::uint64_t seed);

/// Square collocation fit sum_k beta_k f_k(z_j) = value_j. Throws
/// `ill-conditioned` when the condition number exceeds 1e12.
DrmInterpolant drm_fit(const std::vector<Vec3>& nodes, const std::vector<cplx>& values, const Box& domain,
                       const DrmOptions& opts = {});

/// Same fit with caller-provided centers.
DrmInterpolant drm_fit_with_centers(const std::vector<Vec3>& nodes, const std::vector<cplx>& values, const Box& domain,
                                    std::vector<Vec3> centers, RbfBasis basis, std::optional<double> sigma = {},
                                    std::uint64_t seed = 0);

cplx drm_eval(const DrmInterpolant& interp, const Vec3& z);

struct GateEntry {
  int index = 0;
  double magnitude = 0.0;  // |V^T gram V|^{1/2}
  bool flagged = false;
};

std::vector<GateEntry> hypothesis_gate(const std::vector<CVec3>& fields, const Mat3& gram, double threshold = 1e-6);
std::vector<GateEntry> hypothesis_gate(const Scene& scene, const EigenMode& mode, double omega, double threshold = 1e-6);

}  // namespace plasmo
