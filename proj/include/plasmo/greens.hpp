#pragma once

#include <memory>
#include <vector>

#include "plasmo/media.hpp"
#include "plasmo/types.hpp"

namespace plasmo {

/// e^{ik|x-y|} / (4 pi |x-y|); k = 0 gives the static kernel.
cplx scalar_green(double k, const Vec3& x, const Vec3& y);

/// Homogeneous dyadic kernel (1/k^2) grad grad Phi_k + Phi_k I.
CMat3 dyadic_green(double k, const Vec3& x, const Vec3& y);

/// Far-field pattern of the dyadic kernel, (e^{-ik xhat.y} / 4 pi)(I - xhat xhat^T).
CMat3 dyadic_farfield(double k, const Vec3& xhat, const Vec3& y);

/// Plane wave (theta x q) e^{ik x.theta}.
CVec3 incident_field(double k, const Vec3& x, const Vec3& theta, const Vec3& q);

/// k = omega * sqrt(eps_inf_bg * mu), the wavenumber outside the domain.
double background_wavenumber(const BackgroundField& field, double omega);

/// Regular voxel grid over a box, `n` cells per axis, x index fastest.
struct VoxelGrid {
  Box box;
  int n = 8;

  Vec3 spacing() const { return box.extent() / n; }
  double voxel_volume() const { return spacing().prod(); }
  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  Vec3 center(std::size_t flat) const;
  /// Index of the voxel containing x, or -1 outside the box.
  long locate(const Vec3& x) const;
};

struct BornDiagnostics {
  std::vector<double> increment_norms;  // size of each added Born term
  bool diverging = false;               // some term grew compared with the previous one
};

/// Heterogeneous kernel G_k approximated by a truncated Born series on a
/// voxel grid. `contrast[v]` holds k^2(y_v) - k^2; voxels with zero contrast
/// are skipped. The self cell integrates the dyadic kernel over the
/// equal-volume sphere.
class HeterogeneousKernel {
 public:
  HeterogeneousKernel(VoxelGrid grid, double k, std::vector<cplx> contrast, int born_order);

  double wavenumber() const { return k_; }
  int born_order() const { return order_; }
  const VoxelGrid& grid() const { return grid_; }
  const std::vector<cplx>& contrast() const { return contrast_; }
  cplx self_term() const { return self_; }

  /// Quadrature weight matrix A(x, v): vol * Pi(x, y_v), or the self term when x lies in v.
  CMat3 weight(const Vec3& x, std::size_t v) const;

  CMat3 green(const Vec3& x, const Vec3& z, BornDiagnostics* diag = nullptr) const;
  CMat3 green_farfield(const Vec3& xhat, const Vec3& z, BornDiagnostics* diag = nullptr) const;

  /// Background total field V = V_inc + V_s.
  CVec3 field(const Vec3& x, const Vec3& theta, const Vec3& q, BornDiagnostics* diag = nullptr) const;
  /// Born iterate at every active voxel, seeded with the given incident
  /// values (one per active voxel). `field_from` finishes the series at x.
  std::vector<CVec3> voxel_field(const std::vector<CVec3>& incident_samples, BornDiagnostics* diag = nullptr) const;
  CVec3 field_from(const Vec3& x, const CVec3& incident_at_x, const std::vector<CVec3>& voxel_field) const;

  const std::vector<std::size_t>& active() const { return active_; }

 private:
  std::vector<CMat3> iterate_source(const Vec3& z, BornDiagnostics* diag) const;
  const CMat3& pair(std::size_t v, std::size_t w) const;

  VoxelGrid grid_;
  double k_;
  std::vector<cplx> contrast_;
  int order_;
  std::vector<std::size_t> active_;
  std::vector<CMat3> table_;  // T over index offsets, (2n-1)^3 entries
  cplx self_;
};

/// Kernel for a background field at frequency omega: contrast
/// omega^2 mu (eps0(y_v) - eps_inf_bg) on `resolution`^3 voxels of the domain.
HeterogeneousKernel make_background_kernel(const BackgroundField& field, double omega, int resolution, int born_order);

CMat3 heterogeneous_green(const HeterogeneousKernel& kernel, const Vec3& x, const Vec3& z, BornDiagnostics* diag = nullptr);
CVec3 background_field(const HeterogeneousKernel& kernel, const Vec3& x, const Vec3& theta, const Vec3& q);

struct ResidualReport {
  double residual = 0.0;
  CVec3 lhs = CVec3::Zero();
  CVec3 rhs = CVec3::Zero();
};

/// How the right-hand side of the reciprocity check samples the incident
/// wave inside each voxel: at the center (the same rule the Green's series
/// uses) or averaged over a 2x2x2 Gauss rule.
enum class IncidentQuadrature { center, gauss2 };

/// (G^inf)^T(xhat, z)(xhat x q) against -(1/4pi) V(z, -xhat, q).
ResidualReport verify_reciprocity(const HeterogeneousKernel& kernel, const Vec3& xhat, const Vec3& z, const Vec3& q,
                                  IncidentQuadrature quad = IncidentQuadrature::center);

/// max |G(x, y) - G(y, x)^T| over entries.
double verify_symmetry(const HeterogeneousKernel& kernel, const Vec3& x, const Vec3& y);

}  // namespace plasmo
