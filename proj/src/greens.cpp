#include "plasmo/greens.hpp"

#include <algorithm>
#include <cmath>

namespace plasmo {

cplx scalar_green(double k, const Vec3& x, const Vec3& y) {
  const double r = (x - y).norm();
  if (r == 0.0) fail(ErrorCode::numerical, "coincident-points", "Green's function evaluated at coincident points");
  return std::exp(I_unit * (k * r)) / (4.0 * pi * r);
}

CMat3 dyadic_green(double k, const Vec3& x, const Vec3& y) {
  if (!(k > 0.0)) fail(ErrorCode::numerical, "zero-wavenumber", "dyadic kernel needs k > 0");
  const Vec3 d = x - y;
  const double r = d.norm();
  if (r == 0.0) fail(ErrorCode::numerical, "coincident-points", "dyadic kernel evaluated at coincident points");
  const Vec3 u = d / r;
  const double kr = k * r;
  const cplx phi = std::exp(I_unit * kr) / (4.0 * pi * r);
  const cplx iso = 1.0 + I_unit / kr - 1.0 / (kr * kr);
  const cplx aniso = -1.0 - 3.0 * I_unit / kr + 3.0 / (kr * kr);
  CMat3 out = (aniso * (u * u.transpose())).cast<cplx>();
  out.diagonal().array() += iso;
  return phi * out;
}

CMat3 dyadic_farfield(double k, const Vec3& xhat, const Vec3& y) {
  const cplx phase = std::exp(-I_unit * (k * xhat.dot(y))) / (4.0 * pi);
  const Mat3 proj = Mat3::Identity() - xhat * xhat.transpose();
  return phase * proj.cast<cplx>();
}

CVec3 incident_field(double k, const Vec3& x, const Vec3& theta, const Vec3& q) {
  return std::exp(I_unit * (k * x.dot(theta))) * to_complex(theta.cross(q));
}

double background_wavenumber(const BackgroundField& field, double omega) {
  return omega * std::sqrt(field.eps_inf_bg * field.mu);
}

Vec3 VoxelGrid::center(std::size_t flat) const {
  const auto m = static_cast<std::size_t>(n);
  const Vec3 idx(static_cast<double>(flat % m), static_cast<double>((flat / m) % m), static_cast<double>(flat / (m * m)));
  return box.lo + (idx.array() + 0.5).matrix().cwiseProduct(spacing());
}

long VoxelGrid::locate(const Vec3& x) const {
  if (!box.contains(x, 0.0)) return -1;
  const Vec3 h = spacing();
  long flat = 0;
  long stride = 1;
  for (int d = 0; d < 3; ++d) {
    const long c = std::clamp(static_cast<long>(std::floor((x[d] - box.lo[d]) / h[d])), 0L, static_cast<long>(n) - 1);
    flat += c * stride;
    stride *= n;
  }
  return flat;
}

// ---------------------------------------------------------------------------

HeterogeneousKernel::HeterogeneousKernel(VoxelGrid grid, double k, std::vector<cplx> contrast, int born_order)
    : grid_(std::move(grid)), k_(k), contrast_(std::move(contrast)), order_(born_order) {
  if (!(k_ > 0.0)) fail(ErrorCode::numerical, "zero-wavenumber", "heterogeneous kernel needs k > 0");
  if (order_ < 0) fail(ErrorCode::config, "invalid-order", "Born order must be nonnegative");
  if (grid_.n < 1) fail(ErrorCode::config, "invalid-resolution", "Born grid needs at least one voxel per axis");
  if (contrast_.size() != grid_.size()) {
    fail(ErrorCode::config, "invalid-contrast", "contrast must have one value per voxel");
  }
  for (std::size_t v = 0; v < contrast_.size(); ++v) {
    if (contrast_[v] != cplx(0.0)) active_.push_back(v);
  }

  const double vol = grid_.voxel_volume();
  const double radius = std::cbrt(3.0 * vol / (4.0 * pi));
  const cplx ikr = I_unit * (k_ * radius);
  // Integral of the dyadic kernel over the equal-volume sphere, delta part included.
  const cplx s = (2.0 / (3.0 * k_ * k_)) * ((1.0 - ikr) * std::exp(ikr) - 1.0) - 1.0 / (3.0 * k_ * k_);
  self_ = s;

  if (active_.empty()) return;
  const int n = grid_.n;
  const int w = 2 * n - 1;
  const Vec3 h = grid_.spacing();
  table_.resize(static_cast<std::size_t>(w) * w * w);
  for (int dk = -(n - 1); dk < n; ++dk)
    for (int dj = -(n - 1); dj < n; ++dj)
      for (int di = -(n - 1); di < n; ++di) {
        const std::size_t slot = static_cast<std::size_t>((di + n - 1) + w * ((dj + n - 1) + w * (dk + n - 1)));
        if (di == 0 && dj == 0 && dk == 0) {
          table_[slot] = s * CMat3::Identity();
        } else {
          const Vec3 offset(di * h[0], dj * h[1], dk * h[2]);
          table_[slot] = vol * dyadic_green(k_, offset, Vec3::Zero());
        }
      }
}

const CMat3& HeterogeneousKernel::pair(std::size_t v, std::size_t w) const {
  const auto n = static_cast<long>(grid_.n);
  const long wdt = 2 * n - 1;
  const auto sv = static_cast<long>(v), sw = static_cast<long>(w);
  const long di = sv % n - sw % n;
  const long dj = (sv / n) % n - (sw / n) % n;
  const long dk = sv / (n * n) - sw / (n * n);
  return table_[static_cast<std::size_t>((di + n - 1) + wdt * ((dj + n - 1) + wdt * (dk + n - 1)))];
}

CMat3 HeterogeneousKernel::weight(const Vec3& x, std::size_t v) const {
  if (grid_.locate(x) == static_cast<long>(v)) return self_ * CMat3::Identity();
  return grid_.voxel_volume() * dyadic_green(k_, x, grid_.center(v));
}

namespace {

// One sweep of the Born recursion: out(v) = seed(v) + sum_w T(v, w) c_w prev(w).
template <class Value, class Pair>
std::vector<Value> born_sweep(const std::vector<std::size_t>& active, const std::vector<cplx>& contrast,
                              const std::vector<Value>& seed, const std::vector<Value>& prev, Pair pair) {
  std::vector<Value> weighted(active.size());
  for (std::size_t b = 0; b < active.size(); ++b) weighted[b] = contrast[active[b]] * prev[b];
  std::vector<Value> out(seed);
  for (std::size_t a = 0; a < active.size(); ++a) {
    Value acc = Value::Zero();
    for (std::size_t b = 0; b < active.size(); ++b) acc.noalias() += pair(active[a], active[b]) * weighted[b];
    out[a] += acc;
  }
  return out;
}

template <class Value, class Pair>
std::vector<Value> born_iterate(const std::vector<std::size_t>& active, const std::vector<cplx>& contrast,
                                const std::vector<Value>& seed, int sweeps, BornDiagnostics* diag, Pair pair) {
  std::vector<Value> cur = seed;
  for (int m = 0; m < sweeps; ++m) {
    std::vector<Value> next = born_sweep(active, contrast, seed, cur, pair);
    if (diag) {
      double inc = 0.0;
      for (std::size_t a = 0; a < active.size(); ++a) inc += (next[a] - cur[a]).squaredNorm();
      inc = std::sqrt(inc);
      if (!diag->increment_norms.empty() && inc > diag->increment_norms.back()) diag->diverging = true;
      diag->increment_norms.push_back(inc);
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

std::vector<CMat3> HeterogeneousKernel::iterate_source(const Vec3& z, BornDiagnostics* diag) const {
  const double vol = grid_.voxel_volume();
  std::vector<CMat3> seed(active_.size());
  for (std::size_t a = 0; a < active_.size(); ++a) seed[a] = weight(z, active_[a]) / vol;
  return born_iterate(active_, contrast_, seed, order_ - 1, diag,
                      [this](std::size_t v, std::size_t w) -> const CMat3& { return pair(v, w); });
}

CMat3 HeterogeneousKernel::green(const Vec3& x, const Vec3& z, BornDiagnostics* diag) const {
  CMat3 out = dyadic_green(k_, x, z);
  if (order_ == 0 || active_.empty()) return out;
  const auto F = iterate_source(z, diag);
  for (std::size_t a = 0; a < active_.size(); ++a) out.noalias() += weight(x, active_[a]) * (contrast_[active_[a]] * F[a]);
  return out;
}

CMat3 HeterogeneousKernel::green_farfield(const Vec3& xhat, const Vec3& z, BornDiagnostics* diag) const {
  CMat3 out = dyadic_farfield(k_, xhat, z);
  if (order_ == 0 || active_.empty()) return out;
  const double vol = grid_.voxel_volume();
  const auto F = iterate_source(z, diag);
  for (std::size_t a = 0; a < active_.size(); ++a) {
    out.noalias() += vol * dyadic_farfield(k_, xhat, grid_.center(active_[a])) * (contrast_[active_[a]] * F[a]);
  }
  return out;
}

std::vector<CVec3> HeterogeneousKernel::voxel_field(const std::vector<CVec3>& incident_samples, BornDiagnostics* diag) const {
  if (incident_samples.size() != active_.size()) {
    fail(ErrorCode::validation, "field-size", "incident samples must match the active voxels");
  }
  if (order_ == 0) return incident_samples;
  return born_iterate(active_, contrast_, incident_samples, order_ - 1, diag,
                      [this](std::size_t v, std::size_t w) -> const CMat3& { return pair(v, w); });
}

CVec3 HeterogeneousKernel::field_from(const Vec3& x, const CVec3& incident_at_x, const std::vector<CVec3>& voxel_field) const {
  CVec3 out = incident_at_x;
  if (order_ == 0) return out;
  for (std::size_t a = 0; a < active_.size(); ++a) {
    out.noalias() += weight(x, active_[a]) * (contrast_[active_[a]] * voxel_field[a]);
  }
  return out;
}

CVec3 HeterogeneousKernel::field(const Vec3& x, const Vec3& theta, const Vec3& q, BornDiagnostics* diag) const {
  const CVec3 inc = incident_field(k_, x, theta, q);
  if (order_ == 0 || active_.empty()) return inc;
  std::vector<CVec3> samples(active_.size());
  for (std::size_t a = 0; a < active_.size(); ++a) samples[a] = incident_field(k_, grid_.center(active_[a]), theta, q);
  return field_from(x, inc, voxel_field(samples, diag));
}

HeterogeneousKernel make_background_kernel(const BackgroundField& field, double omega, int resolution, int born_order) {
  VoxelGrid grid{field.omega_domain, resolution};
  std::vector<cplx> contrast(grid.size());
  const double w2mu = omega * omega * field.mu;
  for (std::size_t v = 0; v < grid.size(); ++v) {
    contrast[v] = w2mu * (eval_background(field, grid.center(v)) - field.eps_inf_bg);
  }
  return HeterogeneousKernel(grid, background_wavenumber(field, omega), std::move(contrast), born_order);
}

CMat3 heterogeneous_green(const HeterogeneousKernel& kernel, const Vec3& x, const Vec3& z, BornDiagnostics* diag) {
  return kernel.green(x, z, diag);
}

CVec3 background_field(const HeterogeneousKernel& kernel, const Vec3& x, const Vec3& theta, const Vec3& q) {
  return kernel.field(x, theta, q);
}

ResidualReport verify_reciprocity(const HeterogeneousKernel& kernel, const Vec3& xhat, const Vec3& z, const Vec3& q,
                                  IncidentQuadrature quad) {
  const double k = kernel.wavenumber();
  ResidualReport rep;
  rep.lhs = kernel.green_farfield(xhat, z).transpose() * to_complex(xhat.cross(q));

  const Vec3 theta = -xhat;
  std::vector<CVec3> samples(kernel.active().size());
  const Vec3 h = kernel.grid().spacing();
  const double g = 0.5 / std::sqrt(3.0);
  for (std::size_t a = 0; a < samples.size(); ++a) {
    const Vec3 c = kernel.grid().center(kernel.active()[a]);
    if (quad == IncidentQuadrature::center) {
      samples[a] = incident_field(k, c, theta, q);
      continue;
    }
    CVec3 acc = CVec3::Zero();
    for (int corner = 0; corner < 8; ++corner) {
      const Vec3 sign((corner & 1) ? 1.0 : -1.0, (corner & 2) ? 1.0 : -1.0, (corner & 4) ? 1.0 : -1.0);
      acc += incident_field(k, c + g * sign.cwiseProduct(h), theta, q);
    }
    samples[a] = acc / 8.0;
  }
  const CVec3 V = kernel.field_from(z, incident_field(k, z, theta, q), kernel.voxel_field(samples));
  rep.rhs = -V / (4.0 * pi);
  rep.residual = (rep.lhs - rep.rhs).cwiseAbs().maxCoeff();
  return rep;
}

double verify_symmetry(const HeterogeneousKernel& kernel, const Vec3& x, const Vec3& y) {
  const CMat3 gxy = kernel.green(x, y);
  const CMat3 gyx = kernel.green(y, x);
  return (gxy - gyx.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace plasmo
