#include "plasmo/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "plasmo/forward.hpp"
#include "plasmo/resonance.hpp"

namespace plasmo {

std::vector<ImagingFunctional> extract_functionals(const MeasurementSeries& meas) {
  const std::size_t nw = meas.omegas.size();
  if (meas.contrasts.size() < 2) {
    fail(ErrorCode::validation, "missing-injection-level", "need contrast rows for ell = 0 and at least one particle");
  }
  for (std::size_t ell = 0; ell < meas.contrasts.size(); ++ell) {
    if (meas.contrasts[ell].size() != nw) {
      fail(ErrorCode::validation, "missing-injection-level",
           "injection level ell = " + std::to_string(ell) + " is missing or incomplete");
    }
  }
  const double scale = -4.0 * pi * meas.meta.lambda / (meas.meta.mu * std::pow(meas.meta.a, 3));
  std::vector<ImagingFunctional> out;
  for (std::size_t j = 1; j < meas.contrasts.size(); ++j) {
    ImagingFunctional f;
    f.particle_index = static_cast<int>(j);
    f.values.resize(nw);
    for (std::size_t w = 0; w < nw; ++w) f.values[w] = scale * (meas.contrasts[j][w] - meas.contrasts[j - 1][w]);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<double> moving_median(const std::vector<double>& values, int window) {
  const long half = window / 2;
  const long n = static_cast<long>(values.size());
  std::vector<double> out(values.size());
  std::vector<double> buf;
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - half), hi = std::min(n - 1, i + half);
    buf.assign(values.begin() + lo, values.begin() + hi + 1);
    std::nth_element(buf.begin(), buf.begin() + static_cast<long>(buf.size() / 2), buf.end());
    out[static_cast<std::size_t>(i)] = buf[buf.size() / 2];
  }
  return out;
}

PeakEstimate peak_detect(const std::vector<double>& omegas, const std::vector<cplx>& values, const PeakOptions& opts) {
  if (omegas.size() < 5 || omegas.size() != values.size()) {
    fail(ErrorCode::validation, "short-grid", "peak detection needs at least 5 matching samples");
  }
  std::vector<double> mag(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    mag[i] = std::abs(values[i]);
    if (!std::isfinite(mag[i])) fail(ErrorCode::numerical, "non-finite", "imaging functional is not finite");
  }
  if (opts.prefilter) mag = moving_median(mag);

  const auto top = std::max_element(mag.begin(), mag.end());
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(*top > 0.0) || !(*top >= opts.min_contrast * median)) {
    fail(ErrorCode::numerical, "flat-signal", "no discernible peak (max/median below " + std::to_string(opts.min_contrast) + ")");
  }

  PeakEstimate est;
  est.grid_index = static_cast<std::size_t>(top - mag.begin());
  est.peak_height = *top;
  est.omega_hat = omegas[est.grid_index];
  const std::size_t i = est.grid_index;
  est.boundary = i == 0 || i + 1 == mag.size();
  est.window = i + 1 < omegas.size() ? omegas[i + 1] - omegas[i] : omegas[i] - omegas[i - 1];
  if (est.boundary) return est;

  const double l = std::log(mag[i - 1]), c = std::log(mag[i]), r = std::log(mag[i + 1]);
  // A jump of e^10 to both neighbours means the peak is far narrower than the grid.
  if (!std::isfinite(l) || !std::isfinite(r) || c - std::max(l, r) > 10.0) return est;
  const double x0 = omegas[i - 1], x1 = omegas[i], x2 = omegas[i + 1];
  const double d01 = (c - l) / (x1 - x0);
  const double d12 = (r - c) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  if (!(curv < 0.0)) return est;
  const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
  est.omega_hat = std::clamp(vertex, x0, x2);
  est.refined = true;
  return est;
}

std::vector<PointRecovery> recover_points(const MeasurementSeries& meas, const std::vector<ImagingFunctional>& functionals,
                                          const std::vector<Vec3>& centers, const LorentzModel& lorentz,
                                          const PeakOptions& opts) {
  std::vector<PointRecovery> out;
  for (const auto& f : functionals) {
    PointRecovery rec;
    rec.index = f.particle_index;
    const auto slot = static_cast<std::size_t>(f.particle_index - 1);
    if (slot < centers.size()) rec.z = centers[slot];
    try {
      const PeakEstimate peak = peak_detect(meas.omegas, f.values, opts);
      rec.omega_hat = peak.omega_hat;
      rec.peak_height = peak.peak_height;
      rec.eps0 = recover_permittivity(peak.omega_hat, meas.meta.lambda, lorentz);
      const cplx eps_real = recover_permittivity(peak.omega_hat, meas.meta.lambda, lorentz, true);
      rec.lambda_residual = std::abs(dispersion_value(Dispersion{eps_real, meas.meta.lambda, lorentz}, peak.omega_hat));
      rec.ok = true;
      if (peak.boundary) rec.flag = "boundary-peak";
    } catch (const Error& e) {
      rec.flag = e.tag();
      rec.ok = false;
    }
    out.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------------------

RbfBasis parse_basis(const std::string& tag) {
  if (tag == "linear") return RbfBasis::linear;
  if (tag == "gaussian") return RbfBasis::gaussian;
  if (tag == "thin_plate" || tag == "thin_plate_spline" || tag == "tps") return RbfBasis::thin_plate;
  fail(ErrorCode::config, "invalid-basis", "unknown basis '" + tag + "' (linear | gaussian | thin_plate)");
}

std::string basis_name(RbfBasis basis) {
  switch (basis) {
    case RbfBasis::linear: return "linear";
    case RbfBasis::gaussian: return "gaussian";
    case RbfBasis::thin_plate: return "thin_plate";
  }
  return "unknown";
}

double rbf_value(RbfBasis basis, double r, double sigma) {
  switch (basis) {
    case RbfBasis::linear: return 1.0 + r;
    case RbfBasis::gaussian: return std::exp(-(r * r) / (sigma * sigma));
    case RbfBasis::thin_plate: return r > 0.0 ? r * r * std::log(r) : 0.0;
  }
  return 0.0;
}

std::vector<Vec3> drm_centers(const Box& domain, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> out(count);
  for (auto& c : out) {
    for (int d = 0; d < 3; ++d) c[d] = domain.lo[d] + unit(rng) * (domain.hi[d] - domain.lo[d]);
  }
  return out;
}

namespace {

double mean_nearest_spacing(const std::vector<Vec3>& pts, const Box& domain) {
  if (pts.size() < 2) return domain.diagonal();
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i != j) best = std::min(best, (pts[i] - pts[j]).norm());
    }
    sum += best;
  }
  return sum / static_cast<double>(pts.size());
}

}  // namespace

DrmInterpolant drm_fit_with_centers(const std::vector<Vec3>& nodes, const std::vector<cplx>& values, const Box& domain,
                                    std::vector<Vec3> centers, RbfBasis basis, std::optional<double> sigma,
                                    std::uint64_t seed) {
  const std::size_t n = nodes.size();
  if (n == 0 || values.size() != n || centers.size() != n) {
    fail(ErrorCode::config, "invalid-nodes", "DRM needs as many values and centers as nodes (at least one)");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (nodes[i] == nodes[j]) fail(ErrorCode::config, "invalid-nodes", "DRM nodes must be distinct");

  DrmInterpolant interp;
  interp.basis = basis;
  interp.seed = seed;
  interp.domain = domain;
  interp.centers = std::move(centers);
  interp.sigma = sigma ? *sigma : mean_nearest_spacing(interp.centers, domain);
  if (basis == RbfBasis::gaussian && !(interp.sigma > 0.0)) {
    fail(ErrorCode::config, "invalid-sigma", "gaussian width must be positive");
  }

  const long m = static_cast<long>(n);
  Eigen::MatrixXd A(m, m);
  for (long j = 0; j < m; ++j)
    for (long k = 0; k < m; ++k)
      A(j, k) = rbf_value(basis, (nodes[static_cast<std::size_t>(j)] - interp.centers[static_cast<std::size_t>(k)]).norm(), interp.sigma);

  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
  interp.condition = sv[m - 1] > 0.0 ? sv[0] / sv[m - 1] : std::numeric_limits<double>::infinity();
  if (!(interp.condition <= 1e12)) {
    fail(ErrorCode::numerical, "ill-conditioned",
         "collocation matrix condition number exceeds 1e12; reseed the centers or change the basis");
  }
  Eigen::VectorXcd rhs(m);
  for (long j = 0; j < m; ++j) rhs[j] = values[static_cast<std::size_t>(j)];
  const Eigen::VectorXcd beta = A.cast<cplx>().partialPivLu().solve(rhs);
  interp.beta.assign(beta.data(), beta.data() + m);
  return interp;
}

DrmInterpolant drm_fit(const std::vector<Vec3>& nodes, const std::vector<cplx>& values, const Box& domain,
                       const DrmOptions& opts) {
  std::vector<Vec3> centers = opts.centers_at_nodes ? nodes : drm_centers(domain, nodes.size(), opts.seed);
  return drm_fit_with_centers(nodes, values, domain, std::move(centers), opts.basis, opts.sigma, opts.seed);
}

cplx drm_eval(const DrmInterpolant& interp, const Vec3& z) {
  if (!interp.domain.contains(z)) fail(ErrorCode::validation, "out-of-domain", "interpolation point outside the domain box");
  cplx sum = 0.0;
  for (std::size_t k = 0; k < interp.centers.size(); ++k) {
    sum += interp.beta[k] * rbf_value(interp.basis, (z - interp.centers[k]).norm(), interp.sigma);
  }
  return sum;
}

// ---------------------------------------------------------------------------

std::vector<GateEntry> hypothesis_gate(const std::vector<CVec3>& fields, const Mat3& gram, double threshold) {
  std::vector<GateEntry> out;
  const CMat3 g = gram.cast<cplx>();
  for (std::size_t j = 0; j < fields.size(); ++j) {
    GateEntry e;
    e.index = static_cast<int>(j) + 1;
    e.magnitude = std::sqrt(std::abs(bilinear(fields[j], g * fields[j])));
    e.flagged = e.magnitude < threshold;
    out.push_back(e);
  }
  return out;
}

std::vector<GateEntry> hypothesis_gate(const Scene& scene, const EigenMode& mode, double omega, double threshold) {
  const BackgroundMedium medium(scene, omega);
  return hypothesis_gate(medium.fields(scene.particles, scene.incidence.theta, scene.incidence.q), mode.moment_gram,
                         threshold);
}

}  // namespace plasmo
