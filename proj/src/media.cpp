#include "plasmo/media.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace plasmo {

cplx eval_permittivity(const LorentzModel& model, double omega) {
  if (!(omega > 0.0)) {
    fail(ErrorCode::validation, "invalid-frequency", "omega must be positive");
  }
  const cplx denom = cplx(model.omega_0 * model.omega_0 - omega * omega, -model.gamma * omega);
  if (std::abs(denom) < 1e-300) {
    fail(ErrorCode::numerical, "degenerate-pole", "Lorentz denominator vanishes at omega = omega_0 with zero damping");
  }
  return model.eps_inf * (1.0 + model.omega_p * model.omega_p / denom);
}

bool Box::contains(const Vec3& x, double tol) const {
  for (int d = 0; d < 3; ++d) {
    if (x[d] < lo[d] - tol || x[d] > hi[d] + tol) return false;
  }
  return true;
}

namespace {

cplx eval_polynomial(const PolynomialPermittivity& p, const Vec3& x) {
  cplx sum{0.0, 0.0};
  for (const auto& term : p.terms) {
    sum += term.coef * std::pow(x[0], term.px) * std::pow(x[1], term.py) * std::pow(x[2], term.pz);
  }
  return sum;
}

CVec3 grad_polynomial(const PolynomialPermittivity& p, const Vec3& x) {
  CVec3 g = CVec3::Zero();
  for (const auto& t : p.terms) {
    if (t.px > 0) g[0] += t.coef * double(t.px) * std::pow(x[0], t.px - 1) * std::pow(x[1], t.py) * std::pow(x[2], t.pz);
    if (t.py > 0) g[1] += t.coef * double(t.py) * std::pow(x[0], t.px) * std::pow(x[1], t.py - 1) * std::pow(x[2], t.pz);
    if (t.pz > 0) g[2] += t.coef * double(t.pz) * std::pow(x[0], t.px) * std::pow(x[1], t.py) * std::pow(x[2], t.pz - 1);
  }
  return g;
}

cplx eval_grid(const GridPermittivity& g, const Box& box, const Vec3& x) {
  std::array<int, 3> cell{};
  std::array<double, 3> frac{};
  for (int d = 0; d < 3; ++d) {
    const int n = g.n[d];
    const double u = (x[d] - box.lo[d]) / (box.hi[d] - box.lo[d]) * (n - 1);
    const int c = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
    cell[d] = c;
    frac[d] = std::clamp(u - c, 0.0, 1.0);
  }
  cplx sum{0.0, 0.0};
  for (int corner = 0; corner < 8; ++corner) {
    const int di = corner & 1, dj = (corner >> 1) & 1, dk = (corner >> 2) & 1;
    const double w = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) * (dk ? frac[2] : 1.0 - frac[2]);
    if (w == 0.0) continue;
    sum += w * g.node(cell[0] + di, cell[1] + dj, cell[2] + dk);
  }
  return sum;
}

void check_grid(const GridPermittivity& g) {
  for (int d = 0; d < 3; ++d) {
    if (g.n[d] < 2) fail(ErrorCode::config, "invalid-grid", "permittivity grid needs at least 2 nodes per axis");
  }
  if (g.values.size() != static_cast<std::size_t>(g.n[0]) * g.n[1] * g.n[2]) {
    fail(ErrorCode::config, "invalid-grid", "permittivity grid value count does not match its dimensions");
  }
}

}  // namespace

cplx eval_background(const BackgroundField& field, const Vec3& x) {
  if (!field.omega_domain.contains(x)) {
    std::ostringstream os;
    os << "point (" << x.transpose() << ") lies outside the domain box";
    fail(ErrorCode::validation, "out-of-domain", os.str());
  }
  return std::visit(
      [&](const auto& spec) -> cplx {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ConstantPermittivity>) {
          return spec.value;
        } else if constexpr (std::is_same_v<T, PolynomialPermittivity>) {
          return eval_polynomial(spec, x);
        } else {
          check_grid(spec);
          return eval_grid(spec, field.omega_domain, x);
        }
      },
      field.eps0);
}

CVec3 background_gradient(const BackgroundField& field, const Vec3& x) {
  if (!field.omega_domain.contains(x)) {
    fail(ErrorCode::validation, "out-of-domain", "gradient requested outside the domain box");
  }
  return std::visit(
      [&](const auto& spec) -> CVec3 {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ConstantPermittivity>) {
          return CVec3::Zero();
        } else if constexpr (std::is_same_v<T, PolynomialPermittivity>) {
          return grad_polynomial(spec, x);
        } else {
          check_grid(spec);
          const Box& box = field.omega_domain;
          CVec3 g;
          for (int d = 0; d < 3; ++d) {
            const double step = (box.hi[d] - box.lo[d]) / (spec.n[d] - 1);
            Vec3 plus = x, minus = x;
            plus[d] = std::min(x[d] + step, box.hi[d]);
            minus[d] = std::max(x[d] - step, box.lo[d]);
            g[d] = (eval_grid(spec, box, plus) - eval_grid(spec, box, minus)) / (plus[d] - minus[d]);
          }
          return g;
        }
      },
      field.eps0);
}

cplx refractive_index(const BackgroundField& field, const Vec3& x) {
  const cplx eps = field.omega_domain.contains(x) ? eval_background(field, x) : cplx(field.eps_inf_bg);
  return std::sqrt(eps * field.mu);
}

double Scene::min_distance() const {
  return d_min ? *d_min : std::pow(a, t);
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed || !c.hard; });
}

std::vector<std::string> ValidationReport::warnings() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed && !c.hard) out.push_back(c.name + ": " + c.detail);
  }
  return out;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double implied_damping_exponent(const Scene& scene) {
  if (scene.lorentz.gamma <= 0.0 || scene.a <= 0.0 || scene.a == 1.0) return std::numeric_limits<double>::infinity();
  return std::log(scene.lorentz.gamma) / std::log(scene.a);
}

ValidationReport validate_scene(const Scene& scene, ScatteringModel model) {
  ValidationReport report;
  auto add = [&](std::string name, bool passed, bool hard, double measured, std::string detail) {
    report.checks.push_back({std::move(name), passed, hard, measured, std::move(detail)});
  };

  const auto& L = scene.lorentz;
  add("lorentz.parameters", L.eps_inf > 0 && L.omega_p > 0 && L.omega_0 >= 0 && L.gamma >= 0, true, L.gamma,
      "eps_inf > 0, omega_p > 0, omega_0 >= 0, gamma >= 0");
  add("lorentz.gamma_max", L.gamma <= scene.gamma_max, true, L.gamma,
      "gamma must not exceed gamma_max = " + std::to_string(scene.gamma_max));

  const auto& bg = scene.background;
  add("background.constants", bg.eps_inf_bg > 0 && bg.mu > 0, true, bg.mu, "eps_inf_bg > 0 and mu > 0");
  add("geometry.radius", scene.a > 0, true, scene.a, "particle radius scale a > 0");
  add("geometry.mode_index", scene.mode_index >= 1, true, scene.mode_index, "mode index n0 >= 1");

  const Vec3& th = scene.incidence.theta;
  const Vec3& q = scene.incidence.q;
  const double inc_err = std::max({std::abs(th.norm() - 1.0), std::abs(q.norm() - 1.0), std::abs(th.dot(q))});
  add("incidence.orthonormal", inc_err <= 1e-12, true, inc_err, "|theta| = |q| = 1 and theta.q = 0");

  const bool exps_ok = scene.t >= 0 && scene.t < 1 && scene.s >= 0 && scene.s < 1 && scene.h >= 0 && scene.h < 1;
  add("exponents.range", exps_ok, true, 0.0, "t, s, h must lie in [0, 1)");

  const double margin = 3.0 - scene.h - 3.0 * scene.t - scene.s;
  add("exponents.born_validity", margin > 0, model == ScatteringModel::born, margin, "3 - h - 3t - s > 0");

  bool inside = true;
  for (const auto& z : scene.particles) inside = inside && bg.omega_domain.contains(z);
  add("particles.in_domain", inside, true, static_cast<double>(scene.particles.size()), "all centers inside the domain box");

  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scene.particles.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.particles.size(); ++j) {
      dmin = std::min(dmin, (scene.particles[i] - scene.particles[j]).norm());
    }
  }
  add("particles.separation", dmin >= scene.min_distance(), true, dmin,
      "pairwise distance >= d_min = " + std::to_string(scene.min_distance()));

  const double cap = scene.a > 0 ? std::floor(std::pow(scene.a, -scene.s) + 1e-9) : 0.0;
  add("particles.count", static_cast<double>(scene.particles.size()) <= cap, true,
      static_cast<double>(scene.particles.size()), "particle count <= floor(a^-s) = " + std::to_string(cap));

  // eps0 sampled on a 9^3 lattice plus the particle centers.
  std::vector<Vec3> samples;
  const Box& box = bg.omega_domain;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      for (int k = 0; k < 9; ++k) {
        samples.push_back(box.lo + Vec3(i / 8.0, j / 8.0, k / 8.0).cwiseProduct(box.extent()));
      }
  for (const auto& z : scene.particles) {
    if (box.contains(z)) samples.push_back(z);
  }
  double min_re = std::numeric_limits<double>::infinity();
  double max_im = 0.0;
  bool eval_ok = true;
  try {
    for (const auto& x : samples) {
      const cplx e = eval_background(bg, x);
      min_re = std::min(min_re, e.real());
      max_im = std::max(max_im, std::abs(e.imag()));
    }
  } catch (const Error&) {
    eval_ok = false;
  }
  add("background.re_positive", eval_ok && min_re > 0, true, min_re, "Re eps0 > 0 throughout the domain");
  add("background.im_bound", eval_ok && max_im <= scene.c_im * L.gamma, true, max_im,
      "max |Im eps0| <= C_im * gamma");

  const double h_implied = implied_damping_exponent(scene);
  add("damping.implied_h", true, false, h_implied, "gamma = a^h with this h (informational)");
  return report;
}

}  // namespace plasmo
