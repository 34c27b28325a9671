#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plasmo/types.hpp"

namespace plasmo {

/// Lorentz dispersion of the nano-particle material,
///   eps_p(w) = eps_inf * (1 + w_p^2 / (w_0^2 - w^2 - i*gamma*w)).
struct LorentzModel {
  double eps_inf = 1.0;
  double omega_p = 1.0;
  double omega_0 = 1.0;
  double gamma = 0.0;
};

/// Throws `degenerate-pole` when the denominator vanishes (gamma = 0, w = w_0).
cplx eval_permittivity(const LorentzModel& model, double omega);

/// Axis-aligned box standing in for the imaged domain.
struct Box {
  Vec3 lo = Vec3::Constant(-1.0);
  Vec3 hi = Vec3::Constant(1.0);

  bool contains(const Vec3& x, double tol = 1e-12) const;
  Vec3 extent() const { return hi - lo; }
  Vec3 center() const { return 0.5 * (lo + hi); }
  double diagonal() const { return extent().norm(); }
};

struct ConstantPermittivity {
  cplx value{1.0, 0.0};
};

/// coef * x^px * y^py * z^pz
struct PolynomialTerm {
  cplx coef;
  int px = 0;
  int py = 0;
  int pz = 0;
};

struct PolynomialPermittivity {
  std::vector<PolynomialTerm> terms;
};

/// Nodal values on a regular lattice spanning the domain box (corners
/// included), x index fastest. Evaluated by trilinear interpolation.
struct GridPermittivity {
  std::array<int, 3> n{2, 2, 2};
  std::vector<cplx> values;

  cplx node(int i, int j, int k) const { return values[static_cast<std::size_t>(i + n[0] * (j + n[1] * k))]; }
};

using PermittivitySpec = std::variant<ConstantPermittivity, PolynomialPermittivity, GridPermittivity>;

/// Background medium: eps_inf_bg outside the domain, eps0(x) inside, constant mu.
struct BackgroundField {
  double eps_inf_bg = 1.0;
  double mu = 1.0;
  PermittivitySpec eps0 = ConstantPermittivity{};
  Box omega_domain;
};

/// eps0(x); throws `out-of-domain` outside the box.
cplx eval_background(const BackgroundField& field, const Vec3& x);

/// grad eps0(x): analytic for polynomials, central differences (one grid step)
/// for sampled grids, zero for constants.
CVec3 background_gradient(const BackgroundField& field, const Vec3& x);

/// n0 = sqrt(eps * mu), principal branch.
cplx refractive_index(const BackgroundField& field, const Vec3& x);

enum class ShapeTag { unit_ball, voxelized };
enum class BackgroundMode { homogeneous, born };
enum class ScatteringModel { born, foldy };

struct Incidence {
  Vec3 theta{0.0, 0.0, 1.0};
  Vec3 q{1.0, 0.0, 0.0};
};

/// Sampling of the frequency band; missing endpoints are derived from the
/// Lorentz model and the reference-shape eigenvalue.
struct BandSpec {
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  int n_samples = 2001;
};

/// Reference shape used when `shape == voxelized`.
struct VoxelShapeSpec {
  std::string kind = "ball";  // ball | ellipsoid | cube
  int resolution = 16;
  Vec3 semi_axes{1.0, 1.0, 1.0};
};

struct Scene {
  BackgroundField background;
  LorentzModel lorentz;
  std::vector<Vec3> particles;  // injection order
  double a = 0.01;
  double t = 0.0;
  double s = 0.0;
  double h = 0.0;
  std::optional<double> d_min;  // defaults to a^t
  ShapeTag shape = ShapeTag::unit_ball;
  VoxelShapeSpec voxel;
  int mode_index = 1;
  Incidence incidence;
  BandSpec band;
  BackgroundMode background_mode = BackgroundMode::homogeneous;
  int born_order = 1;
  int born_resolution = 8;
  double gamma_max = 0.1;
  double c_im = 1.0;

  double min_distance() const;
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  bool hard = true;
  double measured = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  std::vector<std::string> warnings() const;
  const ValidationCheck* find(const std::string& name) const;
};

/// Runs every scene-level constraint and reports each one; never throws.
/// The 3 - h - 3t - s > 0 condition is hard for Born, advisory for Foldy.
ValidationReport validate_scene(const Scene& scene, ScatteringModel model = ScatteringModel::born);

/// Exponent h with gamma = a^h (informational only).
double implied_damping_exponent(const Scene& scene);

}  // namespace plasmo
