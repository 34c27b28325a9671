// Command-line driver: simulate -> invert -> interp, plus verify and spectrum.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "plasmo/forward.hpp"
#include "plasmo/inversion.hpp"
#include "plasmo/io.hpp"
#include "plasmo/shapes.hpp"
#include "plasmo/verify.hpp"

using namespace plasmo;

namespace {

struct SimulateArgs {
  std::string scene, out, model = "born";
  bool raw = false, force = false;
  double noise = 0.0;
  std::uint64_t seed = 1;
};

struct InvertArgs {
  std::string meas, scene, out, basis = "thin_plate", functionals;
  std::uint64_t seed = 1;
  bool prefilter = false, centers_at_nodes = false;
  double gate = 1e-6;
  std::optional<double> sigma;
};

struct InterpArgs {
  std::string recon, basis, query, out;
};

struct SpectrumArgs {
  std::string shape = "ball";
  int res = 32, count = 2;
  std::vector<double> axes{1.0, 1.0, 1.0};
};

int run_simulate(const SimulateArgs& args) {
  const Scene scene = load_scene(args.scene);
  SimulateOptions opts;
  if (args.model == "born") opts.model = ScatteringModel::born;
  else if (args.model == "foldy") opts.model = ScatteringModel::foldy;
  else fail(ErrorCode::config, "config-parse", "--model must be born or foldy");
  opts.raw = args.raw;
  opts.noise = args.noise;
  opts.seed = args.seed;
  opts.force = args.force;
  for (const auto& w : validate_scene(scene, opts.model).warnings()) std::cerr << "warning: " << w << "\n";
  save_measurements(args.out, simulate(scene, opts));
  return 0;
}

int run_invert(const InvertArgs& args) {
  const Scene scene = load_scene(args.scene);
  MeasurementSeries meas = load_measurements(args.meas);
  const EigenMode mode = scene_eigen_mode(scene);
  meas.meta = scene_meta(scene, mode);
  const auto functionals = extract_functionals(meas);
  if (functionals.size() != scene.particles.size()) {
    fail(ErrorCode::validation, "particle-count",
         "measurements hold " + std::to_string(functionals.size()) + " injections but the scene lists " +
             std::to_string(scene.particles.size()) + " particles");
  }

  PeakOptions peak;
  peak.prefilter = args.prefilter;
  Reconstruction recon;
  recon.points = recover_points(meas, functionals, scene.particles, scene.lorentz, peak);

  const double omega_mid = 0.5 * (meas.omegas.front() + meas.omegas.back());
  const auto gate = hypothesis_gate(scene, mode, omega_mid, args.gate);
  for (std::size_t j = 0; j < recon.points.size(); ++j) {
    if (gate[j].flagged && recon.points[j].flag.empty()) recon.points[j].flag = "hypothesis";
  }

  if (!args.functionals.empty()) {
    std::ostringstream os;
    os << "particle,omega,abs_J\n";
    for (const auto& f : functionals) {
      for (std::size_t w = 0; w < meas.omegas.size(); ++w) {
        os << f.particle_index << ',' << format_number(meas.omegas[w]) << ',' << format_number(std::abs(f.values[w])) << '\n';
      }
    }
    write_file(args.functionals, os.str());
  }

  std::vector<Vec3> nodes;
  std::vector<cplx> values;
  for (const auto& p : recon.points) {
    if (!p.ok) continue;
    nodes.push_back(p.z);
    values.push_back(p.eps0);
  }
  int status = 0;
  if (!nodes.empty()) {
    DrmOptions drm;
    drm.basis = parse_basis(args.basis);
    drm.seed = args.seed;
    drm.sigma = args.sigma;
    drm.centers_at_nodes = args.centers_at_nodes;
    try {
      recon.interpolant = drm_fit(nodes, values, scene.background.omega_domain, drm);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      status = static_cast<int>(e.code());
    }
  }
  write_file(args.out, reconstruction_json(recon));
  for (const auto& p : recon.points) {
    if (!p.flag.empty()) std::cerr << "warning: particle " << p.index << " flagged " << p.flag << "\n";
  }
  return status;
}

int run_interp(const InterpArgs& args) {
  Reconstruction recon = load_reconstruction(args.recon);
  if (!recon.interpolant) fail(ErrorCode::validation, "no-interpolant", "reconstruction file carries no interpolant");
  DrmInterpolant interp = *recon.interpolant;
  if (!args.basis.empty() && parse_basis(args.basis) != interp.basis) {
    // Refit the stored point recoveries with the requested basis and the same seed.
    std::vector<Vec3> nodes;
    std::vector<cplx> values;
    for (const auto& p : recon.points) {
      if (!p.ok) continue;
      nodes.push_back(p.z);
      values.push_back(p.eps0);
    }
    DrmOptions drm;
    drm.basis = parse_basis(args.basis);
    drm.seed = interp.seed;
    interp = drm_fit(nodes, values, interp.domain, drm);
  }
  const auto points = load_points(args.query);
  std::ostringstream os;
  os << "x,y,z,eps0_re,eps0_im\n";
  for (const auto& z : points) {
    const cplx v = drm_eval(interp, z);
    os << format_number(z[0]) << ',' << format_number(z[1]) << ',' << format_number(z[2]) << ','
       << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
  }
  write_file(args.out, os.str());
  return 0;
}

int run_verify(const VerifyOptions& opts) {
  const auto checks = run_verification(opts);
  bool ok = true;
  std::printf("%-44s %-12s %-10s %s\n", "check", "residual", "tolerance", "status");
  for (const auto& c : checks) {
    std::printf("%-44s %-12.3e %-10.1e %s\n", c.name.c_str(), c.value, c.tolerance, c.passed ? "ok" : "FAIL");
    ok = ok && c.passed;
  }
  return ok ? 0 : static_cast<int>(ErrorCode::numerical);
}

int run_spectrum(const SpectrumArgs& args) {
  VoxelShapeSpec spec;
  spec.kind = args.shape;
  spec.resolution = args.res;
  if (args.axes.size() != 3) fail(ErrorCode::config, "config-parse", "--axes takes three values");
  spec.semi_axes = Vec3(args.axes[0], args.axes[1], args.axes[2]);
  const VoxelShape shape = voxelize(spec);
  const auto modes = magnetization_spectrum(shape, args.count);
  std::printf("shape %s resolution %d volume %.10g\n", args.shape.c_str(), args.res, shape.volume());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    std::printf("mode %zu lambda %.10g multiplicity %d\n", i + 1, m.lambda, m.multiplicity);
    for (int r = 0; r < 3; ++r) {
      std::printf("gram %.10g %.10g %.10g\n", m.moment_gram(r, 0), m.moment_gram(r, 1), m.moment_gram(r, 2));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plasmonic resonance imaging: forward simulation and permittivity inversion"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "synthesize back-scattered contrasts for a scene");
  simulate_cmd->add_option("--scene", sim.scene, "scene file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--out", sim.out, "measurement CSV")->required();
  simulate_cmd->add_option("--model", sim.model, "born | foldy")->check(CLI::IsMember({"born", "foldy"}));
  simulate_cmd->add_flag("--raw", sim.raw, "use omega^2 instead of the frozen resonance prefactor");
  simulate_cmd->add_option("--noise", sim.noise, "relative complex Gaussian noise")->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--seed", sim.seed, "noise seed");
  simulate_cmd->add_flag("--force", sim.force, "solve Foldy systems that are not diagonally dominant");

  InvertArgs inv;
  auto* invert_cmd = app.add_subcommand("invert", "recover point permittivities and fit the interpolant");
  invert_cmd->add_option("--meas", inv.meas, "measurement CSV")->required()->check(CLI::ExistingFile);
  invert_cmd->add_option("--scene", inv.scene, "scene file")->required()->check(CLI::ExistingFile);
  invert_cmd->add_option("--out", inv.out, "reconstruction JSON")->required();
  invert_cmd->add_option("--basis", inv.basis, "linear | gaussian | thin_plate");
  invert_cmd->add_option("--sigma", inv.sigma, "gaussian width")->check(CLI::PositiveNumber);
  invert_cmd->add_option("--seed", inv.seed, "collocation-center seed");
  invert_cmd->add_flag("--prefilter", inv.prefilter, "moving-median prefilter before peak detection");
  invert_cmd->add_flag("--centers-at-nodes", inv.centers_at_nodes, "use the data nodes as collocation centers");
  invert_cmd->add_option("--gate", inv.gate, "hypothesis gate threshold")->check(CLI::NonNegativeNumber);
  invert_cmd->add_option("--functionals", inv.functionals, "write |J| per particle to this CSV");

  InterpArgs itp;
  auto* interp_cmd = app.add_subcommand("interp", "evaluate the fitted permittivity at query points");
  interp_cmd->add_option("--recon", itp.recon, "reconstruction JSON")->required()->check(CLI::ExistingFile);
  interp_cmd->add_option("--basis", itp.basis, "refit with this basis if it differs from the stored one");
  interp_cmd->add_option("--query", itp.query, "CSV of points x,y,z")->required()->check(CLI::ExistingFile);
  interp_cmd->add_option("--out", itp.out, "output CSV")->required();

  VerifyOptions ver;
  auto* verify_cmd = app.add_subcommand("verify", "run the reciprocity and kernel-symmetry suites");
  verify_cmd->add_option("--tol-homogeneous", ver.tol_homogeneous);
  verify_cmd->add_option("--tol-single-voxel", ver.tol_single_voxel);
  verify_cmd->add_option("--tol-smooth", ver.tol_smooth);
  verify_cmd->add_option("--tol-symmetry", ver.tol_symmetry);
  verify_cmd->add_option("--amplitude", ver.amplitude, "smooth contrast amplitude");
  verify_cmd->add_option("--order", ver.smooth_order, "Born order of the smooth case")->check(CLI::Range(0, 10));
  verify_cmd->add_option("--refinement", ver.refinement, "grid sizes for the refinement study");

  SpectrumArgs spec;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigen-data of a voxelized reference shape");
  spectrum_cmd->add_option("--shape", spec.shape, "ball | ellipsoid | cube | voxel")
      ->check(CLI::IsMember({"ball", "ellipsoid", "cube", "voxel"}));
  spectrum_cmd->add_option("--res", spec.res, "voxels per axis")->check(CLI::Range(8, 256));
  spectrum_cmd->add_option("--count", spec.count, "number of eigenvalue clusters")->check(CLI::PositiveNumber);
  spectrum_cmd->add_option("--axes", spec.axes, "semi-axes (ellipsoid) or half-width (cube)")->expected(3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: config-parse: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::config);
  }

  try {
    if (*simulate_cmd) return run_simulate(sim);
    if (*invert_cmd) return run_invert(inv);
    if (*interp_cmd) return run_interp(itp);
    if (*verify_cmd) return run_verify(ver);
    if (*spectrum_cmd) return run_spectrum(spec);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::numerical);
  }
  return 0;
}
