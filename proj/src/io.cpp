#include "plasmo/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace plasmo {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::config, "unreadable-file", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::config, "unwritable-file", "cannot write '" + path + "'");
  out << contents;
}

// ---------------------------------------------------------------------------
// Scene files

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class LineError {
 public:
  LineError(int line, std::string key) : line_(line), key_(std::move(key)) {}
  [[noreturn]] void raise(const std::string& msg) const {
    fail(ErrorCode::config, "config-parse", "line " + std::to_string(line_) + " (" + key_ + "): " + msg);
  }

 private:
  int line_;
  std::string key_;
};

std::vector<double> numbers(const std::string& value, const LineError& err) {
  std::istringstream ss(value);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') err.raise("'" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

double one_number(const std::string& value, const LineError& err) {
  const auto v = numbers(value, err);
  if (v.size() != 1) err.raise("expected one number");
  return v[0];
}

int one_int(const std::string& value, const LineError& err) {
  const double v = one_number(value, err);
  if (v != std::floor(v)) err.raise("expected an integer");
  return static_cast<int>(v);
}

Vec3 vec3(const std::string& value, const LineError& err) {
  const auto v = numbers(value, err);
  if (v.size() != 3) err.raise("expected three numbers");
  return Vec3(v[0], v[1], v[2]);
}

cplx complex_value(const std::string& value, const LineError& err) {
  const auto v = numbers(value, err);
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  err.raise("expected 're' or 're im'");
}

}  // namespace

Scene parse_scene(const std::string& text) {
  Scene scene;
  std::string kind = "constant";
  ConstantPermittivity constant;
  PolynomialPermittivity poly;
  GridPermittivity grid;
  bool grid_dims = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::config, "config-parse", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const LineError err(line_no, key);

    if (key == "eps_inf_bg") scene.background.eps_inf_bg = one_number(value, err);
    else if (key == "mu") scene.background.mu = one_number(value, err);
    else if (key == "domain_lo") scene.background.omega_domain.lo = vec3(value, err);
    else if (key == "domain_hi") scene.background.omega_domain.hi = vec3(value, err);
    else if (key == "eps0.kind") {
      kind = value;
      if (kind != "constant" && kind != "polynomial" && kind != "grid") err.raise("kind must be constant, polynomial or grid");
    } else if (key == "eps0.value") constant.value = complex_value(value, err);
    else if (key == "eps0.term") {
      const auto v = numbers(value, err);
      if (v.size() != 5) err.raise("expected 're im px py pz'");
      PolynomialTerm t{{v[0], v[1]}, static_cast<int>(v[2]), static_cast<int>(v[3]), static_cast<int>(v[4])};
      if (t.px < 0 || t.py < 0 || t.pz < 0 || t.px != v[2] || t.py != v[3] || t.pz != v[4]) err.raise("powers must be nonnegative integers");
      poly.terms.push_back(t);
    } else if (key == "eps0.grid.n") {
      const Vec3 n = vec3(value, err);
      grid.n = {static_cast<int>(n[0]), static_cast<int>(n[1]), static_cast<int>(n[2])};
      grid_dims = true;
    } else if (key == "eps0.grid.value") {
      const auto v = numbers(value, err);
      if (v.empty() || v.size() % 2 != 0) err.raise("expected pairs 're im'");
      for (std::size_t i = 0; i < v.size(); i += 2) grid.values.emplace_back(v[i], v[i + 1]);
    } else if (key == "lorentz.eps_inf") scene.lorentz.eps_inf = one_number(value, err);
    else if (key == "lorentz.omega_p") scene.lorentz.omega_p = one_number(value, err);
    else if (key == "lorentz.omega_0") scene.lorentz.omega_0 = one_number(value, err);
    else if (key == "lorentz.gamma") scene.lorentz.gamma = one_number(value, err);
    else if (key == "a") scene.a = one_number(value, err);
    else if (key == "t") scene.t = one_number(value, err);
    else if (key == "s") scene.s = one_number(value, err);
    else if (key == "h") scene.h = one_number(value, err);
    else if (key == "d_min") scene.d_min = one_number(value, err);
    else if (key == "shape") {
      if (value == "unit_ball") scene.shape = ShapeTag::unit_ball;
      else if (value == "voxelized") scene.shape = ShapeTag::voxelized;
      else err.raise("shape must be unit_ball or voxelized");
    } else if (key == "voxel.kind") scene.voxel.kind = value;
    else if (key == "voxel.res") scene.voxel.resolution = one_int(value, err);
    else if (key == "voxel.axes") scene.voxel.semi_axes = vec3(value, err);
    else if (key == "mode_index") scene.mode_index = one_int(value, err);
    else if (key == "theta") scene.incidence.theta = vec3(value, err);
    else if (key == "q") scene.incidence.q = vec3(value, err);
    else if (key == "band.n") scene.band.n_samples = one_int(value, err);
    else if (key == "band.omega_min") scene.band.omega_min = one_number(value, err);
    else if (key == "band.omega_max") scene.band.omega_max = one_number(value, err);
    else if (key == "particle") scene.particles.push_back(vec3(value, err));
    else if (key == "background.mode") {
      if (value == "homogeneous") scene.background_mode = BackgroundMode::homogeneous;
      else if (value == "born") scene.background_mode = BackgroundMode::born;
      else err.raise("background.mode must be homogeneous or born");
    } else if (key == "background.res") scene.born_resolution = one_int(value, err);
    else if (key == "background.order") scene.born_order = one_int(value, err);
    else if (key == "gamma_max") scene.gamma_max = one_number(value, err);
    else if (key == "c_im") scene.c_im = one_number(value, err);
    else err.raise("unknown key");
  }

  if (kind == "constant") {
    scene.background.eps0 = constant;
  } else if (kind == "polynomial") {
    scene.background.eps0 = poly;
  } else {
    if (!grid_dims) fail(ErrorCode::config, "config-parse", "grid permittivity needs eps0.grid.n");
    if (grid.values.size() != static_cast<std::size_t>(grid.n[0]) * grid.n[1] * grid.n[2]) {
      fail(ErrorCode::config, "config-parse", "eps0.grid.value count does not match eps0.grid.n");
    }
    scene.background.eps0 = grid;
  }
  if (scene.band.n_samples < 5) fail(ErrorCode::config, "config-parse", "band.n must be at least 5");
  if (scene.born_resolution < 1 || scene.born_order < 0) {
    fail(ErrorCode::config, "config-parse", "background.res must be positive and background.order nonnegative");
  }
  return scene;
}

Scene load_scene(const std::string& path) { return parse_scene(read_file(path)); }

std::string format_scene(const Scene& scene) {
  std::ostringstream os;
  auto num = [](double v) { return format_number(v); };
  auto vec = [&](const Vec3& v) { return num(v[0]) + " " + num(v[1]) + " " + num(v[2]); };
  const auto& bg = scene.background;
  os << "eps_inf_bg = " << num(bg.eps_inf_bg) << "\n";
  os << "mu = " << num(bg.mu) << "\n";
  os << "domain_lo = " << vec(bg.omega_domain.lo) << "\n";
  os << "domain_hi = " << vec(bg.omega_domain.hi) << "\n";
  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, ConstantPermittivity>) {
          os << "eps0.kind = constant\n";
          os << "eps0.value = " << num(spec.value.real()) << " " << num(spec.value.imag()) << "\n";
        } else if constexpr (std::is_same_v<T, PolynomialPermittivity>) {
          os << "eps0.kind = polynomial\n";
          for (const auto& t : spec.terms) {
            os << "eps0.term = " << num(t.coef.real()) << " " << num(t.coef.imag()) << " " << t.px << " " << t.py << " "
               << t.pz << "\n";
          }
        } else {
          os << "eps0.kind = grid\n";
          os << "eps0.grid.n = " << spec.n[0] << " " << spec.n[1] << " " << spec.n[2] << "\n";
          for (const auto& v : spec.values) os << "eps0.grid.value = " << num(v.real()) << " " << num(v.imag()) << "\n";
        }
      },
      bg.eps0);
  const auto& L = scene.lorentz;
  os << "lorentz.eps_inf = " << num(L.eps_inf) << "\n";
  os << "lorentz.omega_p = " << num(L.omega_p) << "\n";
  os << "lorentz.omega_0 = " << num(L.omega_0) << "\n";
  os << "lorentz.gamma = " << num(L.gamma) << "\n";
  os << "a = " << num(scene.a) << "\n";
  os << "t = " << num(scene.t) << "\n";
  os << "s = " << num(scene.s) << "\n";
  os << "h = " << num(scene.h) << "\n";
  if (scene.d_min) os << "d_min = " << num(*scene.d_min) << "\n";
  os << "shape = " << (scene.shape == ShapeTag::unit_ball ? "unit_ball" : "voxelized") << "\n";
  os << "voxel.kind = " << scene.voxel.kind << "\n";
  os << "voxel.res = " << scene.voxel.resolution << "\n";
  os << "voxel.axes = " << vec(scene.voxel.semi_axes) << "\n";
  os << "mode_index = " << scene.mode_index << "\n";
  os << "theta = " << vec(scene.incidence.theta) << "\n";
  os << "q = " << vec(scene.incidence.q) << "\n";
  os << "band.n = " << scene.band.n_samples << "\n";
  if (scene.band.omega_min) os << "band.omega_min = " << num(*scene.band.omega_min) << "\n";
  if (scene.band.omega_max) os << "band.omega_max = " << num(*scene.band.omega_max) << "\n";
  for (const auto& z : scene.particles) os << "particle = " << vec(z) << "\n";
  os << "background.mode = " << (scene.background_mode == BackgroundMode::born ? "born" : "homogeneous") << "\n";
  os << "background.res = " << scene.born_resolution << "\n";
  os << "background.order = " << scene.born_order << "\n";
  os << "gamma_max = " << num(scene.gamma_max) << "\n";
  os << "c_im = " << num(scene.c_im) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Measurement CSV

void write_measurements(std::ostream& out, const MeasurementSeries& series) {
  out << "ell,omega,re,im\n";
  for (std::size_t ell = 0; ell < series.contrasts.size(); ++ell) {
    const auto& row = series.contrasts[ell];
    for (std::size_t w = 0; w < row.size() && w < series.omegas.size(); ++w) {
      out << ell << ',' << format_number(series.omegas[w]) << ',' << format_number(row[w].real()) << ','
          << format_number(row[w].imag()) << '\n';
    }
  }
}

MeasurementSeries read_measurements(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "ell,omega,re,im") {
    fail(ErrorCode::config, "csv-parse", "measurement CSV must start with 'ell,omega,re,im'");
  }
  std::map<int, std::map<double, cplx>> rows;
  std::set<double> omegas;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::array<std::string, 4> fields;
    std::istringstream ss(line);
    for (auto& f : fields) {
      if (!std::getline(ss, f, ',')) fail(ErrorCode::config, "csv-parse", "line " + std::to_string(line_no) + ": expected 4 fields");
    }
    std::array<double, 4> v{};
    for (int i = 0; i < 4; ++i) {
      char* end = nullptr;
      v[static_cast<std::size_t>(i)] = std::strtod(fields[static_cast<std::size_t>(i)].c_str(), &end);
      if (end == fields[static_cast<std::size_t>(i)].c_str() || *end != '\0') {
        fail(ErrorCode::config, "csv-parse", "line " + std::to_string(line_no) + ": '" + fields[static_cast<std::size_t>(i)] + "' is not a number");
      }
    }
    if (v[0] < 0 || v[0] != std::floor(v[0])) fail(ErrorCode::config, "csv-parse", "line " + std::to_string(line_no) + ": bad ell");
    rows[static_cast<int>(v[0])][v[1]] = {v[2], v[3]};
    omegas.insert(v[1]);
  }
  MeasurementSeries series;
  series.omegas.assign(omegas.begin(), omegas.end());
  if (rows.empty()) return series;
  const int top = rows.rbegin()->first;
  series.contrasts.resize(static_cast<std::size_t>(top) + 1);
  for (const auto& [ell, row] : rows) {
    if (row.size() != omegas.size()) continue;  // incomplete level stays empty
    auto& dst = series.contrasts[static_cast<std::size_t>(ell)];
    for (const auto& [w, v] : row) dst.push_back(v);
  }
  return series;
}

void save_measurements(const std::string& path, const MeasurementSeries& series) {
  std::ostringstream os;
  write_measurements(os, series);
  write_file(path, os.str());
}

MeasurementSeries load_measurements(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_measurements(in);
}

// ---------------------------------------------------------------------------
// Reconstruction JSON

using nlohmann::json;

std::string reconstruction_json(const Reconstruction& recon) {
  json root;
  root["particles"] = json::array();
  for (const auto& p : recon.points) {
    root["particles"].push_back({{"index", p.index},
                                 {"z", {p.z[0], p.z[1], p.z[2]}},
                                 {"omega_P_hat", p.omega_hat},
                                 {"eps0_re", p.eps0.real()},
                                 {"eps0_im", p.eps0.imag()},
                                 {"peak_height", p.peak_height},
                                 {"lambda_residual", p.lambda_residual},
                                 {"flag", p.flag}});
  }
  if (recon.interpolant) {
    const auto& d = *recon.interpolant;
    json centers = json::array(), re = json::array(), im = json::array();
    for (const auto& c : d.centers) centers.push_back({c[0], c[1], c[2]});
    for (const auto& b : d.beta) {
      re.push_back(b.real());
      im.push_back(b.imag());
    }
    json interp = {{"basis", basis_name(d.basis)},
                   {"seed", d.seed},
                   {"condition", d.condition},
                   {"domain_lo", {d.domain.lo[0], d.domain.lo[1], d.domain.lo[2]}},
                   {"domain_hi", {d.domain.hi[0], d.domain.hi[1], d.domain.hi[2]}},
                   {"centers", centers},
                   {"beta_re", re},
                   {"beta_im", im}};
    if (d.basis == RbfBasis::gaussian) interp["sigma"] = d.sigma;
    root["interpolant"] = interp;
  } else {
    root["interpolant"] = nullptr;
  }
  return root.dump(2) + "\n";
}

namespace {

Vec3 vec_of(const json& j) { return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()); }

}  // namespace

Reconstruction parse_reconstruction(const std::string& text) {
  Reconstruction recon;
  try {
    const json root = json::parse(text);
    for (const auto& p : root.at("particles")) {
      PointRecovery r;
      r.index = p.at("index").get<int>();
      r.z = vec_of(p.at("z"));
      r.omega_hat = p.at("omega_P_hat").get<double>();
      r.eps0 = {p.at("eps0_re").get<double>(), p.at("eps0_im").get<double>()};
      r.peak_height = p.at("peak_height").get<double>();
      r.lambda_residual = p.value("lambda_residual", 0.0);
      r.flag = p.at("flag").get<std::string>();
      r.ok = r.flag.empty() || r.flag == "boundary-peak";
      recon.points.push_back(r);
    }
    const json& ij = root.at("interpolant");
    if (!ij.is_null()) {
      DrmInterpolant d;
      d.basis = parse_basis(ij.at("basis").get<std::string>());
      d.seed = ij.at("seed").get<std::uint64_t>();
      d.condition = ij.value("condition", 0.0);
      d.sigma = ij.value("sigma", 0.0);
      d.domain.lo = vec_of(ij.at("domain_lo"));
      d.domain.hi = vec_of(ij.at("domain_hi"));
      for (const auto& c : ij.at("centers")) d.centers.push_back(vec_of(c));
      const auto& re = ij.at("beta_re");
      const auto& im = ij.at("beta_im");
      if (re.size() != d.centers.size() || im.size() != d.centers.size()) {
        fail(ErrorCode::config, "recon-parse", "interpolant coefficient count does not match its centers");
      }
      for (std::size_t i = 0; i < re.size(); ++i) d.beta.emplace_back(re[i].get<double>(), im[i].get<double>());
      recon.interpolant = d;
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::config, "recon-parse", e.what());
  }
  return recon;
}

Reconstruction load_reconstruction(const std::string& path) { return parse_reconstruction(read_file(path)); }

std::vector<Vec3> read_points(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,y,z") fail(ErrorCode::config, "csv-parse", "point CSV must start with 'x,y,z'");
  std::vector<Vec3> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    const LineError err(line_no, "point");
    out.push_back(vec3(line, err));
  }
  return out;
}

std::vector<Vec3> load_points(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_points(in);
}

}  // namespace plasmo
