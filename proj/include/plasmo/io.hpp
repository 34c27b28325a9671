#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plasmo/inversion.hpp"
#include "plasmo/measurement.hpp"
#include "plasmo/media.hpp"

namespace plasmo {

/// Scene files are `key = value` lines; see docs/scene_format.md.
Scene parse_scene(const std::string& text);
Scene load_scene(const std::string& path);
std::string format_scene(const Scene& scene);

/// Measurement CSV: header `ell,omega,re,im`, rows sorted by (ell, omega),
/// numbers printed with 17 significant digits.
void write_measurements(std::ostream& out, const MeasurementSeries& series);
/// Rows are grouped by ell on the union of frequencies; a level that is
/// absent or incomplete is left short so `extract_functionals` reports it.
MeasurementSeries read_measurements(std::istream& in);
void save_measurements(const std::string& path, const MeasurementSeries& series);
MeasurementSeries load_measurements(const std::string& path);

struct Reconstruction {
  std::vector<PointRecovery> points;
  std::optional<DrmInterpolant> interpolant;
};

std::string reconstruction_json(const Reconstruction& recon);
Reconstruction parse_reconstruction(const std::string& text);
Reconstruction load_reconstruction(const std::string& path);

/// CSV of points with header `x,y,z`.
std::vector<Vec3> read_points(std::istream& in);
std::vector<Vec3> load_points(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// printf("%.17g") rendering used for every serialized number.
std::string format_number(double v);

}  // namespace plasmo
