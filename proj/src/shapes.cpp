#include "plasmo/shapes.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace plasmo {

EigenMode unit_ball_eigen_data(int n0) {
  if (n0 != 1) {
    fail(ErrorCode::config, "unsupported-mode",
         "only the dipole mode n0 = 1 is known in closed form; use the voxelized shape for n0 = " + std::to_string(n0));
  }
  const double vol = 4.0 * pi / 3.0;
  EigenMode mode;
  mode.lambda = 1.0 / 3.0;
  mode.multiplicity = 3;
  for (int l = 0; l < 3; ++l) mode.moments.push_back(std::sqrt(vol) * Vec3::Unit(l));
  mode.moment_gram = vol * Mat3::Identity();
  return mode;
}

Vec3 VoxelShape::center(int i, int j, int k) const {
  const double h = spacing();
  return Vec3(-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h, -1.0 + (k + 0.5) * h);
}

Vec3 VoxelShape::center(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(resolution);
  return center(static_cast<int>(flat % n), static_cast<int>((flat / n) % n), static_cast<int>(flat / (n * n)));
}

std::vector<std::size_t> VoxelShape::occupied() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < occupancy.size(); ++i) {
    if (occupancy[i]) idx.push_back(i);
  }
  return idx;
}

std::size_t VoxelShape::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), std::uint8_t{1}));
}

namespace {

template <class Inside>
VoxelShape voxelize_by(int resolution, Inside inside) {
  if (resolution < 1) fail(ErrorCode::config, "invalid-resolution", "voxel resolution must be positive");
  VoxelShape shape;
  shape.resolution = resolution;
  const double h = shape.spacing();
  shape.voxel_volume = h * h * h;
  shape.occupancy.assign(static_cast<std::size_t>(resolution) * resolution * resolution, 0);
  for (int k = 0; k < resolution; ++k)
    for (int j = 0; j < resolution; ++j)
      for (int i = 0; i < resolution; ++i) {
        if (inside(shape.center(i, j, k))) {
          shape.occupancy[static_cast<std::size_t>(i + resolution * (j + resolution * k))] = 1;
        }
      }
  return shape;
}

}  // namespace

VoxelShape voxelize_ball(int resolution) {
  return voxelize_by(resolution, [](const Vec3& x) { return x.squaredNorm() <= 1.0; });
}

VoxelShape voxelize_ellipsoid(int resolution, const Vec3& semi_axes) {
  if ((semi_axes.array() <= 0.0).any() || (semi_axes.array() > 1.0).any()) {
    fail(ErrorCode::config, "invalid-shape", "ellipsoid semi-axes must lie in (0, 1]");
  }
  return voxelize_by(resolution, [&](const Vec3& x) { return x.cwiseQuotient(semi_axes).squaredNorm() <= 1.0; });
}

VoxelShape voxelize_cube(int resolution, double half_width) {
  if (!(half_width > 0.0) || half_width > 1.0) {
    fail(ErrorCode::config, "invalid-shape", "cube half-width must lie in (0, 1]");
  }
  return voxelize_by(resolution, [&](const Vec3& x) { return x.cwiseAbs().maxCoeff() <= half_width; });
}

VoxelShape single_voxel(int resolution) {
  VoxelShape shape = voxelize_by(resolution, [](const Vec3&) { return false; });
  const int c = resolution / 2;
  shape.occupancy[static_cast<std::size_t>(c + resolution * (c + resolution * c))] = 1;
  return shape;
}

VoxelShape voxelize(const VoxelShapeSpec& spec) {
  if (spec.kind == "ball") return voxelize_ball(spec.resolution);
  if (spec.kind == "ellipsoid") return voxelize_ellipsoid(spec.resolution, spec.semi_axes);
  if (spec.kind == "cube") return voxelize_cube(spec.resolution, spec.semi_axes[0]);
  if (spec.kind == "voxel") return single_voxel(spec.resolution);
  fail(ErrorCode::config, "invalid-shape", "unknown voxel shape kind '" + spec.kind + "'");
}

// ---------------------------------------------------------------------------

namespace {

// Symmetric tensor components in the order xx, yy, zz, xy, xz, yz.
constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};

int pair_slot(int a, int b) {
  if (a == b) return a;
  if (a > b) std::swap(a, b);
  return a == 0 ? (b == 1 ? 3 : 4) : 5;
}

}  // namespace

struct MagnetizationOperator::Impl {
  int n = 0;       // shape resolution
  int m = 0;       // padded size, 2n
  std::size_t real_size = 0;
  std::size_t spec_size = 0;
  std::array<std::vector<std::complex<double>>, 6> kernel_hat;
  double* rbuf = nullptr;
  fftw_complex* cbuf = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(rbuf);
    fftw_free(cbuf);
  }

  std::size_t ridx(int i, int j, int k) const {
    return static_cast<std::size_t>(k) + static_cast<std::size_t>(m) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(m) * i);
  }
};

MagnetizationOperator::MagnetizationOperator(const VoxelShape& shape) : shape_(shape), impl_(std::make_unique<Impl>()) {
  if (shape.resolution < 8) {
    fail(ErrorCode::config, "resolution-too-low", "magnetization operator needs at least 8^3 voxels");
  }
  auto& im = *impl_;
  im.n = shape.resolution;
  im.m = 2 * im.n;
  im.real_size = static_cast<std::size_t>(im.m) * im.m * im.m;
  im.spec_size = static_cast<std::size_t>(im.m) * im.m * (im.m / 2 + 1);
  im.rbuf = fftw_alloc_real(im.real_size);
  im.cbuf = fftw_alloc_complex(im.spec_size);
  im.forward = fftw_plan_dft_r2c_3d(im.m, im.m, im.m, im.rbuf, im.cbuf, FFTW_ESTIMATE);
  im.backward = fftw_plan_dft_c2r_3d(im.m, im.m, im.m, im.cbuf, im.rbuf, FFTW_ESTIMATE);

  // Kernel in voxel units: vol * (I - 3 r^ r^) / (4 pi |r|^3) is scale free.
  for (int slot = 0; slot < 6; ++slot) {
    const int a = kPairs[slot][0], b = kPairs[slot][1];
    std::fill(im.rbuf, im.rbuf + im.real_size, 0.0);
    for (int di = -(im.n - 1); di <= im.n - 1; ++di)
      for (int dj = -(im.n - 1); dj <= im.n - 1; ++dj)
        for (int dk = -(im.n - 1); dk <= im.n - 1; ++dk) {
          double value;
          if (di == 0 && dj == 0 && dk == 0) {
            value = a == b ? 1.0 / 3.0 : 0.0;
          } else {
            const Vec3 d(di, dj, dk);
            const double r2 = d.squaredNorm();
            const double r = std::sqrt(r2);
            value = ((a == b ? 1.0 : 0.0) - 3.0 * d[a] * d[b] / r2) / (4.0 * pi * r2 * r);
          }
          im.rbuf[im.ridx((di + im.m) % im.m, (dj + im.m) % im.m, (dk + im.m) % im.m)] = value;
        }
    fftw_execute(im.forward);
    auto& out = im.kernel_hat[slot];
    out.resize(im.spec_size);
    for (std::size_t s = 0; s < im.spec_size; ++s) out[s] = {im.cbuf[s][0], im.cbuf[s][1]};
  }
}

MagnetizationOperator::~MagnetizationOperator() = default;

VoxelField MagnetizationOperator::apply(const VoxelField& field) const {
  const auto occ = shape_.occupied();
  if (field.size() != occ.size()) {
    fail(ErrorCode::validation, "field-size", "field must have one vector per occupied voxel");
  }
  auto& im = *impl_;
  const auto n = static_cast<std::size_t>(im.n);
  std::array<std::vector<std::complex<double>>, 3> field_hat;
  for (int c = 0; c < 3; ++c) {
    std::fill(im.rbuf, im.rbuf + im.real_size, 0.0);
    for (std::size_t p = 0; p < occ.size(); ++p) {
      const std::size_t f = occ[p];
      im.rbuf[im.ridx(static_cast<int>(f % n), static_cast<int>((f / n) % n), static_cast<int>(f / (n * n)))] = field[p][c];
    }
    fftw_execute(im.forward);
    field_hat[c].resize(im.spec_size);
    for (std::size_t s = 0; s < im.spec_size; ++s) field_hat[c][s] = {im.cbuf[s][0], im.cbuf[s][1]};
  }

  VoxelField out(occ.size(), Vec3::Zero());
  const double scale = 1.0 / static_cast<double>(im.real_size);
  for (int a = 0; a < 3; ++a) {
    for (std::size_t s = 0; s < im.spec_size; ++s) {
      std::complex<double> acc = 0.0;
      for (int b = 0; b < 3; ++b) acc += im.kernel_hat[pair_slot(a, b)][s] * field_hat[b][s];
      im.cbuf[s][0] = acc.real();
      im.cbuf[s][1] = acc.imag();
    }
    fftw_execute(im.backward);
    for (std::size_t p = 0; p < occ.size(); ++p) {
      const std::size_t f = occ[p];
      out[p][a] = scale * im.rbuf[im.ridx(static_cast<int>(f % n), static_cast<int>((f / n) % n), static_cast<int>(f / (n * n)))];
    }
  }
  return out;
}

VoxelField magnetization_apply(const VoxelShape& shape, const VoxelField& field) {
  return MagnetizationOperator(shape).apply(field);
}

// ---------------------------------------------------------------------------

namespace {

using Exponent = std::array<int, 3>;

std::vector<Exponent> monomials(int degree) {
  std::vector<Exponent> out;
  for (int a = degree; a >= 0; --a)
    for (int b = degree - a; b >= 0; --b) out.push_back({a, b, degree - a - b});
  return out;
}

// Coefficient vectors (over monomials(degree)) spanning the harmonic polynomials.
Eigen::MatrixXd harmonic_basis(int degree) {
  const auto cols = monomials(degree);
  if (degree < 2) return Eigen::MatrixXd::Identity(static_cast<long>(cols.size()), static_cast<long>(cols.size()));
  const auto rows = monomials(degree - 2);
  std::map<Exponent, long> row_of;
  for (std::size_t r = 0; r < rows.size(); ++r) row_of[rows[r]] = static_cast<long>(r);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<long>(rows.size()), static_cast<long>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (int d = 0; d < 3; ++d) {
      const int p = cols[c][d];
      if (p < 2) continue;
      Exponent e = cols[c];
      e[d] -= 2;
      lap(row_of.at(e), static_cast<long>(c)) += p * (p - 1);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lap);
  return lu.kernel();
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

Vec3 polynomial_gradient(const std::vector<Exponent>& mono, const Eigen::VectorXd& coef, const Vec3& x) {
  Vec3 g = Vec3::Zero();
  for (std::size_t i = 0; i < mono.size(); ++i) {
    const double c = coef[static_cast<long>(i)];
    if (c == 0.0) continue;
    const auto& e = mono[i];
    for (int d = 0; d < 3; ++d) {
      if (e[d] == 0) continue;
      double term = c * e[d];
      for (int o = 0; o < 3; ++o) term *= ipow(x[o], o == d ? e[o] - 1 : e[o]);
      g[d] += term;
    }
  }
  return g;
}

Eigen::VectorXd flatten(const VoxelField& f) {
  Eigen::VectorXd v(3 * static_cast<long>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v.segment<3>(3 * static_cast<long>(i)) = f[i];
  return v;
}

VoxelField unflatten(const Eigen::VectorXd& v) {
  VoxelField f(static_cast<std::size_t>(v.size() / 3));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = v.segment<3>(3 * static_cast<long>(i));
  return f;
}

}  // namespace

std::vector<EigenMode> magnetization_spectrum(const VoxelShape& shape, int count, const SpectrumOptions& opts) {
  const auto occ = shape.occupied();
  if (count < 1 || static_cast<std::size_t>(count) > 3 * occ.size()) {
    fail(ErrorCode::config, "invalid-count", "count must lie in [1, 3 * occupied voxels]");
  }
  const MagnetizationOperator op(shape);
  const double vol = shape.voxel_volume;
  const long dim = 3 * static_cast<long>(occ.size());

  int degree = opts.max_degree > 0 ? opts.max_degree : count + 2;
  constexpr int kDegreeCap = 12;
  for (;; ++degree) {
    // Gradients of harmonic polynomials of degree 1..degree at voxel centers.
    std::vector<Eigen::VectorXd> columns;
    for (int n = 1; n <= degree; ++n) {
      const auto mono = monomials(n);
      const Eigen::MatrixXd basis = harmonic_basis(n);
      for (long c = 0; c < basis.cols(); ++c) {
        Eigen::VectorXd v(dim);
        for (std::size_t p = 0; p < occ.size(); ++p) {
          v.segment<3>(3 * static_cast<long>(p)) = polynomial_gradient(mono, basis.col(c), shape.center(occ[p]));
        }
        columns.push_back(std::move(v));
      }
    }
    Eigen::MatrixXd B(dim, static_cast<long>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) B.col(static_cast<long>(c)) = columns[c];

    // Orthonormalize in the voxel-weighted inner product, dropping dependent directions.
    const Eigen::MatrixXd gram = vol * B.transpose() * B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(gram);
    const double gmax = ge.eigenvalues().maxCoeff();
    std::vector<long> keep;
    for (long i = 0; i < gram.rows(); ++i) {
      if (ge.eigenvalues()[i] > 1e-10 * gmax) keep.push_back(i);
    }
    Eigen::MatrixXd Q(dim, static_cast<long>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      Q.col(static_cast<long>(i)) = B * ge.eigenvectors().col(keep[i]) / std::sqrt(ge.eigenvalues()[keep[i]]);
    }

    Eigen::MatrixXd AQ(dim, Q.cols());
    for (long c = 0; c < Q.cols(); ++c) AQ.col(c) = flatten(op.apply(unflatten(Q.col(c))));
    Eigen::MatrixXd H = vol * Q.transpose() * AQ;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> he(H);
    const Eigen::VectorXd vals = he.eigenvalues();  // ascending
    const Eigen::MatrixXd vecs = Q * he.eigenvectors();

    std::vector<EigenMode> modes;
    long i = 0;
    while (i < vals.size() && static_cast<int>(modes.size()) < count) {
      EigenMode mode;
      long j = i;
      double sum = 0.0;
      while (j < vals.size() && std::abs(vals[j] - vals[i]) <= opts.cluster_tol * std::abs(vals[i])) {
        Vec3 m = Vec3::Zero();
        for (std::size_t p = 0; p < occ.size(); ++p) m += vol * vecs.col(j).segment<3>(3 * static_cast<long>(p));
        mode.moments.push_back(m);
        mode.moment_gram += m * m.transpose();
        sum += vals[j];
        ++j;
      }
      mode.multiplicity = static_cast<int>(j - i);
      mode.lambda = sum / mode.multiplicity;
      modes.push_back(std::move(mode));
      i = j;
    }
    // The last cluster may be truncated by the subspace; require one spare
    // eigenvalue unless the subspace already fills the whole voxel space.
    if (static_cast<int>(modes.size()) == count && (i < vals.size() || Q.cols() == dim)) return modes;
    if (degree >= kDegreeCap) {
      fail(ErrorCode::numerical, "non-convergence",
           "polynomial subspace up to degree " + std::to_string(degree) + " does not resolve " + std::to_string(count) +
               " eigenvalue clusters");
    }
  }
}

}  // namespace plasmo
