#include "schwinger/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/rng.hpp"

namespace schwinger {

namespace {

constexpr double kRealTolerance = 1e-14;
constexpr double kSupportTolerance = 1e-14;
constexpr int kImages = 3;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(int dim, int n_per_axis, double spacing) : dim_(dim), n_(n_per_axis), spacing_(spacing) {
  if (dim < 1 || dim > 3) throw DomainError("grid dimension must be 1, 2 or 3");
  if (!is_power_of_two(n_per_axis) || n_per_axis < 8) {
    throw DomainError("points per axis must be a power of two >= 8, got " + std::to_string(n_per_axis));
  }
  const int cap = dim == 3 ? 16 : 64;
  if (n_per_axis > cap) {
    throw BoundsError("points per axis capped at " + std::to_string(cap) + " for d=" + std::to_string(dim));
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("lattice spacing must be positive");
  sites_ = 1;
  for (int i = 0; i < dim; ++i) sites_ *= n_per_axis;
  cell_volume_ = std::pow(spacing, dim);
  volume_ = std::pow(extent(), dim);
}

Coords Grid::coords(int site) const {
  Coords c{0, 0, 0};
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    c[axis] = site % n_;
    site /= n_;
  }
  return c;
}

int Grid::site(Coords c) const {
  int s = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    int v = c[axis] % n_;
    if (v < 0) v += n_;
    s = s * n_ + v;
  }
  return s;
}

int Grid::negated(int s) const {
  Coords c = coords(s);
  for (int axis = 0; axis < dim_; ++axis) c[axis] = -c[axis];
  return site(c);
}

double Grid::momentum(int index) const noexcept {
  return 2.0 * std::numbers::pi * signed_mode(index) / extent();
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << "d=" << dim_ << " n=" << n_ << " a=" << spacing_;
  return os.str();
}

TestFunction::TestFunction(Grid grid, std::vector<std::complex<double>> values)
    : grid_(grid), values_(std::move(values)), cache_(std::make_shared<MomentumCache>()) {
  if (static_cast<int>(values_.size()) != grid_.sites()) {
    throw DomainError("test function has " + std::to_string(values_.size()) + " values for " +
                      std::to_string(grid_.sites()) + " sites");
  }
  is_real_ = true;
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DomainError("test function values must be finite");
    }
    if (std::abs(v.imag()) > kRealTolerance) is_real_ = false;
  }
}

TestFunction TestFunction::zero(Grid grid) {
  return TestFunction(grid, std::vector<std::complex<double>>(grid.sites()));
}

TestFunction TestFunction::from_real(Grid grid, std::span<const double> values) {
  return TestFunction(grid, std::vector<std::complex<double>>(values.begin(), values.end()));
}

std::span<const std::complex<double>> TestFunction::momentum() const {
  std::call_once(cache_->once, [this] {
    cache_->values.resize(values_.size());
    detail::dft_forward(grid_.dim(), grid_.n(), values_, cache_->values);
    const double w = grid_.cell_volume();
    for (auto& v : cache_->values) v *= w;
  });
  return cache_->values;
}

void require_same_grid(const TestFunction& f, const TestFunction& g) {
  if (!(f.grid() == g.grid())) {
    throw DomainError("test functions live on different grids (" + f.grid().describe() + " vs " +
                      g.grid().describe() + ")");
  }
}

TestFunction operator+(const TestFunction& a, const TestFunction& b) {
  require_same_grid(a, b);
  std::vector<std::complex<double>> out(a.values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] + b.values_[i];
  return TestFunction(a.grid_, std::move(out));
}

TestFunction operator-(const TestFunction& a, const TestFunction& b) {
  require_same_grid(a, b);
  std::vector<std::complex<double>> out(a.values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] - b.values_[i];
  return TestFunction(a.grid_, std::move(out));
}

TestFunction operator*(std::complex<double> c, const TestFunction& f) {
  std::vector<std::complex<double>> out(f.values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * f.values_[i];
  return TestFunction(f.grid_, std::move(out));
}

TestFunction TestFunction::operator-() const {
  std::vector<std::complex<double>> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -values_[i];
  return TestFunction(grid_, std::move(out));
}

std::complex<double> inner_product(const TestFunction& f, const TestFunction& g) {
  require_same_grid(f, g);
  std::complex<double> s = 0.0;
  auto fv = f.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < fv.size(); ++i) s += std::conj(fv[i]) * gv[i];
  return s * f.grid().cell_volume();
}

double l2_norm(const TestFunction& f) { return std::sqrt(inner_product(f, f).real()); }

TestFunction real_part(const TestFunction& f) {
  std::vector<std::complex<double>> out(f.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.values()[i].real();
  return TestFunction(f.grid(), std::move(out));
}

TestFunction fourier(const TestFunction& f) {
  auto m = f.momentum();
  return TestFunction(f.grid(), std::vector<std::complex<double>>(m.begin(), m.end()));
}

TestFunction inverse_fourier(const TestFunction& fk) {
  const Grid& g = fk.grid();
  std::vector<std::complex<double>> out(g.sites());
  detail::dft_backward(g.dim(), g.n(), fk.values(), out);
  const double w = 1.0 / g.volume();
  for (auto& v : out) v *= w;
  return TestFunction(g, std::move(out));
}

TestFunction gaussian_packet(const Grid& grid, Vec3 center, double width, Vec3 momentum,
                             std::optional<double> support_radius) {
  const double a = grid.spacing();
  const double L = grid.extent();
  if (!(width >= 2.0 * a * (1.0 - 1e-12))) {
    throw ResolutionError("packet width " + std::to_string(width) + " below two lattice spacings");
  }
  if (!(width <= 0.25 * L * (1.0 + 1e-12))) {
    throw ResolutionError("packet width " + std::to_string(width) + " above a quarter of the box");
  }
  if (support_radius && !(*support_radius > 0.0)) {
    throw DomainError("support radius must be positive");
  }
  const int n = grid.n();
  // The envelope and the plane wave factorize over axes, so the periodized
  // packet is a product of periodized one-dimensional factors.
  std::vector<std::vector<std::complex<double>>> factor(grid.dim(),
                                                       std::vector<std::complex<double>>(n));
  for (int axis = 0; axis < grid.dim(); ++axis) {
    for (int i = 0; i < n; ++i) {
      std::complex<double> s = 0.0;
      for (int img = -kImages; img <= kImages; ++img) {
        const double y = i * a - center[axis] + img * L;
        s += std::exp(-y * y / (2.0 * width * width)) * std::polar(1.0, momentum[axis] * y);
      }
      factor[axis][i] = s;
    }
  }
  std::vector<std::complex<double>> values(grid.sites());
  for (int s = 0; s < grid.sites(); ++s) {
    const Coords c = grid.coords(s);
    std::complex<double> v = 1.0;
    double r2 = 0.0;
    for (int axis = 0; axis < grid.dim(); ++axis) {
      v *= factor[axis][c[axis]];
      const double dx = std::remainder(c[axis] * a - center[axis], L);
      r2 += dx * dx;
    }
    if (support_radius && std::sqrt(r2) > *support_radius * width) v = 0.0;
    values[s] = v;
  }
  TestFunction raw(grid, std::move(values));
  const double norm = l2_norm(raw);
  if (!(norm > 0.0)) throw ResolutionError("packet support contains no lattice site");
  return (1.0 / norm) * raw;
}

std::vector<double> symbol_table(const Grid& grid, const KernelOptions& options) {
  const int n = grid.n();
  const double a = grid.spacing();
  std::vector<std::vector<double>> per_axis(grid.dim(), std::vector<double>(n));
  for (int axis = 0; axis < grid.dim(); ++axis) {
    for (int i = 0; i < n; ++i) {
      const double k = grid.momentum(i);
      double v;
      if (options.dispersion == Dispersion::lattice) {
        const double s = std::sin(0.5 * k * a);
        v = 4.0 / (a * a) * s * s;
      } else {
        v = k * k;
      }
      per_axis[axis][i] = options.axis_weight[axis] * v;
    }
  }
  std::vector<double> out(grid.sites());
  for (int s = 0; s < grid.sites(); ++s) {
    const Coords c = grid.coords(s);
    double v = 0.0;
    for (int axis = 0; axis < grid.dim(); ++axis) v += per_axis[axis][c[axis]];
    out[s] = v;
  }
  return out;
}

double sobolev_norm(const TestFunction& f, double m2, const KernelOptions& options) {
  if (!(m2 > 0.0)) throw DomainError("Sobolev norm needs m2 > 0 (zero mode diverges)");
  const auto sym = symbol_table(f.grid(), options);
  const auto fk = f.momentum();
  double s = 0.0;
  for (std::size_t i = 0; i < fk.size(); ++i) s += std::norm(fk[i]) / (sym[i] + m2);
  return std::sqrt(s / f.grid().volume());
}

Isometry Isometry::identity() { return Isometry(Kind::identity, {0, 0, 0}); }
Isometry Isometry::translation(Coords offset) { return Isometry(Kind::translation, offset); }
Isometry Isometry::rotation(int from_axis, int to_axis) {
  return Isometry(Kind::rotation, {from_axis, to_axis, 0});
}
Isometry Isometry::axis_reflection(int axis) { return Isometry(Kind::axis_reflection, {axis, 0, 0}); }
Isometry Isometry::time_reflection() { return Isometry(Kind::time_reflection, {0, 0, 0}); }

void Isometry::require_compatible(const Grid& grid) const {
  auto axis_ok = [&](int axis) { return axis >= 0 && axis < grid.dim(); };
  switch (kind_) {
    case Kind::identity:
    case Kind::time_reflection:
      return;
    case Kind::translation:
      for (int axis = grid.dim(); axis < 3; ++axis) {
        if (params_[axis] != 0) throw DomainError("translation has components beyond the grid dimension");
      }
      return;
    case Kind::rotation:
      if (!axis_ok(params_[0]) || !axis_ok(params_[1]) || params_[0] == params_[1]) {
        throw DomainError("rotation needs two distinct axes of the grid");
      }
      return;
    case Kind::axis_reflection:
      if (!axis_ok(params_[0])) throw DomainError("reflection axis outside the grid");
      return;
  }
}

int Isometry::map_site(const Grid& grid, int site) const {
  Coords c = grid.coords(site);
  switch (kind_) {
    case Kind::identity:
      break;
    case Kind::translation:
      for (int axis = 0; axis < grid.dim(); ++axis) c[axis] += params_[axis];
      break;
    case Kind::rotation: {
      const int i = params_[0], j = params_[1];
      const int xi = c[i], xj = c[j];
      c[j] = xi;
      c[i] = -xj;
      break;
    }
    case Kind::axis_reflection:
      c[params_[0]] = -c[params_[0]];
      break;
    case Kind::time_reflection:
      c[0] = -1 - c[0];
      break;
  }
  return grid.site(c);
}

std::string Isometry::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::identity:
      os << "identity";
      break;
    case Kind::translation:
      os << "translation(" << params_[0] << "," << params_[1] << "," << params_[2] << ")";
      break;
    case Kind::rotation:
      os << "rotation(" << params_[0] << "->" << params_[1] << ")";
      break;
    case Kind::axis_reflection:
      os << "reflection(axis " << params_[0] << ")";
      break;
    case Kind::time_reflection:
      os << "time_reflection";
      break;
  }
  return os.str();
}

TestFunction apply_isometry(const TestFunction& f, const Isometry& g) {
  const Grid& grid = f.grid();
  g.require_compatible(grid);
  std::vector<std::complex<double>> out(grid.sites());
  for (int s = 0; s < grid.sites(); ++s) out[g.map_site(grid, s)] = f[s];
  return TestFunction(grid, std::move(out));
}

bool positive_time_support(const TestFunction& f) {
  const Grid& grid = f.grid();
  const int half = grid.n() / 2;
  for (int s = 0; s < grid.sites(); ++s) {
    if (grid.coords(s)[0] >= half && std::abs(f[s]) > kSupportTolerance) return false;
  }
  return true;
}

std::vector<TestFunction> random_packets(const Grid& grid, int count, std::uint64_t seed,
                                         const PacketSetOptions& options) {
  const double a = grid.spacing();
  const double L = grid.extent();
  double w_min = 2.0 * a;
  double w_max = 0.125 * L;
  if (options.positive_time) {
    // Support [t - R w, t + R w] must fit inside [0, L/2 - a].
    w_max = std::min(w_max, (0.5 * L - a) / (2.0 * options.support_radius));
    if (w_max < w_min) throw ResolutionError("box too small for positive-time packets");
  }
  SequentialRng rng(seed, 0x7e57u);
  std::vector<TestFunction> out;
  out.reserve(count);
  const double p_max = options.max_momentum_fraction * std::numbers::pi / a;
  for (int i = 0; i < count; ++i) {
    const double w = rng.uniform(w_min, w_max);
    Vec3 center{0.0, 0.0, 0.0};
    Vec3 p{0.0, 0.0, 0.0};
    for (int axis = 0; axis < grid.dim(); ++axis) {
      center[axis] = rng.uniform(0.0, L);
      p[axis] = rng.uniform(-p_max, p_max);
    }
    std::optional<double> radius;
    if (options.positive_time) {
      const double r = options.support_radius * w;
      center[0] = rng.uniform(r, 0.5 * L - a - r);
      radius = options.support_radius;
    }
    TestFunction f = gaussian_packet(grid, center, w, p, radius);
    if (options.real) {
      f = real_part(f);
      const double norm = l2_norm(f);
      if (norm > 0.0) f = (1.0 / norm) * f;
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace schwinger
