#include "schwinger/functional.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "schwinger/errors.hpp"
#include "schwinger/partitions.hpp"

namespace schwinger {

namespace {

using cplx = std::complex<double>;

void check_order(std::span<const TestFunction> fs, int cap) {
  const int n = static_cast<int>(fs.size());
  if (n < 1 || n > cap) {
    throw BoundsError("moment order " + std::to_string(n) + " outside [1, " + std::to_string(cap) + "]");
  }
  for (const auto& f : fs) require_same_grid(fs.front(), f);
}

// haf[mask] = sum over perfect matchings of the subset `mask` of the
// products of pair entries; zero for odd subsets.
std::vector<cplx> hafnian_table(const std::vector<std::vector<cplx>>& pair, int n) {
  std::vector<cplx> haf(std::size_t{1} << n, 0.0);
  haf[0] = 1.0;
  for (SubsetMask mask = 1; mask < (SubsetMask{1} << n); ++mask) {
    if (std::popcount(mask) % 2 != 0) continue;
    const int first = std::countr_zero(mask);
    const SubsetMask rest = mask & ~(SubsetMask{1} << first);
    cplx s = 0.0;
    for (SubsetMask r = rest; r != 0; r &= r - 1) {
      const int j = std::countr_zero(r);
      s += pair[first][j] * haf[rest & ~(SubsetMask{1} << j)];
    }
    haf[mask] = s;
  }
  return haf;
}

std::vector<cplx> leaf_subset_moments(const SpectralMeasure& rho, std::span<const TestFunction> fs,
                                      const KernelOptions& options) {
  const int n = static_cast<int>(fs.size());
  std::vector<std::vector<cplx>> pair(n, std::vector<cplx>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) pair[i][j] = pair[j][i] = spectral_two_point(fs[i], fs[j], rho, options);
  }
  return hafnian_table(pair, n);
}

std::vector<cplx> node_subset_moments(const SchwingerFunctional& node, std::span<const TestFunction> fs,
                                      const KernelOptions& options) {
  if (node.is_leaf()) return leaf_subset_moments(node.measure(), fs, options);
  std::vector<cplx> total(std::size_t{1} << fs.size(), 0.0);
  for (const auto& c : node.children()) {
    const auto part = node_subset_moments(*c.child, fs, options);
    for (std::size_t m = 0; m < total.size(); ++m) total[m] += c.weight * part[m];
  }
  return total;
}

cplx node_moment(const SchwingerFunctional& node, std::span<const TestFunction> fs, const KernelOptions& options) {
  if (node.is_leaf()) {
    const auto haf = leaf_subset_moments(node.measure(), fs, options);
    return haf.back();
  }
  cplx total = 0.0;
  for (const auto& c : node.children()) total += c.weight * node_moment(*c.child, fs, options);
  return total;
}

}  // namespace

SchwingerFunctional::SchwingerFunctional(Node node) : node_(std::move(node)) {}

SchwingerFunctional SchwingerFunctional::quasi_free(SpectralMeasure rho) {
  SchwingerFunctional out{Node{std::move(rho)}};
  out.depth_ = 1;
  out.min_m2_ = std::get<SpectralMeasure>(out.node_).min_m2();
  return out;
}

SchwingerFunctional SchwingerFunctional::mixture(std::vector<std::pair<double, SchwingerFunctional>> children,
                                                 const ModelLimits& limits, Validation validation) {
  if (children.empty()) throw ModelError("mixture needs at least one child");
  std::vector<WeightedChild> nodes;
  nodes.reserve(children.size());
  double sum = 0.0;
  int depth = 0;
  double min_m2 = std::numeric_limits<double>::infinity();
  for (auto& [w, child] : children) {
    if (validation == Validation::strict && (!std::isfinite(w) || w < 0.0)) {
      throw ModelError("mixture weight " + std::to_string(w) + " is negative or not finite");
    }
    sum += w;
    depth = std::max(depth, child.depth());
    min_m2 = std::min(min_m2, child.min_m2());
    nodes.push_back({w, std::make_shared<const SchwingerFunctional>(std::move(child))});
  }
  if (validation == Validation::strict) {
    if (std::abs(sum - 1.0) > limits.weight_tolerance) {
      throw ModelError("mixture weights sum to " + std::to_string(sum) + ", not 1");
    }
    if (depth + 1 > limits.max_depth) {
      throw ModelError("tree depth " + std::to_string(depth + 1) + " exceeds the bound " +
                       std::to_string(limits.max_depth));
    }
  }
  SchwingerFunctional out{Node{std::move(nodes)}};
  out.depth_ = depth + 1;
  out.min_m2_ = min_m2;
  return out;
}

const SpectralMeasure& SchwingerFunctional::measure() const {
  if (!is_leaf()) throw ModelError("mixture node has no spectral measure of its own");
  return std::get<SpectralMeasure>(node_);
}

std::span<const WeightedChild> SchwingerFunctional::children() const noexcept {
  if (is_leaf()) return {};
  return std::get<std::vector<WeightedChild>>(node_);
}

std::vector<FlatLeaf> SchwingerFunctional::flatten() const {
  std::vector<FlatLeaf> out;
  auto rec = [&](auto&& self, const SchwingerFunctional& node, double w) -> void {
    if (node.is_leaf()) {
      out.push_back({w, &node.measure()});
      return;
    }
    for (const auto& c : node.children()) self(self, *c.child, w * c.weight);
  };
  rec(rec, *this, 1.0);
  return out;
}

SchwingerFunctional envelope(std::vector<std::pair<double, SchwingerFunctional>> children,
                             const ModelLimits& limits) {
  return SchwingerFunctional::mixture(std::move(children), limits);
}

std::complex<double> evaluate(const SchwingerFunctional& model, const TestFunction& f, std::complex<double> z,
                              const KernelOptions& options) {
  if (model.is_leaf()) {
    const cplx s = spectral_two_point(f, f, model.measure(), options);
    return std::exp(-0.5 * z * z * s);
  }
  cplx total = 0.0;
  for (const auto& c : model.children()) total += c.weight * evaluate(*c.child, f, z, options);
  return total;
}

std::complex<double> moment_analytic(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                                     const KernelOptions& options) {
  check_order(fs, kMaxMomentOrder);
  return node_moment(model, fs, options);
}

std::vector<std::complex<double>> subset_moments(const SchwingerFunctional& model,
                                                 std::span<const TestFunction> fs,
                                                 const KernelOptions& options) {
  check_order(fs, kMaxMomentOrder);
  return node_subset_moments(model, fs, options);
}

NumericMoment moment_numeric(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                             const KernelOptions& options) {
  check_order(fs, kMaxNumericMomentOrder);
  const int n = static_cast<int>(fs.size());
  const double floor_m2 = model.min_m2();
  std::vector<double> norm(n);
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    norm[i] = sobolev_norm(fs[i], floor_m2, options);
    if (!(norm[i] > 0.0)) norm[i] = 1.0;
    scale *= norm[i];
  }
  // Richardson-extrapolated central differences are O(h^4) with O(eps / h^n)
  // rounding, which balances at h ~ eps^(1/(n+4)).
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (n + 4));

  auto difference = [&](double step) {
    cplx sum = 0.0;
    for (unsigned signs = 0; signs < (1u << n); ++signs) {
      TestFunction arg = TestFunction::zero(fs[0].grid());
      double parity = 1.0;
      for (int i = 0; i < n; ++i) {
        const double s = (signs >> i) & 1u ? -1.0 : 1.0;
        parity *= s;
        arg = arg + (s * step / norm[i]) * fs[i];
      }
      sum += parity * evaluate(model, arg, 1.0, options);
    }
    double denom = 1.0;
    for (int i = 0; i < n; ++i) denom *= 2.0 * step / norm[i];
    // 1 / i^n
    cplx phase = 1.0;
    for (int i = 0; i < n; ++i) phase *= cplx(0.0, -1.0);
    return phase * sum / denom;
  };

  NumericMoment out{};
  out.base_step = h;
  out.coarse = difference(h);
  out.fine = difference(0.5 * h);
  out.value = (4.0 * out.fine - out.coarse) / 3.0;
  out.extrapolation_delta = std::abs(out.fine - out.coarse) / scale;
  out.precision_warning = !std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()) ||
                          out.extrapolation_delta > 1e-2;
  return out;
}

std::complex<double> moment_numeric_value(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                                          const KernelOptions& options) {
  return moment_numeric(model, fs, options).value;
}

std::complex<double> cumulant(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                              const KernelOptions& options) {
  const auto moments = subset_moments(model, fs, options);
  const int n = static_cast<int>(fs.size());
  SubsetValues values(n);
  for (SubsetMask m = 1; m < (SubsetMask{1} << n); ++m) values.set(m, moments[m]);
  return cumulants_from_moments(values, n);
}

SpectralMeasure two_point_measure(const SchwingerFunctional& model) {
  const auto leaves = model.flatten();
  std::vector<SpectralAtom> atoms;
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& leaf : leaves) {
    floor = std::min(floor, leaf.measure->mass_floor2());
    for (const auto& at : leaf.measure->atoms()) atoms.push_back({at.m2, leaf.weight * at.weight});
  }
  return SpectralMeasure(std::move(atoms), floor);
}

SchwingerFunctional gaussianize(const SchwingerFunctional& model) {
  if (model.is_leaf()) return model;
  return SchwingerFunctional::quasi_free(two_point_measure(model));
}

double moment_scale(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                    const KernelOptions& options) {
  const SpectralMeasure rho = two_point_measure(model);
  double scale = 1.0;
  for (const auto& f : fs) {
    double s2 = 0.0;
    for (const auto& at : rho.atoms()) {
      const double nrm = sobolev_norm(f, at.m2, options);
      s2 += at.weight * nrm * nrm;
    }
    scale *= std::sqrt(s2);
  }
  return scale;
}

RegularityResult regularity_certificate(const SchwingerFunctional& model, const TestFunction& f,
                                        const RegularityOptions& options, const KernelOptions& kernel) {
  if (!f.is_real()) throw DomainError("regularity certificate needs a real test function");
  if (options.z.max_modulus > 4.0 || options.z.radial < 1 || options.z.angular < 1) {
    throw DomainError("z-grid must have positive sizes and |z| <= 4");
  }
  RegularityResult out{};
  out.floor_m2 = options.floor_m2 > 0.0 ? options.floor_m2 : model.min_m2();
  out.norm = sobolev_norm(f, out.floor_m2, kernel);
  out.ceiling = options.ceiling;
  out.bound.exponent_z = options.exponent_z;
  out.bound.exponent_norm = options.exponent_norm;
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < options.z.radial; ++i) {
    const double r = options.z.max_modulus * (i + 1) / options.z.radial;
    for (int j = 0; j < options.z.angular; ++j) {
      const cplx z = std::polar(r, 2.0 * std::numbers::pi * j / options.z.angular);
      const double log_mod = std::log(std::abs(evaluate(model, f, z, kernel)));
      const double denom = std::pow(r, options.exponent_z) * std::pow(out.norm, options.exponent_norm);
      ++points;
      if (denom > 0.0) {
        worst = std::max(worst, log_mod / denom);
      } else if (log_mod > 0.0) {
        worst = std::numeric_limits<double>::infinity();
      }
    }
  }
  out.points = points;
  out.bound.constant = worst;
  out.passed = worst <= options.ceiling * (1.0 + 1e-12);
  return out;
}

GrowthReport moment_growth_check(const SchwingerFunctional& model, const Grid& grid, int n_max, int trials,
                                 std::uint64_t seed, double ceiling, const KernelOptions& kernel) {
  if (n_max < 1 || n_max > kMaxMomentOrder) {
    throw BoundsError("growth check order must lie in [1, " + std::to_string(kMaxMomentOrder) + "]");
  }
  GrowthReport out{};
  out.ceiling = ceiling;
  out.worst_ratio.assign(n_max, 0.0);
  const double floor_m2 = model.min_m2();
  double k = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    for (int n = 1; n <= n_max; ++n) {
      auto fs = random_packets(grid, n, seed ^ (0x9E3779B97F4A7C15ull * (1 + trial * 16 + n)));
      for (auto& f : fs) f = (1.0 / sobolev_norm(f, floor_m2, kernel)) * f;
      const double moment = std::abs(moment_analytic(model, fs, kernel));
      const double ratio = moment / std::sqrt(std::tgamma(n + 1.0));
      out.worst_ratio[n - 1] = std::max(out.worst_ratio[n - 1], ratio);
      if (ratio > 0.0) k = std::max(k, std::pow(ratio, 1.0 / (n + 1)));
    }
  }
  out.constant = k;
  out.passed = k <= ceiling;
  return out;
}

}  // namespace schwinger
