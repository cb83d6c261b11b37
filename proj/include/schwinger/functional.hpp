#pragma once

// Schwinger generating functionals built from quasi-free leaves
//   Gamma_rho(f) = exp(-1/2 S_rho(f, f))
// and finite convex mixtures of them, together with their moment and
// cumulant (truncated) functions.
//
// Moments follow the convention S^n = (1/i^n) d^n/dt_1..dt_n Gamma(sum t_i f_i)
// at t = 0, so S^2 equals the spectral two-point function and every model
// built here is centered (odd moments vanish identically).

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "schwinger/lattice.hpp"
#include "schwinger/propagator.hpp"

namespace schwinger {

class SchwingerFunctional;

struct WeightedChild {
  double weight;
  std::shared_ptr<const SchwingerFunctional> child;
};

struct ModelLimits {
  int max_depth = 4;
  double weight_tolerance = 1e-12;
};

/// `unchecked` skips the weight and depth validation. It exists only to build
/// deliberately broken models for negative controls.
enum class Validation { strict, unchecked };

/// Leaf of a flattened tree: product of the path weights and the leaf measure.
struct FlatLeaf {
  double weight;
  const SpectralMeasure* measure;
};

/// Immutable tree: either a quasi-free leaf or a convex mixture of subtrees.
class SchwingerFunctional {
 public:
  static SchwingerFunctional quasi_free(SpectralMeasure rho);
  /// Throws ModelError unless weights are nonnegative, sum to 1 within the
  /// tolerance, and the resulting depth fits limits.max_depth.
  static SchwingerFunctional mixture(std::vector<std::pair<double, SchwingerFunctional>> children,
                                     const ModelLimits& limits = {},
                                     Validation validation = Validation::strict);

  bool is_leaf() const noexcept { return std::holds_alternative<SpectralMeasure>(node_); }
  /// Leaf measure; throws ModelError on a mixture node.
  const SpectralMeasure& measure() const;
  /// Children of a mixture; empty span on a leaf.
  std::span<const WeightedChild> children() const noexcept;

  /// Number of levels; a lone leaf has depth 1.
  int depth() const noexcept { return depth_; }
  /// Smallest atom m^2 anywhere in the tree.
  double min_m2() const noexcept { return min_m2_; }
  /// Leaves with their path weights, depth-first.
  std::vector<FlatLeaf> flatten() const;

 private:
  using Node = std::variant<SpectralMeasure, std::vector<WeightedChild>>;
  explicit SchwingerFunctional(Node node);
  Node node_;
  int depth_ = 1;
  double min_m2_ = 0.0;
};

/// Convex combination node; identical to SchwingerFunctional::mixture.
SchwingerFunctional envelope(std::vector<std::pair<double, SchwingerFunctional>> children,
                             const ModelLimits& limits = {});

/// Gamma(z f): leaves give exp(-1/2 z^2 S_rho(f, f)), mixtures the weighted
/// sum of their children.
std::complex<double> evaluate(const SchwingerFunctional& model, const TestFunction& f,
                              std::complex<double> z = 1.0, const KernelOptions& options = {});

/// Largest moment order accepted by the analytic routes.
inline constexpr int kMaxMomentOrder = 8;
/// Largest order handled by finite differences.
inline constexpr int kMaxNumericMomentOrder = 4;

/// Pairing (Wick) sums on the leaves, weight sums on the mixtures.
std::complex<double> moment_analytic(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                                     const KernelOptions& options = {});

struct NumericMoment {
  std::complex<double> value;   // Richardson-extrapolated
  std::complex<double> coarse;  // step h
  std::complex<double> fine;    // step h/2
  double base_step;             // h before per-function scaling
  double extrapolation_delta;   // |fine - coarse| / scale
  bool precision_warning;
};

/// Central mixed finite differences of Gamma(sum t_i f_i), one Richardson level.
std::complex<double> moment_numeric_value(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                                          const KernelOptions& options = {});
NumericMoment moment_numeric(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                             const KernelOptions& options = {});

/// Truncated n-point function from the sub-moments by Mobius inversion.
std::complex<double> cumulant(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                              const KernelOptions& options = {});

/// All subset moments in one pass: entry `mask` holds S^{|B|}(f_B).
std::vector<std::complex<double>> subset_moments(const SchwingerFunctional& model,
                                                 std::span<const TestFunction> fs,
                                                 const KernelOptions& options = {});

/// Product of the two-point norms sqrt(S^2(f_i, f_i)); the natural magnitude
/// of an n-point function, used to make tolerances relative.
double moment_scale(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                    const KernelOptions& options = {});

/// Quasi-free model with the same two-point function: path weights pushed
/// down onto the atoms and merged.
SchwingerFunctional gaussianize(const SchwingerFunctional& model);

/// Flattened spectral measure of the two-point function.
SpectralMeasure two_point_measure(const SchwingerFunctional& model);

struct ZGrid {
  int radial = 8;
  int angular = 8;
  double max_modulus = 4.0;
};

struct RegularityBound {
  double constant;        // smallest C on the sampled z-grid
  double exponent_z = 2;  // e
  double exponent_norm = 2;  // e'
};

struct RegularityResult {
  bool passed;
  RegularityBound bound;
  double ceiling;   // largest admissible C
  double norm;      // ||f||_{-1, m_floor}
  double floor_m2;  // mass used for the norm
  int points;
};

struct RegularityOptions {
  ZGrid z{};
  double exponent_z = 2.0;
  double exponent_norm = 2.0;
  double ceiling = 1.0;
  /// m^2 of the norm; <= 0 selects the smallest atom of the tree.
  double floor_m2 = 0.0;
};

/// Checks |Gamma(z f)| <= exp(C |z|^e ||f||^e') on a polar grid.
RegularityResult regularity_certificate(const SchwingerFunctional& model, const TestFunction& f,
                                        const RegularityOptions& options = {},
                                        const KernelOptions& kernel = {});

struct GrowthReport {
  bool passed;
  double constant;   // smallest K with |S^n| <= K^(n+1) sqrt(n!) over the sample
  double ceiling;
  std::vector<double> worst_ratio;  // per n: max |S^n| / sqrt(n!)
};

/// Random unit-norm (in ||.||_{-1, m_floor}) packets on `grid`.
GrowthReport moment_growth_check(const SchwingerFunctional& model, const Grid& grid, int n_max, int trials,
                                 std::uint64_t seed, double ceiling = 4.0, const KernelOptions& kernel = {});

}  // namespace schwinger
