#pragma once

// Numerical checks of the Euclidean axioms for generating functionals on the
// lattice, the cluster property, and the suite that runs them all.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/functional.hpp"
#include "schwinger/lattice.hpp"

namespace schwinger {

/// Any callable f -> Gamma(f); lets the checks run on deliberately broken
/// functionals as negative controls.
using GeneratingFunctional = std::function<std::complex<double>(const TestFunction&)>;

GeneratingFunctional as_generating_functional(const SchwingerFunctional& model, const KernelOptions& options = {});

struct CheckReport {
  enum class Bound { at_most, at_least };

  std::string check_id;
  bool passed = false;
  double witness = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::at_most;
  std::string config_digest;
  /// Extra witness quantities, in insertion order.
  std::vector<std::pair<std::string, double>> details;
  std::string note;

  /// passed is derived from witness, tolerance and bound.
  static CheckReport make(std::string id, double witness, double tolerance, Bound bound);
  bool consistent() const;
};

/// witness = max(|Gamma(0) - 1|, max_f |Gamma(-f) - conj Gamma(f)|) <= tol.
CheckReport check_normalization_neutrality(const GeneratingFunctional& gamma, std::span<const TestFunction> fs,
                                           double tolerance = 1e-12);

struct PsdWitness {
  double min_eigenvalue;
  double trace;
  double hermiticity_defect;  // max |M - M^H| before symmetrization
};

/// Smallest eigenvalue of the Hermitian part of a square matrix.
PsdWitness hermitian_psd_witness(const std::vector<std::vector<std::complex<double>>>& matrix);

/// M_ij = Gamma(f_i - R f_j) over positive-time real functions; witness is the
/// smallest eigenvalue over the trace. Throws PreconditionError naming the
/// first function that is not supported at positive times.
CheckReport check_reflection_positivity(const GeneratingFunctional& gamma, std::span<const TestFunction> fs,
                                        double tolerance = -1e-9);
/// M_ij = Gamma(f_i - f_j).
CheckReport check_stochastic_positivity(const GeneratingFunctional& gamma, std::span<const TestFunction> fs,
                                        double tolerance = -1e-9);

/// Model overloads additionally record, for mixtures, the convexity bound
/// sum_i w_i lambda_min(M_i) built from the children.
CheckReport check_reflection_positivity(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                                        double tolerance = -1e-9, const KernelOptions& options = {});
CheckReport check_stochastic_positivity(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                                        double tolerance = -1e-9, const KernelOptions& options = {});

/// witness = max over (f, g) of |Gamma(g f) - Gamma(f)|.
CheckReport check_euclidean_invariance(const GeneratingFunctional& gamma, std::span<const TestFunction> fs,
                                       std::span<const Isometry> isometries, double tolerance = 1e-10);

/// Translations, quarter turns, axis reflections and the time reflection of
/// the grid's point group (plus lattice translations).
std::vector<Isometry> lattice_isometries(const Grid& grid);

enum class ClusterMode {
  clusters,  // |Delta(a_max)| <= tol
  defect,    // |Delta(a_max) - Delta_inf| <= tol
};

struct ClusterPoint {
  Coords separation;
  double distance;  // physical length of the separation
  std::complex<double> delta;
};

struct ClusterResult {
  CheckReport report;
  std::vector<ClusterPoint> curve;
  /// sum_l w_l Gamma_l(f) Gamma_l(g) - Gamma(f) Gamma(g) over the quasi-free
  /// leaves, each of which clusters.
  std::complex<double> predicted_limit;
};

/// Delta(a) = Gamma(f + g^a) - Gamma(f) Gamma(g) with g^a = g translated by a.
/// a_max is the last separation. Throws DomainError for separations beyond a
/// quarter of the box.
ClusterResult check_cluster_defect(const SchwingerFunctional& model, const TestFunction& f,
                                   const TestFunction& g, std::span<const Coords> separations,
                                   ClusterMode mode, double tolerance = 1e-6,
                                   const KernelOptions& options = {});

/// Multiples of 4 lattice spacings along axis 0 up to n/4.
std::vector<Coords> default_separations(const Grid& grid);

struct SuiteTolerances {
  double normalization = 1e-12;
  double psd = -1e-9;
  double invariance = 1e-10;
  double cluster = 1e-6;
  double quasi_free = 1e-12;
  double regularity_ceiling = 1.0;
  double growth_ceiling = 4.0;
};

struct SuiteConfig {
  Grid grid{2, 32, 0.25};
  /// Large box used for the cluster limit; the default makes the massive
  /// decay reach 1e-6 within a quarter of the box.
  Grid cluster_grid{1, 64, 2.0};
  std::uint64_t seed = 1;
  int test_functions = 8;
  int growth_order = 8;
  int growth_trials = 2;
  SuiteTolerances tolerances{};
  KernelOptions kernel{};
};

struct QuasiFreeClassification {
  bool quasi_free;
  double max_relative_cumulant;  // max over n in {3,4,5,6} of |S^nT| / scale
  double tolerance;
};

struct SuiteResult {
  std::vector<CheckReport> reports;
  QuasiFreeClassification classification;
  bool passed;
  std::string config_digest;
};

/// Quasi-free test: truncated functions of order 3..6 on a seeded set.
QuasiFreeClassification classify_quasi_free(const SchwingerFunctional& model, const Grid& grid,
                                            std::uint64_t seed, double tolerance = 1e-12,
                                            const KernelOptions& options = {});

/// Every check above with seeded test sets; reports come in a fixed order.
SuiteResult run_axiom_suite(const SchwingerFunctional& model, const SuiteConfig& config = {});

}  // namespace schwinger
