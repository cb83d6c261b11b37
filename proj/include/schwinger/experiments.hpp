#pragma once

// Scripted experiments on two-mass mixtures and the iterated envelope
// construction, plus a grid-refinement study.
//
// Closed-form oracles used below. For a mixture sum_l w_l Gamma_l of
// quasi-free leaves with two-point functions S_l,
//   S^4T(f1..f4) = sum over pairings {B1, B2} of Cov_w(S_l(B1), S_l(B2)),
// because the fourth moment is E_w[sum_pairings S_l(B1) S_l(B2)] and the
// Gaussian part subtracts sum_pairings E_w S_l(B1) E_w S_l(B2).
// With two leaves (w, 1-w):  Cov = w(1-w) dS(B1) dS(B2), dS = S_1 - S_2,
// i.e. 1/4 sum_pairings dS dS at w = 1/2, and 3 w(1-w) dS(f,f)^2 for four
// equal arguments.
// The iterated model lambda-mixes the gaussianized children
// Gamma_{P^alpha} = exp(-1/2 S_{P^alpha}), so the same formula applies with
// leaves S_{P^alpha} and weights lambda_alpha. The single-step model over
// lambda*P mixes the individual atoms instead; by the law of total variance
// its S^4T exceeds the iterated one by 3 E_lambda Var_{P^alpha}(S_m) (equal
// arguments), which vanishes iff every P^alpha is a single atom.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schwinger/functional.hpp"
#include "schwinger/lattice.hpp"
#include "schwinger/propagator.hpp"
#include "schwinger/serialization.hpp"

namespace schwinger {

struct PacketRecipe {
  std::optional<Vec3> center;  // physical; default: box center
  double width = 0.0;          // physical; <= 0 selects 4a
  Vec3 momentum{0.0, 0.0, 0.0};
};

struct ExperimentTolerances {
  double closed_form_relative = 1e-10;
  double zero_scale = 1e-12;
  double nonzero_scale = 1e-6;
  double sigma = 3.0;
  double two_point = 1e-12;
};

/// Document schema "experiment/1"; see README for the keys.
struct ExperimentSpec {
  std::string experiment_id;  // "example-3-1" | "iteration" | "refinement"
  int dim = 2;
  int n = 32;
  double spacing = 0.25;
  /// Refinement: n per axis at each level, fixed extent.
  std::vector<int> levels;
  double extent = 0.0;
  double mass_floor2 = kDefaultMassFloor2;
  std::vector<double> masses2{1.0, 4.0};
  std::vector<double> weights{0.5, 0.5};
  std::vector<SpectralMeasure> families;
  std::vector<double> lambda;
  std::vector<PacketRecipe> packets;  // one (used four times) or four
  std::uint64_t seed = 1;
  std::uint64_t mc_samples = 0;  // 0 skips the Monte Carlo route
  int threads = 0;
  ExperimentTolerances tolerances;
  Json document;  // canonical form (measure files inlined)

  Grid grid() const { return Grid(dim, n, spacing); }
  std::string digest() const { return json_digest(document); }
};

/// Strict reader. Family entries may be inline atom lists or paths to
/// spectral-measure files, resolved against base_dir.
ExperimentSpec experiment_spec_from_json(const Json& j, const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment_spec(const std::filesystem::path& file);

struct ExperimentCheck {
  std::string name;
  bool passed;
  double value;
  double threshold;
  std::string relation;  // "<=", ">=", ">" ...
};

struct ExperimentReport {
  std::string experiment_id;
  std::string spec_digest;
  bool passed = false;
  std::vector<std::pair<std::string, double>> quantities;
  std::vector<ExperimentCheck> checks;
  std::vector<std::string> notes;
  std::string csv;  // curve data, empty when not applicable

  /// Throws std::out_of_range when absent.
  double quantity(const std::string& name) const;
  const ExperimentCheck& check(const std::string& name) const;
};

/// Test functions of the recipe (1 packet -> four copies).
std::vector<TestFunction> recipe_functions(const ExperimentSpec& spec, const Grid& grid);

/// Two-mass mixture: S^4T from the cumulant, from the closed form and from
/// Monte Carlo. Equal masses are allowed (expected zero). Masses below the
/// floor throw DomainError.
ExperimentReport run_example_3_1(const ExperimentSpec& spec);

/// Iterated envelope over the families {P^alpha} with weights lambda versus
/// the single-step mixture over lambda*P. Throws SpecError for fewer than two
/// families or non-probability weights.
ExperimentReport run_iteration(const ExperimentSpec& spec);

/// S^2, S^4T and (d >= 2) the 0-vs-45-degree momentum defect across levels
/// at fixed extent. Throws SpecError for fewer than 3 levels or a non-constant
/// refinement ratio.
ExperimentReport run_refinement_study(const ExperimentSpec& spec);

/// Dispatch on experiment_id.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Models used by the experiments.
SchwingerFunctional two_mass_mixture(double m2_a, double m2_b, double w, double mass_floor2 = kDefaultMassFloor2);
/// envelope(lambda, [gaussianize(envelope(P^alpha, free leaves))]).
SchwingerFunctional iterated_envelope(const std::vector<SpectralMeasure>& families, const std::vector<double>& lambda);
/// Mixture of free leaves over the atoms of sum_alpha lambda_alpha P^alpha.
SchwingerFunctional single_step_envelope(const std::vector<SpectralMeasure>& families,
                                         const std::vector<double>& lambda);

/// sum over pairings of Cov_w(S_l(B1), S_l(B2)) for leaf two-point tables.
/// `leaf_s2[l][i][j]` = S_l(f_i, f_j).
std::complex<double> mixture_cumulant4_oracle(const std::vector<double>& weights,
                                              const std::vector<std::vector<std::vector<std::complex<double>>>>& leaf_s2);

OrderedJson experiment_report_to_json(const ExperimentReport& report);
std::string experiment_summary(const ExperimentReport& report);

}  // namespace schwinger
