#include "schwinger/axioms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "schwinger/errors.hpp"
#include "schwinger/serialization.hpp"

namespace schwinger {

namespace {

using cplx = std::complex<double>;
using Matrix = std::vector<std::vector<cplx>>;

constexpr int kMaxPsdFunctions = 12;

void check_set_size(std::span<const TestFunction> fs) {
  if (fs.size() < 2 || fs.size() > static_cast<std::size_t>(kMaxPsdFunctions)) {
    throw PreconditionError("positivity checks take between 2 and 12 test functions, got " +
                            std::to_string(fs.size()));
  }
}

void require_real(std::span<const TestFunction> fs, const char* check) {
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (!fs[i].is_real()) {
      throw PreconditionError(std::string(check) + ": test function #" + std::to_string(i) + " is not real");
    }
  }
}

void require_positive_time(std::span<const TestFunction> fs) {
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (!positive_time_support(fs[i])) {
      throw PreconditionError("reflection positivity: test function #" + std::to_string(i) +
                              " is not supported at positive times");
    }
  }
}

Matrix reflection_matrix(const GeneratingFunctional& gamma, std::span<const TestFunction> fs) {
  const auto R = Isometry::time_reflection();
  std::vector<TestFunction> reflected;
  reflected.reserve(fs.size());
  for (const auto& f : fs) reflected.push_back(apply_isometry(f, R));
  Matrix m(fs.size(), std::vector<cplx>(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = 0; j < fs.size(); ++j) m[i][j] = gamma(fs[i] - reflected[j]);
  }
  return m;
}

Matrix difference_matrix(const GeneratingFunctional& gamma, std::span<const TestFunction> fs) {
  Matrix m(fs.size(), std::vector<cplx>(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = 0; j < fs.size(); ++j) m[i][j] = gamma(fs[i] - fs[j]);
  }
  return m;
}

CheckReport psd_report(std::string id, const Matrix& m, double tolerance) {
  const PsdWitness w = hermitian_psd_witness(m);
  const double witness = w.trace > 0.0 ? w.min_eigenvalue / w.trace : w.min_eigenvalue;
  CheckReport r = CheckReport::make(std::move(id), witness, tolerance, CheckReport::Bound::at_least);
  r.details.emplace_back("min_eigenvalue", w.min_eigenvalue);
  r.details.emplace_back("trace", w.trace);
  r.details.emplace_back("hermiticity_defect", w.hermiticity_defect);
  return r;
}

// For a mixture M = sum_i w_i M_i with M_i PSD kernels of the children,
// lambda_min(M) >= sum_i w_i lambda_min(M_i).
void add_convexity_bound(CheckReport& report, const SchwingerFunctional& model, std::span<const TestFunction> fs,
                         const KernelOptions& options, bool reflected) {
  if (model.is_leaf()) return;
  double bound = 0.0;
  for (const auto& c : model.children()) {
    const auto gamma = as_generating_functional(*c.child, options);
    const Matrix m = reflected ? reflection_matrix(gamma, fs) : difference_matrix(gamma, fs);
    bound += c.weight * hermitian_psd_witness(m).min_eigenvalue;
  }
  double lam = 0.0, trace = 1.0;
  for (const auto& [k, v] : report.details) {
    if (k == "min_eigenvalue") lam = v;
    if (k == "trace") trace = v;
  }
  report.details.emplace_back("children_convexity_bound", bound);
  report.details.emplace_back("convexity_bound_holds", lam >= bound - 1e-12 * trace ? 1.0 : 0.0);
}

}  // namespace

GeneratingFunctional as_generating_functional(const SchwingerFunctional& model, const KernelOptions& options) {
  return [&model, options](const TestFunction& f) { return evaluate(model, f, 1.0, options); };
}

CheckReport CheckReport::make(std::string id, double witness, double tolerance, Bound bound) {
  CheckReport r;
  r.check_id = std::move(id);
  r.witness = witness;
  r.tolerance = tolerance;
  r.bound = bound;
  r.passed = bound == Bound::at_most ? witness <= tolerance : witness >= tolerance;
  if (!std::isfinite(witness)) r.passed = false;
  return r;
}

bool CheckReport::consistent() const {
  const bool within = std::isfinite(witness) && (bound == Bound::at_most ? witness <= tolerance : witness >= tolerance);
  return within == passed;
}

CheckReport check_normalization_neutrality(const GeneratingFunctional& gamma, std::span<const TestFunction> fs,
                                           double tolerance) {
  require_real(fs, "normalization/neutrality");
  if (fs.empty()) throw PreconditionError("normalization/neutrality needs a nonempty test set");
  const double normalization = std::abs(gamma(TestFunction::zero(fs.front().grid())) - 1.0);
  double neutrality = 0.0;
  for (const auto& f : fs) neutrality = std::max(neutrality, std::abs(gamma(-f) - std::conj(gamma(f))));
  CheckReport r = CheckReport::make("schw0_normalization_neutrality", std::max(normalization, neutrality),
                                     tolerance, CheckReport::Bound::at_most);
  r.details.emplace_back("normalization_defect", normalization);
  r.details.emplace_back("neutrality_defect", neutrality);
  return r;
}

PsdWitness hermitian_psd_witness(const Matrix& matrix) {
  const auto n = static_cast<Eigen::Index>(matrix.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(matrix[i].size()) != n) throw DomainError("PSD witness needs a square matrix");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = matrix[i][j];
  }
  PsdWitness w{};
  w.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  w.min_eigenvalue = solver.eigenvalues().minCoeff();
  w.trace = h.trace().real();
  return w;
}

CheckReport check_reflection_positivity(const GeneratingFunctional& gamma, std::span<const TestFunction> fs,
                                        double tolerance) {
  check_set_size(fs);
  require_real(fs, "reflection positivity");
  require_positive_time(fs);
  return psd_report("schw2_reflection_positivity", reflection_matrix(gamma, fs), tolerance);
}

CheckReport check_stochastic_positivity(const GeneratingFunctional& gamma, std::span<const TestFunction> fs,
                                        double tolerance) {
  check_set_size(fs);
  require_real(fs, "stochastic positivity");
  return psd_report("schw3_stochastic_positivity", difference_matrix(gamma, fs), tolerance);
}

CheckReport check_reflection_positivity(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                                        double tolerance, const KernelOptions& options) {
  CheckReport r = check_reflection_positivity(as_generating_functional(model, options), fs, tolerance);
  add_convexity_bound(r, model, fs, options, true);
  return r;
}

CheckReport check_stochastic_positivity(const SchwingerFunctional& model, std::span<const TestFunction> fs,
                                        double tolerance, const KernelOptions& options) {
  CheckReport r = check_stochastic_positivity(as_generating_functional(model, options), fs, tolerance);
  add_convexity_bound(r, model, fs, options, false);
  return r;
}

CheckReport check_euclidean_invariance(const GeneratingFunctional& gamma, std::span<const TestFunction> fs,
                                       std::span<const Isometry> isometries, double tolerance) {
  double worst = 0.0;
  std::string worst_isometry = "none";
  for (const auto& f : fs) {
    const cplx base = gamma(f);
    for (const auto& g : isometries) {
      const double defect = std::abs(gamma(apply_isometry(f, g)) - base);
      if (defect > worst) {
        worst = defect;
        worst_isometry = g.describe();
      }
    }
  }
  CheckReport r = CheckReport::make("schw4_euclidean_invariance", worst, tolerance, CheckReport::Bound::at_most);
  r.details.emplace_back("functions", static_cast<double>(fs.size()));
  r.details.emplace_back("isometries", static_cast<double>(isometries.size()));
  r.note = "worst isometry: " + worst_isometry;
  return r;
}

std::vector<Isometry> lattice_isometries(const Grid& grid) {
  std::vector<Isometry> out;
  const int n = grid.n();
  const int d = grid.dim();
  auto offset = [&](int a0, int a1, int a2) {
    Coords c{a0, d > 1 ? a1 : 0, d > 2 ? a2 : 0};
    return Isometry::translation(c);
  };
  out.push_back(offset(1, 0, 0));
  out.push_back(offset(0, 3, 0));
  out.push_back(offset(n / 2 - 1, 5, 2));
  out.push_back(offset(n, 0, 0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j) out.push_back(Isometry::rotation(i, j));
    }
  }
  for (int i = 0; i < d; ++i) out.push_back(Isometry::axis_reflection(i));
  out.push_back(Isometry::time_reflection());
  return out;
}

std::vector<Coords> default_separations(const Grid& grid) {
  std::vector<Coords> out;
  for (int s = 4; s <= grid.n() / 4; s += 4) out.push_back({s, 0, 0});
  return out;
}

ClusterResult check_cluster_defect(const SchwingerFunctional& model, const TestFunction& f,
                                   const TestFunction& g, std::span<const Coords> separations,
                                   ClusterMode mode, double tolerance, const KernelOptions& options) {
  require_same_grid(f, g);
  if (separations.empty()) throw DomainError("cluster check needs at least one separation");
  const Grid& grid = f.grid();
  ClusterResult out;
  const cplx gf = evaluate(model, f, 1.0, options);
  const cplx gg = evaluate(model, g, 1.0, options);
  cplx mixed = 0.0;
  for (const auto& leaf : model.flatten()) {
    const auto node = SchwingerFunctional::quasi_free(*leaf.measure);
    mixed += leaf.weight * evaluate(node, f, 1.0, options) * evaluate(node, g, 1.0, options);
  }
  out.predicted_limit = mixed - gf * gg;
  for (const auto& sep : separations) {
    double len2 = 0.0;
    for (int axis = 0; axis < grid.dim(); ++axis) len2 += double(sep[axis]) * sep[axis];
    for (int axis = grid.dim(); axis < 3; ++axis) {
      if (sep[axis] != 0) throw DomainError("separation has components beyond the grid dimension");
    }
    if (std::sqrt(len2) > 0.25 * grid.n() + 1e-12) {
      throw DomainError("separation longer than a quarter of the periodic box");
    }
    const TestFunction shifted = apply_isometry(g, Isometry::translation(sep));
    const cplx delta = evaluate(model, f + shifted, 1.0, options) - gf * gg;
    out.curve.push_back({sep, std::sqrt(len2) * grid.spacing(), delta});
  }
  const cplx last = out.curve.back().delta;
  const double witness = mode == ClusterMode::clusters ? std::abs(last) : std::abs(last - out.predicted_limit);
  out.report = CheckReport::make(mode == ClusterMode::clusters ? "cluster_property" : "cluster_defect_limit",
                                 witness, tolerance, CheckReport::Bound::at_most);
  out.report.details.emplace_back("delta_at_max_separation", last.real());
  out.report.details.emplace_back("predicted_limit", out.predicted_limit.real());
  out.report.details.emplace_back("max_separation", out.curve.back().distance);
  return out;
}

QuasiFreeClassification classify_quasi_free(const SchwingerFunctional& model, const Grid& grid,
                                            std::uint64_t seed, double tolerance, const KernelOptions& options) {
  QuasiFreeClassification out{true, 0.0, tolerance};
  const auto pool = random_packets(grid, 6, seed ^ 0xC1A55u);
  const TestFunction fixture =
      gaussian_packet(grid, {0.5 * grid.extent(), 0.5 * grid.extent(), 0.5 * grid.extent()}, 4.0 * grid.spacing());
  for (int n = 3; n <= 6; ++n) {
    const std::vector<TestFunction> distinct(pool.begin(), pool.begin() + n);
    const std::vector<TestFunction> repeated(n, fixture);
    for (const auto* fs : {&distinct, &repeated}) {
      const double scale = moment_scale(model, *fs, options);
      const double rel = std::abs(cumulant(model, *fs, options)) / scale;
      out.max_relative_cumulant = std::max(out.max_relative_cumulant, rel);
    }
  }
  out.quasi_free = out.max_relative_cumulant <= tolerance;
  return out;
}

SuiteResult run_axiom_suite(const SchwingerFunctional& model, const SuiteConfig& config) {
  SuiteResult out{};
  out.config_digest = suite_digest(model, config);
  const auto& tol = config.tolerances;
  const auto& kernel = config.kernel;
  const Grid& grid = config.grid;
  const auto gamma = as_generating_functional(model, kernel);

  const auto real_set = random_packets(grid, config.test_functions, config.seed);
  PacketSetOptions complex_opts;
  complex_opts.real = false;
  const auto complex_set = random_packets(grid, config.test_functions, config.seed + 1, complex_opts);
  PacketSetOptions positive_opts;
  positive_opts.positive_time = true;
  const auto positive_set = random_packets(grid, config.test_functions, config.seed + 2, positive_opts);

  out.reports.push_back(check_normalization_neutrality(gamma, real_set, tol.normalization));

  {
    RegularityOptions ro;
    ro.ceiling = tol.regularity_ceiling;
    double worst = 0.0;
    bool ok = true;
    for (const auto& f : real_set) {
      const auto rc = regularity_certificate(model, f, ro, kernel);
      worst = std::max(worst, rc.bound.constant);
      ok = ok && rc.passed;
    }
    CheckReport r = CheckReport::make("schw1_regularity", worst, tol.regularity_ceiling, CheckReport::Bound::at_most);
    r.details.emplace_back("floor_m2", model.min_m2());
    r.details.emplace_back("z_points", 64.0);
    r.note = "e = e' = 2, norm ||.||_{-1,m_floor}";
    out.reports.push_back(r);
  }
  {
    const auto g = moment_growth_check(model, grid, config.growth_order, config.growth_trials, config.seed + 3,
                                       tol.growth_ceiling, kernel);
    CheckReport r = CheckReport::make("schw1_moment_growth", g.constant, tol.growth_ceiling, CheckReport::Bound::at_most);
    for (std::size_t n = 0; n < g.worst_ratio.size(); ++n) {
      r.details.emplace_back("worst_ratio_n" + std::to_string(n + 1), g.worst_ratio[n]);
    }
    out.reports.push_back(r);
  }
  out.reports.push_back(check_reflection_positivity(model, positive_set, tol.psd, kernel));
  out.reports.push_back(check_stochastic_positivity(model, real_set, tol.psd, kernel));
  {
    std::vector<TestFunction> all(real_set);
    all.insert(all.end(), complex_set.begin(), complex_set.end());
    out.reports.push_back(check_euclidean_invariance(gamma, all, lattice_isometries(grid), tol.invariance));
  }
  {
    const Grid& cg = config.cluster_grid;
    const TestFunction f = gaussian_packet(cg, {0.5 * cg.extent(), 0.5 * cg.extent(), 0.5 * cg.extent()},
                                           2.0 * cg.spacing());
    const auto seps = default_separations(cg);
    out.reports.push_back(
        check_cluster_defect(model, f, f, seps, ClusterMode::defect, tol.cluster, kernel).report);
  }

  out.classification = classify_quasi_free(model, grid, config.seed + 4, tol.quasi_free, kernel);
  out.passed = true;
  for (auto& r : out.reports) {
    r.config_digest = out.config_digest;
    out.passed = out.passed && r.passed;
  }
  return out;
}

}  // namespace schwinger
