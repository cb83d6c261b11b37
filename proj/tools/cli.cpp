#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "schwinger/axioms.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/experiments.hpp"
#include "schwinger/functional.hpp"
#include "schwinger/montecarlo.hpp"
#include "schwinger/serialization.hpp"

namespace schwinger::cli {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string grid;
  std::string cluster_grid;
  std::optional<std::uint64_t> seed;
  std::string out = "schwinger_out";
  std::string format = "human";
  std::string tolerance_file;
  int threads = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

Grid parse_grid(const std::string& text, const std::string& flag) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw SchemaError(flag, "expected d,n,a");
  try {
    std::size_t used = 0;
    const int d = std::stoi(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("d");
    const int n = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("n");
    const double a = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("a");
    return Grid(d, n, a);
  } catch (const std::logic_error&) {
    throw SchemaError(flag, "expected d,n,a with integer d, n and a positive spacing");
  } catch (const Error& e) {
    throw SchemaError(flag, e.what());
  }
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  for (const auto& p : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(p, &used));
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::logic_error&) {
      throw SchemaError("--levels", "expected comma-separated integers");
    }
  }
  return out;
}

// Both forms always land in --out; stdout gets the requested one.
void emit(const Globals& g, std::ostream& out, const std::string& stem, const OrderedJson& machine,
          const std::string& human) {
  const std::string text = machine.dump(2) + "\n";
  write_text_file(fs::path(g.out) / (stem + ".json"), text);
  write_text_file(fs::path(g.out) / (stem + ".txt"), human);
  out << (g.format == "machine" ? text : human);
}

SuiteConfig suite_config(const Globals& g, const LoadedModel& lm) {
  SuiteConfig cfg;
  if (!g.grid.empty()) cfg.grid = parse_grid(g.grid, "--grid");
  if (!g.cluster_grid.empty()) cfg.cluster_grid = parse_grid(g.cluster_grid, "--cluster-grid");
  if (g.seed) cfg.seed = *g.seed;
  if (!g.tolerance_file.empty()) cfg.tolerances = tolerances_from_json(read_json_file(g.tolerance_file));
  cfg.kernel = lm.kernel;
  return cfg;
}

int cmd_verify(const Globals& g, const std::string& model_file, std::ostream& out, std::ostream& err) {
  const LoadedModel lm = load_model(model_file);
  const SuiteConfig cfg = suite_config(g, lm);
  const SuiteResult res = run_axiom_suite(lm.model, cfg);
  OrderedJson j = suite_to_json(res);
  j["command"] = "verify";
  emit(g, out, "verify", j, suite_table(res));
  if (!res.passed) {
    for (const auto& r : res.reports) {
      if (!r.passed) {
        err << "first failure: " << r.check_id << " (witness " << format_double(r.witness) << ")\n";
        break;
      }
    }
    return kExitCheckFailure;
  }
  return kExitPass;
}

std::vector<TestFunction> recipe_from_file(const std::string& file, const Grid& grid) {
  const Json j = read_json_file(file);
  ObjectReader r(j, "");
  const std::string schema = r.string("schema");
  if (schema != "packet-recipe/1") throw SchemaError("schema", "expected \"packet-recipe/1\", got \"" + schema + "\"");
  Json spec{{"schema", "experiment/1"},
            {"experiment_id", "example-3-1"},
            {"grid", grid_to_json(grid)},
            {"packets", r.at("packets")}};
  r.finish();
  auto fake = experiment_spec_from_json(spec);
  auto fs = recipe_functions(fake, grid);
  fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(fake.packets.size()), fs.end());
  return fs;
}

int cmd_moments(const Globals& g, const std::string& model_file, int order, const std::string& recipe,
                const std::vector<std::string>& function_files, std::ostream& out) {
  if (order < 1 || order > kMaxMomentOrder) throw BoundsError("--order must lie in 1..8");
  const LoadedModel lm = load_model(model_file);
  Grid grid = g.grid.empty() ? Grid(2, 32, 0.25) : parse_grid(g.grid, "--grid");
  std::vector<TestFunction> fs;
  Json fdigests = Json::array();
  for (const auto& f : function_files) {
    fs.push_back(test_function_from_json(read_json_file(f)));
    grid = fs.back().grid();
  }
  if (fs.empty() && !recipe.empty()) fs = recipe_from_file(recipe, grid);
  if (fs.empty()) {
    const double L = grid.extent();
    fs.push_back(gaussian_packet(grid, {0.5 * L, 0.5 * L, 0.5 * L}, 4.0 * grid.spacing()));
  }
  for (const auto& f : fs) fdigests.push_back(json_digest(test_function_to_json(f)));
  const std::string digest =
      json_digest(Json{{"model", lm.document}, {"functions", fdigests}, {"order", order}, {"grid", grid_to_json(grid)}});

  OrderedJson rows = OrderedJson::array();
  std::ostringstream human;
  human << "config digest " << digest << "\n";
  human << "n  method    S^n                       S^nT                      delta\n";
  bool precision = false;
  for (int k = 1; k <= order; ++k) {
    std::vector<TestFunction> args;
    for (int i = 0; i < k; ++i) args.push_back(fs[i % fs.size()]);
    const auto analytic = moment_analytic(lm.model, args, lm.kernel);
    const auto truncated = cumulant(lm.model, args, lm.kernel);
    const double scale = moment_scale(lm.model, args, lm.kernel);
    OrderedJson row;
    row["order"] = k;
    row["moment"] = {analytic.real(), analytic.imag()};
    row["truncated"] = {truncated.real(), truncated.imag()};
    row["scale"] = scale;
    std::string method = "analytic";
    double delta = 0.0;
    if (k <= kMaxNumericMomentOrder) {
      const auto num = moment_numeric(lm.model, args, lm.kernel);
      method = "both";
      delta = std::abs(num.value - analytic) / scale;
      row["numeric"] = {num.value.real(), num.value.imag()};
      row["extrapolation_delta"] = num.extrapolation_delta;
      row["precision_warning"] = num.precision_warning;
      precision = precision || num.precision_warning;
    } else {
      row["numeric"] = nullptr;
    }
    row["method"] = method;
    row["delta"] = delta;
    rows.push_back(row);
    human << std::left << std::setw(3) << k << std::setw(10) << method << std::setw(26)
          << format_double(analytic.real()) << std::setw(26) << format_double(truncated.real())
          << (method == "both" ? format_double(delta) : std::string("-")) << "\n";
  }
  OrderedJson j;
  j["schema"] = "moment-table/1";
  j["command"] = "moments";
  j["config_digest"] = digest;
  j["rows"] = rows;
  emit(g, out, "moments", j, human.str());
  return precision ? kExitPrecision : kExitPass;
}

int finish_experiment(const Globals& g, const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const ExperimentReport rep = run_experiment(spec);
  OrderedJson j = experiment_report_to_json(rep);
  j["command"] = "experiment";
  emit(g, out, "experiment", j, experiment_summary(rep));
  if (!rep.csv.empty()) write_text_file(fs::path(g.out) / "experiment.csv", rep.csv);
  if (!rep.passed) {
    for (const auto& c : rep.checks) {
      if (!c.passed) {
        err << "first failure: " << c.name << "\n";
        break;
      }
    }
    return kExitCheckFailure;
  }
  return kExitPass;
}

void apply_overrides(const Globals& g, Json& j) {
  if (!g.grid.empty()) j["grid"] = grid_to_json(parse_grid(g.grid, "--grid"));
  if (g.seed) j["seed"] = *g.seed;
  if (g.threads > 0) {
    if (!j.contains("monte_carlo")) j["monte_carlo"] = Json::object();
    if (j["monte_carlo"].is_object()) j["monte_carlo"]["threads"] = g.threads;
  }
}

int cmd_experiment(const Globals& g, const std::string& file, std::ostream& out, std::ostream& err) {
  Json j = read_json_file(file);
  apply_overrides(g, j);
  return finish_experiment(g, experiment_spec_from_json(j, fs::path(file).parent_path()), out, err);
}

int cmd_refine(const Globals& g, const std::string& file, const std::string& levels, double extent, int dim,
               std::ostream& out, std::ostream& err) {
  Json j;
  if (!file.empty()) {
    j = read_json_file(file);
    if (!j.is_object() || j.value("experiment_id", "") != "refinement") {
      throw SpecError("refine expects an experiment spec with experiment_id \"refinement\"");
    }
  } else {
    const auto lv = parse_levels(levels);
    j = Json{{"schema", "experiment/1"},
             {"experiment_id", "refinement"},
             {"grid", Json{{"d", dim}}},
             {"refinement", Json{{"levels", lv}, {"extent", extent}}}};
  }
  apply_overrides(g, j);
  const fs::path base = file.empty() ? fs::path() : fs::path(file).parent_path();
  return finish_experiment(g, experiment_spec_from_json(j, base), out, err);
}

int cmd_sample(const Globals& g, const std::string& model_file, int count, std::ostream& out) {
  if (count < 2 || count > 100000) throw BoundsError("--count must lie in 2..100000");
  const LoadedModel lm = load_model(model_file);
  const Grid grid = g.grid.empty() ? Grid(2, 32, 0.25) : parse_grid(g.grid, "--grid");
  const std::uint64_t seed = g.seed.value_or(1);
  const MixtureSampler sampler(lm.model, grid, lm.kernel);
  std::vector<FieldSample> samples;
  for (int i = 0; i < count; ++i) samples.push_back(sampler.draw(seed, i));
  write_text_file(fs::path(g.out) / "samples.jsonl", sample_dump(samples));

  const double L = grid.extent();
  const std::vector<TestFunction> f{gaussian_packet(grid, {0.5 * L, 0.5 * L, 0.5 * L}, 4.0 * grid.spacing())};
  const std::vector<TestFunction> ff{f[0], f[0]};
  const Estimate s2 = estimate_moment(samples, ff);
  const auto exact = moment_analytic(lm.model, ff, lm.kernel);
  std::vector<std::size_t> counts(sampler.components(), 0);
  for (const auto& s : samples) ++counts[s.provenance.component];

  OrderedJson j;
  j["schema"] = "sample-summary/1";
  j["command"] = "sample";
  j["config_digest"] = json_digest(Json{{"model", lm.document}, {"grid", grid_to_json(grid)}, {"seed", seed},
                                        {"count", count}});
  j["model_digest"] = sampler.digest();
  j["count"] = count;
  j["seed"] = seed;
  j["s2_estimate"] = s2.value.real();
  j["s2_std_error"] = s2.std_error;
  j["s2_analytic"] = exact.real();
  j["component_counts"] = counts;
  j["component_weights"] = sampler.component_weights();
  std::ostringstream human;
  human << "config digest " << j["config_digest"].get<std::string>() << "\n"
        << count << " samples written to samples.jsonl\n"
        << "S2(f,f) estimate " << format_double(s2.value.real()) << " +- " << format_double(s2.std_error)
        << ", analytic " << format_double(exact.real()) << "\n";
  emit(g, out, "sample", j, human.str());
  return kExitPass;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixtures of quasi-free Schwinger functionals on a periodic lattice", "schwinger"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 1;
  app.add_option("--grid", g.grid, "lattice as d,n,a");
  app.add_option("--cluster-grid", g.cluster_grid, "lattice for the cluster check as d,n,a");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"human", "machine"}));
  app.add_option("--tolerance-file", g.tolerance_file, "JSON tolerance overrides");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  std::string model_file, spec_file, recipe, levels = "16,32,64";
  std::vector<std::string> function_files;
  int order = 4, count = 8, dim = 1;
  double extent = 8.0;

  auto* verify = app.add_subcommand("verify", "run the axiom suite on a model file");
  verify->add_option("model", model_file, "model file")->required();
  auto* moments = app.add_subcommand("moments", "moment and truncated-function table");
  moments->add_option("model", model_file, "model file")->required();
  moments->add_option("--order,-n", order, "largest order (<= 8)");
  moments->add_option("--recipe", recipe, "packet-recipe file");
  moments->add_option("--function", function_files, "test-function file (repeatable)");
  auto* experiment = app.add_subcommand("experiment", "run an experiment spec");
  experiment->add_option("spec", spec_file, "experiment spec file")->required();
  auto* sample = app.add_subcommand("sample", "draw and dump Monte Carlo fields");
  sample->add_option("model", model_file, "model file")->required();
  sample->add_option("--count", count, "number of samples");
  auto* refine = app.add_subcommand("refine", "grid-refinement study");
  refine->add_option("spec", spec_file, "refinement spec file (optional)");
  refine->add_option("--levels", levels, "n per axis at each level");
  refine->add_option("--extent", extent, "physical box length");
  refine->add_option("--dim", dim, "dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInputError;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*verify) return cmd_verify(g, model_file, out, err);
    if (*moments) return cmd_moments(g, model_file, order, recipe, function_files, out);
    if (*experiment) return cmd_experiment(g, spec_file, out, err);
    if (*sample) return cmd_sample(g, model_file, count, out);
    if (*refine) return cmd_refine(g, spec_file, levels, extent, dim, out, err);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const PrecisionError& e) {
    err << "precision failure: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitPrecision;
  }
  return kExitInputError;
}

}  // namespace schwinger::cli
