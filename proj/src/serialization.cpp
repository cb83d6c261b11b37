#include "schwinger/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "schwinger/errors.hpp"

namespace schwinger {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string json_digest(const Json& j) { return fnv1a_hex(j.dump()); }

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw SchemaError(path_.empty() ? "<document>" : path_, "expected an object");
}

std::string ObjectReader::path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

const Json& ObjectReader::at(const std::string& key) {
  if (!j_.contains(key)) throw SchemaError(path(key), "missing required key");
  seen_.insert(key);
  return j_.at(key);
}

double json_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

double ObjectReader::number(const std::string& key) { return json_number(at(key), path(key)); }

double ObjectReader::number_or(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

std::int64_t ObjectReader::integer(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_number_integer()) throw SchemaError(path(key), "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t ObjectReader::integer_or(const std::string& key, std::int64_t fallback) {
  return has(key) ? integer(key) : fallback;
}

std::string ObjectReader::string(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_string()) throw SchemaError(path(key), "expected a string");
  return v.get<std::string>();
}

std::string ObjectReader::string_or(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

bool ObjectReader::boolean_or(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_boolean()) throw SchemaError(path(key), "expected true or false");
  return v.get<bool>();
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!seen_.count(it.key())) throw SchemaError(path(it.key()), "unknown key");
  }
}

Json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError(file.string(), "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(file.string(), std::string("malformed JSON: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
}

// ---------------------------------------------------------------------------

namespace {

void expect_schema(ObjectReader& r, std::string_view schema) {
  const std::string s = r.string("schema");
  if (s != schema) throw SchemaError(r.path("schema"), "expected \"" + std::string(schema) + "\", got \"" + s + "\"");
}

std::vector<SpectralAtom> atoms_from_json(const Json& j, const std::string& path, double floor) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of [m2, weight] pairs");
  std::vector<SpectralAtom> atoms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) throw SchemaError(p, "expected [m2, weight]");
    const double m2 = json_number(j[i][0], p + "[0]");
    const double w = json_number(j[i][1], p + "[1]");
    if (m2 < floor) {
      throw SchemaError(p + "[0]", "m2 = " + format_double(m2) + " below the mass floor " + format_double(floor));
    }
    if (w < 0.0) throw SchemaError(p + "[1]", "negative spectral weight");
    atoms.push_back({m2, w});
  }
  return atoms;
}

SchwingerFunctional node_from_json(const Json& j, const std::string& path, double floor,
                                   const ModelLimits& limits, int level) {
  ObjectReader r(j, path);
  const std::string kind = r.string("kind");
  if (level > limits.max_depth) throw SchemaError(path, "tree deeper than max_depth " + std::to_string(limits.max_depth));
  if (kind == "quasi_free") {
    auto atoms = atoms_from_json(r.at("atoms"), r.path("atoms"), floor);
    r.finish();
    return SchwingerFunctional::quasi_free(SpectralMeasure(std::move(atoms), floor));
  }
  if (kind == "mixture") {
    const Json& cj = r.at("children");
    const std::string cpath = r.path("children");
    if (!cj.is_array() || cj.empty()) throw SchemaError(cpath, "expected a nonempty array");
    std::vector<std::pair<double, SchwingerFunctional>> children;
    double total = 0.0;
    for (std::size_t i = 0; i < cj.size(); ++i) {
      ObjectReader c(cj[i], cpath + "[" + std::to_string(i) + "]");
      const double w = c.number("weight");
      if (w < 0.0) throw SchemaError(c.path("weight"), "negative mixture weight");
      children.emplace_back(w, node_from_json(c.at("node"), c.path("node"), floor, limits, level + 1));
      c.finish();
      total += w;
    }
    r.finish();
    if (std::abs(total - 1.0) > limits.weight_tolerance) {
      throw SchemaError(cpath, "mixture weights sum to " + format_double(total) + ", expected 1");
    }
    return SchwingerFunctional::mixture(std::move(children), limits);
  }
  throw SchemaError(r.path("kind"), "expected \"quasi_free\" or \"mixture\", got \"" + kind + "\"");
}

Json node_to_json(const SchwingerFunctional& node) {
  if (node.is_leaf()) return Json{{"kind", "quasi_free"}, {"atoms", measure_to_json(node.measure())["atoms"]}};
  Json children = Json::array();
  for (const auto& c : node.children()) children.push_back(Json{{"weight", c.weight}, {"node", node_to_json(*c.child)}});
  return Json{{"kind", "mixture"}, {"children", children}};
}

}  // namespace

LoadedModel model_from_json(const Json& j) {
  ObjectReader r(j, "");
  expect_schema(r, kModelSchema);
  KernelOptions kernel;
  kernel.mass_floor2 = r.number_or("mass_floor2", kDefaultMassFloor2);
  if (kernel.mass_floor2 <= 0.0) throw SchemaError("mass_floor2", "must be positive");
  ModelLimits limits;
  const auto depth = r.integer_or("max_depth", limits.max_depth);
  if (depth < 1 || depth > 16) throw SchemaError("max_depth", "must lie in 1..16");
  limits.max_depth = static_cast<int>(depth);
  auto model = node_from_json(r.at("root"), "root", kernel.mass_floor2, limits, 1);
  r.finish();
  Json doc = model_to_json(model, kernel.mass_floor2, limits.max_depth);
  return LoadedModel{std::move(model), kernel, limits, std::move(doc)};
}

LoadedModel load_model(const std::filesystem::path& file) { return model_from_json(read_json_file(file)); }

Json model_to_json(const SchwingerFunctional& model, double mass_floor2, int max_depth) {
  return Json{{"schema", kModelSchema},
              {"mass_floor2", mass_floor2},
              {"max_depth", max_depth},
              {"root", node_to_json(model)}};
}

SpectralMeasure measure_from_json(const Json& j, const std::string& path, double mass_floor2) {
  if (j.is_array()) return SpectralMeasure(atoms_from_json(j, path, mass_floor2), mass_floor2);
  ObjectReader r(j, path);
  expect_schema(r, kMeasureSchema);
  auto atoms = atoms_from_json(r.at("atoms"), r.path("atoms"), mass_floor2);
  r.finish();
  return SpectralMeasure(std::move(atoms), mass_floor2);
}

SpectralMeasure load_measure(const std::filesystem::path& file, double mass_floor2) {
  return measure_from_json(read_json_file(file), file.string(), mass_floor2);
}

Json measure_to_json(const SpectralMeasure& rho) {
  Json atoms = Json::array();
  for (const auto& a : rho.atoms()) atoms.push_back(Json::array({a.m2, a.weight}));
  return Json{{"schema", kMeasureSchema}, {"atoms", atoms}};
}

Json test_function_to_json(const TestFunction& f) {
  Json values = Json::array();
  for (const auto& v : f.values()) values.push_back(Json::array({v.real(), v.imag()}));
  const Grid& g = f.grid();
  return Json{{"schema", kTestFunctionSchema},
              {"d", g.dim()},
              {"n_per_axis", g.n()},
              {"spacing", g.spacing()},
              {"values", values}};
}

TestFunction test_function_from_json(const Json& j) {
  ObjectReader r(j, "");
  expect_schema(r, kTestFunctionSchema);
  const auto d = r.integer("d");
  const auto n = r.integer("n_per_axis");
  const double a = r.number("spacing");
  std::optional<Grid> grid;
  try {
    grid.emplace(static_cast<int>(d), static_cast<int>(n), a);
  } catch (const Error& e) {
    throw SchemaError("n_per_axis", e.what());
  }
  const Json& vj = r.at("values");
  if (!vj.is_array() || vj.size() != static_cast<std::size_t>(grid->sites())) {
    throw SchemaError("values", "expected " + std::to_string(grid->sites()) + " [re, im] pairs");
  }
  std::vector<std::complex<double>> values;
  values.reserve(vj.size());
  for (std::size_t i = 0; i < vj.size(); ++i) {
    const std::string p = "values[" + std::to_string(i) + "]";
    if (!vj[i].is_array() || vj[i].size() != 2) throw SchemaError(p, "expected [re, im]");
    values.emplace_back(json_number(vj[i][0], p + "[0]"), json_number(vj[i][1], p + "[1]"));
  }
  r.finish();
  return TestFunction(*grid, std::move(values));
}

SuiteTolerances tolerances_from_json(const Json& j, SuiteTolerances base) {
  ObjectReader r(j, "");
  expect_schema(r, kToleranceSchema);
  base.normalization = r.number_or("normalization", base.normalization);
  base.psd = r.number_or("psd", base.psd);
  base.invariance = r.number_or("invariance", base.invariance);
  base.cluster = r.number_or("cluster", base.cluster);
  base.quasi_free = r.number_or("quasi_free", base.quasi_free);
  base.regularity_ceiling = r.number_or("regularity_ceiling", base.regularity_ceiling);
  base.growth_ceiling = r.number_or("growth_ceiling", base.growth_ceiling);
  r.finish();
  if (base.normalization < 0 || base.invariance < 0 || base.cluster < 0 || base.quasi_free < 0) {
    throw SchemaError("", "upper-bound tolerances must be nonnegative");
  }
  return base;
}

Json grid_to_json(const Grid& grid) {
  return Json{{"d", grid.dim()}, {"n_per_axis", grid.n()}, {"spacing", grid.spacing()}};
}

Json kernel_to_json(const KernelOptions& kernel) {
  return Json{{"dispersion", kernel.dispersion == Dispersion::lattice ? "lattice" : "continuum"},
              {"axis_weight", kernel.axis_weight},
              {"mass_floor2", kernel.mass_floor2}};
}

Json suite_config_to_json(const SuiteConfig& c) {
  const auto& t = c.tolerances;
  return Json{{"grid", grid_to_json(c.grid)},
              {"cluster_grid", grid_to_json(c.cluster_grid)},
              {"seed", c.seed},
              {"test_functions", c.test_functions},
              {"growth_order", c.growth_order},
              {"growth_trials", c.growth_trials},
              {"kernel", kernel_to_json(c.kernel)},
              {"tolerances",
               Json{{"normalization", t.normalization},
                    {"psd", t.psd},
                    {"invariance", t.invariance},
                    {"cluster", t.cluster},
                    {"quasi_free", t.quasi_free},
                    {"regularity_ceiling", t.regularity_ceiling},
                    {"growth_ceiling", t.growth_ceiling}}}};
}

std::string suite_digest(const SchwingerFunctional& model, const SuiteConfig& config) {
  return json_digest(Json{{"model", model_to_json(model, config.kernel.mass_floor2)},
                          {"config", suite_config_to_json(config)}});
}

OrderedJson report_to_json(const CheckReport& r) {
  OrderedJson details = OrderedJson::object();
  for (const auto& [k, v] : r.details) details[k] = v;
  OrderedJson j;
  j["check_id"] = r.check_id;
  j["passed"] = r.passed;
  j["witness"] = r.witness;
  j["tolerance"] = r.tolerance;
  j["bound"] = r.bound == CheckReport::Bound::at_most ? "at_most" : "at_least";
  j["config_digest"] = r.config_digest;
  j["details"] = details;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

OrderedJson suite_to_json(const SuiteResult& s) {
  OrderedJson j;
  j["schema"] = "axiom-suite/1";
  j["config_digest"] = s.config_digest;
  j["passed"] = s.passed;
  OrderedJson reports = OrderedJson::array();
  for (const auto& r : s.reports) reports.push_back(report_to_json(r));
  j["reports"] = reports;
  OrderedJson cls;
  cls["quasi_free"] = s.classification.quasi_free;
  cls["max_relative_cumulant"] = s.classification.max_relative_cumulant;
  cls["tolerance"] = s.classification.tolerance;
  j["classification"] = cls;
  return j;
}

std::string suite_table(const SuiteResult& s) {
  std::ostringstream os;
  os << "config digest " << s.config_digest << "\n";
  os << std::left << std::setw(34) << "check_id" << std::setw(8) << "passed" << std::setw(26) << "witness"
     << "tolerance\n";
  for (const auto& r : s.reports) {
    os << std::left << std::setw(34) << r.check_id << std::setw(8) << (r.passed ? "yes" : "NO") << std::setw(26)
       << format_double(r.witness) << (r.bound == CheckReport::Bound::at_most ? "<= " : ">= ")
       << format_double(r.tolerance) << "\n";
  }
  os << "quasi-free: " << (s.classification.quasi_free ? "true" : "false")
     << " (max relative cumulant " << format_double(s.classification.max_relative_cumulant) << ")\n";
  os << "suite: " << (s.passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace schwinger
