#pragma once

// JSON documents: model trees, spectral measures, test functions, tolerance
// overrides and check reports. Every reader is strict: unknown keys, missing
// keys and out-of-range values raise SchemaError naming the key path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "schwinger/axioms.hpp"
#include "schwinger/functional.hpp"
#include "schwinger/lattice.hpp"
#include "schwinger/propagator.hpp"

namespace schwinger {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// FNV-1a 64-bit, lowercase hex.
std::string fnv1a_hex(std::string_view bytes);
/// Digest of the canonical (sorted-key, compact) dump.
std::string json_digest(const Json& j);

/// Strict reader over one JSON object.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path);

  bool has(const std::string& key) const;
  const Json& at(const std::string& key);
  double number(const std::string& key);
  double number_or(const std::string& key, double fallback);
  std::int64_t integer(const std::string& key);
  std::int64_t integer_or(const std::string& key, std::int64_t fallback);
  std::string string(const std::string& key);
  std::string string_or(const std::string& key, const std::string& fallback);
  bool boolean_or(const std::string& key, bool fallback);
  /// Path of a child key, e.g. "root.children[1].weight".
  std::string path(const std::string& key) const;
  const std::string& path() const noexcept { return path_; }
  /// Throws on any key that was never read.
  void finish() const;

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double json_number(const Json& j, const std::string& path);
Json read_json_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& text);

struct LoadedModel {
  SchwingerFunctional model;
  KernelOptions kernel;
  ModelLimits limits;
  Json document;  // canonical re-serialization
};

inline constexpr std::string_view kModelSchema = "schwinger-model/1";
inline constexpr std::string_view kMeasureSchema = "spectral-measure/1";
inline constexpr std::string_view kTestFunctionSchema = "test-function/1";
inline constexpr std::string_view kToleranceSchema = "tolerances/1";

/// {"schema": "schwinger-model/1", "mass_floor2"?, "max_depth"?, "root": NODE}
/// NODE = {"kind": "quasi_free", "atoms": [[m2, w], ...]}
///      | {"kind": "mixture", "children": [{"weight": w, "node": NODE}, ...]}
LoadedModel model_from_json(const Json& j);
LoadedModel load_model(const std::filesystem::path& file);
Json model_to_json(const SchwingerFunctional& model, double mass_floor2 = kDefaultMassFloor2,
                   int max_depth = ModelLimits{}.max_depth);

/// {"schema": "spectral-measure/1", "atoms": [[m2, w], ...]}; also accepts a
/// bare atom list.
SpectralMeasure measure_from_json(const Json& j, const std::string& path, double mass_floor2);
SpectralMeasure load_measure(const std::filesystem::path& file, double mass_floor2);
Json measure_to_json(const SpectralMeasure& rho);

Json test_function_to_json(const TestFunction& f);
TestFunction test_function_from_json(const Json& j);

/// {"schema": "tolerances/1", <any SuiteTolerances field>...}
SuiteTolerances tolerances_from_json(const Json& j, SuiteTolerances base = {});

Json grid_to_json(const Grid& grid);
Json kernel_to_json(const KernelOptions& kernel);
Json suite_config_to_json(const SuiteConfig& config);
std::string suite_digest(const SchwingerFunctional& model, const SuiteConfig& config);

OrderedJson report_to_json(const CheckReport& report);
OrderedJson suite_to_json(const SuiteResult& result);
/// check_id / passed / witness / tolerance table plus the classification.
std::string suite_table(const SuiteResult& result);

/// Shortest round-trip text for a double ("%.17g").
std::string format_double(double x);

}  // namespace schwinger
