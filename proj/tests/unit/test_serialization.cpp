#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "schwinger/axioms.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/serialization.hpp"

using namespace schwinger;

namespace {

const std::filesystem::path kData = SCHWINGER_DATA_DIR;

std::string schema_field(const Json& j) {
  try {
    (void)model_from_json(j);
  } catch (const SchemaError& e) {
    return e.field();
  }
  return "<none>";
}

Json two_mass_doc() { return read_json_file(kData / "models/two_mass.json"); }

}  // namespace

TEST_CASE("digests") {
  // FNV-1a 64 reference values
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  const Json a = Json::parse(R"({"b": 1, "a": [1, 2]})");
  const Json b = Json::parse(R"({"a": [1, 2], "b": 1})");
  CHECK(json_digest(a) == json_digest(b));
  CHECK(json_digest(a) != json_digest(Json::parse(R"({"a": [2, 1], "b": 1})")));
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
}

TEST_CASE("models round-trip") {
  for (const char* name : {"free.json", "two_mass.json", "iterated.json"}) {
    CAPTURE(name);
    const auto loaded = load_model(kData / "models" / name);
    const auto again = model_from_json(loaded.document);
    CHECK(again.document == loaded.document);
    CHECK(json_digest(again.document) == json_digest(loaded.document));
  }
  for (const auto& [name, m] : fixtures::model_family()) {
    CAPTURE(name);
    const auto back = model_from_json(model_to_json(m, kDefaultMassFloor2, 8));
    CHECK(model_to_json(back.model, kDefaultMassFloor2, 8) == model_to_json(m, kDefaultMassFloor2, 8));
    CHECK(back.limits.max_depth == 8);
  }
  const auto it = load_model(kData / "models/iterated.json");
  CHECK(it.model.children().size() == 2);
  CHECK(it.kernel.mass_floor2 == kDefaultMassFloor2);
}

TEST_CASE("model schema errors name the field") {
  try {
    (void)load_model(kData / "models/bad_weights.json");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.field() == "root.children");
    CHECK(std::string(e.what()).find("0.9") != std::string::npos);
  }
  Json j = two_mass_doc();
  j["extra"] = true;
  CHECK(schema_field(j) == "extra");
  j = two_mass_doc();
  j["schema"] = "schwinger-model/2";
  CHECK(schema_field(j) == "schema");
  j = two_mass_doc();
  j["root"]["kind"] = "tree";
  CHECK(schema_field(j) == "root.kind");
  j = two_mass_doc();
  j["root"]["children"][1]["node"]["atoms"][0][0] = 1e-6;
  CHECK(schema_field(j) == "root.children[1].node.atoms[0][0]");
  j = two_mass_doc();
  j["root"]["children"][0]["weight"] = "half";
  CHECK(schema_field(j) == "root.children[0].weight");
  j = two_mass_doc();
  j["root"]["children"][0].erase("node");
  CHECK(schema_field(j) == "root.children[0].node");
  j = two_mass_doc();
  j["max_depth"] = 1;
  CHECK(schema_field(j) == "root.children[0].node");
  j = two_mass_doc();
  j["max_depth"] = 17;
  CHECK(schema_field(j) == "max_depth");
  CHECK(schema_field(Json::array()) == "<document>");
}

TEST_CASE("files") {
  const auto dir = fixtures::scratch_dir("serialization");
  CHECK_THROWS_AS(read_json_file(dir / "missing.json"), SchemaError);
  write_text_file(dir / "nested/bad.json", "{\"a\": ");
  CHECK_THROWS_AS(read_json_file(dir / "nested/bad.json"), SchemaError);
  write_text_file(dir / "nested/ok.json", "{\"a\": 1}");
  CHECK(read_json_file(dir / "nested/ok.json")["a"] == 1);
}

TEST_CASE("measures") {
  const auto p1 = load_measure(kData / "measures/p1.json", kDefaultMassFloor2);
  CHECK(p1.atoms().size() == 2);
  CHECK(measure_from_json(measure_to_json(p1), "x", kDefaultMassFloor2) == p1);
  const Json bare = Json::parse("[[4, 0.5], [1, 0.5]]");
  CHECK(measure_from_json(bare, "x", kDefaultMassFloor2) == p1);
  CHECK_THROWS_AS(measure_from_json(Json::parse("[[1, -1]]"), "x", kDefaultMassFloor2), SchemaError);
  CHECK_THROWS_AS(measure_from_json(Json::parse("[]"), "x", kDefaultMassFloor2), SchemaError);
  CHECK_THROWS_AS(measure_from_json(Json::parse("[[1]]"), "x", kDefaultMassFloor2), SchemaError);
}

TEST_CASE("test functions") {
  const Grid g(2, 8, 0.5);
  const TestFunction f = gaussian_packet(g, {1.0, 2.0, 0}, 1.0, {1.0, 0.5, 0});
  const TestFunction back = test_function_from_json(test_function_to_json(f));
  CHECK(back.grid() == g);
  for (int s = 0; s < g.sites(); ++s) CHECK(back[s] == f[s]);
  Json j = test_function_to_json(f);
  j["values"].erase(j["values"].begin());
  CHECK_THROWS_AS(test_function_from_json(j), SchemaError);
  j = test_function_to_json(f);
  j["n_per_axis"] = 12;
  CHECK_THROWS_AS(test_function_from_json(j), SchemaError);
}

TEST_CASE("tolerance files") {
  const auto t = tolerances_from_json(Json::parse(R"({"schema": "tolerances/1", "cluster": 1e-5, "psd": -1e-7})"));
  CHECK(t.cluster == 1e-5);
  CHECK(t.psd == -1e-7);
  CHECK(t.normalization == SuiteTolerances{}.normalization);
  CHECK_THROWS_AS(tolerances_from_json(Json::parse(R"({"schema": "tolerances/1", "clutser": 1})")), SchemaError);
  CHECK_THROWS_AS(tolerances_from_json(Json::parse(R"({"schema": "tolerances/1", "cluster": -1})")), SchemaError);
  CHECK_THROWS_AS(tolerances_from_json(Json::parse(R"({"cluster": 1})")), SchemaError);
}

TEST_CASE("suite documents") {
  SuiteConfig cfg;
  const auto result = run_axiom_suite(fixtures::free_field(), cfg);
  const auto j = suite_to_json(result);
  CHECK(j["schema"] == "axiom-suite/1");
  CHECK(j["passed"] == true);
  CHECK(j["reports"].size() == result.reports.size());
  CHECK(j["reports"][0]["check_id"] == "schw0_normalization_neutrality");
  CHECK(j.dump(2) == suite_to_json(run_axiom_suite(fixtures::free_field(), cfg)).dump(2));
  const std::string table = suite_table(result);
  for (const auto& r : result.reports) CHECK(table.find(r.check_id) != std::string::npos);
  SuiteConfig other = cfg;
  other.tolerances.cluster = 1e-5;
  CHECK(suite_digest(fixtures::free_field(), other) != suite_digest(fixtures::free_field(), cfg));
  CHECK(suite_digest(fixtures::two_mass(), cfg) != suite_digest(fixtures::free_field(), cfg));
}
