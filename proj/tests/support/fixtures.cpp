#include "fixtures.hpp"

#include "schwinger/propagator.hpp"
#include "schwinger/rng.hpp"

namespace fixtures {

using namespace schwinger;

TestFunction fixture_packet(const Grid& grid) {
  const double L = grid.extent();
  return gaussian_packet(grid, {0.5 * L, 0.5 * L, 0.5 * L}, 4.0 * grid.spacing());
}

SchwingerFunctional free_field(double m2) { return SchwingerFunctional::quasi_free(SpectralMeasure::delta(m2)); }

SchwingerFunctional two_mass(double m2_a, double m2_b, double w) {
  return SchwingerFunctional::mixture({{w, free_field(m2_a)}, {1.0 - w, free_field(m2_b)}});
}

SchwingerFunctional generalized_free() {
  return SchwingerFunctional::quasi_free(SpectralMeasure({{1.0, 0.3}, {2.5, 0.5}, {6.0, 0.4}}));
}

namespace {

SchwingerFunctional leaf(SequentialRng& rng) {
  const int atoms = 1 + static_cast<int>(rng.uniform() * 3.0);
  std::vector<double> w(atoms);
  double total = 0.0;
  for (auto& x : w) total += (x = rng.uniform(0.2, 1.0));
  const double mass = rng.uniform(0.5, 1.5);
  std::vector<SpectralAtom> out;
  for (int i = 0; i < atoms; ++i) out.push_back({rng.uniform(1.0, 9.0), mass * w[i] / total});
  return SchwingerFunctional::quasi_free(SpectralMeasure(out));
}

SchwingerFunctional node(SequentialRng& rng, int depth_left, bool force_mixture) {
  if (depth_left <= 1 || (!force_mixture && rng.uniform() < 0.4)) return leaf(rng);
  const int k = 2 + static_cast<int>(rng.uniform() * 2.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += (x = rng.uniform(0.1, 1.0));
  std::vector<std::pair<double, SchwingerFunctional>> children;
  for (int i = 0; i < k; ++i) children.emplace_back(w[i] / total, node(rng, depth_left - 1, false));
  return SchwingerFunctional::mixture(std::move(children));
}

}  // namespace

SchwingerFunctional random_tree(std::uint64_t seed, int max_depth) {
  SequentialRng rng(seed, 0x7a11u);
  return node(rng, max_depth, true);
}

std::vector<NamedModel> model_family() {
  return {{"free", free_field(1.0)},
          {"two_mass", two_mass()},
          {"generalized_free", generalized_free()},
          {"skewed_two_mass", two_mass(2.0, 9.0, 0.3)},
          {"random_tree_1", random_tree(1)},
          {"random_tree_2", random_tree(2)}};
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("schwinger_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
