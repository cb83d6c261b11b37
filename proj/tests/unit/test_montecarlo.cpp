#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/montecarlo.hpp"
#include "schwinger/serialization.hpp"

using namespace schwinger;
using cplx = std::complex<double>;

namespace {

const Grid kGrid = fixtures::default_grid();

ProjectionSet draw(const SchwingerFunctional& m, const std::vector<TestFunction>& fs, std::uint64_t seed,
                   std::uint64_t count, int threads = 0) {
  return sample_projections(MixtureSampler(m, kGrid), fs, seed, count, 0, threads);
}

}  // namespace

TEST_CASE("free field mean and variance") {
  const TestFunction f = fixtures::fixture_packet(kGrid);
  const std::vector<TestFunction> fs{f};
  const auto set = draw(fixtures::free_field(), fs, 3, 10000);
  const std::vector<int> one{0}, two{0, 0};
  const Estimate mean = estimate_moment(set, one);
  const Estimate var = estimate_moment(set, two);
  CHECK(std::abs(mean.value) < 3.0 * mean.std_error);
  const double exact = free_two_point(f, f, 1.0).real();
  CHECK(std::abs(var.value.real() - exact) < 3.0 * var.std_error);
  // Gaussian: se of the second moment is about sqrt(2/N) S
  CHECK(var.std_error == doctest::Approx(exact * std::sqrt(2.0 / 10000)).epsilon(0.15));
  for (const auto& v : set.values[0]) CHECK(v.imag() == 0.0);
}

TEST_CASE("samples are addressed by seed and index") {
  const auto a = sample_free_field(kGrid, 2.0, 5, 17);
  const auto b = sample_free_field(kGrid, 2.0, 5, 17);
  const auto c = sample_free_field(kGrid, 2.0, 6, 17);
  const auto d = sample_free_field(kGrid, 2.0, 5, 18);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.values != d.values);
  const auto leaf = sample_mixture_field(fixtures::free_field(2.0), kGrid, 5, 17);
  CHECK(leaf.values == a.values);
  CHECK(leaf.provenance.model_digest == a.provenance.model_digest);
  CHECK(a.provenance.index == 17);
  CHECK(a.provenance.seed == 5);
  // drawing within a sampler matches the one-shot helper
  const MixtureSampler sampler(fixtures::two_mass(), kGrid);
  CHECK(sampler.draw(9, 3).values == sample_mixture_field(fixtures::two_mass(), kGrid, 9, 3).values);
  CHECK(sampler.components() == 2);
}

TEST_CASE("odd and fourth moments") {
  const auto fs = random_packets(kGrid, 4, 12);
  const auto mix = fixtures::two_mass();
  const auto set = draw(mix, fs, 21, 20000);
  const std::vector<int> three{0, 1, 2};
  const Estimate m3 = estimate_moment(set, three);
  CHECK(std::abs(m3.value) < 4.0 * m3.std_error);
  const std::vector<int> four{0, 1, 2, 3};
  const Estimate m4 = estimate_moment(set, four);
  CHECK(std::abs(m4.value - moment_analytic(mix, fs)) < 4.0 * m4.std_error);
  const Estimate c4 = estimate_cumulant(set, four);
  CHECK(std::abs(c4.value - cumulant(mix, fs)) < 4.0 * c4.std_error);
  CHECK(c4.count == 20000);
}

TEST_CASE("mixture cumulant against the closed form") {
  const TestFunction f = fixtures::fixture_packet(kGrid);
  const std::vector<TestFunction> fs{f};
  const auto set = draw(fixtures::two_mass(), fs, 31, 20000);
  const std::vector<int> four{0, 0, 0, 0};
  const Estimate c4 = estimate_cumulant(set, four);
  const double ds = (free_two_point(f, f, 1.0) - free_two_point(f, f, 4.0)).real();
  const double exact = 0.75 * ds * ds;
  CHECK(std::abs(c4.value.real() - exact) < 3.0 * c4.std_error);
  CHECK(c4.value.real() > 3.0 * c4.std_error);

  // the gaussianized model has the same S2 but no S4T
  const auto gset = draw(gaussianize(fixtures::two_mass()), fs, 32, 20000);
  CHECK(two_sample_z(c4, estimate_cumulant(gset, four)) > 3.0);
  const std::vector<int> two{0, 0};
  CHECK(two_sample_z(estimate_moment(set, two), estimate_moment(gset, two)) < 3.0);
}

TEST_CASE("thread count does not change the output") {
  const auto fs = random_packets(kGrid, 2, 4);
  const auto a = draw(fixtures::two_mass(), fs, 7, 301, 1);
  const auto b = draw(fixtures::two_mass(), fs, 7, 301, 4);
  const auto c = draw(fixtures::two_mass(), fs, 7, 301, 0);
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);
  CHECK(a.components == b.components);
  // a later window continues the same sequence
  const auto tail = sample_projections(MixtureSampler(fixtures::two_mass(), kGrid), fs, 7, 100, 201, 2);
  for (int s = 0; s < 100; ++s) CHECK(tail.values[1][s] == a.values[1][201 + s]);
}

TEST_CASE("component frequencies follow the weights") {
  const auto m = fixtures::two_mass(1.0, 4.0, 0.3);
  const MixtureSampler sampler(m, kGrid);
  std::size_t first = 0;
  const std::size_t N = 20000;
  for (std::uint64_t i = 0; i < N; ++i) first += sampler.draw_component(11, i) == 0;
  const double se = std::sqrt(N * 0.3 * 0.7);
  CHECK(std::abs(double(first) - 0.3 * N) < 4.0 * se);
  const auto fs = std::vector<TestFunction>{fixtures::fixture_packet(kGrid)};
  const auto counts = component_counts(draw(m, fs, 11, 500), 2);
  CHECK(counts[0] + counts[1] == 500);
  CHECK_THROWS_AS(component_counts(draw(m, fs, 11, 10), 1), DomainError);
}

TEST_CASE("standard error falls like N^-1/2") {
  const std::vector<TestFunction> fs{fixtures::fixture_packet(kGrid)};
  const auto set = draw(fixtures::free_field(), fs, 41, 16000);
  std::vector<double> logn, logse;
  for (std::uint64_t n : {500u, 2000u, 16000u}) {
    ProjectionSet head = set;
    head.values[0].resize(n);
    head.components.resize(n);
    const std::vector<int> two{0, 0};
    logn.push_back(std::log(double(n)));
    logse.push_back(std::log(estimate_moment(head, two).std_error));
  }
  const double slope = (logse.back() - logse.front()) / (logn.back() - logn.front());
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.2));
  CHECK(jackknife_blocks(100) == 100);
  CHECK(jackknife_blocks(2001) == 1000);
}

TEST_CASE("provenance is enforced") {
  const std::vector<TestFunction> fs{fixtures::fixture_packet(kGrid)};
  std::vector<FieldSample> samples{sample_free_field(kGrid, 1.0, 1, 0), sample_free_field(kGrid, 1.0, 1, 1)};
  CHECK_NOTHROW(estimate_moment(samples, fs));
  samples.push_back(sample_free_field(kGrid, 4.0, 1, 2));
  CHECK_THROWS_AS(estimate_moment(samples, fs), ProvenanceError);
  std::vector<FieldSample> empty;
  CHECK_THROWS_AS(estimate_moment(empty, fs), DomainError);
  const std::vector<int> seven(7, 0);
  CHECK_THROWS_AS(estimate_moment(draw(fixtures::free_field(), fs, 1, 10), seven), BoundsError);
  CHECK_THROWS_AS(sample_free_field(kGrid, 1e-6, 1), DomainError);
  const Grid other(2, 16, 0.5);
  CHECK_THROWS_AS(project(samples[0], fixtures::fixture_packet(other)), DomainError);
}

TEST_CASE("sample dump") {
  std::vector<FieldSample> samples{sample_free_field(Grid(1, 8, 1.0), 1.0, 2, 0),
                                   sample_free_field(Grid(1, 8, 1.0), 1.0, 2, 1)};
  const std::string dump = sample_dump(samples);
  std::istringstream in(dump);
  std::string line;
  std::vector<Json> records;
  while (std::getline(in, line)) records.push_back(Json::parse(line));
  REQUIRE(records.size() == 3);
  CHECK(records[0]["schema"] == "field-samples/1");
  CHECK(records[0]["count"] == 2);
  CHECK(records[2]["index"] == 1);
  CHECK(records[1]["values"].size() == 8);
  CHECK(dump == sample_dump(samples));
}
