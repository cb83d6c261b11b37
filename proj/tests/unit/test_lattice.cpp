#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/lattice.hpp"
#include "schwinger/propagator.hpp"
#include "schwinger/rng.hpp"

using namespace schwinger;
using cplx = std::complex<double>;

namespace {

TestFunction random_function(const Grid& g, std::uint64_t seed, bool real) {
  SequentialRng rng(seed, 9);
  std::vector<cplx> v(g.sites());
  for (auto& x : v) x = {rng.normal(), real ? 0.0 : rng.normal()};
  return TestFunction(g, v);
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_NOTHROW(Grid(1, 8, 1.0));
  CHECK_THROWS_AS(Grid(0, 8, 1.0), DomainError);
  CHECK_THROWS_AS(Grid(4, 8, 1.0), DomainError);
  CHECK_THROWS_AS(Grid(2, 12, 1.0), DomainError);
  CHECK_THROWS_AS(Grid(2, 4, 1.0), DomainError);
  CHECK_THROWS_AS(Grid(2, 128, 1.0), BoundsError);
  CHECK_THROWS_AS(Grid(3, 32, 1.0), BoundsError);
  CHECK_THROWS_AS(Grid(2, 32, 0.0), DomainError);
  const Grid g(2, 32, 0.25);
  CHECK(g.sites() == 1024);
  CHECK(g.extent() == doctest::Approx(8.0));
  CHECK(g.site(g.coords(77)) == 77);
  CHECK(g.site({32, -1, 0}) == g.site({0, 31, 0}));
}

TEST_CASE("test function invariants") {
  const Grid g(1, 8, 1.0);
  std::vector<cplx> v(8, 1.0);
  v[3] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(TestFunction(g, v), DomainError);
  CHECK_THROWS_AS(TestFunction(g, std::vector<cplx>(7)), DomainError);
  std::vector<cplx> almost(8, 1.0);
  almost[2] = {1.0, 1e-15};
  CHECK(TestFunction(g, almost).is_real());
  almost[2] = {1.0, 1e-13};
  CHECK_FALSE(TestFunction(g, almost).is_real());
}

TEST_CASE("gaussian packets") {
  const Grid g = fixtures::default_grid();
  const TestFunction f = gaussian_packet(g, {0, 0, 0}, 1.0);
  CHECK(f.is_real());
  CHECK(std::abs(inner_product(f, f) - 1.0) < 1e-12);
  for (int s = 0; s < g.sites(); ++s) {
    CHECK(f[s].real() > 0.0);
    CHECK(std::abs(f[s] - f[g.negated(s)]) < 1e-15);
  }
  // far apart on both axes
  const TestFunction a = gaussian_packet(g, {2.0, 2.0, 0}, 0.5);
  const TestFunction b = gaussian_packet(g, {6.0, 6.0, 0}, 0.5);
  CHECK(std::abs(inner_product(a, b)) < 1e-8);
  CHECK_THROWS_AS(gaussian_packet(g, {0, 0, 0}, 0.4), ResolutionError);
  CHECK_THROWS_AS(gaussian_packet(g, {0, 0, 0}, 2.5), ResolutionError);
  const TestFunction moving = gaussian_packet(g, {4, 4, 0}, 1.0, {2.0, 1.0, 0});
  CHECK_FALSE(moving.is_real());
  CHECK(l2_norm(moving) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fourier transform conventions") {
  for (int d = 1; d <= 3; ++d) {
    const Grid g(d, d == 3 ? 8 : 16, 0.5);
    const TestFunction f = random_function(g, 3 + d, false);
    const TestFunction fk = fourier(f);
    const TestFunction back = inverse_fourier(fk);
    double err = 0.0;
    for (int s = 0; s < g.sites(); ++s) err = std::max(err, std::abs(back[s] - f[s]));
    CHECK(err < 1e-12);
    // Parseval with a^d and L^-d
    double pos = 0.0, mom = 0.0;
    for (int s = 0; s < g.sites(); ++s) {
      pos += std::norm(f[s]);
      mom += std::norm(fk[s]);
    }
    CHECK(pos * g.cell_volume() == doctest::Approx(mom / g.volume()).epsilon(1e-12));
  }
  const Grid g(2, 16, 0.5);
  const TestFunction one(g, std::vector<cplx>(g.sites(), 1.0));
  const auto k = one.momentum();
  CHECK(std::abs(k[0] - g.volume()) < 1e-10);
  for (int s = 1; s < g.sites(); ++s) CHECK(std::abs(k[s]) < 1e-10);
  const TestFunction r = random_function(g, 8, true);
  const auto rk = r.momentum();
  for (int s = 0; s < g.sites(); ++s) CHECK(std::abs(rk[g.negated(s)] - std::conj(rk[s])) < 1e-12);
}

TEST_CASE("translation becomes a phase in momentum space") {
  const Grid g(2, 16, 0.5);
  const TestFunction f = random_function(g, 9, false);
  const Coords shift{3, -2, 0};
  const TestFunction t = apply_isometry(f, Isometry::translation(shift));
  const auto fk = f.momentum();
  const auto tk = t.momentum();
  double err = 0.0;
  for (int s = 0; s < g.sites(); ++s) {
    const Coords c = g.coords(s);
    const double phase = g.momentum(c[0]) * shift[0] * g.spacing() + g.momentum(c[1]) * shift[1] * g.spacing();
    err = std::max(err, std::abs(tk[s] - std::polar(1.0, -phase) * fk[s]));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("sobolev norm") {
  const Grid g = fixtures::default_grid();
  const TestFunction f = fixtures::fixture_packet(g);
  double prev = INFINITY;
  for (double m2 : {0.5, 1.0, 2.0, 4.0, 9.0}) {
    const double n = sobolev_norm(f, m2);
    CHECK(n < prev);
    prev = n;
    CHECK(n * n == doctest::Approx(free_two_point(f, f, m2).real()).epsilon(1e-12));
    CHECK(n <= l2_norm(f) / std::sqrt(m2) + 1e-15);
    CHECK(sobolev_norm(cplx(-2.5) * f, m2) == doctest::Approx(2.5 * n).epsilon(1e-13));
  }
  CHECK_THROWS_AS(sobolev_norm(f, 0.0), DomainError);
  CHECK_THROWS_AS(sobolev_norm(f, -1.0), DomainError);
}

TEST_CASE("isometries permute sites") {
  const Grid g(2, 16, 0.5);
  const TestFunction f = random_function(g, 12, false);
  auto same = [](const TestFunction& a, const TestFunction& b) {
    for (int s = 0; s < a.grid().sites(); ++s) {
      if (a[s] != b[s]) return false;
    }
    return true;
  };
  CHECK(same(apply_isometry(f, Isometry::identity()), f));
  const auto R = Isometry::time_reflection();
  CHECK(same(apply_isometry(apply_isometry(f, R), R), f));
  CHECK(same(apply_isometry(f, Isometry::translation({16, 0, 0})), f));
  auto rot = f;
  for (int i = 0; i < 4; ++i) rot = apply_isometry(rot, Isometry::rotation(0, 1));
  CHECK(same(rot, f));
  CHECK_FALSE(same(apply_isometry(f, Isometry::rotation(0, 1)), f));
  for (const auto& iso : {Isometry::rotation(1, 0), Isometry::axis_reflection(1), Isometry::translation({5, 7, 0})}) {
    CHECK(l2_norm(apply_isometry(f, iso)) == doctest::Approx(l2_norm(f)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(apply_isometry(f, Isometry::rotation(0, 2)), DomainError);
  CHECK_THROWS_AS(apply_isometry(f, Isometry::axis_reflection(2)), DomainError);
  CHECK_THROWS_AS(apply_isometry(f, Isometry::translation({0, 0, 1})), DomainError);
  // link reflection: t -> -1 - t
  const int s = g.site({2, 5, 0});
  CHECK(R.map_site(g, s) == g.site({-3, 5, 0}));
}

TEST_CASE("positive time support") {
  const Grid g = fixtures::default_grid();
  const double L = g.extent();
  const TestFunction early = gaussian_packet(g, {L / 4, L / 2, 0}, L / 16, {}, 3.0);
  CHECK(positive_time_support(early));
  CHECK_FALSE(positive_time_support(gaussian_packet(g, {0.0, L / 2, 0}, L / 16, {}, 3.0)));
  CHECK_FALSE(positive_time_support(gaussian_packet(g, {L / 4, L / 2, 0}, L / 16)));
  CHECK(positive_time_support(TestFunction::zero(g)));
  // the reflected packet lives on the negative half
  const auto reflected = apply_isometry(early, Isometry::time_reflection());
  CHECK_FALSE(positive_time_support(reflected));
  CHECK(std::abs(inner_product(early, reflected)) == 0.0);
}

TEST_CASE("random packet sets") {
  const Grid g = fixtures::default_grid();
  const auto a = random_packets(g, 6, 3);
  const auto b = random_packets(g, 6, 3);
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].is_real());
    CHECK(l2_norm(a[i]) == doctest::Approx(1.0).epsilon(1e-12));
    for (int s = 0; s < g.sites(); ++s) REQUIRE(a[i][s] == b[i][s]);
  }
  PacketSetOptions pos;
  pos.positive_time = true;
  for (const auto& f : random_packets(g, 8, 4, pos)) CHECK(positive_time_support(f));
  PacketSetOptions cx;
  cx.real = false;
  bool any_complex = false;
  for (const auto& f : random_packets(g, 4, 5, cx)) any_complex = any_complex || !f.is_real();
  CHECK(any_complex);
}

TEST_CASE("lattice symbol") {
  const Grid g(2, 16, 0.5);
  const auto sym = symbol_table(g);
  CHECK(sym[0] == 0.0);
  for (int s = 0; s < g.sites(); ++s) {
    const Coords c = g.coords(s);
    const double expect = 4.0 / 0.25 * (std::pow(std::sin(g.momentum(c[0]) * 0.25), 2) +
                                        std::pow(std::sin(g.momentum(c[1]) * 0.25), 2));
    CHECK(sym[s] == doctest::Approx(expect).epsilon(1e-14));
    CHECK(sym[s] == sym[g.site({c[1], c[0], 0})]);
  }
  KernelOptions cont;
  cont.dispersion = Dispersion::continuum;
  const auto csym = symbol_table(g, cont);
  const int edge = g.site({8, 0, 0});
  CHECK(csym[edge] == doctest::Approx(std::pow(std::numbers::pi / 0.5, 2)));
  CHECK(sym[edge] < csym[edge]);
}
