#include <doctest.h>

#include <bit>
#include <complex>
#include <map>
#include <set>

#include "schwinger/errors.hpp"
#include "schwinger/partitions.hpp"
#include "schwinger/rng.hpp"

using namespace schwinger;
using cplx = std::complex<double>;

namespace {

// Bell numbers from the recurrence B(n+1) = sum_k C(n,k) B(k).
std::vector<long long> bell_recurrence(int n_max) {
  std::vector<long long> b{1};
  for (int n = 0; n < n_max; ++n) {
    long long s = 0, c = 1;
    for (int k = 0; k <= n; ++k) {
      s += c * b[k];
      c = c * (n - k) / (k + 1);
    }
    b.push_back(s);
  }
  return b;
}

SubsetValues random_values(int n, SequentialRng& rng) {
  SubsetValues v(n);
  for (SubsetMask m = 1; m < (SubsetMask{1} << n); ++m) v.set(m, {rng.uniform(-1, 1), rng.uniform(-1, 1)});
  return v;
}

}  // namespace

TEST_CASE("partition counts follow the Bell recurrence") {
  const auto bell = bell_recurrence(10);
  CHECK(bell[8] == 4140);
  for (int n = 1; n <= 8; ++n) CHECK(static_cast<long long>(enumerate_partitions(n).size()) == bell[n]);
  CHECK(enumerate_partitions(1).front().to_string() == "{1}");
  CHECK(enumerate_partitions(4).size() == 15);
  CHECK(enumerate_partitions(5).size() == 52);
}

TEST_CASE("enumeration is canonical and unique") {
  for (int n = 1; n <= 6; ++n) {
    std::set<std::string> seen;
    for (const auto& p : enumerate_partitions(n)) {
      CHECK(is_canonical(p));
      CHECK(seen.insert(p.to_string()).second);
    }
  }
}

TEST_CASE("order cap raises a bounds error naming the cap") {
  CHECK_THROWS_AS(enumerate_partitions(11), BoundsError);
  CHECK_THROWS_AS(enumerate_partitions(0), BoundsError);
  try {
    enumerate_partitions(11);
  } catch (const BoundsError& e) {
    CHECK(std::string(e.what()).find("10") != std::string::npos);
  }
  CHECK(enumerate_partitions(11, 11).size() == 678570);
}

TEST_CASE("capped partitions") {
  CHECK(enumerate_capped_partitions(4, 2).size() == 10);
  CHECK(enumerate_capped_partitions(2, 2).size() == 2);
  CHECK(enumerate_capped_partitions(3, 1).size() == 1);
  for (const auto& p : enumerate_capped_partitions(6, 3)) CHECK(p.max_block_size() <= 3);
}

TEST_CASE("pairings") {
  CHECK(pairings(2).size() == 1);
  const auto p4 = pairings(4);
  REQUIRE(p4.size() == 3);
  std::set<std::string> names;
  for (const auto& p : p4) names.insert(p.to_string());
  CHECK(names == std::set<std::string>{"{12|34}", "{13|24}", "{14|23}"});
  CHECK(pairings(6).size() == 15);
  CHECK(pairings(8).size() == 105);
  CHECK_THROWS_AS(pairings(3), DomainError);
  std::set<std::string> capped;
  for (const auto& p : enumerate_capped_partitions(6, 2)) capped.insert(p.to_string());
  for (const auto& p : pairings(6)) CHECK(capped.count(p.to_string()) == 1);
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(Partition(3, {{0, 1}}), DomainError);
  CHECK_THROWS_AS(Partition(3, {{0, 1}, {1, 2}}), DomainError);
  CHECK_THROWS_AS(Partition(2, {{0}, {}, {1}}), DomainError);
  const Partition p(4, {{3, 1}, {2, 0}});
  CHECK(p.to_string() == "{13|24}");
  CHECK(is_canonical(p));
}

TEST_CASE("small transforms") {
  SubsetValues m(2);
  m.set(IndexSet{0}, 2.0);
  m.set(IndexSet{1}, 3.0);
  m.set(IndexSet{0, 1}, 10.0);
  CHECK(cumulants_from_moments(m, 2) == cplx(4.0));
  SubsetValues one(1);
  one.set(IndexSet{0}, cplx(0.3, 0.1));
  CHECK(moments_from_cumulants(one, 1) == cplx(0.3, 0.1));
}

TEST_CASE("Gaussian cumulants give pairing sums and back") {
  // cumulants vanish above order 2; singletons contribute their means
  SequentialRng rng(11, 1);
  SubsetValues k(4);
  for (SubsetMask msk = 1; msk < 16; ++msk) {
    const int size = std::popcount(msk);
    k.set(msk, size <= 2 ? cplx(rng.uniform(-1, 1), 0.0) : cplx(0.0));
  }
  cplx expect = 0.0;
  for (const auto& p : enumerate_capped_partitions(4, 2)) {
    cplx prod = 1.0;
    for (auto b : p.masks()) prod *= k.at(b);
    expect += prod;
  }
  CHECK(std::abs(moments_from_cumulants(k, 4) - expect) < 1e-15);

  // centered Gaussian moments have vanishing 4th cumulant
  SubsetValues centered(4);
  const double c[4][4] = {{1.0, 0.2, 0.3, 0.1}, {0.2, 2.0, 0.5, 0.4}, {0.3, 0.5, 1.5, 0.6}, {0.1, 0.4, 0.6, 1.2}};
  for (SubsetMask msk = 1; msk < 16; ++msk) {
    const auto s = set_of(msk);
    cplx v = 0.0;
    if (s.size() == 2) v = c[s[0]][s[1]];
    if (s.size() == 4) v = c[0][1] * c[2][3] + c[0][2] * c[1][3] + c[0][3] * c[1][2];
    centered.set(msk, v);
  }
  CHECK(std::abs(cumulants_from_moments(centered, 4)) < 1e-15);
}

TEST_CASE("transforms match brute force and invert each other") {
  SequentialRng rng(5, 2);
  for (int n = 1; n <= 5; ++n) {
    const auto k = random_values(n, rng);
    cplx brute = 0.0;
    for (const auto& p : enumerate_partitions(n)) {
      cplx prod = 1.0;
      for (auto b : p.masks()) prod *= k.at(b);
      brute += prod;
    }
    CHECK(std::abs(moments_from_cumulants(k, n) - brute) <= 1e-13 * std::max(1.0, std::abs(brute)));
  }
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto k = random_values(n, rng);
      SubsetValues m(n);
      for (SubsetMask msk = 1; msk < (SubsetMask{1} << n); ++msk) {
        // restrict k to the subset and relabel
        const auto s = set_of(msk);
        SubsetValues sub(static_cast<int>(s.size()));
        for (SubsetMask t = 1; t < (SubsetMask{1} << s.size()); ++t) {
          SubsetMask orig = 0;
          for (std::size_t b = 0; b < s.size(); ++b) {
            if (t & (1u << b)) orig |= 1u << s[b];
          }
          sub.set(t, k.at(orig));
        }
        m.set(msk, moments_from_cumulants(sub, static_cast<int>(s.size())));
      }
      const cplx back = cumulants_from_moments(m, n);
      const cplx orig = k.at((SubsetMask{1} << n) - 1);
      CHECK(std::abs(back - orig) <= 1e-12 * std::max(1.0, std::abs(orig)));
    }
  }
}

TEST_CASE("missing subsets are reported") {
  SubsetValues m(3);
  m.set(IndexSet{0}, 1.0);
  m.set(IndexSet{1}, 1.0);
  CHECK_THROWS_AS(cumulants_from_moments(m, 3), IncompleteInputError);
  try {
    cumulants_from_moments(m, 3);
  } catch (const IncompleteInputError& e) {
    CHECK(std::string(e.what()).find("missing subset") != std::string::npos);
  }
  std::map<IndexSet, cplx> bad{{{1, 0}, 1.0}};
  CHECK_THROWS(SubsetValues(2, bad));
}
