#pragma once

// Set partitions of {0..n-1} and the moment <-> cumulant transforms over the
// partition lattice.
//
// Indices are zero-based in the API; Partition::to_string prints them
// one-based ("{12|34}") to match the usual notation.

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace schwinger {

/// Default upper bound on n for every enumeration. Bell(10) = 115975.
inline constexpr int kDefaultMaxPartitionOrder = 10;

using IndexSet = std::vector<int>;  // strictly increasing
using SubsetMask = std::uint32_t;

SubsetMask mask_of(const IndexSet& set);
IndexSet set_of(SubsetMask mask);

class Partition {
 public:
  /// Validates and canonicalizes; throws DomainError when the blocks are not
  /// a partition of {0..n-1}.
  Partition(int n, std::vector<IndexSet> blocks);

  int n() const noexcept { return n_; }
  int size() const noexcept { return static_cast<int>(blocks_.size()); }
  const std::vector<IndexSet>& blocks() const noexcept { return blocks_; }
  const std::vector<SubsetMask>& masks() const noexcept { return masks_; }
  int max_block_size() const noexcept;

  std::string to_string() const;
  bool operator==(const Partition& other) const { return n_ == other.n_ && blocks_ == other.blocks_; }

 private:
  int n_;
  std::vector<IndexSet> blocks_;
  std::vector<SubsetMask> masks_;
};

/// Re-checks the type invariants of an existing partition: disjoint nonempty
/// blocks covering {0..n-1}, blocks ordered by first element, sorted inside.
bool is_canonical(const Partition& p);

/// Every partition of {0..n-1} exactly once, in restricted-growth-string order.
std::vector<Partition> enumerate_partitions(int n, int max_n = kDefaultMaxPartitionOrder);

/// Partitions whose blocks all have size <= cap.
std::vector<Partition> enumerate_capped_partitions(int n, int cap,
                                                   int max_n = kDefaultMaxPartitionOrder);

/// Perfect matchings of {0..n-1}; n must be even.
std::vector<Partition> pairings(int n, int max_n = kDefaultMaxPartitionOrder);

/// Values attached to nonempty subsets of {0..n-1}. Keys are canonical sorted
/// tuples on the way in; storage is by bit mask.
class SubsetValues {
 public:
  explicit SubsetValues(int n);
  SubsetValues(int n, const std::map<IndexSet, std::complex<double>>& values);

  int n() const noexcept { return n_; }
  void set(const IndexSet& subset, std::complex<double> value);
  void set(SubsetMask mask, std::complex<double> value);
  bool contains(SubsetMask mask) const;
  /// Throws IncompleteInputError naming the subset when absent.
  std::complex<double> at(SubsetMask mask) const;

 private:
  int n_;
  std::vector<std::complex<double>> values_;
  std::vector<bool> present_;
};

/// Sum over all partitions of the product of block cumulants.
std::complex<double> moments_from_cumulants(const SubsetValues& cumulants, int n,
                                            int max_n = kDefaultMaxPartitionOrder);

/// Mobius inversion: sum over partitions of (|pi|-1)! (-1)^(|pi|-1) times the
/// product of block moments.
std::complex<double> cumulants_from_moments(const SubsetValues& moments, int n,
                                            int max_n = kDefaultMaxPartitionOrder);

}  // namespace schwinger
