#include "schwinger/partitions.hpp"

#include <algorithm>
#include <sstream>

#include "schwinger/errors.hpp"

namespace schwinger {

namespace {

void check_order(int n, int max_n) {
  if (n < 1 || n > max_n) {
    throw BoundsError("partition order n=" + std::to_string(n) + " outside [1, " +
                      std::to_string(max_n) + "] (enumeration cap)");
  }
  if (max_n > 31) {
    throw BoundsError("partition cap above 31 does not fit a subset mask");
  }
}

// Visits restricted growth strings a[0..n-1] with a[0] = 0 and
// a[i] <= 1 + max(a[0..i-1]), in lexicographic order.
template <typename Visit>
void for_each_rgs(int n, int cap, Visit&& visit) {
  std::vector<int> label(n, 0);
  std::vector<int> block_size(n, 0);
  auto rec = [&](auto&& self, int i, int blocks) -> void {
    if (i == n) {
      visit(label, blocks);
      return;
    }
    for (int b = 0; b <= blocks && b < n; ++b) {
      if (block_size[b] >= cap) continue;
      label[i] = b;
      ++block_size[b];
      self(self, i + 1, b == blocks ? blocks + 1 : blocks);
      --block_size[b];
    }
  };
  rec(rec, 0, 0);
}

Partition from_labels(const std::vector<int>& label, int blocks) {
  std::vector<IndexSet> out(blocks);
  for (int i = 0; i < static_cast<int>(label.size()); ++i) out[label[i]].push_back(i);
  return Partition(static_cast<int>(label.size()), std::move(out));
}

}  // namespace

SubsetMask mask_of(const IndexSet& set) {
  SubsetMask m = 0;
  for (int i : set) m |= SubsetMask{1} << i;
  return m;
}

IndexSet set_of(SubsetMask mask) {
  IndexSet out;
  for (int i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1u) out.push_back(i);
  }
  return out;
}

Partition::Partition(int n, std::vector<IndexSet> blocks) : n_(n), blocks_(std::move(blocks)) {
  if (n < 1) throw DomainError("partition of an empty index set");
  SubsetMask seen = 0;
  for (auto& b : blocks_) {
    if (b.empty()) throw DomainError("partition has an empty block");
    std::sort(b.begin(), b.end());
    for (int i : b) {
      if (i < 0 || i >= n) throw DomainError("partition index out of range");
      SubsetMask bit = SubsetMask{1} << i;
      if (seen & bit) throw DomainError("partition blocks overlap");
      seen |= bit;
    }
  }
  if (seen != (n == 32 ? ~SubsetMask{0} : (SubsetMask{1} << n) - 1)) {
    throw DomainError("partition blocks do not cover the index set");
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [](const IndexSet& a, const IndexSet& b) { return a.front() < b.front(); });
  masks_.reserve(blocks_.size());
  for (const auto& b : blocks_) masks_.push_back(mask_of(b));
}

int Partition::max_block_size() const noexcept {
  std::size_t m = 0;
  for (const auto& b : blocks_) m = std::max(m, b.size());
  return static_cast<int>(m);
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) os << '|';
    for (int x : blocks_[i]) os << (x + 1);
  }
  os << '}';
  return os.str();
}

bool is_canonical(const Partition& p) {
  SubsetMask seen = 0;
  int prev_first = -1;
  for (const auto& b : p.blocks()) {
    if (b.empty() || b.front() <= prev_first) return false;
    prev_first = b.front();
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i] < 0 || b[i] >= p.n()) return false;
      if (i && b[i] <= b[i - 1]) return false;
      SubsetMask bit = SubsetMask{1} << b[i];
      if (seen & bit) return false;
      seen |= bit;
    }
  }
  return seen == (SubsetMask{1} << p.n()) - 1;
}

std::vector<Partition> enumerate_partitions(int n, int max_n) {
  return enumerate_capped_partitions(n, n, max_n);
}

std::vector<Partition> enumerate_capped_partitions(int n, int cap, int max_n) {
  check_order(n, max_n);
  if (cap < 1) throw DomainError("block size cap must be positive");
  std::vector<Partition> out;
  for_each_rgs(n, cap, [&](const std::vector<int>& label, int blocks) {
    out.push_back(from_labels(label, blocks));
  });
  return out;
}

std::vector<Partition> pairings(int n, int max_n) {
  check_order(n, max_n);
  if (n % 2 != 0) throw DomainError("pairings need an even number of indices, got " + std::to_string(n));
  std::vector<Partition> out;
  std::vector<IndexSet> blocks;
  auto rec = [&](auto&& self, SubsetMask remaining) -> void {
    if (remaining == 0) {
      out.emplace_back(n, blocks);
      return;
    }
    int first = __builtin_ctz(remaining);
    SubsetMask rest = remaining & ~(SubsetMask{1} << first);
    for (SubsetMask r = rest; r != 0; r &= r - 1) {
      int partner = __builtin_ctz(r);
      blocks.push_back({first, partner});
      self(self, rest & ~(SubsetMask{1} << partner));
      blocks.pop_back();
    }
  };
  rec(rec, (SubsetMask{1} << n) - 1);
  return out;
}

SubsetValues::SubsetValues(int n) : n_(n) {
  if (n < 1 || n > 31) throw BoundsError("subset map order outside [1, 31]");
  values_.assign(std::size_t{1} << n, {});
  present_.assign(std::size_t{1} << n, false);
}

SubsetValues::SubsetValues(int n, const std::map<IndexSet, std::complex<double>>& values)
    : SubsetValues(n) {
  for (const auto& [key, value] : values) set(key, value);
}

void SubsetValues::set(const IndexSet& subset, std::complex<double> value) {
  if (subset.empty()) throw DomainError("subset key must be nonempty");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= n_) throw DomainError("subset index out of range");
    if (i && subset[i] <= subset[i - 1]) throw DomainError("subset key must be a sorted tuple without repeats");
  }
  set(mask_of(subset), value);
}

void SubsetValues::set(SubsetMask mask, std::complex<double> value) {
  if (mask == 0 || mask >= values_.size()) throw DomainError("subset mask out of range");
  values_[mask] = value;
  present_[mask] = true;
}

bool SubsetValues::contains(SubsetMask mask) const {
  return mask != 0 && mask < values_.size() && present_[mask];
}

std::complex<double> SubsetValues::at(SubsetMask mask) const {
  if (!contains(mask)) {
    std::ostringstream os;
    os << "missing subset entry {";
    for (int i : set_of(mask)) os << ' ' << (i + 1);
    os << " }";
    throw IncompleteInputError(os.str());
  }
  return values_[mask];
}

namespace {

template <typename Weight>
std::complex<double> partition_sum(const SubsetValues& values, int n, int max_n, Weight&& weight) {
  check_order(n, max_n);
  if (n > values.n()) throw IncompleteInputError("subset map covers fewer than n indices");
  std::complex<double> total = 0.0;
  for (const auto& p : enumerate_partitions(n, max_n)) {
    std::complex<double> term = weight(p.size());
    for (SubsetMask m : p.masks()) term *= values.at(m);
    total += term;
  }
  return total;
}

}  // namespace

std::complex<double> moments_from_cumulants(const SubsetValues& cumulants, int n, int max_n) {
  return partition_sum(cumulants, n, max_n, [](int) { return 1.0; });
}

std::complex<double> cumulants_from_moments(const SubsetValues& moments, int n, int max_n) {
  return partition_sum(moments, n, max_n, [](int blocks) {
    double f = 1.0;
    for (int i = 2; i < blocks; ++i) f *= i;
    return (blocks % 2 == 1) ? f : -f;
  });
}

}  // namespace schwinger
