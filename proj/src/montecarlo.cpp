#include "schwinger/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "fft.hpp"
#include "schwinger/errors.hpp"
#include "schwinger/partitions.hpp"
#include "schwinger/rng.hpp"
#include "schwinger/serialization.hpp"

namespace schwinger {

namespace {

using cplx = std::complex<double>;

constexpr std::uint32_t kChoiceStream = 0xFFFFFFFFu;
constexpr int kMaxEstimatorOrder = 6;

}  // namespace

std::string model_digest(const SchwingerFunctional& model) { return json_digest(model_to_json(model)["root"]); }

MixtureSampler::MixtureSampler(const SchwingerFunctional& model, const Grid& grid, const KernelOptions& options)
    : grid_(grid), digest_(model_digest(model)) {
  const auto sym = symbol_table(grid, options);
  double acc = 0.0;
  for (const auto& leaf : model.flatten()) {
    Leaf l;
    for (const auto& atom : leaf.measure->atoms()) {
      if (!(atom.m2 >= options.mass_floor2)) throw DomainError("atom below the mass floor in sampler");
      std::vector<double> filter(grid.sites());
      for (int k = 0; k < grid.sites(); ++k) {
        filter[k] = std::sqrt(atom.weight / (grid.cell_volume() * (sym[k] + atom.m2)));
      }
      l.filters.push_back(std::move(filter));
    }
    leaves_.push_back(std::move(l));
    weights_.push_back(leaf.weight);
    acc += leaf.weight;
    cumulative_.push_back(acc);
  }
}

int MixtureSampler::draw_component(std::uint64_t seed, std::uint64_t index) const {
  if (leaves_.size() == 1) return 0;
  const double u = CounterRng(seed, index, kChoiceStream).uniform_pair(0)[0] * cumulative_.back();
  for (std::size_t j = 0; j < cumulative_.size(); ++j) {
    if (u < cumulative_[j]) return static_cast<int>(j);
  }
  return static_cast<int>(cumulative_.size()) - 1;
}

FieldSample MixtureSampler::draw(std::uint64_t seed, std::uint64_t index) const {
  const int component = draw_component(seed, index);
  const Leaf& leaf = leaves_[component];
  const int N = grid_.sites();
  std::vector<cplx> noise(N), noise_k(N), acc(N, 0.0);
  for (std::size_t j = 0; j < leaf.filters.size(); ++j) {
    const CounterRng rng(seed, index, static_cast<std::uint32_t>(j));
    for (int p = 0; p < N / 2; ++p) {
      const auto z = rng.normal_pair(static_cast<std::uint32_t>(p));
      noise[2 * p] = z[0];
      noise[2 * p + 1] = z[1];
    }
    detail::dft_forward(grid_.dim(), grid_.n(), noise, noise_k);
    const auto& filter = leaf.filters[j];
    for (int k = 0; k < N; ++k) acc[k] += filter[k] * noise_k[k];
  }
  detail::dft_backward(grid_.dim(), grid_.n(), acc, noise);
  FieldSample out{grid_, std::vector<double>(N), Provenance{digest_, seed, index, component}};
  for (int x = 0; x < N; ++x) out.values[x] = noise[x].real() / N;
  return out;
}

FieldSample sample_free_field(const Grid& grid, double m2, std::uint64_t seed, std::uint64_t index,
                              const KernelOptions& options) {
  return sample_mixture_field(SchwingerFunctional::quasi_free(SpectralMeasure::delta(m2, options.mass_floor2)),
                              grid, seed, index, options);
}

FieldSample sample_mixture_field(const SchwingerFunctional& model, const Grid& grid, std::uint64_t seed,
                                 std::uint64_t index, const KernelOptions& options) {
  return MixtureSampler(model, grid, options).draw(seed, index);
}

cplx project(const FieldSample& sample, const TestFunction& f) {
  if (!(sample.grid == f.grid())) throw DomainError("sample and test function live on different grids");
  const auto v = f.values();
  cplx s = 0.0;
  for (std::size_t x = 0; x < v.size(); ++x) s += sample.values[x] * v[x];
  return s * sample.grid.cell_volume();
}

ProjectionSet sample_projections(const MixtureSampler& sampler, std::span<const TestFunction> fs,
                                 std::uint64_t seed, std::uint64_t count, std::uint64_t first_index,
                                 int threads) {
  for (const auto& f : fs) {
    if (!(f.grid() == sampler.grid())) throw DomainError("test function grid differs from the sampler grid");
  }
  ProjectionSet out{sampler.digest(), sampler.grid(), seed, first_index,
                    std::vector<std::vector<cplx>>(fs.size(), std::vector<cplx>(count)),
                    std::vector<int>(count)};
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(count, 1)));
  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t s = lo; s < hi; ++s) {
      const FieldSample fld = sampler.draw(seed, first_index + s);
      out.components[s] = fld.provenance.component;
      for (std::size_t i = 0; i < fs.size(); ++i) out.values[i][s] = project(fld, fs[i]);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    const std::uint64_t lo = count * t / threads;
    const std::uint64_t hi = count * (t + 1) / threads;
    pool.emplace_back(work, lo, hi);
  }
  for (auto& th : pool) th.join();
  return out;
}

std::size_t jackknife_blocks(std::size_t count) { return count <= 2000 ? count : 1000; }

namespace {

// Jackknife over contiguous blocks of a statistic of the sample means of all
// subset products of the given columns.
template <class Stat>
Estimate jackknife(const std::vector<std::vector<cplx>>& columns, std::size_t N, Stat stat) {
  const int n = static_cast<int>(columns.size());
  if (n < 1 || n > kMaxEstimatorOrder) throw BoundsError("estimators take 1..6 test functions");
  if (N < 2) throw DomainError("jackknife needs at least two samples");
  const std::size_t masks = std::size_t{1} << n;
  const std::size_t B = jackknife_blocks(N);
  std::vector<std::vector<cplx>> block(B, std::vector<cplx>(masks, 0.0));
  std::vector<std::size_t> block_size(B, 0);
  std::vector<cplx> prod(masks);
  prod[0] = 1.0;
  for (std::size_t s = 0; s < N; ++s) {
    const std::size_t b = s * B / N;
    for (std::size_t m = 1; m < masks; ++m) {
      const int low = std::countr_zero(m);
      prod[m] = prod[m & (m - 1)] * columns[low][s];
    }
    for (std::size_t m = 0; m < masks; ++m) block[b][m] += prod[m];
    ++block_size[b];
  }
  std::vector<cplx> total(masks, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t m = 0; m < masks; ++m) total[m] += block[b][m];
  }
  std::vector<cplx> mean(masks);
  for (std::size_t m = 0; m < masks; ++m) mean[m] = total[m] / double(N);
  const cplx full = stat(mean);

  std::vector<cplx> theta(B);
  cplx theta_bar = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    const double rest = double(N - block_size[b]);
    for (std::size_t m = 0; m < masks; ++m) mean[m] = (total[m] - block[b][m]) / rest;
    theta[b] = stat(mean);
    theta_bar += theta[b];
  }
  theta_bar /= double(B);
  double var = 0.0;
  for (const auto& t : theta) var += std::norm(t - theta_bar);
  var *= double(B - 1) / double(B);
  return Estimate{full, std::sqrt(var), N};
}

std::vector<std::vector<cplx>> select_columns(const ProjectionSet& set, std::span<const int> which) {
  std::vector<std::vector<cplx>> cols;
  for (int i : which) {
    if (i < 0 || i >= static_cast<int>(set.values.size())) throw DomainError("projection column out of range");
    cols.push_back(set.values[i]);
  }
  return cols;
}

}  // namespace

Estimate estimate_moment(std::span<const FieldSample> samples, std::span<const TestFunction> fs) {
  if (samples.empty()) throw DomainError("no samples");
  const auto& ref = samples.front();
  for (const auto& s : samples) {
    if (s.provenance.model_digest != ref.provenance.model_digest || !(s.grid == ref.grid)) {
      throw ProvenanceError("sample " + std::to_string(s.provenance.index) + " comes from model " +
                            s.provenance.model_digest + " on " + s.grid.describe() + ", expected " +
                            ref.provenance.model_digest + " on " + ref.grid.describe());
    }
  }
  std::vector<std::vector<cplx>> cols(fs.size(), std::vector<cplx>(samples.size()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t s = 0; s < samples.size(); ++s) cols[i][s] = project(samples[s], fs[i]);
  }
  const std::size_t full = (std::size_t{1} << fs.size()) - 1;
  return jackknife(cols, samples.size(), [full](const std::vector<cplx>& m) { return m[full]; });
}

Estimate estimate_moment(const ProjectionSet& set, std::span<const int> which) {
  const std::size_t full = (std::size_t{1} << which.size()) - 1;
  return jackknife(select_columns(set, which), set.count(), [full](const std::vector<cplx>& m) { return m[full]; });
}

Estimate estimate_cumulant(const ProjectionSet& set, std::span<const int> which) {
  const int n = static_cast<int>(which.size());
  return jackknife(select_columns(set, which), set.count(), [n](const std::vector<cplx>& m) {
    SubsetValues values(n);
    for (SubsetMask mask = 1; mask < (SubsetMask{1} << n); ++mask) values.set(mask, m[mask]);
    return cumulants_from_moments(values, n);
  });
}

double two_sample_z(const Estimate& a, const Estimate& b) {
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  return se > 0.0 ? std::abs(a.value - b.value) / se : (a.value == b.value ? 0.0 : INFINITY);
}

std::vector<std::size_t> component_counts(const ProjectionSet& set, int components) {
  std::vector<std::size_t> counts(components, 0);
  for (int c : set.components) {
    if (c < 0 || c >= components) throw DomainError("component index out of range");
    ++counts[c];
  }
  return counts;
}

std::string sample_dump(std::span<const FieldSample> samples) {
  std::string out;
  OrderedJson header;
  header["schema"] = "field-samples/1";
  header["count"] = samples.size();
  if (!samples.empty()) {
    header["model_digest"] = samples.front().provenance.model_digest;
    header["seed"] = samples.front().provenance.seed;
    const Grid& g = samples.front().grid;
    header["grid"] = OrderedJson{{"d", g.dim()}, {"n_per_axis", g.n()}, {"spacing", g.spacing()}};
  }
  out += header.dump() + "\n";
  for (const auto& s : samples) {
    OrderedJson rec;
    rec["index"] = s.provenance.index;
    rec["component"] = s.provenance.component;
    rec["model_digest"] = s.provenance.model_digest;
    rec["values"] = s.values;
    out += rec.dump() + "\n";
  }
  return out;
}

}  // namespace schwinger
