#pragma once

// Sampling the Gaussian-mixture field measure behind a model and estimating
// its moments from the draws.
//
// A quasi-free leaf with atoms (m_j^2, w_j) is sampled as the sum of
// independent free fields sqrt(w_j) phi_j; phi_j is white noise filtered by
// (a^d (khat^2 + m_j^2))^-1/2 in momentum space, so that
// phi(f) = a^d sum_x phi(x) f(x) has variance S^2(f, f). A mixture first
// draws a leaf with the path-weight probabilities.
//
// Random streams (Philox counter = sample index, stream, position):
//   stream j           white noise of atom j of the drawn leaf
//   stream 0xFFFFFFFF  the leaf choice
// so every sample is reproducible from (seed, index) alone.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "schwinger/functional.hpp"
#include "schwinger/lattice.hpp"

namespace schwinger {

struct Provenance {
  std::string model_digest;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  int component = 0;  // index of the drawn leaf in flatten() order
};

struct FieldSample {
  Grid grid;
  std::vector<double> values;
  Provenance provenance;
};

/// Digest that stamps sample provenance (model document without limits).
std::string model_digest(const SchwingerFunctional& model);

class MixtureSampler {
 public:
  MixtureSampler(const SchwingerFunctional& model, const Grid& grid, const KernelOptions& options = {});

  const Grid& grid() const noexcept { return grid_; }
  const std::string& digest() const noexcept { return digest_; }
  int components() const noexcept { return static_cast<int>(leaves_.size()); }
  const std::vector<double>& component_weights() const noexcept { return weights_; }

  /// Leaf index chosen for sample `index`.
  int draw_component(std::uint64_t seed, std::uint64_t index) const;
  FieldSample draw(std::uint64_t seed, std::uint64_t index) const;

 private:
  struct Leaf {
    std::vector<std::vector<double>> filters;  // per atom, per momentum site
  };
  Grid grid_;
  std::string digest_;
  std::vector<Leaf> leaves_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// Free field of mass m2; identical bits to a single-atom leaf drawn by
/// sample_mixture_field.
FieldSample sample_free_field(const Grid& grid, double m2, std::uint64_t seed, std::uint64_t index = 0,
                              const KernelOptions& options = {});
FieldSample sample_mixture_field(const SchwingerFunctional& model, const Grid& grid, std::uint64_t seed,
                                 std::uint64_t index = 0, const KernelOptions& options = {});

/// phi(f) = a^d sum_x phi(x) f(x).
std::complex<double> project(const FieldSample& sample, const TestFunction& f);

/// Projections phi(f_i) of `count` consecutive samples, without keeping the
/// fields. values[i][s] belongs to function i and sample first_index + s.
struct ProjectionSet {
  std::string model_digest;
  Grid grid;
  std::uint64_t seed;
  std::uint64_t first_index;
  std::vector<std::vector<std::complex<double>>> values;
  std::vector<int> components;

  std::size_t count() const noexcept { return components.size(); }
};

/// threads <= 0 uses the hardware concurrency. Output does not depend on the
/// thread count.
ProjectionSet sample_projections(const MixtureSampler& sampler, std::span<const TestFunction> fs,
                                 std::uint64_t seed, std::uint64_t count, std::uint64_t first_index = 0,
                                 int threads = 0);

struct Estimate {
  std::complex<double> value;
  double std_error;
  std::size_t count;
};

/// Blocks used by the jackknife: one per sample up to 2000 samples, else 1000.
std::size_t jackknife_blocks(std::size_t count);

/// Mean of prod_i phi(f_i) with jackknife error. Throws ProvenanceError when
/// the samples come from different models or grids; n <= 6.
Estimate estimate_moment(std::span<const FieldSample> samples, std::span<const TestFunction> fs);
/// Same from stored projections; `which` selects columns (repeats allowed).
Estimate estimate_moment(const ProjectionSet& set, std::span<const int> which);
/// Truncated function of the selected columns: sample subset moments pushed
/// through the Mobius inversion, jackknifed over blocks.
Estimate estimate_cumulant(const ProjectionSet& set, std::span<const int> which);

/// |a - b| / sqrt(se_a^2 + se_b^2).
double two_sample_z(const Estimate& a, const Estimate& b);

/// Draw counts per component.
std::vector<std::size_t> component_counts(const ProjectionSet& set, int components);

/// JSON lines: one header record, then {"index", "component", "values"} per
/// sample.
std::string sample_dump(std::span<const FieldSample> samples);

}  // namespace schwinger
