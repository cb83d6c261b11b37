#pragma once

// Finite periodic lattice, test functions sampled on it, discrete Fourier
// transform, Sobolev-type norms and the lattice isometries.
//
// Conventions (a = spacing, L = n a, N = n^d sites):
//   position sites    x = a * (i_0, ..., i_{d-1}),  i_k in [0, n)
//   momenta           k = (2 pi / L) * m,            m_k in (-n/2, n/2]
//   forward transform f^(k) = a^d sum_x exp(-i k.x) f(x)
//   inverse           f(x)  = L^-d sum_k exp(+i k.x) f^(k)
// so that a^d sum_x |f|^2 = L^-d sum_k |f^|^2 (Parseval). Axis 0 is time and
// the slowest-varying index in the row-major site layout.

#include <array>
#include <cstdint>
#include <complex>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace schwinger {

using Coords = std::array<int, 3>;
using Vec3 = std::array<double, 3>;

/// Infrared floor on m^2 applied when nothing else is configured.
inline constexpr double kDefaultMassFloor2 = 1e-4;

class Grid {
 public:
  /// d in 1..3, n a power of two >= 8 (<= 64 for d <= 2, <= 16 for d = 3).
  Grid(int dim, int n_per_axis, double spacing);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  double extent() const noexcept { return n_ * spacing_; }
  int sites() const noexcept { return sites_; }
  /// a^d
  double cell_volume() const noexcept { return cell_volume_; }
  /// L^d
  double volume() const noexcept { return volume_; }

  Coords coords(int site) const;
  /// Row-major site index; coordinates wrap periodically.
  int site(Coords c) const;
  /// Index of -x (equivalently -k) under periodic wrap.
  int negated(int site) const;
  /// Signed integer mode m in (-n/2, n/2] for a per-axis index.
  int signed_mode(int index) const noexcept { return index <= n_ / 2 ? index : index - n_; }
  /// Physical momentum component 2 pi m / L.
  double momentum(int index) const noexcept;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && spacing_ == o.spacing_;
  }
  std::string describe() const;

 private:
  int dim_;
  int n_;
  double spacing_;
  int sites_;
  double cell_volume_;
  double volume_;
};

/// Complex-valued function on the lattice sites. Immutable; the momentum-space
/// view is computed on first use and shared between copies.
class TestFunction {
 public:
  TestFunction(Grid grid, std::vector<std::complex<double>> values);
  static TestFunction zero(Grid grid);
  static TestFunction from_real(Grid grid, std::span<const double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const std::complex<double>> values() const noexcept { return values_; }
  std::complex<double> operator[](int site) const { return values_[site]; }
  bool is_real() const noexcept { return is_real_; }

  /// f^(k) on the momentum sites, same layout as positions.
  std::span<const std::complex<double>> momentum() const;

  friend TestFunction operator+(const TestFunction& a, const TestFunction& b);
  friend TestFunction operator-(const TestFunction& a, const TestFunction& b);
  friend TestFunction operator*(std::complex<double> c, const TestFunction& f);
  TestFunction operator-() const;

 private:
  struct MomentumCache {
    std::once_flag once;
    std::vector<std::complex<double>> values;
  };

  Grid grid_;
  std::vector<std::complex<double>> values_;
  bool is_real_;
  std::shared_ptr<MomentumCache> cache_;
};

/// Throws DomainError unless both functions live on the same grid.
void require_same_grid(const TestFunction& f, const TestFunction& g);

/// Discrete L^2 inner product a^d sum_x conj(f) g.
std::complex<double> inner_product(const TestFunction& f, const TestFunction& g);
double l2_norm(const TestFunction& f);
TestFunction real_part(const TestFunction& f);

/// Momentum-space samples f^(k) (as a TestFunction on the same grid layout).
TestFunction fourier(const TestFunction& f);
/// Inverse of fourier.
TestFunction inverse_fourier(const TestFunction& fk);

/// Unit-L^2 periodized Gaussian exp(-|x-c|^2 / 2w^2) exp(i p.(x-c)).
/// `center` and `momentum` are physical coordinates (entries beyond d are
/// ignored). With `support_radius` (in units of the width) values at
/// minimum-image distance above support_radius * width are set to exactly zero
/// before normalization.
/// Throws ResolutionError unless 2a <= width <= L/4.
TestFunction gaussian_packet(const Grid& grid, Vec3 center, double width,
                             Vec3 momentum = {0.0, 0.0, 0.0},
                             std::optional<double> support_radius = std::nullopt);

// Dispersion used in every momentum-space kernel.
enum class Dispersion {
  lattice,    // sum_i (2/a)^2 sin^2(k_i a / 2)
  continuum,  // sum_i k_i^2 with k_i in the first Brillouin zone
};

struct KernelOptions {
  Dispersion dispersion = Dispersion::lattice;
  /// Per-axis multipliers of the symbol; anything other than all-ones breaks
  /// rotation invariance on purpose (negative controls).
  Vec3 axis_weight{1.0, 1.0, 1.0};
  double mass_floor2 = kDefaultMassFloor2;
};

/// k^2 symbol at every momentum site.
std::vector<double> symbol_table(const Grid& grid, const KernelOptions& options = {});

/// sqrt( L^-d sum_k |f^(k)|^2 / (khat^2 + m2) ). Throws DomainError for m2 <= 0.
double sobolev_norm(const TestFunction& f, double m2, const KernelOptions& options = {});

class Isometry {
 public:
  enum class Kind { identity, translation, rotation, axis_reflection, time_reflection };

  static Isometry identity();
  /// x -> x + offset (lattice units).
  static Isometry translation(Coords offset);
  /// Quarter turn in the (from, to) plane: e_from -> e_to, e_to -> -e_from.
  static Isometry rotation(int from_axis, int to_axis);
  /// x_axis -> -x_axis about the site plane x_axis = 0.
  static Isometry axis_reflection(int axis);
  /// Link reflection t -> -a - t: the plane sits between the slices t = 0
  /// and t = -a, so the positive-time half {0 <= t < L/2} maps onto its
  /// complement.
  static Isometry time_reflection();

  Kind kind() const noexcept { return kind_; }
  /// Throws DomainError when the parameters do not fit the grid.
  void require_compatible(const Grid& grid) const;
  /// Image of a site.
  int map_site(const Grid& grid, int site) const;
  std::string describe() const;

 private:
  Isometry(Kind kind, Coords params) : kind_(kind), params_(params) {}
  Kind kind_;
  Coords params_;
};

/// (g f)(x) = f(g^-1 x): a site permutation, no interpolation.
TestFunction apply_isometry(const TestFunction& f, const Isometry& g);

struct PacketSetOptions {
  /// Truncated packets confined to the positive-time half (for reflection
  /// positivity test sets).
  bool positive_time = false;
  /// Take the real part of the modulated packet (renormalized).
  bool real = true;
  /// Largest |p_i| as a fraction of the zone edge pi/a.
  double max_momentum_fraction = 0.25;
  /// Support radius (in widths) used for positive-time packets.
  double support_radius = 3.0;
};

/// Deterministic family of unit-L^2 packets with random centers, widths and
/// momenta drawn from `seed`.
std::vector<TestFunction> random_packets(const Grid& grid, int count, std::uint64_t seed,
                                         const PacketSetOptions& options = {});

/// True iff every site of the negative-time half (time index in [n/2, n))
/// carries |f| <= 1e-14.
bool positive_time_support(const TestFunction& f);

}  // namespace schwinger
