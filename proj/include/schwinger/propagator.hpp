#pragma once

// Two-point functions: the free massive covariance (k^2 + m^2)^-1 and its
// spectral superpositions over a finite atomic mass measure.

#include <complex>
#include <span>
#include <vector>

#include "schwinger/lattice.hpp"

namespace schwinger {

struct SpectralAtom {
  double m2;
  double weight;
  bool operator==(const SpectralAtom&) const = default;
};

/// Finite nonnegative atomic measure on the m^2 axis. Atoms are sorted by m2
/// with duplicates merged; every atom sits at or above the mass floor.
class SpectralMeasure {
 public:
  explicit SpectralMeasure(std::vector<SpectralAtom> atoms, double mass_floor2 = kDefaultMassFloor2);
  static SpectralMeasure delta(double m2, double mass_floor2 = kDefaultMassFloor2);

  std::span<const SpectralAtom> atoms() const noexcept { return atoms_; }
  double total_mass() const noexcept { return total_mass_; }
  bool is_probability() const noexcept;
  double min_m2() const noexcept { return atoms_.front().m2; }
  double mass_floor2() const noexcept { return mass_floor2_; }

  /// w * rho (all weights scaled).
  SpectralMeasure scaled(double w) const;
  /// Sum of measures.
  friend SpectralMeasure operator+(const SpectralMeasure& a, const SpectralMeasure& b);
  bool operator==(const SpectralMeasure& o) const { return atoms_ == o.atoms_; }

 private:
  std::vector<SpectralAtom> atoms_;
  double total_mass_;
  double mass_floor2_;
};

/// L^-d sum_k f^(-k) g^(k) / (khat^2 + m2). Real whenever f and g are real.
/// Throws DomainError on grid mismatch or m2 below options.mass_floor2.
std::complex<double> free_two_point(const TestFunction& f, const TestFunction& g, double m2,
                                    const KernelOptions& options = {});

/// sum over atoms of weight * free_two_point(f, g, m2).
std::complex<double> spectral_two_point(const TestFunction& f, const TestFunction& g,
                                        const SpectralMeasure& rho, const KernelOptions& options = {});

/// C(x) = L^-d sum_k exp(i k.x) / (khat^2 + m2), one value per displacement
/// site (row-major). Satisfies a^{2d} sum_{x,y} f(x) C(x-y) g(y) = free_two_point.
std::vector<double> covariance_kernel(const Grid& grid, double m2, const KernelOptions& options = {});

}  // namespace schwinger
