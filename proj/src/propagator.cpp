#include "schwinger/propagator.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "schwinger/errors.hpp"

namespace schwinger {

namespace {

void require_floor(double m2, const KernelOptions& options) {
  if (!(m2 >= options.mass_floor2) || !(m2 > 0.0) || !std::isfinite(m2)) {
    throw DomainError("mass squared " + std::to_string(m2) + " below the infrared floor " +
                      std::to_string(options.mass_floor2));
  }
}

}  // namespace

SpectralMeasure::SpectralMeasure(std::vector<SpectralAtom> atoms, double mass_floor2)
    : mass_floor2_(mass_floor2) {
  if (!(mass_floor2 > 0.0)) throw DomainError("mass floor must be positive");
  if (atoms.empty()) throw DomainError("spectral measure needs at least one atom");
  for (const auto& at : atoms) {
    if (!std::isfinite(at.m2) || !(at.m2 >= mass_floor2)) {
      throw DomainError("spectral atom at m2=" + std::to_string(at.m2) + " below the mass floor " +
                        std::to_string(mass_floor2));
    }
    if (!std::isfinite(at.weight) || at.weight < 0.0) {
      throw DomainError("spectral atom weight must be finite and nonnegative");
    }
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const SpectralAtom& a, const SpectralAtom& b) { return a.m2 < b.m2; });
  for (const auto& at : atoms) {
    if (!atoms_.empty() && atoms_.back().m2 == at.m2) {
      atoms_.back().weight += at.weight;
    } else {
      atoms_.push_back(at);
    }
  }
  total_mass_ = 0.0;
  for (const auto& at : atoms_) total_mass_ += at.weight;
}

SpectralMeasure SpectralMeasure::delta(double m2, double mass_floor2) {
  return SpectralMeasure({{m2, 1.0}}, mass_floor2);
}

bool SpectralMeasure::is_probability() const noexcept { return std::abs(total_mass_ - 1.0) <= 1e-12; }

SpectralMeasure SpectralMeasure::scaled(double w) const {
  std::vector<SpectralAtom> out(atoms_.begin(), atoms_.end());
  for (auto& at : out) at.weight *= w;
  return SpectralMeasure(std::move(out), mass_floor2_);
}

SpectralMeasure operator+(const SpectralMeasure& a, const SpectralMeasure& b) {
  std::vector<SpectralAtom> out(a.atoms_.begin(), a.atoms_.end());
  out.insert(out.end(), b.atoms_.begin(), b.atoms_.end());
  return SpectralMeasure(std::move(out), std::min(a.mass_floor2_, b.mass_floor2_));
}

std::complex<double> free_two_point(const TestFunction& f, const TestFunction& g, double m2,
                                    const KernelOptions& options) {
  require_same_grid(f, g);
  require_floor(m2, options);
  const Grid& grid = f.grid();
  const auto sym = symbol_table(grid, options);
  const auto fk = f.momentum();
  const auto gk = g.momentum();
  std::complex<double> s = 0.0;
  for (int k = 0; k < grid.sites(); ++k) s += fk[grid.negated(k)] * gk[k] / (sym[k] + m2);
  s /= grid.volume();
  if (f.is_real() && g.is_real()) s.imag(0.0);
  return s;
}

std::complex<double> spectral_two_point(const TestFunction& f, const TestFunction& g,
                                        const SpectralMeasure& rho, const KernelOptions& options) {
  std::complex<double> s = 0.0;
  for (const auto& at : rho.atoms()) s += at.weight * free_two_point(f, g, at.m2, options);
  return s;
}

std::vector<double> covariance_kernel(const Grid& grid, double m2, const KernelOptions& options) {
  require_floor(m2, options);
  const auto sym = symbol_table(grid, options);
  std::vector<std::complex<double>> spectrum(grid.sites());
  for (int k = 0; k < grid.sites(); ++k) spectrum[k] = 1.0 / (sym[k] + m2);
  std::vector<std::complex<double>> pos(grid.sites());
  detail::dft_backward(grid.dim(), grid.n(), spectrum, pos);
  std::vector<double> out(grid.sites());
  for (int x = 0; x < grid.sites(); ++x) out[x] = pos[x].real() / grid.volume();
  // The symbol is even, so C(x) = C(-x); enforce it bit for bit.
  for (int x = 0; x < grid.sites(); ++x) {
    const int nx = grid.negated(x);
    if (nx > x) {
      const double avg = 0.5 * (out[x] + out[nx]);
      out[x] = out[nx] = avg;
    }
  }
  return out;
}

}  // namespace schwinger
