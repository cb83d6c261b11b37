#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace schwinger::detail {

namespace {

// Planning is not thread-safe in FFTW; execution through the new-array
// interface is. Plans are unaligned and estimated so that results do not
// depend on buffer addresses or timing.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mu_);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    int shape[3] = {n, n, n};
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
    std::vector<fftw_complex> a(total), b(total);
    fftw_plan p = fftw_plan_dft(dim, shape, a.data(), b.data(), sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void run(int dim, int n, int sign, std::span<const std::complex<double>> in,
         std::span<std::complex<double>> out) {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);
  if (in.size() != total || out.size() != total) throw std::invalid_argument("dft size mismatch");
  fftw_plan p = cache().get(dim, n, sign);
  // FFTW does not modify the input of an out-of-place complex transform.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  if (src == dst) {
    std::vector<std::complex<double>> copy(in.begin(), in.end());
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(copy.data()), dst);
  } else {
    fftw_execute_dft(p, src, dst);
  }
}

}  // namespace

void dft_forward(int dim, int n, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out) {
  run(dim, n, FFTW_FORWARD, in, out);
}

void dft_backward(int dim, int n, std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out) {
  run(dim, n, FFTW_BACKWARD, in, out);
}

}  // namespace schwinger::detail
