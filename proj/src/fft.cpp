#include "ehrenfest/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace ehrenfest {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n), plan_fwd_(nullptr), plan_bwd_(nullptr) {
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("Fft: size must be a power of two");
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<std::complex<double>> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags);
  plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags);
  if (plan_fwd_ == nullptr || plan_bwd_ == nullptr) throw std::runtime_error("Fft: planning failed");
}

Fft::~Fft() {
  if (plan_fwd_ == nullptr && plan_bwd_ == nullptr) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

Fft::Fft(Fft&& other) noexcept : n_(other.n_), plan_fwd_(other.plan_fwd_), plan_bwd_(other.plan_bwd_) {
  other.plan_fwd_ = nullptr;
  other.plan_bwd_ = nullptr;
}

void Fft::forward(std::vector<std::complex<double>>& a) const {
  if (a.size() != n_) throw std::invalid_argument("Fft::forward: size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), buf, buf);
}

void Fft::inverse(std::vector<std::complex<double>>& a) const {
  if (a.size() != n_) throw std::invalid_argument("Fft::inverse: size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), buf, buf);
  double inv = 1.0 / static_cast<double>(n_);
  for (auto& z : a) z *= inv;
}

}  // namespace ehrenfest
