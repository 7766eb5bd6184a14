#ifndef EHRENFEST_FFT_HPP
#define EHRENFEST_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace ehrenfest {

// Thin RAII wrapper over FFTW complex transforms of one fixed size.
//
// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED: ESTIMATE keeps plan
// selection deterministic run-to-run (MEASURE picks by timing and would break
// the byte-identical-output contract), UNALIGNED lets one plan serve any
// buffer of the right size. Plan creation/destruction is serialized behind a
// global mutex; executing on distinct buffers is thread-safe.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&&) = delete;

  std::size_t size() const { return n_; }

  // In-place unnormalized forward transform: F_m = sum_j a_j e^{-2 pi i jm/n}.
  void forward(std::vector<std::complex<double>>& a) const;
  // In-place inverse transform normalized by 1/n (forward then inverse is the
  // identity up to roundoff).
  void inverse(std::vector<std::complex<double>>& a) const;

 private:
  std::size_t n_;
  void* plan_fwd_;
  void* plan_bwd_;
};

}  // namespace ehrenfest

#endif  // EHRENFEST_FFT_HPP
