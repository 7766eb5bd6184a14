#ifndef EHRENFEST_DETAIL_KAHAN_HPP
#define EHRENFEST_DETAIL_KAHAN_HPP

#include <cmath>
#include <complex>

namespace ehrenfest::detail {

// Neumaier-compensated accumulator; keeps grid sums accurate to a few ulp,
// which the spectral-accuracy tolerances (1e-12 on norms and overlaps) need.
class KahanAccumulator {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexKahanAccumulator {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  KahanAccumulator re_;
  KahanAccumulator im_;
};

}  // namespace ehrenfest::detail

#endif  // EHRENFEST_DETAIL_KAHAN_HPP
