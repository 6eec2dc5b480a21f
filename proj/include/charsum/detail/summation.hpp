#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace charsum::detail {

// Neumaier's variant of Kahan summation. The running compensation picks up
// the low-order bits lost whenever |term| exceeds |sum|.
class CompensatedSum {
 public:
  void add(double term) {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      compensation_ += (sum_ - t) + term;
    } else {
      compensation_ += (term - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double term) {
    add(term);
    return *this;
  }

  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.compensation_);
  }

  [[nodiscard]] double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(std::complex<double> term) {
    re_.add(term.real());
    im_.add(term.imag());
  }

  CompensatedComplexSum& operator+=(std::complex<double> term) {
    add(term);
    return *this;
  }

  void merge(const CompensatedComplexSum& other) {
    re_.merge(other.re_);
    im_.merge(other.im_);
  }

  [[nodiscard]] std::complex<double> value() const {
    return {re_.value(), im_.value()};
  }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// e(x) = exp(2 pi i x), reduced mod 1 first so large arguments stay accurate.
inline std::complex<double> unit_exp(long double x) {
  long double frac = x - std::floor(x);
  if (frac == 0.0L) return {1.0, 0.0};
  if (frac == 0.5L) return {-1.0, 0.0};
  if (frac == 0.25L) return {0.0, 1.0};
  if (frac == 0.75L) return {0.0, -1.0};
  const long double angle = 2.0L * std::numbers::pi_v<long double> * frac;
  return {static_cast<double>(std::cos(angle)),
          static_cast<double>(std::sin(angle))};
}

/// e(num/den) for integers, with the reduction done exactly.
inline std::complex<double> unit_root(long long num, long long den) {
  long long r = num % den;
  if (r < 0) r += den;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == den) return {-1.0, 0.0};
  if (4 * r == den) return {0.0, 1.0};
  if (4 * r == 3 * den) return {0.0, -1.0};
  const long double angle = 2.0L * std::numbers::pi_v<long double> *
                            static_cast<long double>(r) /
                            static_cast<long double>(den);
  return {static_cast<double>(std::cos(angle)),
          static_cast<double>(std::sin(angle))};
}

}  // namespace charsum::detail
