#pragma once

#include <cmath>
#include <span>

namespace halfwave {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// |a|^p with exact multiplication chains for the small integer exponents used everywhere.
inline double power_of_magnitude(double a, double p) {
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  if (p == 4.0) {
    const double a2 = a * a;
    return a2 * a2;
  }
  if (p == 6.0) {
    const double a2 = a * a;
    return a2 * a2 * a2;
  }
  if (p == 8.0) {
    const double a2 = a * a;
    const double a4 = a2 * a2;
    return a4 * a4;
  }
  if (p == 1.0) return a;
  return std::pow(a, p);
}

inline bool is_even_integer(double p) {
  return std::isfinite(p) && p >= 2.0 && p == std::floor(p) && static_cast<long>(p) % 2 == 0;
}

}  // namespace halfwave
