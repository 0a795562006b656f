#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace metrogap::detail {

/// Neumaier compensated summation.
class Accumulator {
 public:
  Accumulator& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  Accumulator acc;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc.value());
}

}  // namespace metrogap::detail
