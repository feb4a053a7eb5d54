#pragma once

#include <cmath>
#include <span>

namespace resdens {

// Kahan-Babuska-Neumaier compensated accumulator. Unlike plain Kahan it
// stays accurate when an addend is larger in magnitude than the running sum.
class NeumaierSum {
 public:
  constexpr NeumaierSum() = default;
  constexpr explicit NeumaierSum(double init) : sum_(init) {}

  NeumaierSum& operator+=(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  constexpr double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  NeumaierSum acc;
  for (double v : values) acc += v;
  return acc.value();
}

}  // namespace resdens
