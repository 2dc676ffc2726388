#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace descspace {

/// Compensated (Neumaier) summation: keeps the running error of a plain sum
/// in a second register, so totals stay accurate to a few ulps regardless of
/// how many terms are added.
class NeumaierAccumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double total() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double neumaier_sum(const std::vector<double>& values) {
  NeumaierAccumulator acc;
  for (double v : values) acc.add(v);
  return acc.total();
}

/// log(Σ exp(v_i)) evaluated stably.  Natural log.
inline double logsumexp(const double* values, std::size_t n) {
  double m = -1e300;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, values[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(values[i] - m);
  return m + std::log(s);
}

inline double logsumexp(const std::vector<double>& values) {
  return logsumexp(values.data(), values.size());
}

inline constexpr double kLn2 = 0.69314718055994530941723212145818;
inline constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

/// Binary entropy of a probability, in bits.  h(0) = h(1) = 0.
inline double binary_entropy_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

}  // namespace descspace
