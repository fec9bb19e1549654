#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>

namespace respo {

/// Neumaier-compensated accumulator. Series accumulation can run to hundreds
/// of terms for small discount factors, so every sum that feeds an identity
/// check goes through this.
class KahanSum {
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

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double compensated_abs_sum(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(std::abs(x));
  return s.value();
}

inline double infinity_norm(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

inline double infinity_norm_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// base^k for base in [0, 1). Sequential product up to kSequentialPowerLimit,
/// square-and-multiply beyond. Truncation-depth selection iterates the same
/// sequential product, so the depth search and the error bound agree bit for
/// bit on every boundary reachable in the sequential regime.
inline double discount_power(double base, std::uint64_t k) {
  constexpr std::uint64_t kSequentialPowerLimit = std::uint64_t{1} << 22;
  if (k <= kSequentialPowerLimit) {
    double p = 1.0;
    for (std::uint64_t i = 0; i < k; ++i) {
      p *= base;
      if (p == 0.0) break;
    }
    return p;
  }
  double result = 1.0;
  double b = base;
  std::uint64_t e = k;
  while (e > 0) {
    if (e & 1) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

/// 17 significant digits: round-trip exact for binary64 and byte-stable
/// across runs, unlike shortest-representation printers.
inline std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace respo
