#pragma once

#include <charconv>
#include <cmath>
#include <span>
#include <string>

namespace netvis {

// Neumaier compensated summation. Used wherever a normalizer is folded over
// all nodes, so that differences of visibilities keep their significant digits.
template <typename Real = double>
class CompensatedSum {
 public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Real x) {
    add(x);
    return *this;
  }

  Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

inline double compensated_total(std::span<const double> xs) {
  CompensatedSum<double> s;
  for (double x : xs) s.add(x);
  return s.value();
}

// Shortest decimal that round-trips.
inline std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// Fixed 17 significant digits (round-trips every double, format is stable).
inline std::string digits17(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace netvis
