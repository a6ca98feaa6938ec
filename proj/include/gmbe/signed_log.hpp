#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace gmbe {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// A real number stored as sign in {-1, 0, +1} and log|x|.
struct SignedLog {
  int sign = 0;
  double log_abs = kNegInf;

  static SignedLog from_linear(double x) {
    if (x == 0.0) return {};
    return {x > 0 ? 1 : -1, std::log(std::abs(x))};
  }
  double to_linear() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

// log(exp(a) + exp(b)) without overflow; handles -inf on either side.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

template <typename Derived>
double logsumexp(const Eigen::ArrayBase<Derived>& x) {
  if (x.size() == 0) return kNegInf;
  const double m = x.maxCoeff();
  if (m == kNegInf || m == kPosInf) return m;
  return m + std::log((x - m).exp().sum());
}

// Sum of signed-log terms. Positive and negative parts are accumulated
// separately and combined once, which keeps cancellation error in one place.
inline SignedLog signed_add(SignedLog a, SignedLog b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.sign == b.sign) return {a.sign, log_add(a.log_abs, b.log_abs)};
  if (a.log_abs < b.log_abs) std::swap(a, b);
  if (a.log_abs == b.log_abs) return {};
  return {a.sign, a.log_abs + std::log1p(-std::exp(b.log_abs - a.log_abs))};
}

}  // namespace gmbe
