#pragma once

// Special functions backing the closed-form stopping rules.
//
// Everything here is pure and thread-safe. All likelihood-ratio work in this
// project happens in natural-log scale; LogReal is the strong type that keeps
// callers from accidentally exponentiating or multiplying linear-scale
// probabilities that span hundreds of orders of magnitude.

#include <compare>
#include <limits>
#include <stdexcept>

namespace seqvote::numerics {

// Raised when an iterative evaluation scheme fails to converge. Callers must
// never see a silently-wrong value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A nonnegative quantity stored as its natural log (-inf encodes zero).
// Multiplication adds logs; comparisons compare logs. Conversion back to
// linear scale is explicit.
class LogReal {
 public:
  constexpr LogReal() : log_(-std::numeric_limits<double>::infinity()) {}

  static constexpr LogReal from_log(double log_value) { return LogReal(log_value); }
  static LogReal from_linear(double value);

  constexpr double log_value() const { return log_; }
  double to_linear() const;

  friend constexpr LogReal operator*(LogReal a, LogReal b) {
    return LogReal(a.log_ + b.log_);
  }
  friend constexpr LogReal operator/(LogReal a, LogReal b) {
    return LogReal(a.log_ - b.log_);
  }
  friend constexpr auto operator<=>(LogReal a, LogReal b) { return a.log_ <=> b.log_; }
  friend constexpr bool operator==(LogReal a, LogReal b) { return a.log_ == b.log_; }

 private:
  explicit constexpr LogReal(double log_value) : log_(log_value) {}
  double log_;
};

// ln Gamma(x) for x > 0. Stirling series for large x, upward recurrence below;
// exact at the zeros x = 1, 2. Relative accuracy ~1e-14 against max(1, |result|).
double log_gamma(double x);

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b), a, b > 0.
// Arguments up to ~2e6 are within contract (relative error <= 1e-12).
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), the Beta(a,b) CDF at x.
// Continued fraction with the symmetry switch at x > (a+1)/(a+b+2); the
// log-scale prefactor is computed cancellation-free so that arguments of
// order 1e6 keep absolute error <= 1e-10. Throws NumericError if the
// continued fraction fails to converge.
double reg_inc_beta(double x, double a, double b);

// Binomial survival function P(X >= k) for X ~ Binomial(n, p).
// Exact (dyadic arithmetic) for p = 1/2 and n <= 50; log-space summation
// otherwise.
double binom_sf(int k, int n, double p);

namespace detail {
// a*ln(x) + b*ln(1-x) - ln B(a,b), the log of the Beta density kernel over
// its normalizer. Stable for large a, b where the naive form cancels.
double log_beta_kernel(double x, double a, double b);
}  // namespace detail

}  // namespace seqvote::numerics
