#pragma once

// Independent numerical oracles used only by tests. Nothing here calls into
// seqvote's production numerics: integrals are evaluated by adaptive
// Gauss-Kronrod or tanh-sinh quadrature in long double, and binomial tails by
// exact dyadic enumeration.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1].
struct Gk15 {
  static constexpr long double xgk[8] = {
      0.991455371120813L, 0.949107912342759L, 0.864864423359769L,
      0.741531185599394L, 0.586087235467691L, 0.405845151377397L,
      0.207784955007898L, 0.0L};
  static constexpr long double wgk[8] = {
      0.022935322010529L, 0.063092092629979L, 0.104790010322250L,
      0.140653259715525L, 0.169004726639267L, 0.190350578064785L,
      0.204432940075298L, 0.209482141084728L};
  static constexpr long double wg[4] = {0.129484966168870L, 0.279705391489277L,
                                        0.381830050505119L, 0.417959183673469L};
};

struct GkEstimate {
  long double value = 0.0L;
  long double error = 0.0L;
};

inline GkEstimate gk15(const std::function<long double(long double)>& f, long double a,
                       long double b) {
  const long double center = 0.5L * (a + b);
  const long double half = 0.5L * (b - a);
  const long double f_center = f(center);
  long double kronrod = Gk15::wgk[7] * f_center;
  long double gauss = Gk15::wg[3] * f_center;
  for (int i = 0; i < 7; ++i) {
    const long double dx = half * Gk15::xgk[i];
    const long double fsum = f(center - dx) + f(center + dx);
    kronrod += Gk15::wgk[i] * fsum;
    if (i % 2 == 1) gauss += Gk15::wg[i / 2] * fsum;
  }
  GkEstimate est;
  est.value = kronrod * half;
  est.error = std::fabs((kronrod - gauss) * half);
  return est;
}

// Adaptive bisection until the local error estimate is below
// tol * max(|whole|, floor).
inline long double integrate_adaptive(const std::function<long double(long double)>& f,
                                      std::vector<long double> breakpoints,
                                      long double rel_tol = 5e-15L) {
  std::sort(breakpoints.begin(), breakpoints.end());
  struct Segment {
    long double a, b;
    int depth;
  };
  std::vector<Segment> stack;
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] > breakpoints[i]) {
      stack.push_back({breakpoints[i], breakpoints[i + 1], 0});
    }
  }
  long double total = 0.0L;
  long double scale = 0.0L;
  for (const auto& seg : stack) scale += std::fabs(gk15(f, seg.a, seg.b).value);
  scale = std::max(scale, 1e-300L);
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    const GkEstimate est = gk15(f, seg.a, seg.b);
    if (est.error <= rel_tol * scale || seg.depth >= 60) {
      total += est.value;
      continue;
    }
    const long double mid = 0.5L * (seg.a + seg.b);
    stack.push_back({seg.a, mid, seg.depth + 1});
    stack.push_back({mid, seg.b, seg.depth + 1});
  }
  return total;
}

// log of Integral_{lo}^{hi} exp(log_f(p)) dp, scaled internally by the
// maximum of log_f over the breakpoints so huge exponents never overflow.
inline long double log_integral(const std::function<long double(long double)>& log_f,
                                std::vector<long double> breakpoints) {
  long double peak = -1e4900L;
  std::sort(breakpoints.begin(), breakpoints.end());
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    // probe endpoints and a few interior points of each panel
    for (int k = 0; k <= 4; ++k) {
      const long double p =
          breakpoints[i] + (breakpoints[i + 1] - breakpoints[i]) * k / 4.0L;
      peak = std::max(peak, log_f(p));
    }
  }
  const long double value = integrate_adaptive(
      [&](long double p) {
        const long double lf = log_f(p);
        return std::isfinite((double)lf) ? std::exp(lf - peak) : 0.0L;
      },
      breakpoints);
  return peak + std::log(value);
}

// Mixture-SPRT log likelihood ratio straight from its defining integral:
//
//   Lambda = Int_{1/2}^{1} p^n1 (1-p)^n2 pi(p) dp / (1/2)^(n1+n2)
//
// with pi the Beta(a0, b0) density truncated (and renormalized) on (1/2, 1].
// Evaluated as a ratio of two integrals sharing the same prior weight, so no
// Beta-function normalizer and no large-term cancellation is involved.
inline double msprt_log_lr_quadrature(int n1, int n2, double a0, double b0) {
  const long double la0 = a0, lb0 = b0;
  // Peak of the prior weight over [1/2, 1], used as the common log offset.
  long double pm = 0.5L;
  if (la0 + lb0 > 2.0L) {
    pm = std::clamp((la0 - 1.0L) / (la0 + lb0 - 2.0L), 0.5L, 1.0L - 1e-18L);
  }
  const auto log_weight = [&](long double p) -> long double {
    if (p <= 0.0L || p >= 1.0L) {
      // zero weight at the endpoints whenever the exponent is positive
      if ((p >= 1.0L && lb0 > 1.0L) || (p <= 0.0L && la0 > 1.0L)) return -1e4900L;
    }
    return (la0 - 1.0L) * std::log(p / pm) +
           (lb0 - 1.0L) * std::log((1.0L - p) / (1.0L - pm));
  };
  const auto log_num = [&](long double p) -> long double {
    long double s = 0.0L;
    if (n1 > 0) {
      if (p <= 0.0L) return -1e4900L;
      s += n1 * std::log(2.0L * p);
    }
    if (n2 > 0) {
      if (p >= 1.0L) return -1e4900L;
      s += n2 * std::log(2.0L * (1.0L - p));
    }
    return s + log_weight(p);
  };

  // Breakpoints hugging the posterior and prior concentration regions.
  std::vector<long double> breaks = {0.5L, 1.0L};
  const auto add_window = [&](long double mean, long double n_eff) {
    const long double sd = std::sqrt(std::max(mean * (1.0L - mean), 1e-12L) / (n_eff + 1.0L));
    for (long double k : {1.0L, 4.0L, 16.0L, 64.0L}) {
      for (long double s : {-k, k}) {
        const long double p = mean + s * sd;
        if (p > 0.5L && p < 1.0L) breaks.push_back(p);
      }
    }
  };
  add_window((la0 + n1) / (la0 + lb0 + n1 + n2), la0 + lb0 + n1 + n2);
  add_window(la0 / (la0 + lb0), la0 + lb0);

  const long double log_numerator = log_integral(log_num, breaks);
  const long double log_denominator = log_integral(log_weight, breaks);
  return static_cast<double>(log_numerator - log_denominator);
}

// Prior mass on (1/2, 1] divided by the full-support mass, quadrature only.
inline double log_prior_tail_mass_quadrature(double a0, double b0) {
  const long double la0 = a0, lb0 = b0;
  long double pm_full = 0.5L;
  if (la0 + lb0 > 2.0L) {
    pm_full = std::clamp((la0 - 1.0L) / (la0 + lb0 - 2.0L), 1e-18L, 1.0L - 1e-18L);
  }
  const auto log_weight = [&](long double p) -> long double {
    if ((p <= 0.0L && la0 > 1.0L) || (p >= 1.0L && lb0 > 1.0L)) return -1e4900L;
    return (la0 - 1.0L) * std::log(p / pm_full) +
           (lb0 - 1.0L) * std::log((1.0L - p) / (1.0L - pm_full));
  };
  std::vector<long double> upper = {0.5L, 1.0L};
  std::vector<long double> full = {1e-18L, 0.5L, 1.0L - 1e-18L};
  const long double sd = std::sqrt(pm_full * (1.0L - pm_full) / (la0 + lb0 + 1.0L));
  for (long double k : {1.0L, 4.0L, 16.0L, 64.0L}) {
    for (long double s : {-k, k}) {
      const long double p = pm_full + s * sd;
      if (p > 0.5L && p < 1.0L) upper.push_back(p);
      if (p > 0.0L && p < 1.0L) full.push_back(p);
    }
  }
  return static_cast<double>(log_integral(log_weight, upper) -
                             log_integral(log_weight, full));
}

// Tanh-sinh quadrature of f over (0, 1); f may have integrable endpoint
// singularities. Node k at step h sits at t = 1/2 + 1/2 tanh(pi/2 sinh(kh)).
inline long double tanh_sinh_01(const std::function<long double(long double)>& f) {
  const auto g = [&](long double u) -> long double {
    const long double s = 0.5L * M_PIl * sinhl(u);
    const long double t = 0.5L + 0.5L * tanhl(s);
    if (t <= 0.0L || t >= 1.0L) return 0.0L;
    const long double c = coshl(s);
    const long double w = 0.25L * M_PIl * coshl(u) / (c * c);
    return f(t) * w;
  };
  const long double umax = 7.0L;
  long double h = 1.0L;
  long double sum = g(0.0L);
  for (int k = 1; h * k <= umax; ++k) sum += g(h * k) + g(-h * k);
  long double integral = h * sum;
  for (int level = 1; level <= 14; ++level) {
    h *= 0.5L;
    long double odd = 0.0L;
    for (int k = 1; h * k <= umax; k += 2) odd += g(h * k) + g(-h * k);
    const long double refined = 0.5L * integral + h * odd;
    const bool converged = fabsl(refined - integral) <= 1e-18L * fabsl(refined);
    integral = refined;
    if (converged && level >= 5) break;
  }
  return integral;
}

// ln B(a, b) by tanh-sinh quadrature of the defining integral. Handles the
// integrable endpoint singularities for a, b < 1; intended for a, b <= ~50.
inline double log_beta_tanh_sinh(double a, double b) {
  const long double la = a, lb = b;
  const long double integral = tanh_sinh_01([&](long double t) {
    return expl((la - 1.0L) * logl(t) + (lb - 1.0L) * log1pl(-t));
  });
  return static_cast<double>(logl(integral));
}

// I_x(a, b) by tanh-sinh quadrature on both numerator and denominator. The
// numerator integral is mapped onto (0, 1) via t = x u so the a-singularity
// stays at an endpoint the transform damps. Handles a, b < 1.
inline double reg_inc_beta_tanh_sinh(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const long double la = a, lb = b, lx = x;
  const long double numerator =
      expl(la * logl(lx)) * tanh_sinh_01([&](long double u) {
        return expl((la - 1.0L) * logl(u) + (lb - 1.0L) * log1pl(-lx * u));
      });
  const long double denominator = tanh_sinh_01([&](long double t) {
    return expl((la - 1.0L) * logl(t) + (lb - 1.0L) * log1pl(-t));
  });
  return static_cast<double>(numerator / denominator);
}

// Regularized incomplete beta I_x(a, b) as a ratio of two log-scaled
// adaptive-quadrature integrals sharing one peak offset. Valid for any
// positive a, b including ~1e6.
inline double reg_inc_beta_quadrature(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const long double la = a, lb = b, lx = x;
  long double pm = 0.5L;
  if (la + lb > 2.0L) {
    pm = std::clamp((la - 1.0L) / (la + lb - 2.0L), 1e-18L, 1.0L - 1e-18L);
  }
  const auto log_f = [&](long double p) -> long double {
    if ((p <= 0.0L && la > 1.0L) || (p >= 1.0L && lb > 1.0L)) return -1e4900L;
    return (la - 1.0L) * std::log(p / pm) +
           (lb - 1.0L) * std::log((1.0L - p) / (1.0L - pm));
  };
  const long double lo = 1e-18L;
  const long double hi = 1.0L - 1e-18L;
  std::vector<long double> lower = {lo, std::min(lx, hi)};
  std::vector<long double> full = {lo, hi};
  const long double sd = std::sqrt(pm * (1.0L - pm) / (la + lb + 1.0L));
  for (long double k : {1.0L, 4.0L, 16.0L, 64.0L}) {
    for (long double s : {-k, k}) {
      const long double p = pm + s * sd;
      if (p > lo && p < lx) lower.push_back(p);
      if (p > lo && p < hi) full.push_back(p);
    }
  }
  full.push_back(std::min(lx, hi));
  const long double diff = log_integral(log_f, lower) - log_integral(log_f, full);
  return static_cast<double>(std::exp(diff));
}

// Fixed-step composite Gauss-Legendre fallback for I_x(a, b); the classic
// cross-check for moderate shape parameters (a, b up to ~1e3).
inline double reg_inc_beta_gauss_legendre(double x, double a, double b,
                                          int panels = 2048) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // 10-point Gauss-Legendre nodes/weights on [-1, 1], positive half.
  static constexpr long double nodes[5] = {0.148874338981631L, 0.433395394129247L,
                                           0.679409568299024L, 0.865063366688985L,
                                           0.973906528517172L};
  static constexpr long double weights[5] = {0.295524224714753L, 0.269266719309996L,
                                             0.219086362515982L, 0.149451349150581L,
                                             0.066671344308688L};
  const long double la = a, lb = b;
  const auto log_f = [&](long double p) -> long double {
    return (la - 1.0L) * std::log(p) + (lb - 1.0L) * std::log1p(-p);
  };
  // One pass over [0, x] and one over [0, 1], both scaled by the same peak.
  long double pm = std::clamp((la - 1.0L) / std::max(la + lb - 2.0L, 1e-18L), 1e-9L,
                              1.0L - 1e-9L);
  const long double peak = log_f(pm);
  const auto integrate = [&](long double hi) -> long double {
    long double total = 0.0L;
    const long double step = hi / panels;
    for (int panel = 0; panel < panels; ++panel) {
      const long double center = step * (panel + 0.5L);
      const long double half = 0.5L * step;
      for (int i = 0; i < 5; ++i) {
        for (long double sgn : {-1.0L, 1.0L}) {
          const long double p = center + sgn * half * nodes[i];
          if (p <= 0.0L || p >= 1.0L) continue;
          total += weights[i] * half * std::exp(log_f(p) - peak);
        }
      }
    }
    return total;
  };
  return static_cast<double>(integrate(x) / integrate(1.0L));
}

// Exact binomial tail P(X >= k), X ~ Binomial(n, 1/2), by Pascal's triangle in
// exact double-precision integers (n <= 50).
inline double binom_sf_half_bruteforce(int k, int n) {
  if (n > 50) throw std::invalid_argument("bruteforce oracle limited to n <= 50");
  std::vector<double> row(static_cast<size_t>(n) + 1, 0.0);
  row[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j >= 1; --j) row[static_cast<size_t>(j)] += row[static_cast<size_t>(j - 1)];
  }
  double tail = 0.0;
  for (int i = n; i >= k; --i) tail += row[static_cast<size_t>(i)];
  return std::ldexp(tail, -n);
}

}  // namespace oracles
