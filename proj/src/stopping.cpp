#include "seqvote/stopping.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "seqvote/numerics.hpp"

namespace seqvote {

using numerics::LogReal;

namespace {

void require_unit_interval(double v, const char* name) {
  if (!(v > 0.0) || !(v < 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in (0,1)");
  }
}

void require_ordered_counts(int n_first, int n_second) {
  if (n_first < 0 || n_second < 0) {
    throw std::invalid_argument("counts must be nonnegative");
  }
  if (n_first < n_second) {
    throw std::invalid_argument("n_first must be >= n_second (pass top-two ordered counts)");
  }
}

Decision threshold_decision(double log_lr, const SprtThresholds& thr, int n_first) {
  const LogReal lr = LogReal::from_log(log_lr);
  if (n_first >= 1 && lr >= LogReal::from_log(thr.ln_a)) return Decision::kStopDominant;
  if (lr <= LogReal::from_log(thr.ln_b)) return Decision::kStopNoDominance;
  return Decision::kContinue;
}

std::string format_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

const char* to_string(Decision d) {
  switch (d) {
    case Decision::kStopDominant: return "stop_dominant";
    case Decision::kStopNoDominance: return "stop_no_dominance";
    case Decision::kContinue: return "continue";
  }
  return "unknown";
}

const char* to_string(RuleKind k) {
  switch (k) {
    case RuleKind::kSelfConsistency: return "self_consistency";
    case RuleKind::kPValue: return "pvalue";
    case RuleKind::kAdaCons: return "adacons";
    case RuleKind::kSprt: return "sprt";
    case RuleKind::kMsprt: return "msprt";
  }
  return "unknown";
}

StoppingPolicy StoppingPolicy::self_consistency(int fixed_n) {
  StoppingPolicy p{RuleKind::kSelfConsistency, SelfConsistencyParams{fixed_n}, fixed_n};
  p.validate();
  return p;
}

StoppingPolicy StoppingPolicy::p_value(double alpha_sig, int max_samples) {
  StoppingPolicy p{RuleKind::kPValue, PValueParams{alpha_sig}, max_samples};
  p.validate();
  return p;
}

StoppingPolicy StoppingPolicy::ada_cons(double confidence, int max_samples) {
  StoppingPolicy p{RuleKind::kAdaCons, AdaConsParams{confidence}, max_samples};
  p.validate();
  return p;
}

StoppingPolicy StoppingPolicy::sprt(SprtParams params, int max_samples) {
  StoppingPolicy p{RuleKind::kSprt, params, max_samples};
  p.validate();
  return p;
}

StoppingPolicy StoppingPolicy::msprt(MsprtParams params, int max_samples) {
  StoppingPolicy p{RuleKind::kMsprt, params, max_samples};
  p.validate();
  return p;
}

StoppingPolicy StoppingPolicy::calibrated_sprt(int max_samples) {
  return sprt(SprtParams{}, max_samples);
}

StoppingPolicy StoppingPolicy::calibrated_msprt(int max_samples) {
  return msprt(MsprtParams{}, max_samples);
}

std::string StoppingPolicy::label() const {
  switch (rule) {
    case RuleKind::kSelfConsistency:
      return "self_consistency@" +
             std::to_string(std::get<SelfConsistencyParams>(params).fixed_n);
    case RuleKind::kPValue:
      return "pvalue(alpha=" + format_param(std::get<PValueParams>(params).alpha_sig) + ")";
    case RuleKind::kAdaCons:
      return "adacons(conf=" + format_param(std::get<AdaConsParams>(params).confidence) + ")";
    case RuleKind::kSprt: {
      const auto& p = std::get<SprtParams>(params);
      return "sprt(p1=" + format_param(p.p1) + ",alpha=" + format_param(p.alpha) +
             ",beta=" + format_param(p.beta) + ")";
    }
    case RuleKind::kMsprt: {
      const auto& p = std::get<MsprtParams>(params);
      return "msprt(a0=" + format_param(p.prior_alpha0) +
             ",b0=" + format_param(p.prior_beta0) + ",alpha=" + format_param(p.alpha) +
             ",beta=" + format_param(p.beta) + ")";
    }
  }
  return "unknown";
}

void StoppingPolicy::validate() const {
  if (max_samples < 0) throw std::invalid_argument("max_samples must be nonnegative");
  switch (rule) {
    case RuleKind::kSelfConsistency: {
      const auto& p = std::get<SelfConsistencyParams>(params);
      if (p.fixed_n < 1) throw std::invalid_argument("fixed_n must be >= 1");
      if (p.fixed_n > max_samples) {
        throw std::invalid_argument("fixed_n must not exceed max_samples");
      }
      break;
    }
    case RuleKind::kPValue:
      require_unit_interval(std::get<PValueParams>(params).alpha_sig, "alpha_sig");
      break;
    case RuleKind::kAdaCons:
      require_unit_interval(std::get<AdaConsParams>(params).confidence, "confidence");
      break;
    case RuleKind::kSprt: {
      const auto& p = std::get<SprtParams>(params);
      if (!(p.p1 > 0.5) || !(p.p1 < 1.0)) {
        throw std::invalid_argument("sprt p1 must lie in (0.5, 1)");
      }
      require_unit_interval(p.alpha, "alpha");
      require_unit_interval(p.beta, "beta");
      break;
    }
    case RuleKind::kMsprt: {
      const auto& p = std::get<MsprtParams>(params);
      if (!(p.prior_alpha0 > 0.0) || !(p.prior_beta0 > 0.0)) {
        throw std::domain_error("msprt prior parameters must be positive");
      }
      require_unit_interval(p.alpha, "alpha");
      require_unit_interval(p.beta, "beta");
      break;
    }
  }
}

SprtThresholds sprt_thresholds(double alpha, double beta) {
  require_unit_interval(alpha, "alpha");
  require_unit_interval(beta, "beta");
  return SprtThresholds{std::log((1.0 - beta) / alpha), std::log(beta / (1.0 - alpha))};
}

double sprt_log_lr(int n_first, int n_second, double p1) {
  if (n_first < 0 || n_second < 0) {
    throw std::invalid_argument("counts must be nonnegative");
  }
  if (!(p1 > 0.5) || !(p1 < 1.0)) {
    throw std::domain_error("sprt p1 must lie in (0.5, 1)");
  }
  return n_first * std::log(p1 / 0.5) + n_second * std::log((1.0 - p1) / 0.5);
}

double msprt_log_lr(int n_first, int n_second, double prior_alpha0, double prior_beta0,
                    bool truncated_prior) {
  if (n_first < 0 || n_second < 0) {
    throw std::invalid_argument("counts must be nonnegative");
  }
  if (!(prior_alpha0 > 0.0) || !(prior_beta0 > 0.0)) {
    throw std::domain_error("msprt prior parameters must be positive");
  }
  // ln[B(a0+n1, b0+n2) / B(a0, b0)] + n ln 2, expanded term by term:
  //   sum_i ln(2(a0+i) / (a0+b0+i))        i = 0..n1-1
  // + sum_j ln(2(b0+j) / (a0+b0+n1+j))     j = 0..n2-1
  // Each factor is written as log1p of an exactly-formed small ratio so the
  // sum keeps full precision even when a0, b0 ~ 1e6 dwarf the counts.
  const double a0 = prior_alpha0;
  const double b0 = prior_beta0;
  const double n0 = a0 + b0;
  double log_lr = 0.0;
  for (int i = 0; i < n_first; ++i) {
    log_lr += std::log1p((a0 - b0 + i) / (n0 + i));
  }
  for (int j = 0; j < n_second; ++j) {
    log_lr += std::log1p((b0 - a0 + (j - n_first)) / (n0 + n_first + j));
  }
  // Posterior mass above 1/2 relative to the prior mass above 1/2. The upper
  // tail 1 - I_x(a,b) is evaluated as I_{1-x}(b,a) so that vanishing tails
  // (counts dominated by the second answer) keep full relative precision
  // instead of cancelling against 1.
  const double posterior_tail =
      numerics::reg_inc_beta(0.5, b0 + n_second, a0 + n_first);
  const double prior_tail = numerics::reg_inc_beta(0.5, b0, a0);
  log_lr += std::log(posterior_tail);
  log_lr -= truncated_prior ? std::log(prior_tail) : 0.0;
  return log_lr;
}

Decision sprt_decide(int n_first, int n_second, const StoppingPolicy& policy) {
  require_ordered_counts(n_first, n_second);
  const auto& p = std::get<SprtParams>(policy.params);
  return threshold_decision(sprt_log_lr(n_first, n_second, p.p1),
                            sprt_thresholds(p.alpha, p.beta), n_first);
}

Decision msprt_decide(int n_first, int n_second, const StoppingPolicy& policy) {
  require_ordered_counts(n_first, n_second);
  const auto& p = std::get<MsprtParams>(policy.params);
  return threshold_decision(
      msprt_log_lr(n_first, n_second, p.prior_alpha0, p.prior_beta0, p.truncated_prior),
      sprt_thresholds(p.alpha, p.beta), n_first);
}

Decision pvalue_decide(int n_first, int n_second, const StoppingPolicy& policy) {
  require_ordered_counts(n_first, n_second);
  const auto& p = std::get<PValueParams>(policy.params);
  const double pvalue = numerics::binom_sf(n_first, n_first + n_second, 0.5);
  // No acceptance boundary: this baseline stops only on rejection (or when
  // the caller's budget runs out).
  if (n_first >= 1 && pvalue < p.alpha_sig) return Decision::kStopDominant;
  return Decision::kContinue;
}

Decision adacons_decide(int n_first, int n_second, const StoppingPolicy& policy) {
  require_ordered_counts(n_first, n_second);
  const auto& p = std::get<AdaConsParams>(policy.params);
  // Uniform Beta(1,1) prior: posterior over p' is Beta(n_first+1, n_second+1).
  const double prob_dominant =
      1.0 - numerics::reg_inc_beta(0.5, n_first + 1.0, n_second + 1.0);
  if (n_first >= 1 && prob_dominant >= p.confidence) return Decision::kStopDominant;
  return Decision::kContinue;
}

Decision self_consistency_decide(int n_observed_total, const StoppingPolicy& policy) {
  if (n_observed_total < 0) {
    throw std::invalid_argument("n_observed_total must be nonnegative");
  }
  const auto& p = std::get<SelfConsistencyParams>(policy.params);
  if (n_observed_total >= p.fixed_n) return Decision::kStopDominant;
  return Decision::kContinue;
}

Decision decide(const StoppingPolicy& policy, int n_first, int n_second,
                int n_observed_total) {
  switch (policy.rule) {
    case RuleKind::kSelfConsistency: {
      // "Stop and take the mode" needs a mode to take.
      const Decision d = self_consistency_decide(n_observed_total, policy);
      if (d == Decision::kStopDominant && n_first < 1) return Decision::kContinue;
      return d;
    }
    case RuleKind::kPValue:
      return pvalue_decide(n_first, n_second, policy);
    case RuleKind::kAdaCons:
      return adacons_decide(n_first, n_second, policy);
    case RuleKind::kSprt:
      return sprt_decide(n_first, n_second, policy);
    case RuleKind::kMsprt:
      return msprt_decide(n_first, n_second, policy);
  }
  throw std::logic_error("unhandled rule kind");
}

int hoeffding_sample_size(int k, double eps, double delta) {
  if (k < 1) throw std::domain_error("k must be >= 1");
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::domain_error("eps must lie in (0,1)");
  if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
  const auto holds = [&](int n) { return 2.0 * k * std::exp(-2.0 * n * eps * eps) <= delta; };
  if (holds(0)) return 0;
  int n = static_cast<int>(std::ceil(std::log(2.0 * k / delta) / (2.0 * eps * eps)));
  n = std::max(n, 1);
  // The closed form is exact up to rounding; settle boundary cases directly.
  while (!holds(n)) ++n;
  while (n > 0 && holds(n - 1)) --n;
  return n;
}

DecisionCache::DecisionCache(StoppingPolicy policy) : policy_(std::move(policy)) {
  policy_.validate();
  cacheable_ = policy_.rule != RuleKind::kSelfConsistency;
  if (cacheable_) {
    const size_t side = static_cast<size_t>(policy_.max_samples) + 1;
    table_ = std::vector<std::atomic<uint8_t>>(side * (side + 1) / 2);
  }
}

size_t DecisionCache::slot(int n_first, int n_second) const {
  // Triangular index over n_first >= n_second.
  const size_t i = static_cast<size_t>(n_first);
  return i * (i + 1) / 2 + static_cast<size_t>(n_second);
}

Decision DecisionCache::decide(int n_first, int n_second, int n_observed_total) const {
  if (!cacheable_ || n_first > policy_.max_samples || n_first < n_second) {
    return seqvote::decide(policy_, n_first, n_second, n_observed_total);
  }
  std::atomic<uint8_t>& cell = table_[slot(n_first, n_second)];
  uint8_t stored = cell.load(std::memory_order_relaxed);
  if (stored == 0) {
    const Decision d = seqvote::decide(policy_, n_first, n_second, n_observed_total);
    stored = static_cast<uint8_t>(static_cast<int>(d) + 1);
    cell.store(stored, std::memory_order_relaxed);
  }
  return static_cast<Decision>(stored - 1);
}

}  // namespace seqvote
