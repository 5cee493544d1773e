#pragma once

// The five stopping rules. Each is a pure function of the top-two counts
// (and, for fixed-size self-consistency, the total number of observations):
//
//   SelfConsistency  stop after a fixed number of samples
//   PValue           sequential binomial test, reject when p < alpha
//   AdaCons          Beta-posterior confidence that the leader dominates
//   Sprt             Wald sequential probability ratio test, H1: p' = p1
//   Msprt            mixture SPRT, Beta prior over p' truncated to (1/2, 1]
//
// The top-two contest is a Bernoulli experiment with success probability
// p' = p_first / (p_first + p_second); all rules test H0: p' = 1/2 against
// one-sided dominance.

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace seqvote {

enum class Decision {
  kStopDominant,     // reject H0: the leading answer is significantly dominant
  kStopNoDominance,  // accept H0: no dominant answer, stop sampling anyway
  kContinue,
};

const char* to_string(Decision d);

enum class RuleKind { kSelfConsistency, kPValue, kAdaCons, kSprt, kMsprt };

const char* to_string(RuleKind k);

struct SelfConsistencyParams {
  int fixed_n = 40;
};

struct PValueParams {
  double alpha_sig = 0.05;
};

struct AdaConsParams {
  double confidence = 0.95;
};

struct SprtParams {
  // p0 is fixed at 1/2; p1 barely above it keeps the test sensitive to
  // arbitrarily small dominance gaps.
  double p1 = 0.5001;
  double alpha = 0.05;
  double beta = 0.949976;
};

struct MsprtParams {
  double prior_alpha0 = 1e6;
  double prior_beta0 = 1e6;
  double alpha = 0.05;
  double beta = 0.94994;
  // When false, the prior density is not renormalized after truncation to
  // (1/2, 1]; for a symmetric prior this shifts the log-LR by -ln 2.
  bool truncated_prior = true;
};

struct StoppingPolicy {
  RuleKind rule = RuleKind::kSelfConsistency;
  std::variant<SelfConsistencyParams, PValueParams, AdaConsParams, SprtParams, MsprtParams>
      params = SelfConsistencyParams{};
  int max_samples = 40;

  static StoppingPolicy self_consistency(int fixed_n = 40);
  static StoppingPolicy p_value(double alpha_sig = 0.05, int max_samples = 40);
  static StoppingPolicy ada_cons(double confidence = 0.95, int max_samples = 40);
  static StoppingPolicy sprt(SprtParams p, int max_samples = 256);
  static StoppingPolicy msprt(MsprtParams p, int max_samples = 256);

  // The parameterizations used throughout the experiments: SPRT with
  // p1 = 0.5001, alpha = 0.05, beta = 0.949976; mSPRT with the
  // Beta(1e6, 1e6) prior, alpha = 0.05, beta = 0.94994. Both cap at 256.
  static StoppingPolicy calibrated_sprt(int max_samples = 256);
  static StoppingPolicy calibrated_msprt(int max_samples = 256);

  // Deterministic label used in result records and report rows.
  std::string label() const;

  // Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

struct SprtThresholds {
  double ln_a = 0.0;
  double ln_b = 0.0;
};

// A = (1 - beta) / alpha, B = beta / (1 - alpha), returned in log scale.
SprtThresholds sprt_thresholds(double alpha, double beta);

// ln Lambda = n_first ln(p1/0.5) + n_second ln((1-p1)/0.5).
double sprt_log_lr(int n_first, int n_second, double p1);

// Log of the mixture likelihood ratio
//
//   Lambda = Integral_{1/2}^{1} p^n_first (1-p)^n_second pi(p) dp / (1/2)^n
//
// with pi the Beta(prior_alpha0, prior_beta0) density truncated to (1/2, 1].
// Closed form: the Beta-function ratio is expanded as a product of n_first +
// n_second rising-factorial terms (exact for integer counts and stable where
// the direct log-beta difference cancels), and the truncation tails come from
// reg_inc_beta.
double msprt_log_lr(int n_first, int n_second, double prior_alpha0, double prior_beta0,
                    bool truncated_prior = true);

Decision sprt_decide(int n_first, int n_second, const StoppingPolicy& policy);
Decision msprt_decide(int n_first, int n_second, const StoppingPolicy& policy);
Decision pvalue_decide(int n_first, int n_second, const StoppingPolicy& policy);
Decision adacons_decide(int n_first, int n_second, const StoppingPolicy& policy);
Decision self_consistency_decide(int n_observed_total, const StoppingPolicy& policy);

// Dispatch on the policy's rule. n_first >= n_second is required (pass
// top-two ordered counts); n_observed_total counts every issued query,
// including ones that errored out of the tally.
Decision decide(const StoppingPolicy& policy, int n_first, int n_second,
                int n_observed_total);

// Smallest n with 2k exp(-2 n eps^2) <= delta: the union-bound sample size
// for estimating k category frequencies within eps at confidence 1 - delta.
int hoeffding_sample_size(int k, double eps, double delta);

// Memoized decisions for one policy over the (n_first, n_second) lattice.
// The mixture rule costs an incomplete-beta evaluation per pair, and the
// batch-size scan probes many hypothetical pairs per turn, so simulation
// throughput depends on this cache. Lock-free: slots are filled idempotently.
class DecisionCache {
 public:
  explicit DecisionCache(StoppingPolicy policy);

  const StoppingPolicy& policy() const { return policy_; }
  Decision decide(int n_first, int n_second, int n_observed_total) const;

 private:
  StoppingPolicy policy_;
  bool cacheable_ = false;  // rules that depend only on (n_first, n_second)
  mutable std::vector<std::atomic<uint8_t>> table_;
  size_t slot(int n_first, int n_second) const;
};

}  // namespace seqvote
