// Python bindings over the core operations: special functions, answer
// tallying, the stopping rules, batch planning, and the Monte Carlo
// simulator. AnswerKeys cross the boundary as plain strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "seqvote/bench.hpp"
#include "seqvote/numerics.hpp"
#include "seqvote/scheduler.hpp"
#include "seqvote/simulator.hpp"
#include "seqvote/solvers.hpp"
#include "seqvote/stopping.hpp"
#include "seqvote/tally.hpp"

namespace py = pybind11;
using namespace seqvote;

namespace {

std::vector<std::pair<AnswerKey, double>> to_keyed_probs(
    const std::vector<std::pair<std::string, double>>& probs) {
  std::vector<std::pair<AnswerKey, double>> keyed;
  keyed.reserve(probs.size());
  for (const auto& [answer, p] : probs) keyed.emplace_back(AnswerKey(answer), p);
  return keyed;
}

SyntheticDistribution make_distribution(
    const std::vector<std::pair<std::string, double>>& probs, const std::string& name,
    const std::optional<std::string>& gold) {
  SyntheticDistribution dist;
  dist.probs = to_keyed_probs(probs);
  if (dist.probs.empty()) throw std::domain_error("distribution must not be empty");
  double best = -1.0;
  for (const auto& [key, p] : dist.probs) {
    if (p > best) {
      best = p;
      dist.true_mode = key;
    }
  }
  dist.source_question = name;
  if (gold.has_value()) dist.gold_answer = normalize_answer(*gold);
  return dist;
}

}  // namespace

PYBIND11_MODULE(_seqvote, m) {
  m.doc() = "Early-stopping majority voting for stochastic answer sources";
  m.attr("__version__") = "0.1.0";

  // numerics
  m.def("log_gamma", &numerics::log_gamma, py::arg("x"));
  m.def("log_beta", &numerics::log_beta, py::arg("a"), py::arg("b"));
  m.def("reg_inc_beta", &numerics::reg_inc_beta, py::arg("x"), py::arg("a"),
        py::arg("b"));
  m.def("binom_sf", &numerics::binom_sf, py::arg("k"), py::arg("n"), py::arg("p"),
        "P(X >= k) for X ~ Binomial(n, p)");

  // tally
  m.def(
      "normalize_answer",
      [](const std::string& raw) { return normalize_answer(raw).canonical(); },
      py::arg("raw"));

  py::class_<TopTwo>(m, "TopTwo")
      .def_property_readonly("first",
                             [](const TopTwo& t) -> std::optional<std::string> {
                               if (!t.first_key.has_value()) return std::nullopt;
                               return t.first_key->canonical();
                             })
      .def_readonly("n_first", &TopTwo::n_first)
      .def_property_readonly("second",
                             [](const TopTwo& t) -> std::optional<std::string> {
                               if (!t.second_key.has_value()) return std::nullopt;
                               return t.second_key->canonical();
                             })
      .def_readonly("n_second", &TopTwo::n_second);

  py::class_<DistributionStats>(m, "DistributionStats")
      .def_readonly("p1", &DistributionStats::p1)
      .def_readonly("p2", &DistributionStats::p2)
      .def_readonly("p1_over_p2", &DistributionStats::p1_over_p2)
      .def_readonly("entropy_nats", &DistributionStats::entropy_nats);

  py::class_<VoteTally>(m, "VoteTally")
      .def(py::init<>())
      .def(
          "add",
          [](VoteTally& tally, const std::string& raw, bool normalize) {
            tally.add(normalize ? normalize_answer(raw) : AnswerKey(raw));
          },
          py::arg("answer"), py::arg("normalize") = true)
      .def_property_readonly("total", &VoteTally::total)
      .def_property_readonly("distinct", &VoteTally::distinct)
      .def("top_two", &VoteTally::top_two)
      .def("mode",
           [](const VoteTally& tally) -> std::optional<std::string> {
             const auto mode = tally.mode();
             if (!mode.has_value()) return std::nullopt;
             return mode->canonical();
           })
      .def("distribution_stats", &VoteTally::distribution_stats)
      .def("counts", [](const VoteTally& tally) {
        std::vector<std::pair<std::string, int>> out;
        for (const auto& [key, count] : tally.entries()) {
          out.emplace_back(key.canonical(), count);
        }
        return out;
      });

  // stopping
  py::enum_<Decision>(m, "Decision")
      .value("STOP_DOMINANT", Decision::kStopDominant)
      .value("STOP_NO_DOMINANCE", Decision::kStopNoDominance)
      .value("CONTINUE", Decision::kContinue);

  py::class_<StoppingPolicy>(m, "StoppingPolicy")
      .def_property_readonly("label", &StoppingPolicy::label)
      .def_readonly("max_samples", &StoppingPolicy::max_samples);

  m.def("self_consistency_policy", &StoppingPolicy::self_consistency,
        py::arg("fixed_n") = 40);
  m.def("pvalue_policy", &StoppingPolicy::p_value, py::arg("alpha_sig") = 0.05,
        py::arg("max_samples") = 40);
  m.def("adacons_policy", &StoppingPolicy::ada_cons, py::arg("confidence") = 0.95,
        py::arg("max_samples") = 40);
  m.def(
      "sprt_policy",
      [](double p1, double alpha, double beta, int max_samples) {
        return StoppingPolicy::sprt(SprtParams{p1, alpha, beta}, max_samples);
      },
      py::arg("p1") = 0.5001, py::arg("alpha") = 0.05, py::arg("beta") = 0.949976,
      py::arg("max_samples") = 256);
  m.def(
      "msprt_policy",
      [](double prior_alpha0, double prior_beta0, double alpha, double beta,
         bool truncated_prior, int max_samples) {
        MsprtParams params;
        params.prior_alpha0 = prior_alpha0;
        params.prior_beta0 = prior_beta0;
        params.alpha = alpha;
        params.beta = beta;
        params.truncated_prior = truncated_prior;
        return StoppingPolicy::msprt(params, max_samples);
      },
      py::arg("prior_alpha0") = 1e6, py::arg("prior_beta0") = 1e6,
      py::arg("alpha") = 0.05, py::arg("beta") = 0.94994,
      py::arg("truncated_prior") = true, py::arg("max_samples") = 256);

  py::class_<SprtThresholds>(m, "SprtThresholds")
      .def_readonly("ln_a", &SprtThresholds::ln_a)
      .def_readonly("ln_b", &SprtThresholds::ln_b);
  m.def("sprt_thresholds", &sprt_thresholds, py::arg("alpha"), py::arg("beta"));
  m.def("sprt_log_lr", &sprt_log_lr, py::arg("n_first"), py::arg("n_second"),
        py::arg("p1"));
  m.def("msprt_log_lr", &msprt_log_lr, py::arg("n_first"), py::arg("n_second"),
        py::arg("prior_alpha0"), py::arg("prior_beta0"),
        py::arg("truncated_prior") = true);
  m.def("decide", &decide, py::arg("policy"), py::arg("n_first"), py::arg("n_second"),
        py::arg("n_observed_total"));
  m.def("hoeffding_sample_size", &hoeffding_sample_size, py::arg("k"), py::arg("eps"),
        py::arg("delta"));

  // scheduler
  m.def(
      "determine_trial",
      [](int n_first, int n_second, int max_samples, int n_observed,
         const StoppingPolicy& policy) {
        return determine_trial(n_first, n_second, max_samples, n_observed, policy);
      },
      py::arg("n_first"), py::arg("n_second"), py::arg("max_samples"),
      py::arg("n_observed"), py::arg("policy"),
      "Best-case minimal batch size before the rule can fire");

  // pools and simulation
  py::class_<SamplePool>(m, "SamplePool")
      .def(py::init<std::string, std::vector<std::string>, std::optional<std::string>>(),
           py::arg("question_id"), py::arg("samples"),
           py::arg("gold_answer") = std::nullopt)
      .def_readonly("question_id", &SamplePool::question_id)
      .def_readonly("samples", &SamplePool::samples)
      .def_readonly("gold_answer", &SamplePool::gold_answer);
  m.def("load_sample_pools", &load_sample_pools, py::arg("path"));
  m.def("save_sample_pools", &save_sample_pools, py::arg("pools"), py::arg("path"));

  py::class_<SyntheticDistribution>(m, "SyntheticDistribution")
      .def_property_readonly("probs",
                             [](const SyntheticDistribution& dist) {
                               std::vector<std::pair<std::string, double>> out;
                               for (const auto& [key, p] : dist.probs) {
                                 out.emplace_back(key.canonical(), p);
                               }
                               return out;
                             })
      .def_readonly("source_question", &SyntheticDistribution::source_question)
      .def_property_readonly("true_mode", [](const SyntheticDistribution& dist) {
        return dist.true_mode.canonical();
      });
  m.def("estimate_distribution", &estimate_distribution, py::arg("pool"));
  m.def("make_distribution", &make_distribution, py::arg("probs"),
        py::arg("name") = "adhoc", py::arg("gold") = std::nullopt);

  py::class_<SimulationSummary>(m, "SimulationSummary")
      .def_readonly("avg_runs", &SimulationSummary::avg_runs)
      .def_readonly("consistency", &SimulationSummary::consistency)
      .def_readonly("hit_gold", &SimulationSummary::hit_gold);
  m.def(
      "simulate_question",
      [](const SyntheticDistribution& dist, const StoppingPolicy& policy, int trials,
         uint64_t seed, int threads) {
        SimulationOptions options;
        options.threads = threads;
        return simulate_question(dist, policy, trials, seed, options);
      },
      py::arg("dist"), py::arg("policy"), py::arg("trials"), py::arg("seed") = 0,
      py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  py::enum_<PolicyFamily>(m, "PolicyFamily")
      .value("SELF_CONSISTENCY", PolicyFamily::kSelfConsistency)
      .value("PVALUE", PolicyFamily::kPValue)
      .value("ADACONS", PolicyFamily::kAdaCons)
      .value("SPRT", PolicyFamily::kSprt)
      .value("MSPRT", PolicyFamily::kMsprt);

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("param_value", &SweepPoint::param_value)
      .def_readonly("avg_runs", &SweepPoint::avg_runs)
      .def_readonly("consistency", &SweepPoint::consistency)
      .def_readonly("accuracy", &SweepPoint::accuracy)
      .def_readonly("policy_label", &SweepPoint::policy_label);
  m.def(
      "sweep",
      [](const std::vector<SamplePool>& pools, PolicyFamily family,
         const std::vector<double>& grid, int trials, uint64_t seed, int threads,
         std::optional<int> max_samples) {
        SimulationOptions options;
        options.threads = threads;
        return sweep(pools, family, grid, trials, seed, options, max_samples);
      },
      py::arg("pools"), py::arg("family"), py::arg("grid"), py::arg("trials"),
      py::arg("seed") = 0, py::arg("threads") = 1,
      py::arg("max_samples") = std::nullopt, py::call_guard<py::gil_scoped_release>());
  m.def("builtin_sweep_grid", &builtin_sweep_grid, py::arg("family"));
  m.def("sample_dirichlet_pools", &sample_dirichlet_pools, py::arg("n_pools"),
        py::arg("n_categories"), py::arg("concentration"), py::arg("pool_size"),
        py::arg("seed"));
  m.def("sweep_to_csv", &sweep_to_csv, py::arg("points"),
        py::arg("metadata_comment") = "");

  // benchmark metrics
  m.def("token_reduction", &token_reduction, py::arg("total_tokens_method"),
        py::arg("total_tokens_baseline"));
}
