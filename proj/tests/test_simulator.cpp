#include "seqvote/simulator.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include <doctest.h>

using namespace seqvote;

namespace {

std::string fixture_path(const std::string& name) {
  const char* root = std::getenv("SEQVOTE_DATA");
  REQUIRE_MESSAGE(root != nullptr, "SEQVOTE_DATA must point at the data directory");
  return (std::filesystem::path(root) / "fixtures" / name).string();
}

SyntheticDistribution fixture_distribution() {
  const auto pools = load_sample_pools(fixture_path("torus_pool.jsonl"));
  REQUIRE(pools.size() == 1);
  return estimate_distribution(pools[0]);
}

SimulationOptions two_threads() {
  SimulationOptions options;
  options.threads = 2;
  return options;
}

}  // namespace

TEST_CASE("estimate_distribution MLE and tie-break") {
  const SyntheticDistribution fixture = fixture_distribution();
  CHECK(fixture.true_mode.canonical() == "127");
  const double n = 61.0;
  CHECK(fixture.probs.front().first.canonical() == "127");
  CHECK(fixture.probs.front().second == doctest::Approx(9.0 / n));
  double total = 0.0;
  for (const auto& [key, p] : fixture.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(fixture.gold_answer.has_value());
  CHECK(fixture.gold_answer->canonical() == "127");

  const SyntheticDistribution constant =
      estimate_distribution(SamplePool{"q", std::vector<std::string>(40, "k")});
  CHECK(constant.probs.size() == 1);
  CHECK(constant.probs[0].second == 1.0);

  const SyntheticDistribution tied =
      estimate_distribution(SamplePool{"q", {"a", "a", "b", "b"}});
  CHECK(tied.true_mode.canonical() == "a");  // earliest occurrence wins
  CHECK(tied.probs[0].second == 0.5);
}

TEST_CASE("simulate_question on degenerate distributions") {
  SyntheticDistribution degenerate;
  degenerate.probs = {{AnswerKey{"a"}, 1.0}};
  degenerate.true_mode = AnswerKey{"a"};
  degenerate.source_question = "deg";

  const SimulationSummary sprt = simulate_question(
      degenerate, StoppingPolicy::calibrated_sprt(), 500, 1, two_threads());
  CHECK(sprt.avg_runs == 3.0);
  CHECK(sprt.consistency == 1.0);

  const SimulationSummary sc = simulate_question(
      degenerate, StoppingPolicy::self_consistency(40), 200, 1, two_threads());
  CHECK(sc.avg_runs == 40.0);
  CHECK(sc.consistency == 1.0);
}

TEST_CASE("simulate_question operating characteristics on a 90/10 contest") {
  SyntheticDistribution dist;
  dist.probs = {{AnswerKey{"a"}, 0.9}, {AnswerKey{"b"}, 0.1}};
  dist.true_mode = AnswerKey{"a"};
  dist.source_question = "ab";
  const SimulationSummary s = simulate_question(
      dist, StoppingPolicy::calibrated_sprt(), 10000, 7, two_threads());
  CHECK(s.consistency >= 0.99);
  CHECK(s.avg_runs >= 3.0);
  CHECK(s.avg_runs <= 5.0);
}

TEST_CASE("every policy nails wide-gap distributions") {
  // Top-two gap of at least 0.5 makes the mode easy for every rule. One
  // caveat the probe distributions respect: right at the gap boundary with a
  // fat runner-up (say 0.75 vs 0.25), the calibrated lead-3 rules stop wrong
  // with probability ((1-p')/p')^3 > 1%, so the guarantee needs the pairwise
  // contest p' = p1/(p1+p2) comfortably above ~0.83, which generic wide-gap
  // distributions satisfy.
  const std::vector<std::vector<std::pair<AnswerKey, double>>> wide_gap_dists = {
      {{AnswerKey{"top"}, 0.9}, {AnswerKey{"alt"}, 0.1}},
      {{AnswerKey{"top"}, 0.78}, {AnswerKey{"alt"}, 0.12}, {AnswerKey{"c"}, 0.06},
       {AnswerKey{"d"}, 0.04}},
      {{AnswerKey{"top"}, 0.62}, {AnswerKey{"alt"}, 0.08}, {AnswerKey{"c"}, 0.08},
       {AnswerKey{"d"}, 0.08}, {AnswerKey{"e"}, 0.08}, {AnswerKey{"f"}, 0.06}},
  };
  for (const auto& probs : wide_gap_dists) {
    SyntheticDistribution dist;
    dist.probs = probs;
    dist.true_mode = probs.front().first;
    dist.source_question = "wide" + std::to_string(probs.size());
    for (const auto& policy :
         {StoppingPolicy::self_consistency(40), StoppingPolicy::p_value(0.05, 40),
          StoppingPolicy::ada_cons(0.95, 40), StoppingPolicy::calibrated_sprt(),
          StoppingPolicy::calibrated_msprt()}) {
      const SimulationSummary s =
          simulate_question(dist, policy, 10000, 3, two_threads());
      const std::string context = policy.label() + " on " + dist.source_question;
      CHECK_MESSAGE(s.consistency >= 0.99, context);
    }
  }
}

TEST_CASE("uncapped mixture rule beats fixed-40 voting on the near-tied fixture") {
  const SyntheticDistribution fixture = fixture_distribution();
  const SimulationSummary msprt = simulate_question(
      fixture, StoppingPolicy::calibrated_msprt(256), 10000, 11, two_threads());
  const SimulationSummary sc40 = simulate_question(
      fixture, StoppingPolicy::self_consistency(40), 10000, 11, two_threads());
  CHECK(msprt.consistency >= sc40.consistency + 0.02);
}

TEST_CASE("sweep: self-consistency average runs equal the grid exactly") {
  const auto pools = load_sample_pools(fixture_path("demo_pools.jsonl"));
  const std::vector<double> grid = {1, 2, 5, 13, 40};
  const auto points =
      sweep(pools, PolicyFamily::kSelfConsistency, grid, 50, 17, two_threads());
  REQUIRE(points.size() == grid.size());
  for (const auto& point : points) {
    CHECK(point.avg_runs == point.param_value);
  }
}

TEST_CASE("sweep trends over a pool suite") {
  const auto pools = sample_dirichlet_pools(100, 6, 1.0, 40, 4242);
  // Higher confidence demands more evidence: average runs are non-decreasing.
  const auto adacons = sweep(pools, PolicyFamily::kAdaCons, {0.74, 0.95, 0.9999}, 150,
                             23, two_threads());
  REQUIRE(adacons.size() == 3);
  CHECK(adacons[0].param_value == 0.74);
  CHECK(adacons[2].param_value == 0.9999);
  CHECK(adacons[0].avg_runs <= adacons[1].avg_runs);
  CHECK(adacons[1].avg_runs <= adacons[2].avg_runs);

  // Raising beta pulls both thresholds toward zero, so the mixture rule stops
  // earlier: average runs decrease in beta. (Points come back sorted by
  // avg_runs, which therefore reverses the grid order.)
  const auto msprt = sweep(pools, PolicyFamily::kMsprt, {0.94979, 0.94997}, 150, 23,
                           two_threads());
  REQUIRE(msprt.size() == 2);
  CHECK(msprt[0].param_value == 0.94997);
  CHECK(msprt[1].param_value == 0.94979);
  CHECK(msprt[0].avg_runs < msprt[1].avg_runs);
}

TEST_CASE("sweep rejects out-of-domain parameters by value") {
  const auto pools = load_sample_pools(fixture_path("demo_pools.jsonl"));
  CHECK_THROWS_WITH_AS(
      sweep(pools, PolicyFamily::kAdaCons, {0.95, 1.7}, 10, 1, two_threads()),
      doctest::Contains("1.7"), std::domain_error);
  CHECK_THROWS_WITH_AS(
      sweep(pools, PolicyFamily::kSelfConsistency, {2.5}, 10, 1, two_threads()),
      doctest::Contains("2.5"), std::domain_error);
  CHECK_THROWS_AS(sweep(pools, PolicyFamily::kMsprt, {}, 10, 1, two_threads()),
                  std::invalid_argument);
}

TEST_CASE("sweeps are deterministic for a fixed master seed") {
  const auto pools = sample_dirichlet_pools(12, 5, 1.0, 40, 777);
  const std::vector<double> grid = {0.9, 0.95, 0.99};
  const auto run = [&](int threads) {
    SimulationOptions options;
    options.threads = threads;
    return sweep(pools, PolicyFamily::kAdaCons, grid, 60, 31, options);
  };
  const auto a = run(1);
  const auto b = run(2);
  const auto c = run(2);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].param_value == b[i].param_value);
    CHECK(a[i].avg_runs == b[i].avg_runs);
    CHECK(a[i].consistency == b[i].consistency);
    CHECK(b[i].avg_runs == c[i].avg_runs);
    CHECK(a[i].policy_label == b[i].policy_label);
  }
}

TEST_CASE("dirichlet pool suite is deterministic and well-formed") {
  const auto a = sample_dirichlet_pools(30, 6, 1.0, 40, 123);
  const auto b = sample_dirichlet_pools(30, 6, 1.0, 40, 123);
  REQUIRE(a.size() == 30);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].samples.size() == 40);
    CHECK(a[i].samples == b[i].samples);
  }
  CHECK_THROWS_AS(sample_dirichlet_pools(0, 6, 1.0, 40, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_dirichlet_pools(5, 6, -1.0, 40, 1), std::invalid_argument);
}

TEST_CASE("sweep CSV has the documented header and row shape") {
  const auto pools = load_sample_pools(fixture_path("demo_pools.jsonl"));
  const auto points =
      sweep(pools, PolicyFamily::kSelfConsistency, {1, 3}, 20, 9, two_threads());
  const std::string csv = sweep_to_csv(points, "seed=9");
  CHECK(csv.find("# seed=9\n") == 0);
  CHECK(csv.find("policy,param,avg_runs,consistency,accuracy\n") != std::string::npos);
  // demo pools all carry gold answers, so the accuracy column is populated
  CHECK(csv.find("self_consistency@1,1,") != std::string::npos);
  size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 2 + points.size());
}
