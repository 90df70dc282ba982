#include <doctest.h>

#include <cmath>
#include <vector>

#include "draftlab/advantage.hpp"
#include "draftlab/errors.hpp"
#include "draftlab/rng.hpp"
#include "draftlab/verify.hpp"

using namespace draftlab;
using namespace draftlab::advantage;

namespace {

// Hand oracle for group normalization, kept independent of the library path.
std::vector<double> normalize_oracle(const std::vector<double>& r) {
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= static_cast<double>(r.size());
  const double std_dev = std::sqrt(var);
  std::vector<double> out(r.size(), 0.0);
  if (std_dev == 0.0) return out;
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = (r[i] - mean) / std_dev;
  return out;
}

RewardGroup make_group(std::vector<double> sol, std::vector<double> draft) {
  const std::size_t g = sol.size();
  return RewardGroup(std::move(sol), std::move(draft), std::vector<int>(g, 2),
                     std::vector<int>(g, 3));
}

}  // namespace

TEST_CASE("group_normalize worked examples") {
  const auto symmetric = group_normalize({1, 0, 0, 1});
  CHECK(symmetric[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(symmetric[1] == doctest::Approx(-1.0).epsilon(1e-12));

  const auto flat = group_normalize({1, 1, 1});
  for (double v : flat) CHECK(v == 0.0);

  // mean 2/3, population std sqrt(2)/3
  const auto mixed = group_normalize({1, 1, 0});
  CHECK(mixed[0] == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(mixed[1] == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(mixed[2] == doctest::Approx(-1.4142).epsilon(1e-4));
}

TEST_CASE("group_normalize zero-mean unit-std property") {
  Rng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const int g = rng.uniform_int(2, 16);
    std::vector<double> rewards(static_cast<std::size_t>(g));
    for (double& r : rewards) r = rng.uniform(0.0, 1.0);
    const auto normalized = group_normalize(rewards);

    const auto expected = normalize_oracle(rewards);
    for (std::size_t i = 0; i < normalized.size(); ++i) {
      CHECK(normalized[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }

    double mean = 0.0;
    for (double v : normalized) mean += v;
    mean /= g;
    CHECK(std::abs(mean) <= 1e-12);

    double var = 0.0;
    for (double v : normalized) var += (v - mean) * (v - mean);
    var /= g;
    if (group_stats(rewards).std > 0.0) {
      CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("group_normalize rejects tiny groups") {
  CHECK_THROWS_AS(group_normalize({1.0}), GroupTooSmallError);
  CHECK_THROWS_AS(group_normalize({}), GroupTooSmallError);
}

TEST_CASE("draft_reward gates the dense metric") {
  CHECK(draft_reward(0.8, 1.0) == doctest::Approx(0.8));
  CHECK(draft_reward(0.8, 0.0) == 0.0);
  CHECK(draft_reward(0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(draft_reward(1.2, 1.0), DomainError);
  CHECK_THROWS_AS(draft_reward(-0.1, 0.0), DomainError);
  CHECK_THROWS_AS(draft_reward(0.5, 0.5), DomainError);

  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(draft_reward(rng.uniform01(), 0.0) == 0.0);
  }
}

TEST_CASE("rho_from_logprobs is the geometric-mean token probability") {
  CHECK(rho_from_logprobs({0.0, 0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(rho_from_logprobs({std::log(0.5), std::log(0.5)}) == doctest::Approx(0.5));
  // (0.9 * 0.4 * 0.7)^(1/3)
  const double expected = std::cbrt(0.9 * 0.4 * 0.7);
  CHECK(rho_from_logprobs({std::log(0.9), std::log(0.4), std::log(0.7)}) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.6316).epsilon(1e-4));

  CHECK_THROWS_AS(rho_from_logprobs({}), EmptyDraftError);
  CHECK_THROWS_AS(rho_from_logprobs({-0.5, 0.1}), InvalidLogProbError);
}

TEST_CASE("RewardGroup enforces its invariants") {
  CHECK_THROWS_AS(make_group({1}, {0.5}), GroupTooSmallError);
  CHECK_THROWS_AS(make_group({1, 0.5}, {0.5, 0}), DomainError);    // non-binary solution
  CHECK_THROWS_AS(make_group({1, 0}, {1.5, 0}), DomainError);      // draft above 1
  CHECK_THROWS_AS(make_group({1, 0}, {0.5, 0.2}), DomainError);    // ungated draft
  CHECK_THROWS_AS(RewardGroup({1, 0}, {0.5, 0}, {1, 0}, {1, 1}), DomainError);
  CHECK_THROWS_AS(RewardGroup({1, 0}, {0.5, 0}, {1}, {1, 1}), ShapeError);
}

TEST_CASE("nsm_advantages copies solution advantages on failures") {
  SUBCASE("all-negative group stalls") {
    const auto group = make_group({0, 0}, {0, 0});
    const auto sol = group_normalize(group.solution_rewards);
    const auto draft = nsm_advantages(group, sol);
    for (double v : sol) CHECK(v == 0.0);
    for (double v : draft) CHECK(v == 0.0);
  }

  SUBCASE("two-trajectory hand oracle") {
    const auto group = make_group({1, 0}, {0.6, 0});
    const auto sol = group_normalize(group.solution_rewards);
    const auto draft = nsm_advantages(group, sol);
    CHECK(draft[0] == doctest::Approx(1.0).epsilon(1e-12));   // (0.6-0.3)/0.3
    CHECK(draft[1] == doctest::Approx(-1.0).epsilon(1e-12));  // copies solution advantage
  }

  SUBCASE("three-trajectory hand oracle") {
    const auto group = make_group({1, 1, 0}, {0.9, 0.3, 0});
    const auto sol = group_normalize(group.solution_rewards);
    const auto draft = nsm_advantages(group, sol);
    // draft mean 0.4, population std sqrt(0.14); frozen from the oracle below
    const auto expected = normalize_oracle({0.9, 0.3, 0.0});
    CHECK(draft[0] == doctest::Approx(expected[0]).epsilon(1e-12));
    CHECK(draft[1] == doctest::Approx(expected[1]).epsilon(1e-12));
    CHECK(draft[0] == doctest::Approx(1.33631).epsilon(1e-3));
    CHECK(draft[1] == doctest::Approx(-0.26726).epsilon(1e-3));
    CHECK(draft[2] == doctest::Approx(-1.41421).epsilon(1e-3));  // solution advantage
  }
}

TEST_CASE("dfpo_objective length-weights segment advantages") {
  SUBCASE("antisymmetric group cancels") {
    RewardGroup group({1, 0}, {0.5, 0}, {2, 2}, {2, 2});
    AdvantageSet adv;
    adv.draft_advantages = {1, -1};
    adv.solution_advantages = {1, -1};
    adv.bias_coefficients = {0.25, 0.25};
    CHECK(dfpo_objective(group, adv) == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("hand oracle with unequal segment lengths") {
    RewardGroup group({1, 0}, {0.5, 0}, {1, 3}, {3, 1});
    AdvantageSet adv;
    adv.draft_advantages = {1, -1};
    adv.solution_advantages = {0.5, -0.5};
    adv.bias_coefficients = {0.25, 0.25};
    // (1/2) * [ (1*1 + 3*0.5)/4 + (3*(-1) + 1*(-0.5))/4 ] = (2.5 - 3.5)/8
    const double expected = 0.5 * ((1.0 * 1 + 3.0 * 0.5) / 4.0 + (3.0 * -1 + 1.0 * -0.5) / 4.0);
    CHECK(expected == doctest::Approx(-0.125));
    CHECK(dfpo_objective(group, adv) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("mgrpo_objective is the mean solution advantage at zero KL") {
  const auto group = make_group({1, 0}, {0.5, 0});
  CHECK(mgrpo_objective(group, {1, -1}, 0.0) == doctest::Approx(0.0));

  const auto trio = make_group({1, 1, 0}, {0.5, 0.5, 0});
  CHECK(mgrpo_objective(trio, {0, 0, 0}, 0.0) == 0.0);
  const auto normalized = group_normalize(trio.solution_rewards);
  CHECK(std::abs(mgrpo_objective(trio, normalized, 0.0)) <= 1e-12);

  CHECK_THROWS_AS(mgrpo_objective(group, {1, -1}, 0.1), UnsupportedConfigError);
}

TEST_CASE("bias_terms scale the advantage difference by 1/(d+y)") {
  SUBCASE("collapses when draft equals solution advantage") {
    const auto group = make_group({1, 0}, {0.6, 0});
    AdvantageSet adv = compute_advantages(group, MaskMode::Masked);
    adv.draft_advantages = adv.solution_advantages;
    for (double b : bias_terms(group, adv)) CHECK(b == 0.0);
  }

  SUBCASE("single-entry hand value") {
    RewardGroup group({1, 0}, {0.5, 0}, {4, 1}, {6, 1});
    AdvantageSet adv;
    adv.draft_advantages = {1.0, 0.0};
    adv.solution_advantages = {0.5, 0.0};
    adv.bias_coefficients = {0.1, 0.5};
    const auto bias = bias_terms(group, adv);
    CHECK(bias[0] == doctest::Approx(0.05).epsilon(1e-12));  // (1-0.5)/10
  }

  SUBCASE("masked all-negative group yields zeros") {
    const auto group = make_group({0, 0}, {0, 0});
    const auto adv = compute_advantages(group, MaskMode::Masked);
    for (double b : bias_terms(group, adv)) CHECK(b == 0.0);
  }
}

TEST_CASE("objective-level decomposition identity") {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto group = verify::random_any_group(rng, 2, 16);
    for (const MaskMode mode : {MaskMode::Masked, MaskMode::Unmasked}) {
      const auto adv = compute_advantages(group, mode);
      const double lhs = dfpo_objective(group, adv);
      const auto bias = bias_terms(group, adv);
      double rhs = mgrpo_objective(group, adv.solution_advantages, 0.0);
      for (std::size_t i = 0; i < group.size(); ++i) {
        rhs += static_cast<double>(group.draft_lengths[i]) * bias[i] /
               static_cast<double>(group.size());
      }
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("relative-advantage inequalities on worked groups") {
  SUBCASE("two trajectories, equality cases") {
    const auto group = make_group({1, 0}, {0.5, 0});
    const auto check = check_relative_advantage(group);
    CHECK(check.part1);
    CHECK(check.part2);
    CHECK(check.part3);
  }

  SUBCASE("three trajectories, part 2 binds on the low draft") {
    const auto group = make_group({1, 1, 0}, {0.2, 0.9, 0});
    const auto check = check_relative_advantage(group);
    CHECK(check.all());
    // index 0 is the only success at or below the draft mean
    const auto stats = group_stats(group.draft_rewards);
    CHECK(group.draft_rewards[0] <= stats.mean);
    CHECK(group.draft_rewards[1] > stats.mean);
  }

  SUBCASE("precondition requires a mixed group") {
    CHECK_THROWS_AS(check_relative_advantage(make_group({1, 1}, {0.5, 0.5})), PreconditionError);
    CHECK_THROWS_AS(check_relative_advantage(make_group({0, 0}, {0, 0})), PreconditionError);
  }

  SUBCASE("degenerate draft spread leaves part 3 vacuous") {
    // A success with a zero dense metric: every draft reward is 0, so the
    // best-draft advantage is undefined (0/0) and no inequality is claimed.
    const auto group = make_group({1, 0}, {0.0, 0.0});
    const auto check = check_relative_advantage(group);
    CHECK(check.part1);  // holds under the zero-advantage convention
    CHECK(check.part2);
    CHECK(check.part3);
  }
}

TEST_CASE("relative-advantage inequalities hold on random mixed groups") {
  Rng rng(20260811);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto group = verify::random_mixed_group(rng, 2, 16);
    const auto check = check_relative_advantage(group);
    REQUIRE(check.all());
  }
}

TEST_CASE("coefficient-of-variation inequality") {
  SUBCASE("equality when successes share one draft value") {
    for (double c : {0.1, 0.5, 1.0}) {
      const auto group = make_group({1, 0}, {c, 0});
      CHECK(cv_inequality_holds(group));
      const auto sol = group_stats(group.solution_rewards);
      const auto draft = group_stats(group.draft_rewards);
      CHECK(draft.cv == doctest::Approx(sol.cv).epsilon(1e-12));
    }
  }

  SUBCASE("strict inequality with spread successes") {
    const auto group = make_group({1, 1, 0}, {0.5, 0.9, 0});
    CHECK(cv_inequality_holds(group));
    CHECK(group_stats(group.draft_rewards).cv > group_stats(group.solution_rewards).cv);
  }

  SUBCASE("undefined CV on zero draft mean") {
    CHECK_THROWS_AS(cv_inequality_holds(make_group({1, 0}, {0.0, 0.0})), UndefinedCvError);
  }

  SUBCASE("randomized sweep") {
    Rng rng(31337);
    for (int trial = 0; trial < 5000; ++trial) {
      const auto group = verify::random_mixed_group(rng, 2, 16);
      if (group_stats(group.draft_rewards).mean <= 0.0) continue;
      CHECK(cv_inequality_holds(group));
    }
  }
}

TEST_CASE("variance bound for bounded data") {
  CHECK(variance_bound_holds({0, 1}));
  {
    // two-point extreme distribution saturates the bound
    const auto s = group_stats(std::vector<double>{0, 1});
    CHECK(s.std * s.std == doctest::Approx(s.mean * (1.0 - s.mean)).epsilon(1e-15));
  }
  CHECK(variance_bound_holds({0.7, 0.7, 0.7}));
  CHECK_THROWS_AS(variance_bound_holds({}), DomainError);

  Rng rng(555);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = rng.uniform_int(1, 24);
    std::vector<double> values(static_cast<std::size_t>(n));
    for (double& v : values) v = rng.uniform(0.0, 2.0);
    CHECK(variance_bound_holds(values));
  }
}

TEST_CASE("compute_advantages wires coefficients and masking") {
  const auto group = RewardGroup({1, 0}, {0.6, 0}, {2, 4}, {3, 6});
  const auto masked = compute_advantages(group, MaskMode::Masked);
  CHECK(masked.masked);
  CHECK(masked.bias_coefficients[0] == doctest::Approx(0.2));
  CHECK(masked.bias_coefficients[1] == doctest::Approx(0.1));

  const auto unmasked = compute_advantages(group, MaskMode::Unmasked);
  CHECK_FALSE(unmasked.masked);
  // both rules agree on this group: draft rewards normalize to the same signs
  CHECK(unmasked.draft_advantages[0] == doctest::Approx(masked.draft_advantages[0]));
}
