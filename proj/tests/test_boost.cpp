#include <doctest.h>

#include "entlab/boost.hpp"
#include "entlab/engine.hpp"
#include "entlab/error.hpp"
#include "test_util.hpp"

using namespace entlab;

TEST_CASE("boost length bound") {
  CHECK(boost_length_bound(16, Rational(1, 4)) == 710);
  CHECK(boost_length_bound(64, Rational(1, 2)) == 267);
  CHECK_THROWS_AS(boost_length_bound(16, Rational(0)), Error);
}

TEST_CASE("boosting agrees with the game LP") {
  std::mt19937_64 rng(31);
  int feasible = 0, boosted = 0;
  for (int t = 0; t < 40; ++t) {
    const auto j = testutil::random_sparse_joint(rng, 2, 1, 2 + rng() % 3);
    const auto cls = complement_closure(testutil::random_class(rng, 2, 1, 3));
    const Rational gamma = testutil::q(static_cast<long>(1 + rng() % 4), 4);
    const Rational delta(1, 8);
    const auto probe = hill_cond_avg(j, cls, EntropyParams(gamma, Rational(0)));
    // One instance on each side of the game value.
    for (const Rational& eps : {probe.worst, max_of(probe.worst - delta - Rational(1, 64), Rational(0))}) {
      const auto r = metric_to_hill_boost(j, cls, gamma, eps, delta);
      CHECK(r.game_value == probe.worst);
      if (r.hill_holds) {
        ++feasible;
        REQUIRE(r.witness);
        CHECK(cond_guess_prob_avg(*r.witness) <= gamma);
        for (const auto& d : cls) CHECK(advantage(d, j, *r.witness) <= eps);
      } else if (r.game_value > eps + delta) {
        ++boosted;
        CHECK(r.certified);
        CHECK(r.weights.size() <= r.length_bound);
        Rational total(0);
        for (const auto& [w, i] : r.weights) total += w;
        CHECK(total == 1);
        // Exact recomputation against every feasible Y via the metric engine.
        REQUIRE(r.combo);
        const auto range = metric_range(*r.combo, j, gamma, true);
        CHECK(range.target - range.upper == r.combo_advantage);
        CHECK(r.combo_advantage >= eps);
      }
    }
  }
  CHECK(feasible > 0);
  CHECK(boosted > 0);
}

TEST_CASE("boosting requires complement closure") {
  std::mt19937_64 rng(32);
  const auto j = testutil::random_joint(rng, 2, 1);
  CHECK_THROWS_AS(metric_to_hill_boost(j, {testutil::random_boolean(rng, 2, 1)}, Rational(1, 2), Rational(0), Rational(1, 4)),
                  Error);
}
