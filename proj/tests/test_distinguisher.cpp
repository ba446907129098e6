#include <doctest.h>

#include "entlab/distinguisher.hpp"
#include "entlab/error.hpp"
#include "test_util.hpp"

using namespace entlab;

TEST_CASE("expect and advantage") {
  std::mt19937_64 rng(1);
  const auto j = testutil::random_joint(rng, 2, 1);
  CHECK(expect(Distinguisher::constant(Domain(2), Domain(1), Rational(1)), j) == 1);
  std::vector<Rational> point(8, Rational(0));
  point[5] = 1;
  CHECK(expect(Distinguisher::from_table(Domain(2), Domain(1), point), j) == j.probs()[5]);

  for (int i = 0; i < 50; ++i) {
    const auto d = testutil::random_real(rng, 2, 1);
    const auto p = testutil::random_joint(rng, 2, 1);
    Rational oracle(0);
    for (std::size_t x = 0; x < 4; ++x) {
      for (std::size_t z = 0; z < 2; ++z) oracle += d.at(x, z) * p.at(x, z);
    }
    CHECK(expect(d, p) == oracle);
    CHECK(advantage(d, p, p) == 0);
    CHECK(advantage(complement(d), p, j) == advantage(d, p, j));
  }
  CHECK_THROWS_AS(expect(Distinguisher::constant(Domain(1), Domain(1), Rational(0)), j), Error);
}

TEST_CASE("best boolean advantage equals statistical distance") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testutil::random_dist(rng, 3);
    const auto q = testutil::random_dist(rng, 3);
    const auto jp = Joint::from_dist(p), jq = Joint::from_dist(q);
    Rational best(0);
    for (unsigned mask = 0; mask < 256; ++mask) {
      std::vector<Rational> v(8);
      for (unsigned i = 0; i < 8; ++i) v[i] = (mask >> i) & 1u;
      const auto d = Distinguisher::from_table(Domain(3), Domain(0), v);
      const Rational adv = advantage(d, jp, jq);
      CHECK(adv <= statistical_distance(p, q));
      best = max_of(best, adv);
    }
    CHECK(best == statistical_distance(p, q));
  }
}

TEST_CASE("advantage profile") {
  std::mt19937_64 rng(3);
  const auto p = testutil::random_joint(rng, 2, 2);
  const auto d = testutil::random_boolean(rng, 2, 2);
  const auto same = advantage_profile(d, p, p);
  for (const auto& g : same.gaps) CHECK(g == 0);

  // Opposite signs: eps(z0) = +1/2, eps(z1) = -1/2 with D = x0.
  const auto x0 = Distinguisher::from_circuit(parse_circuit("x0", 1, 1));
  const Rational h(1, 2), zero(0);
  const Joint a(Domain(1), Domain(1), {zero, h, h, zero});
  const Joint b(Domain(1), Domain(1), {h, zero, zero, h});
  const auto prof = advantage_profile(x0, a, b);
  CHECK(prof.gaps[0] == 1);
  CHECK(prof.gaps[1] == -1);
  CHECK(prof.metric == 0);
  CHECK(prof.modulus == 1);

  // Mismatched z-marginals are rejected.
  const Joint c(Domain(1), Domain(1), {Rational(1, 4), Rational(1, 4), Rational(1, 2), zero});
  CHECK_THROWS_AS(advantage_profile(x0, a, c), Error);

  for (int i = 0; i < 100; ++i) {
    const auto pz = testutil::random_dist(rng, 1);
    std::vector<Dist> c1{testutil::random_dist(rng, 2), testutil::random_dist(rng, 2)};
    std::vector<Dist> c2{testutil::random_dist(rng, 2), testutil::random_dist(rng, 2)};
    const auto j1 = Joint::from_conditionals(pz, c1), j2 = Joint::from_conditionals(pz, c2);
    const auto dd = testutil::random_real(rng, 2, 1);
    const auto pr = advantage_profile(dd, j1, j2);
    CHECK(abs(pr.metric) <= pr.modulus);
    // Signs applied through flip_select make every gap nonnegative with the same magnitude.
    const auto flipped = advantage_profile(flip_select(dd, sign_actions(pr)), j1, j2);
    for (std::size_t z = 0; z < 2; ++z) {
      CHECK(flipped.gaps[z] >= 0);
      CHECK(flipped.gaps[z] == abs(pr.gaps[z]));
    }
    CHECK(flipped.metric == pr.modulus);
  }
}

TEST_CASE("complement, combination, threshold, flip_select") {
  std::mt19937_64 rng(4);
  const auto d = testutil::random_boolean(rng, 2, 1);
  const auto j = testutil::random_joint(rng, 2, 1);
  const auto dc = complement(d);
  CHECK(dc.size() == d.size() + 1);
  CHECK(complement(dc).values() == d.values());
  CHECK(expect(dc, j) == 1 - expect(d, j));

  const auto half = convex_combine({{Rational(1, 2), d}, {Rational(1, 2), dc}});
  for (const auto& v : half.values()) CHECK(v == Rational(1, 2));
  CHECK(convex_combine({{Rational(1), d}}).values() == d.values());
  CHECK_THROWS_AS(convex_combine({{Rational(1, 2), d}}), Error);
  CHECK_THROWS_AS(convex_combine({{Rational(3, 2), d}, {Rational(-1, 2), dc}}), Error);
  const auto r1 = testutil::random_real(rng, 2, 1), r2 = testutil::random_real(rng, 2, 1);
  const auto combo = convex_combine({{Rational(1, 3), r1}, {Rational(2, 3), r2}});
  CHECK(expect(combo, j) == Rational(1, 3) * expect(r1, j) + Rational(2, 3) * expect(r2, j));

  CHECK(threshold(d, Rational(0)).values() == d.values());
  const auto none = threshold(r1, Rational(1));
  for (const auto& v : none.values()) CHECK(v == 0);
  const auto two = Distinguisher::from_table(Domain(1), Domain(0), {Rational(4, 5), Rational(3, 10)});
  const auto t = threshold(two, Rational(1, 2));
  CHECK(t.values() == std::vector<Rational>{Rational(1), Rational(0)});
  CHECK(t.is_boolean());

  CHECK(flip_select(d, {FlipAction::Keep, FlipAction::Keep}).values() == d.values());
  const auto zeroed = flip_select(d, {FlipAction::Zero, FlipAction::Zero});
  for (const auto& v : zeroed.values()) CHECK(v == 0);
  CHECK(flip_select(d, {FlipAction::Flip, FlipAction::Keep}).size() == d.size() + 1);

  DistinguisherClass cls{d};
  CHECK_FALSE(is_complement_closed(cls));
  CHECK(is_complement_closed(complement_closure(cls)));
  CHECK(complement_closure(complement_closure(cls)).size() == 2);
}
