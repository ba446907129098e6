#include <doctest.h>

#include "entlab/distribution.hpp"
#include "entlab/error.hpp"
#include "test_util.hpp"

using namespace entlab;

namespace {

Rational q(const char* s) { return parse_rational(s); }

Dist make(unsigned bits, std::initializer_list<const char*> ps) {
  std::vector<Rational> v;
  for (auto p : ps) v.push_back(q(p));
  return Dist(Domain(bits), v);
}

}  // namespace

TEST_CASE("rational parsing and helpers") {
  CHECK(q("3/6") == Rational(1, 2));
  CHECK(q(" -2 ") == -2);
  CHECK_THROWS_AS(q("1/0"), Error);
  CHECK_THROWS_AS(q("1.5"), Error);
  CHECK(pow2(-3) == Rational(1, 8));
  CHECK(pow(Rational(5, 4), 6) == Rational(15625, 4096));
  CHECK(neg_log2(Rational(1, 8)) == doctest::Approx(3.0));
  Rational r;
  CHECK(exact_sqrt(Rational(9, 64), r));
  CHECK(r == Rational(3, 8));
  CHECK_FALSE(exact_sqrt(Rational(2), r));
}

TEST_CASE("dist validation") {
  CHECK_THROWS_AS(make(1, {"1/2", "1/3"}), Error);
  CHECK_THROWS_AS(Domain(17), Error);
  CHECK_THROWS_AS(make(1, {"1/2"}), Error);
}

TEST_CASE("guess_prob") {
  CHECK(guess_prob(Dist::uniform(Domain(2))) == Rational(1, 4));
  CHECK(guess_prob(make(2, {"1/2", "1/4", "1/8", "1/8"})) == Rational(1, 2));
  CHECK(guess_prob(Dist::point_mass(Domain(3), 5)) == 1);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    auto d = testutil::random_dist(rng, 3);
    CHECK(guess_prob(d) >= Rational(1, 8));
  }
}

TEST_CASE("conditional guessing probabilities") {
  const Joint uni(Domain(1), Domain(1), std::vector<Rational>(4, Rational(1, 4)));
  CHECK(cond_guess_prob_avg(uni) == Rational(1, 2));
  CHECK(cond_guess_prob_worst(uni) == Rational(1, 2));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto j = testutil::random_joint(rng, 2, 2);
    // Oracle: direct summation over the x-major table.
    Rational avg(0);
    for (std::size_t z = 0; z < 4; ++z) {
      Rational best(0);
      for (std::size_t x = 0; x < 4; ++x) best = max_of(best, j.probs()[x * 4 + z]);
      avg += best;
    }
    CHECK(cond_guess_prob_avg(j) == avg);
    CHECK(cond_guess_prob_worst(j) >= cond_guess_prob_avg(j));
    CHECK(cond_guess_prob_avg(j) >= guess_prob(j.x_marginal()));
  }

  // Independence and constant conditioning.
  const auto x = make(2, {"1/2", "1/4", "1/8", "1/8"});
  std::vector<Dist> cols(2, x);
  const auto ind = Joint::from_conditionals(make(1, {"1/3", "2/3"}), cols);
  CHECK(cond_guess_prob_avg(ind) == Rational(1, 2));
  CHECK(cond_guess_prob_worst(Joint::from_dist(x)) == Rational(1, 2));
}

TEST_CASE("condition") {
  std::vector<Rational> p(8, Rational(0));
  // X = f(Z) with f(z) = 3 - z over two z values.
  p[3 * 2 + 0] = Rational(1, 4);
  p[2 * 2 + 1] = Rational(3, 4);
  const Joint j(Domain(2), Domain(1), p);
  CHECK(condition(j, 0)[3] == 1);
  CHECK(condition(j, 1)[2] == 1);

  std::vector<Rational> zero_col(8, Rational(0));
  zero_col[0] = 1;
  const Joint degenerate(Domain(2), Domain(1), zero_col);
  CHECK_THROWS_AS(condition(degenerate, 1), Error);
  CHECK(cond_guess_prob_worst(degenerate) == 1);

  std::mt19937_64 rng(3);
  const auto r = testutil::random_joint(rng, 2, 1);
  for (std::size_t z = 0; z < 2; ++z) {
    if (!r.supported(z)) continue;
    const auto c = condition(r, z);
    Rational colsum = r.at(0, z) + r.at(1, z) + r.at(2, z) + r.at(3, z);
    for (std::size_t x = 0; x < 4; ++x) CHECK(c[x] == r.at(x, z) / colsum);
  }
}

TEST_CASE("statistical distance") {
  const auto a = make(1, {"1/2", "1/2"});
  CHECK(statistical_distance(a, a) == 0);
  CHECK(statistical_distance(Dist::point_mass(Domain(1), 0), Dist::point_mass(Domain(1), 1)) == 1);
  CHECK(statistical_distance(a, make(1, {"3/4", "1/4"})) == Rational(1, 4));
  CHECK_THROWS_AS(statistical_distance(a, Dist::uniform(Domain(2))), Error);
}

TEST_CASE("avg_to_worst_split") {
  // Average guessing probability 1/16 (k = 4) with delta = 1/2 gives 1/8 (k' = 3).
  const Joint j = Joint::from_dist(Dist::uniform(Domain(4)));
  const auto split = avg_to_worst_split(j, Rational(1, 2));
  CHECK(split.gamma_new == Rational(1, 8));
  CHECK(split.certified);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto r = testutil::random_joint(rng, 2, 2);
    for (const Rational delta : {Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1)}) {
      const auto s = avg_to_worst_split(r, delta);
      Rational bad(0);
      for (std::size_t z = 0; z < 4; ++z) {
        if (std::find(s.good_z.begin(), s.good_z.end(), z) == s.good_z.end()) bad += r.z_mass(z);
      }
      CHECK(bad <= delta);
      CHECK(s.certified);
    }
  }
  CHECK_THROWS_AS(avg_to_worst_split(j, Rational(0)), Error);
}

TEST_CASE("information-theoretic chain rule") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const unsigned m1 = i % 3, m2 = (i / 3) % 3;
    auto probs = testutil::random_probs(rng, std::size_t{1} << (2 + m1 + m2));
    const Joint j(Domain(2), Domain(m1 + m2), probs, ZPair{m1, m2});
    CHECK(it_chain_rule_check(j).holds);
  }
  // Z2 = copy of X: avg guess over (Z1, Z2) is 1 and the bound is tight when X is uniform.
  std::vector<Rational> p(4 * 4, Rational(0));
  for (std::size_t x = 0; x < 4; ++x) p[x * 4 + x] = Rational(1, 4);
  const Joint copy(Domain(2), Domain(2), p, ZPair{0, 2});
  const auto v = it_chain_rule_check(copy);
  CHECK(v.avg_given_both == 1);
  CHECK(v.bound == 1);
  // Z2 constant: no loss.
  const Joint flat(Domain(2), Domain(0), std::vector<Rational>(4, Rational(1, 4)), ZPair{0, 0});
  CHECK(it_chain_rule_check(flat).avg_given_both == it_chain_rule_check(flat).avg_given_first);
}
