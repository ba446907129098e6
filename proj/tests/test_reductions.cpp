#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "entlab/engine.hpp"
#include "entlab/error.hpp"
#include "entlab/reductions.hpp"
#include "test_util.hpp"

using namespace entlab;
using testutil::q;

namespace {

// Achievable E D(Y) for a boolean column with `ones` ones out of `size`
// under a per-point cap c: [max(0, 1 - (size - ones) c), min(1, ones c)].
std::pair<Rational, Rational> boolean_interval(const Rational& ones, std::size_t size, const Rational& c) {
  const Rational zeros = Rational(static_cast<long>(size)) - ones;
  return {max_of(Rational(0), 1 - zeros * c), min_of(Rational(1), ones * c)};
}

Rational cond_mean(const Distinguisher& d, const Joint& j, std::size_t z) {
  Rational t(0);
  for (std::size_t x = 0; x < j.x_size(); ++x) t += d.at(x, z) * j.at(x, z);
  return t / j.z_mass(z);
}

// Worst-case per-z distance for boolean D, from the closed-form interval.
Rational boolean_eps(const Distinguisher& d, const Joint& j, std::size_t z, const Rational& gamma) {
  const auto [lo, hi] = boolean_interval(d.count(z), j.x_size(), gamma);
  const Rational a = cond_mean(d, j, z);
  return a > hi ? a - hi : (a < lo ? lo - a : Rational(0));
}

// Largest E D(Y|z) for a real-valued column under cap c: fill from the top.
Rational top_fill(std::vector<Rational> col, const Rational& c) {
  std::sort(col.begin(), col.end(), std::greater<>());
  Rational left(1), total(0);
  for (const auto& v : col) {
    const Rational take = min_of(c, left);
    total += take * v;
    left -= take;
  }
  return total;
}

Rational worst_adv_oracle(const Distinguisher& d, const Joint& j, const Rational& gamma) {
  Rational total(0);
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    total += j.z_mass(z) * (cond_mean(d, j, z) - top_fill(d.column(z), gamma));
  }
  return total;
}

// Tail by direct summation of binomial terms.
Rational binomial_oracle(unsigned ell, const Rational& p, const Rational& dev) {
  Rational total(0);
  for (unsigned s = 0; s <= ell; ++s) {
    const Rational freq = q(s, ell) - p;
    if (abs(freq) < dev) continue;
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), ell, s);
    total += Rational(c) * pow(p, s) * pow(1 - p, ell - s);
  }
  return total;
}

// X|z uniform on two points where D' = 1; D' = 0 elsewhere.
struct Planted {
  Joint joint;
  Distinguisher d;
};

Planted planted(unsigned n, unsigned m) {
  const std::size_t nx = std::size_t{1} << n, nz = std::size_t{1} << m;
  std::vector<Rational> probs(nx * nz, Rational(0)), vals(nx * nz, Rational(0));
  const Rational cell = q(1, static_cast<long>(2 * nz));
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t x : {2 * z, 2 * z + 1}) {
      probs[x * nz + z] = cell;
      vals[x * nz + z] = 1;
    }
  }
  return {Joint(Domain(n), Domain(m), std::move(probs)),
          Distinguisher(Domain(n), Domain(m), std::move(vals), DKind::Boolean, 3)};
}

}  // namespace

TEST_CASE("leakage witness: constant Z reproduces the original bound") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const Dist x = testutil::random_dist(rng, 3);
    const Dist y = testutil::random_dist(rng, 3);
    const auto d = testutil::random_boolean(rng, 3, 0);
    const auto w = leakage_witness(d, Joint::from_dist(x), y);
    CHECK(w.certified);
    CHECK(w.caps[0] == min_of(guess_prob(y), Rational(1)));
    CHECK(w.gaps[0] <= w.epsilon);
  }
}

TEST_CASE("leakage witness: per-z caps and gaps") {
  std::mt19937_64 rng(6);
  int built = 0;
  for (int t = 0; t < 60; ++t) {
    const Joint j = testutil::random_joint(rng, 3, 1);
    const Dist y = testutil::random_dist(rng, 3);
    const auto d = testutil::random_boolean(rng, 3, 0);
    LeakageWitness w;
    try {
      w = leakage_witness(d, j, y);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InfeasibleWitness);
      continue;
    }
    ++built;
    Rational avg(0);
    for (std::size_t z = 0; z < j.z_size(); ++z) {
      if (!j.supported(z)) continue;
      const Rational cap = min_of(w.gamma / j.z_mass(z), Rational(1));
      CHECK(w.caps[z] == cap);
      const Dist& wz = *w.witnesses[z];
      Rational mass(0), mean(0), top(0);
      for (std::size_t x = 0; x < wz.size(); ++x) {
        mass += wz[x];
        mean += d.at(x, 0) * wz[x];
        top = max_of(top, wz[x]);
      }
      CHECK(mass == 1);
      CHECK(top <= cap);
      // The witness is as close as any cap-respecting Y can be.
      const auto [lo, hi] = boolean_interval(d.count(0), 8, cap);
      const Rational a = cond_mean(Distinguisher(Domain(3), Domain(1),
                                                 [&] {
                                                   std::vector<Rational> v(16);
                                                   for (std::size_t x = 0; x < 8; ++x) {
                                                     v[2 * x] = v[2 * x + 1] = d.at(x, 0);
                                                   }
                                                   return v;
                                                 }(),
                                                 DKind::Boolean),
                                   j, z);
      CHECK(abs(a - mean) == (a > hi ? a - hi : (a < lo ? lo - a : Rational(0))));
      CHECK(w.gaps[z] <= w.epsilon / j.z_mass(z));
      avg += j.z_mass(z) * top;
    }
    CHECK(avg <= 2 * w.gamma);
  }
  CHECK(built > 0);
}

TEST_CASE("leakage witness: argument checks") {
  std::mt19937_64 rng(7);
  const Joint j = testutil::random_joint(rng, 2, 1);
  const Dist y = testutil::random_dist(rng, 2);
  CHECK_THROWS_AS(leakage_witness(testutil::random_boolean(rng, 2, 1), j, y), Error);
  CHECK_THROWS_AS(leakage_witness(testutil::random_real(rng, 2, 0), j, y), Error);
}

TEST_CASE("modulus chain rule") {
  std::mt19937_64 rng(8);
  for (unsigned m2 : {0u, 1u}) {
    for (int t = 0; t < 15; ++t) {
      const unsigned m1 = 1;
      auto base = testutil::random_joint(rng, 2, m1 + m2);
      const Joint j3(base.x_domain(), base.z_domain(), {base.probs().begin(), base.probs().end()}, ZPair{m1, m2});
      const auto cls = testutil::random_class(rng, 2, m1 + m2, 2);
      const Rational gamma(1, 2);
      const auto probe = modulus_chain_rule(j3, cls, EntropyParams(gamma, Rational(1)));
      Rational eps(0);
      for (const auto& a : probe) {
        for (const auto& v : a.slice_values) eps = max_of(eps, v);
      }
      const auto arts = modulus_chain_rule(j3, cls, EntropyParams(gamma, eps));
      REQUIRE(arts.size() == cls.size());
      const Rational scale = pow2(static_cast<long>(m2));
      for (const auto& a : arts) {
        const auto& d = cls[a.member];
        const Joint& y = a.witness;
        Rational modulus(0), guess(0);
        for (std::size_t z = 0; z < j3.z_size(); ++z) {
          CHECK(y.z_mass(z) == j3.z_mass(z));
          if (!j3.supported(z)) continue;
          modulus += j3.z_mass(z) * abs(cond_mean(d, j3, z) - cond_mean(d, y, z));
          Rational top(0);
          for (std::size_t x = 0; x < y.x_size(); ++x) top = max_of(top, y.at(x, z));
          guess += top;
        }
        CHECK(a.modulus == modulus);
        CHECK(a.avg_guess == guess);
        CHECK(modulus <= scale * eps);
        CHECK(guess <= scale * gamma);
        CHECK(a.certified);
      }
      if (eps > 0) {
        CHECK_THROWS_AS(modulus_chain_rule(j3, cls, EntropyParams(gamma, eps - Rational(1, 1024))), Error);
      }
    }
  }
}

TEST_CASE("chain rule with a concrete 2-bit leak") {
  // X uniform on 2 bits, Z2 = X, Z1 constant: leaking X costs the full 2^m2.
  std::vector<Rational> probs(16, Rational(0));
  for (std::size_t x = 0; x < 4; ++x) probs[x * 4 + x] = q(1, 4);
  const Joint j3(Domain(2), Domain(2), probs, ZPair{0, 2});
  std::vector<Rational> eq(16, Rational(0));
  for (std::size_t x = 0; x < 4; ++x) eq[x * 4 + x] = 1;
  const DistinguisherClass cls{Distinguisher(Domain(2), Domain(2), eq, DKind::Boolean)};
  const auto arts = modulus_chain_rule(j3, cls, EntropyParams(q(1, 4), q(1, 16)));
  CHECK(arts[0].eps_bound == q(1, 4));
  CHECK(arts[0].gamma_bound == 1);
  CHECK(arts[0].certified);
}

TEST_CASE("core lemma event") {
  std::mt19937_64 rng(9);
  int applied = 0;
  for (int t = 0; t < 60; ++t) {
    const Joint j = testutil::random_sparse_joint(rng, 3, 1, 3 + rng() % 4);
    const auto d = testutil::random_boolean(rng, 3, 1);
    const Rational gamma(1, 4);
    Rational violation(0);
    for (std::size_t z = 0; z < j.z_size(); ++z) {
      if (j.supported(z)) violation += j.z_mass(z) * boolean_eps(d, j, z, gamma);
    }
    if (violation == 0) {
      CHECK_THROWS_AS(core_lemma_event(d, j, gamma, Rational(1, 8)), Error);
      continue;
    }
    ++applied;
    const auto r = core_lemma_event(d, j, gamma, violation);
    CHECK(r.violation == violation);
    for (std::size_t z = 0; z < j.z_size(); ++z) {
      if (j.supported(z)) CHECK(r.eps_z[z] == boolean_eps(d, j, z, gamma));
    }
    // Event mass by brute force: D'(x,z) = 1 and 1 - min(1, |D'_z| gamma) >= eps/4.
    auto event = [&](const Distinguisher& e) {
      Rational p(0);
      for (std::size_t z = 0; z < j.z_size(); ++z) {
        const Rational top = min_of(Rational(1), e.count(z) * gamma);
        for (std::size_t x = 0; x < j.x_size(); ++x) {
          if (e.at(x, z) - top >= violation / 4) p += j.at(x, z);
        }
      }
      return p;
    };
    CHECK(r.p_per_z == event(r.per_z));
    CHECK(r.p_star == max_of(event(d), event(complement(d))));
    CHECK(r.p_star >= violation * violation / 16);
    CHECK(r.certified);
    CHECK_THROWS_AS(core_lemma_event(d, j, gamma, violation + Rational(1, 64)), Error);
  }
  CHECK(applied > 10);
}

TEST_CASE("heavy truncation") {
  CHECK(truncation_overhead(3, 3) == 7);
  CHECK(truncation_overhead(3, 0) == 56);
  CHECK_THROWS_AS(truncation_overhead(2, 3), Error);
  std::mt19937_64 rng(10);
  for (int t = 0; t < 30; ++t) {
    const Joint j = testutil::random_sparse_joint(rng, 2, 2, 4 + rng() % 5);
    const auto d = testutil::random_boolean(rng, 2, 2);
    const Rational gamma(1, 2);
    Rational original(0);
    std::vector<Rational> weight(4, Rational(0));
    for (std::size_t z = 0; z < 4; ++z) {
      if (!j.supported(z)) continue;
      weight[z] = j.z_mass(z) * boolean_eps(d, j, z, gamma);
      original += weight[z];
    }
    for (unsigned level = 0; level <= 2; ++level) {
      const auto r = heavy_truncation(d, j, gamma, level);
      CHECK(r.original == original);
      CHECK(r.kept.size() == (std::size_t{1} << (2 - level)));
      CHECK(r.truncated.size() == d.size() + truncation_overhead(2, level));
      // Kept columns carry the largest weights.
      Rational kept(0);
      for (std::size_t z : r.kept) kept += weight[z];
      auto sorted = weight;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      Rational best(0);
      for (std::size_t i = 0; i < r.kept.size(); ++i) best += sorted[i];
      CHECK(kept == best);
      CHECK(r.advantage == worst_adv_oracle(r.truncated, j, gamma));
      CHECK(r.advantage == kept);
      CHECK(r.advantage >= original / pow2(static_cast<long>(level)));
      CHECK(r.certified);
    }
  }
}

TEST_CASE("sampler sample count") {
  CHECK(sampler_sample_count(Rational(1)) == 63);
  CHECK(sampler_sample_count(q(1, 2)) == 255);
  CHECK(sampler_sample_count(q(1, 64)) == 262143);
  CHECK_THROWS_AS(sampler_sample_count(q(1, 200)), Error);
  CHECK_THROWS_AS(sampler_sample_count(Rational(0)), Error);
}

TEST_CASE("sampler distinguisher") {
  // Y' uniform on 2^8 points, X|z on two points where D' = 1.
  const auto [joint, d] = planted(8, 1);
  const Sampler sampler{Domain(8), Domain(1), {Dist::uniform(Domain(8)), Dist::uniform(Domain(8))}, 5};
  const auto art = sampler_distinguisher(d, joint, sampler, Rational(1));
  CHECK(art.samples == 63);
  CHECK(art.size == 64 * (3 + 5));
  // Accept iff all 63 samples miss the two marked points.
  const Rational miss = pow(q(254, 256), 63);
  CHECK(art.accept_x == miss);
  CHECK(art.accept_y == q(2, 256) * miss);
  CHECK(art.accept_y <= q(1, 64));
  CHECK(art.gap >= q(1, 64));
  CHECK(art.certified);

  const auto mc = sampler_monte_carlo(d, joint, sampler, art, 20000, 42);
  CHECK(mc.within);
  const auto again = sampler_monte_carlo(d, joint, sampler, art, 20000, 42);
  CHECK(again.estimate_x == mc.estimate_x);

  const auto flat = Distinguisher::constant(Domain(8), Domain(1), q(1, 2));
  const auto none = sampler_distinguisher(flat, joint, sampler, Rational(1));
  CHECK(none.accept_x == 0);
  CHECK(none.accept_y == 0);
}

TEST_CASE("sampler acceptance on distinct values stays below 1/(ell+1)") {
  std::mt19937_64 rng(11);
  const Joint j = testutil::random_joint(rng, 3, 1);
  std::vector<Rational> vals(16);
  for (std::size_t i = 0; i < 16; ++i) vals[i] = q(static_cast<long>(i), 16);
  const Distinguisher d(Domain(3), Domain(1), vals, DKind::Real);
  const Sampler s{Domain(3), Domain(1), {Dist::uniform(Domain(3)), Dist::uniform(Domain(3))}, 1};
  const auto art = sampler_distinguisher(d, j, s, Rational(1));
  CHECK(art.accept_y <= q(1, static_cast<long>(art.samples + 1)));
  // Oracle: y is the strict maximum of ell + 1 draws with probability ((rank)/8)^ell / 8.
  Rational expect_y(0);
  for (std::size_t z = 0; z < 2; ++z) {
    for (long r = 0; r < 8; ++r) expect_y += j.z_mass(z) * q(1, 8) * pow(q(r, 8), art.samples);
  }
  CHECK(art.accept_y == expect_y);
}

TEST_CASE("binomial deviation and the Chernoff claim") {
  for (unsigned ell : {1u, 5u, 12u}) {
    for (const auto& p : {q(0, 1), q(1, 3), q(1, 2), q(7, 8), q(1, 1)}) {
      for (const auto& dev : {q(1, 10), q(1, 4), q(1, 2)}) {
        CHECK(binomial_deviation(ell, p, dev) == binomial_oracle(ell, p, dev));
      }
    }
  }
  CHECK(chernoff_sample_count(2, q(1, 2), q(1, 4)) == 129);
  const auto claim = chernoff_claim(4, 2, q(1, 2), q(1, 4));
  CHECK(claim.samples == 129);
  CHECK(claim.bound == q(1, 2));
  CHECK(claim.holds);
  CHECK(claim.worst_failure <= q(1, 2));
}

TEST_CASE("approximate counting, sampling mode") {
  const auto [joint, d] = planted(8, 1);
  CountParams params{q(1, 4), Rational(1)};
  params.samples = 400;
  const auto art = approx_count_distinguisher(d, joint, params);
  CHECK(art.gamma_y == q(1, 256));
  // h = 64 S / 400 < 7/8  <=>  S <= 5; S ~ Bin(400, 1/128).
  Rational alpha(0);
  for (unsigned s = 0; s <= 5; ++s) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), 400, s);
    alpha += Rational(c) * pow(q(1, 128), s) * pow(q(127, 128), 400 - s);
  }
  CHECK(art.accept_x == alpha);
  CHECK(art.accept_y == alpha * q(2, 256));
  CHECK(art.gap >= art.bound);
  CHECK(art.certified);

  params.samples.reset();
  CHECK_THROWS_AS(approx_count_distinguisher(d, joint, CountParams{q(1, 4), q(1, 2)}), Error);  // cap below 2^-n
}

TEST_CASE("approximate counting, oracle mode") {
  const auto [joint, d] = planted(8, 1);
  CountParams params{q(1, 4), Rational(1), CountMode::ExactOracle};
  const auto art = approx_count_distinguisher(d, joint, params);
  // Smallest odd r whose majority of 3/4-correct calls errs with prob <= 1/64.
  unsigned r = 1;
  for (;; r += 2) {
    Rational fail(0);
    for (unsigned s = r / 2 + 1; s <= r; ++s) {
      mpz_class c;
      mpz_bin_uiui(c.get_mpz_t(), r, s);
      fail += Rational(c) * pow(q(1, 4), s) * pow(q(3, 4), r - s);
    }
    if (fail <= q(1, 64)) break;
  }
  CHECK(art.samples == r);
  CHECK(pow(art.factor, 6) >= 4);
  CHECK(art.conjunction_size == 6 * 3 + 5);
  CHECK(art.majority_size == majority_circuit(r).size());
  // 1/2 * factor < 7/8 in every column, so the estimate always accepts.
  CHECK(art.accept_x == 1 - art.estimator_failure);
  CHECK(art.certified);
}

TEST_CASE("real to boolean thresholding") {
  std::mt19937_64 rng(12);
  int found = 0;
  for (int t = 0; t < 200; ++t) {
    const Joint j = testutil::random_sparse_joint(rng, 2, 1, 3);
    const auto d = testutil::random_real(rng, 2, 1, 4);
    const Rational gamma(1, 2);
    Rational best(-2);
    for (long k = 0; k < 4; ++k) best = max_of(best, worst_adv_oracle(threshold(d, q(k, 4)), j, gamma));
    const Rational real = worst_adv_oracle(d, j, gamma);
    if (best <= 0) {
      CHECK_THROWS_AS(real_to_boolean(d, j, gamma, Rational(1, 64)), Error);
      continue;
    }
    ++found;
    const auto r = real_to_boolean(d, j, gamma, best);
    CHECK(r.boolean_advantage == best);
    CHECK(r.real_advantage == real);
    CHECK(r.boolean_advantage >= real);
    CHECK(r.boolean.is_boolean());
    CHECK(r.certified);
  }
  CHECK(found > 5);
}

TEST_CASE("tightness example") {
  std::vector<Circuit> f;
  for (const char* text : {"x0", "x1", "and(x0, x1)", "xor(x0, x1)"}) f.push_back(parse_circuit(text, 2, 0));
  const auto rep = tightness_demo(f);
  CHECK(rep.min_advantage == q(7, 8));
  CHECK(rep.cap_after_split == q(3, 8));
  CHECK(rep.good_mass >= q(2, 3));
  CHECK(rep.per_good_gap >= q(5, 8));
  CHECK(rep.decomposition == q(1, 12));
  CHECK(rep.certified);
  CHECK(rep.d.size() == 2 + 8);
  CHECK(cond_guess_prob_avg(rep.worst_y) <= q(1, 8));
}

TEST_CASE("conversion ledger") {
  LedgerInputs in{EntropyParams(q(1, 16), q(1, 4), 10000), 4, 2, 1, 7};
  const auto a = conversion_ledger("decomposable", in);
  CHECK(*a.gamma.exact == q(1, 16));
  CHECK(*a.epsilon.exact == q(1, 4));
  CHECK(*a.size.exact == 10000);
  CHECK(a.k.approx == doctest::Approx(4.0));

  const auto e = conversion_ledger("none", in);
  CHECK(*e.epsilon.exact == q(1, 2));
  CHECK(*e.size.exact == 10000 - 10);

  const auto f = conversion_ledger("squared", in);
  CHECK(*f.epsilon.exact == q(1, 2));
  const auto f2 = conversion_ledger("squared", LedgerInputs{EntropyParams(q(1, 16), q(1, 2)), 4, 2});
  CHECK(!f2.epsilon.exact);
  CHECK(f2.epsilon.approx == doctest::Approx(std::sqrt(0.5)));

  const auto b = conversion_ledger("samplable", in);
  CHECK(*b.gamma.exact == 128);
  CHECK(*b.epsilon.exact == 4);
  CHECK(*b.size.exact == Rational(10000) / 1024 - 7);
  CHECK(conversion_ledger("np-oracle", in).size.provenance == "asymptotic");
  CHECK_THROWS_AS(conversion_ledger("magic", in), Error);
  CHECK(ledger_assumptions().size() == 6);
}

TEST_CASE("modulus to HILL parameters") {
  const EntropyParams p(q(1, 64), q(1, 8), 1u << 20);
  const auto h = modulus_to_hill_params(p, 3, 1, q(1, 8));
  CHECK(h.epsilon == q(3, 8));
  CHECK(h.gamma == q(1, 8));
  CHECK(*h.size_budget == static_cast<std::uint64_t>(std::floor((1u << 20) / 64.0 / 64.0)));
  CHECK_THROWS_AS(modulus_to_hill_params(p, 3, 1, q(1, 128)), Error);
}
