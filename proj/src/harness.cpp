#include "entlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <thread>

#include "entlab/boost.hpp"
#include "entlab/engine.hpp"
#include "entlab/error.hpp"
#include "entlab/lp_models.hpp"
#include "entlab/reductions.hpp"

namespace entlab {

namespace {

using Rng = std::mt19937_64;

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{seed, trial};
  return Rng(seq);
}

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& from) {
  return from[below(rng, from.size())];
}

Rational q(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Joint random_joint(Rng& rng, unsigned n, unsigned m, std::size_t support, unsigned bits,
                   std::optional<ZPair> pair = std::nullopt) {
  const std::size_t cells = std::size_t{1} << (n + m);
  std::vector<Rational> probs(cells, Rational(0));
  if (support == 0 || support >= cells) {
    probs = random_dyadic(rng, cells, bits);
  } else {
    std::vector<std::size_t> idx(cells);
    for (std::size_t i = 0; i < cells; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto w = random_dyadic(rng, support, bits);
    for (std::size_t i = 0; i < support; ++i) probs[idx[i]] = w[i];
  }
  return Joint(Domain(n), Domain(m), std::move(probs), pair);
}

Distinguisher random_boolean(Rng& rng, unsigned n, unsigned m) {
  std::vector<Rational> v(std::size_t{1} << (n + m));
  for (auto& r : v) r = static_cast<long>(rng() & 1u);
  return Distinguisher::from_table(Domain(n), Domain(m), std::move(v));
}

Distinguisher random_real(Rng& rng, unsigned n, unsigned m, long denom) {
  std::vector<Rational> v(std::size_t{1} << (n + m));
  for (auto& r : v) r = q(static_cast<long>(below(rng, static_cast<std::size_t>(denom) + 1)), denom);
  return Distinguisher::from_table(Domain(n), Domain(m), std::move(v));
}

DistinguisherClass random_class(Rng& rng, unsigned n, unsigned m, std::size_t count) {
  DistinguisherClass cls;
  for (std::size_t i = 0; i < count; ++i) cls.push_back(random_boolean(rng, n, m));
  return cls;
}

Json rj(const Rational& r) { return rational_json(r); }

Json rational_array(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(rj(r));
  return out;
}

// ---- per-trial plumbing ----

struct TrialOutcome {
  Json certificate = Json::object();
  std::optional<std::string> violation;
  std::optional<Rational> margin;  // certified quantity minus its bound
};

using TrialFn = std::function<TrialOutcome(std::uint64_t trial, Rng& rng)>;

void expect_that(TrialOutcome& out, bool ok, const std::string& what) {
  if (!ok && !out.violation) out.violation = what;
}

void track_margin(TrialOutcome& out, const Rational& m) { out.margin = out.margin ? min_of(*out.margin, m) : m; }

// Retries a generator until `accept` holds; deterministic given the rng.
template <typename Gen, typename Accept>
auto generate_until(Rng& rng, Gen gen, Accept accept, int attempts = 4096) {
  for (int i = 0; i < attempts; ++i) {
    auto inst = gen(rng);
    if (accept(inst)) return inst;
  }
  throw Error(ErrorKind::BudgetExceeded, "instance generator found no admissible instance");
}

// ---- suites ----

TrialOutcome it_chain(std::uint64_t, Rng& rng) {
  const unsigned n = 1 + static_cast<unsigned>(below(rng, 3));
  const unsigned m1 = static_cast<unsigned>(below(rng, 4));
  const unsigned m2 = static_cast<unsigned>(below(rng, 4));
  const std::size_t cells = std::size_t{1} << (n + m1 + m2);
  const std::size_t support = (rng() & 1u) ? 1 + below(rng, cells) : 0;
  const Joint j3 = random_joint(rng, n, m1 + m2, support, 10, ZPair{m1, m2});
  const auto v = it_chain_rule_check(j3);
  TrialOutcome out;
  out.certificate = {{"n", n}, {"m1", m1}, {"m2", m2}, {"avg_given_both", rj(v.avg_given_both)},
                     {"avg_given_first", rj(v.avg_given_first)}, {"bound", rj(v.bound)}, {"holds", v.holds}};
  expect_that(out, v.holds, "eq. (1) fails: avg guess given (Z1,Z2) exceeds 2^m2 times avg guess given Z1");
  track_margin(out, v.bound - v.avg_given_both);
  return out;
}

TrialOutcome avg_worst(std::uint64_t trial, Rng& rng) {
  static const std::vector<Rational> deltas{q(1, 2), q(1, 4), q(1, 8)};
  const Rational& delta = deltas[trial % 3];
  const unsigned n = 3, m = 1 + static_cast<unsigned>(below(rng, 2));
  const std::size_t support = (rng() & 1u) ? 2 + below(rng, 8) : 0;
  const Joint j = random_joint(rng, n, m, support, 10);
  const auto split = avg_to_worst_split(j, delta);

  // Lemma 1, recounted from the table.
  Rational good(0);
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    Rational top(0);
    for (std::size_t x = 0; x < j.x_size(); ++x) top = max_of(top, j.at(x, z));
    if (top <= split.gamma_new * j.z_mass(z)) good += j.z_mass(z);
  }
  TrialOutcome out;
  expect_that(out, good == split.good_mass, "good-z mass disagrees with the recount");
  expect_that(out, good >= 1 - delta, "Lemma 1: good-z mass below 1 - delta");

  // Lemma 5: average-case modulus at (gamma, eps) gives worst-case at (gamma/delta, eps + delta).
  const Rational gamma = max_of(delta / static_cast<long>(1 + below(rng, 2)), q(1, 8));
  const auto cls = random_class(rng, n, m, 1 + below(rng, 4));
  Rational eps(0);
  for (const auto& d : cls) eps = max_of(eps, modulus_min(d, j, gamma, true).value);
  const auto worst = modulus_cond(j, cls, EntropyParams(gamma / delta, eps + delta), false);
  expect_that(out, worst.holds, "Lemma 5: worst-case modulus fails at (gamma/delta, eps + delta)");
  out.certificate = {{"m", m},
                     {"delta", rj(delta)},
                     {"gamma_new", rj(split.gamma_new)},
                     {"good_mass", rj(split.good_mass)},
                     {"gamma", rj(gamma)},
                     {"eps_avg", rj(eps)},
                     {"worst_case_at_converted", rj(worst.worst)},
                     {"converted_eps", rj(eps + delta)}};
  track_margin(out, good - (1 - delta));
  track_margin(out, eps + delta - worst.worst);
  return out;
}

TrialOutcome mod_chain(std::uint64_t trial, Rng& rng) {
  const unsigned n = 2 + static_cast<unsigned>(below(rng, 2));
  const unsigned m1 = 1 + static_cast<unsigned>(below(rng, 2));
  const unsigned m2 = static_cast<unsigned>(below(rng, 3));
  const std::size_t cells = std::size_t{1} << (n + m1 + m2);
  const std::size_t support = (rng() & 1u) ? 2 + below(rng, cells - 1) : 0;
  const Joint j3 = random_joint(rng, n, m1 + m2, support, 10, ZPair{m1, m2});
  const std::size_t members = trial % 20 == 19 ? 64 : 1 + below(rng, 8);
  const auto cls = random_class(rng, n, m1 + m2, members);
  const Rational gamma = q(1, 2 + 2 * static_cast<long>(below(rng, 2)));

  Rational eps(0);
  for (const auto& a : modulus_chain_rule(j3, cls, EntropyParams(gamma, Rational(1)))) {
    for (const auto& v : a.slice_values) eps = max_of(eps, v);
  }
  const auto arts = modulus_chain_rule(j3, cls, EntropyParams(gamma, eps));
  const Rational scale = pow2(static_cast<long>(m2));
  TrialOutcome out;
  Rational worst_mod(0), worst_guess(0);
  for (const auto& a : arts) {
    const Distinguisher& d = cls[a.member];
    const Rational mod = advantage_profile(d, j3, a.witness).modulus;
    const Rational guess = cond_guess_prob_avg(a.witness);
    expect_that(out, mod == a.modulus && guess == a.avg_guess, "certificate does not recompute");
    expect_that(out, mod <= scale * eps, "Theorem 3: modulus aggregate above 2^m2 eps");
    expect_that(out, guess <= scale * gamma, "Theorem 3: avg guess prob above 2^m2 gamma");
    worst_mod = max_of(worst_mod, mod);
    worst_guess = max_of(worst_guess, guess);
  }
  // Independent engine re-check of the chain-rule conclusion.
  const Rational cap = min_of(scale * gamma, Rational(1));
  // The modulus aggregate never exceeds 1, so clamping the level loses nothing.
  const auto recheck = modulus_cond(j3, cls, EntropyParams(cap, min_of(scale * eps, Rational(1))), true);
  expect_that(out, recheck.holds, "engine re-check of the chain-rule conclusion fails");
  out.certificate = {{"n", n},          {"m1", m1},
                     {"m2", m2},        {"members", members},
                     {"gamma", rj(gamma)}, {"eps", rj(eps)},
                     {"eps_bound", rj(scale * eps)}, {"gamma_bound", rj(scale * gamma)},
                     {"max_modulus", rj(worst_mod)}, {"max_avg_guess", rj(worst_guess)},
                     {"engine_recheck", rj(recheck.worst)}};
  track_margin(out, scale * eps - worst_mod);
  return out;
}

TrialOutcome dec_mod(std::uint64_t, Rng& rng) {
  const unsigned n = 2 + static_cast<unsigned>(below(rng, 2)), m = 1 + static_cast<unsigned>(below(rng, 2));
  const std::size_t support = (rng() & 1u) ? 2 + below(rng, 10) : 0;
  const Joint j = random_joint(rng, n, m, support, 10);
  const auto cls = random_class(rng, n, m, 1 + below(rng, 6));
  const Rational gamma = q(1, 2 + 2 * static_cast<long>(below(rng, 2)));
  const auto dec = decomposable_min(cls, j, gamma);
  TrialOutcome out;
  // Tight level first, then a random looser one.
  const Rational loose = dec.value + q(static_cast<long>(below(rng, 8)), 64);
  Rational mod_worst(0);
  for (const Rational& eps : {dec.value, loose}) {
    const EntropyParams params(gamma, eps);
    expect_that(out, decomposable_check(j, cls, params).holds, "decomposable check fails at its own optimum");
    const auto mod = modulus_cond(j, cls, params, true);
    expect_that(out, mod.holds, "Theorem 4: decomposable holds but modulus fails");
    mod_worst = mod.worst;
    if (eps == dec.value) track_margin(out, eps - mod.worst);
  }
  out.certificate = {{"n", n}, {"m", m}, {"members", cls.size()}, {"gamma", rj(gamma)},
                     {"decomposable_min", rj(dec.value)}, {"modulus_worst", rj(mod_worst)},
                     {"loose_eps", rj(loose)}};
  return out;
}

TrialOutcome met_mod(std::uint64_t trial, Rng& rng) {
  const unsigned t = static_cast<unsigned>(trial % 2);
  const unsigned m = 1 + static_cast<unsigned>(below(rng, 3));
  const unsigned n = 2 + static_cast<unsigned>(below(rng, 2));
  const Rational gamma = q(1, 2 + 2 * static_cast<long>(below(rng, 2)));
  struct Inst {
    Joint j;
    Distinguisher d;
    Rational violation;
  };
  const auto inst = generate_until(
      rng,
      [&](Rng& r) {
        Joint j = random_joint(r, n, m, 2 + below(r, std::size_t{4} << m), 10);
        Distinguisher d = random_boolean(r, n, m);
        Rational v = modulus_min(d, j, gamma, false).value;
        return Inst{std::move(j), std::move(d), std::move(v)};
      },
      [](const Inst& i) { return i.violation > 0; });
  const auto r = heavy_truncation(inst.d, inst.j, gamma, t);
  const Rational recomputed = expect(r.truncated, inst.j) - max_feasible_expectation(r.truncated, inst.j, gamma, false);
  TrialOutcome out;
  expect_that(out, recomputed == r.advantage, "truncated advantage does not recompute");
  expect_that(out, recomputed >= r.original / pow2(static_cast<long>(t)), "Theorem 5: advantage below 2^-t times original");
  out.certificate = {{"n", n},
                     {"m", m},
                     {"t", t},
                     {"gamma", rj(gamma)},
                     {"original", rj(r.original)},
                     {"advantage", rj(recomputed)},
                     {"bound", rj(r.bound)},
                     {"kept", r.kept},
                     {"size_overhead", truncation_overhead(m, t)}};
  track_margin(out, recomputed - r.bound);
  return out;
}

// X|z sits on one or two points where D' = 1, so the worst-case modulus
// violation at gamma' = 1/4 is 3/4 or 1/2 per z.
constexpr unsigned kSampN = 11;

TrialOutcome samp_mod(std::uint64_t trial, Rng& rng) {
  const unsigned n = kSampN, m = 1;
  const std::size_t nx = std::size_t{1} << n, nz = 2;
  const Rational gamma = q(1, 4);
  const auto zmass = random_dyadic(rng, nz, 6);
  std::vector<Rational> probs(nx * nz, Rational(0)), vals(nx * nz, Rational(0));
  for (std::size_t z = 0; z < nz; ++z) {
    const std::size_t width = 1 + below(rng, 2);
    const std::size_t first = below(rng, nx - 1);
    const auto w = width == 1 ? std::vector<Rational>{Rational(1)} : std::vector<Rational>{q(1, 4), q(3, 4)};
    for (std::size_t i = 0; i < width; ++i) {
      probs[(first + i) * nz + z] = zmass[z] * w[i];
      vals[(first + i) * nz + z] = 1;
    }
  }
  // Keep every z supported so the violation stays >= 1/2.
  for (std::size_t z = 0; z < nz; ++z) {
    if (zmass[z] == 0) {
      return samp_mod(trial, rng);
    }
  }
  const Joint j(Domain(n), Domain(m), std::move(probs));
  const Distinguisher d(Domain(n), Domain(m), std::move(vals), DKind::Boolean, 2 * n);
  const auto core = core_lemma_event(d, j, gamma, modulus_min(d, j, gamma, false).value);
  const Rational eps = core.violation;
  const Sampler sampler{Domain(n), Domain(m), {Dist::uniform(Domain(n)), Dist::uniform(Domain(n))}, n};
  const auto art = sampler_distinguisher(core.chosen, j, sampler, eps);
  const Rational ycap = q(1, static_cast<long>(nx));
  TrialOutcome out;
  expect_that(out, ycap <= gamma / (2 * static_cast<long>(art.samples)), "sampler entropy below the proof's requirement");
  expect_that(out, art.accept_x >= art.bound_x, "Claim: P[D''(X,Z)=1] below eps^2/32");
  expect_that(out, art.accept_y * static_cast<long>(art.samples + 1) <= 1, "Claim: P[D''(Y',Z)=1] above 1/(ell+1)");
  expect_that(out, art.gap >= art.bound_y, "Theorem 6: gap below eps^2/64");
  const auto mc = sampler_monte_carlo(core.chosen, j, sampler, art, 100000, trial);
  expect_that(out, mc.within, "Monte Carlo estimate outside 4 sigma of the exact acceptance");
  const Rational proof_eps = eps * eps / 64;
  out.certificate = {{"eps", rj(eps)},
                     {"samples", art.samples},
                     {"accept_x", to_double(art.accept_x)},
                     {"accept_y", to_double(art.accept_y)},
                     {"gap", to_double(art.gap)},
                     {"bound", rj(art.bound_y)},
                     {"proof_level_bound", rj(proof_eps * proof_eps / 64)},
                     {"size", art.size},
                     {"mc_x", mc.estimate_x},
                     {"mc_y", mc.estimate_y},
                     {"sigma_x", mc.sigma_x},
                     {"sigma_y", mc.sigma_y}};
  track_margin(out, art.gap - art.bound_y);
  return out;
}

constexpr unsigned kCountN = 12;

TrialOutcome count_mod(std::uint64_t trial, Rng& rng) {
  TrialOutcome out;
  struct ClaimCase {
    unsigned n, k;
    Rational d1, d2;
  };
  static const std::vector<ClaimCase> claims{{4, 2, q(1, 2), q(1, 4)}, {3, 2, q(1, 2), q(1, 4)}, {5, 2, q(1, 2), q(1, 8)}};
  if (trial < claims.size()) {
    const auto& c = claims[trial];
    const auto r = chernoff_claim(c.n, c.k, c.d1, c.d2);
    expect_that(out, r.holds, "Claim 3: binomial failure probability above 2 delta''");
    out.certificate = {{"kind", "claim"}, {"n", c.n}, {"k", c.k}, {"delta1", rj(c.d1)}, {"delta2", rj(c.d2)},
                       {"samples", r.samples}, {"worst_failure", rj(r.worst_failure)}, {"bound", rj(r.bound)}};
    track_margin(out, r.bound - r.worst_failure);
    return out;
  }
  // Oracle mode: violating columns hold X inside a 1- or 2-point D'; the other
  // columns put X outside D' so the adversary's best move there is to accept.
  const unsigned n = kCountN, m = 1 + static_cast<unsigned>(below(rng, 2));
  const std::size_t nx = std::size_t{1} << n, nz = std::size_t{1} << m;
  const Rational gamma = q(1, 4);
  struct Inst {
    Joint j;
    Distinguisher d;
    Rational violation;
  };
  const auto inst = generate_until(
      rng,
      [&](Rng& r) {
        const auto zmass = random_dyadic(r, nz, 4);
        std::vector<Rational> probs(nx * nz, Rational(0)), vals(nx * nz, Rational(0));
        for (std::size_t z = 0; z < nz; ++z) {
          const bool violating = z == 0 || (r() & 1u);
          const std::size_t ones = violating ? 1 + below(r, 2) : 1 + below(r, 4);
          const std::size_t first = below(r, nx - 8);
          for (std::size_t i = 0; i < ones; ++i) vals[(first + i) * nz + z] = 1;
          const std::size_t where = violating ? first : first + ones;
          probs[where * nz + z] = zmass[z];
        }
        Joint j(Domain(n), Domain(m), std::move(probs));
        Distinguisher d(Domain(n), Domain(m), std::move(vals), DKind::Boolean, 2 * n);
        Rational v = modulus_min(d, j, gamma, false).value;
        return Inst{std::move(j), std::move(d), std::move(v)};
      },
      [](const Inst& i) { return i.violation >= q(1, 2); });
  const auto core = core_lemma_event(inst.d, inst.j, gamma, inst.violation);
  CountParams params;
  params.gamma_prime = gamma;
  params.eps_prime = inst.violation;
  params.mode = CountMode::ExactOracle;
  const auto art = approx_count_distinguisher(core.chosen, inst.j, params);
  const Rational recomputed =
      expect(art.acceptance, inst.j) - max_feasible_expectation(art.acceptance, inst.j, art.gamma_y, false);
  expect_that(out, recomputed == art.gap, "gap does not recompute");
  expect_that(out, pow(art.factor, params.and_copies) >= 4, "conjunction factor too small");
  expect_that(out, art.estimator_failure <= art.bound, "majority failure above eps'^2/64");
  expect_that(out, art.gap >= art.bound, "Theorem 8: gap below eps'^2/64 under adversarial answers");
  out.certificate = {{"kind", "oracle"},
                     {"m", m},
                     {"eps", rj(inst.violation)},
                     {"gamma_y", rj(art.gamma_y)},
                     {"factor", rj(art.factor)},
                     {"copies", params.and_copies},
                     {"majority_repeats", art.samples},
                     {"majority_failure", rj(art.estimator_failure)},
                     {"conjunction_size", art.conjunction_size},
                     {"majority_size", art.majority_size},
                     {"gap", rj(art.gap)},
                     {"bound", rj(art.bound)}};
  track_margin(out, art.gap - art.bound);
  return out;
}

TrialOutcome sq_mod(std::uint64_t, Rng& rng) {
  const unsigned n = 1 + static_cast<unsigned>(below(rng, 3)), m = static_cast<unsigned>(below(rng, 3));
  const Joint x = random_joint(rng, n, m, 0, 10);
  // Y shares the z-marginal of X.
  std::vector<Dist> cols;
  for (std::size_t z = 0; z < x.z_size(); ++z) cols.emplace_back(Domain(n), random_dyadic(rng, x.x_size(), 8));
  const Joint y = Joint::from_conditionals(x.z_marginal_dist(), cols);
  const auto cls = random_class(rng, n, m, 1 + below(rng, 8));
  TrialOutcome out;
  Rational worst_mod(0), worst_sq(0);
  for (const auto& d : cls) {
    const Rational mod = advantage_profile(d, x, y).modulus;
    const Rational sq = squared_aggregate(d, x, y);
    expect_that(out, mod * mod <= sq, "Theorem 7: squared modulus exceeds the squared aggregate");
    track_margin(out, sq - mod * mod);
    worst_mod = max_of(worst_mod, mod);
    worst_sq = max_of(worst_sq, sq);
  }
  out.certificate = {{"n", n}, {"m", m}, {"members", cls.size()}, {"max_modulus", rj(worst_mod)},
                     {"max_squared", rj(worst_sq)}};
  return out;
}

TrialOutcome real_bool(std::uint64_t, Rng& rng) {
  const unsigned n = 3, m = 1 + static_cast<unsigned>(below(rng, 2));
  const Rational gamma = q(1, 2 + 2 * static_cast<long>(below(rng, 2)));
  struct Inst {
    Joint j;
    Distinguisher d;
    Rational adv;
  };
  const auto inst = generate_until(
      rng,
      [&](Rng& r) {
        Joint j = random_joint(r, n, m, 2 + below(r, 6), 10);
        Distinguisher d = random_real(r, n, m, 8);
        Rational adv = expect(d, j) - max_feasible_expectation(d, j, gamma, false);
        return Inst{std::move(j), std::move(d), std::move(adv)};
      },
      [](const Inst& i) { return i.adv > 0; });
  TrialOutcome out;
  try {
    const auto r = real_to_boolean(inst.d, inst.j, gamma, inst.adv);
    const Rational recomputed =
        expect(r.boolean, inst.j) - max_feasible_expectation(r.boolean, inst.j, gamma, false);
    expect_that(out, recomputed == r.boolean_advantage, "boolean advantage does not recompute");
    expect_that(out, recomputed >= inst.adv, "Theorem 10: boolean advantage below the real one");
    out.certificate = {{"m", m},          {"gamma", rj(gamma)}, {"real_advantage", rj(inst.adv)},
                       {"threshold", rj(r.threshold)}, {"boolean_advantage", rj(recomputed)},
                       {"candidates", r.scan.size()}};
    track_margin(out, recomputed - inst.adv);
  } catch (const Error& e) {
    out.violation = std::string("Theorem 10: ") + e.what();
    out.certificate = {{"real_advantage", rj(inst.adv)}};
  }
  return out;
}

TrialOutcome met_hill(std::uint64_t, Rng& rng) {
  const unsigned n = 2 + static_cast<unsigned>(below(rng, 2)), m = 1 + static_cast<unsigned>(below(rng, 2));
  const Joint j = random_joint(rng, n, m, 2 + below(rng, 4), 6);
  const auto cls = complement_closure(random_class(rng, n, m, 1 + below(rng, 16)));
  const Rational gamma = q(1, 2 + 2 * static_cast<long>(below(rng, 2)));
  const Rational delta(1, 8);
  TrialOutcome out;
  const auto feasible = metric_to_hill_boost(j, cls, gamma, Rational(1), delta);
  const Rational value = feasible.game_value;
  const auto at_value = metric_to_hill_boost(j, cls, gamma, value, delta);
  expect_that(out, at_value.hill_holds && at_value.witness.has_value(), "LP game value is not attained");
  if (at_value.witness) {
    expect_that(out, cond_guess_prob_avg(*at_value.witness) <= gamma, "HILL witness exceeds the guessing cap");
    for (const auto& d : cls) {
      expect_that(out, advantage(d, j, *at_value.witness) <= value, "HILL witness is distinguished beyond eps");
    }
  }
  Json cert{{"n", n}, {"m", m}, {"members", cls.size()}, {"gamma", rj(gamma)}, {"game_value", rj(value)}};
  if (value > delta) {
    const Rational eps = max_of(value - delta - q(1, 64), Rational(0));
    const auto r = metric_to_hill_boost(j, cls, gamma, eps, delta);
    expect_that(out, !r.hill_holds, "LP reports HILL at an infeasible level");
    expect_that(out, r.weights.size() <= r.length_bound, "combination longer than the bound");
    Rational total(0);
    for (const auto& [w, i] : r.weights) total += w;
    expect_that(out, total == 1, "combination weights do not sum to 1");
    if (r.combo) {
      const auto range = metric_range(*r.combo, j, gamma, true);
      const Rational adv = range.target - range.upper;
      expect_that(out, adv == r.combo_advantage, "combination advantage does not recompute");
      expect_that(out, adv >= eps, "Theorem 1: combination advantage below eps");
      track_margin(out, adv - eps);
      cert["eps"] = rj(eps);
      cert["rounds"] = r.rounds;
      cert["length"] = r.weights.size();
      cert["length_bound"] = r.length_bound;
      cert["combo_advantage"] = rj(adv);
    } else {
      out.violation = "boosting produced no combination";
    }
  }
  out.certificate = std::move(cert);
  return out;
}

std::vector<Circuit> toy_map() {
  std::vector<Circuit> f;
  for (const char* text : {"x0", "x1", "and(x0,x1)", "xor(x0,x1)"}) f.push_back(parse_circuit(text, 2, 0));
  return f;
}

TrialOutcome tight(std::uint64_t trial, Rng& rng) {
  std::vector<Circuit> f;
  if (trial == 0) {
    f = toy_map();
  } else {
    static const std::vector<std::string> pool{"x0", "x1", "not(x0)", "not(x1)", "and(x0,x1)",
                                               "or(x0,x1)", "xor(x0,x1)", "0", "1"};
    f = generate_until(
        rng,
        [&](Rng& r) {
          std::vector<Circuit> g;
          for (int b = 0; b < 4; ++b) g.push_back(parse_circuit(pick(r, pool), 2, 0));
          return g;
        },
        [](const std::vector<Circuit>& g) {
          std::vector<unsigned> images;
          for (std::uint64_t u = 0; u < 4; ++u) {
            unsigned y = 0;
            for (std::size_t b = 0; b < g.size(); ++b) y |= static_cast<unsigned>(g[b].eval(u, 0)) << b;
            images.push_back(y);
          }
          std::sort(images.begin(), images.end());
          return std::adjacent_find(images.begin(), images.end()) == images.end();
        });
  }
  const auto rep = tightness_demo(f);
  const Rational lp_min = expect(rep.d, rep.joint) - lp_metric_avg_extreme(rep.d, rep.joint, rep.cap, true);
  TrialOutcome out;
  expect_that(out, lp_min == rep.min_advantage, "LP minimum disagrees with the greedy minimum");
  expect_that(out, lp_min >= q(1, 12), "Lemma 9: advantage below 1/12");
  expect_that(out, rep.good_mass >= q(2, 3), "Lemma 9: good mass below 2/3");
  expect_that(out, rep.per_good_gap >= q(5, 8), "Lemma 9: per-good gap below 5/8");
  expect_that(out, rep.decomposition == q(1, 12), "Lemma 9: decomposition is not 1/12");
  Json outputs = Json::array();
  for (const auto& c : f) outputs.push_back(print_circuit(c));
  out.certificate = {{"f", outputs},
                     {"min_advantage", rj(lp_min)},
                     {"good_mass", rj(rep.good_mass)},
                     {"cap_after_split", rj(rep.cap_after_split)},
                     {"per_good_gap", rj(rep.per_good_gap)},
                     {"decomposition", rj(rep.decomposition)},
                     {"size", rep.d.size()}};
  track_margin(out, lp_min - q(1, 12));
  return out;
}

TrialOutcome core(std::uint64_t, Rng& rng) {
  const unsigned n = 3, m = 1 + static_cast<unsigned>(below(rng, 2));
  const Rational gamma = q(1, 2 + 2 * static_cast<long>(below(rng, 2)));
  struct Inst {
    Joint j;
    Distinguisher d;
    Rational violation;
  };
  const auto inst = generate_until(
      rng,
      [&](Rng& r) {
        Joint j = random_joint(r, n, m, 2 + below(r, 8), 10);
        Distinguisher d = random_boolean(r, n, m);
        Rational v = modulus_min(d, j, gamma, false).value;
        return Inst{std::move(j), std::move(d), std::move(v)};
      },
      [](const Inst& i) { return i.violation > 0; });
  const auto r = core_lemma_event(inst.d, inst.j, gamma, inst.violation);
  const Rational p_d = core_event_probability(inst.d, inst.j, gamma, inst.violation);
  const Rational p_c = core_event_probability(complement(inst.d), inst.j, gamma, inst.violation);
  TrialOutcome out;
  expect_that(out, r.p_star == max_of(p_d, p_c), "chosen event probability is not the larger of D and D^c");
  expect_that(out, r.p_star >= r.bound, "Lemma 8: event probability below eps^2/16");
  out.certificate = {{"m", m},
                     {"gamma", rj(gamma)},
                     {"eps", rj(inst.violation)},
                     {"p_d", rj(p_d)},
                     {"p_complement", rj(p_c)},
                     {"p_per_z", rj(r.p_per_z)},
                     {"use_complement", r.use_complement},
                     {"bound", rj(r.bound)}};
  track_margin(out, r.p_star - r.bound);
  return out;
}

TrialOutcome leak(std::uint64_t, Rng& rng) {
  const unsigned n = 3, m = 1 + static_cast<unsigned>(below(rng, 2));
  const Joint j = random_joint(rng, n, m, (rng() & 1u) ? 2 + below(rng, 10) : 0, 10);
  const Dist y(Domain(n), random_dyadic(rng, std::size_t{1} << n, 8));
  const auto d = random_boolean(rng, n, 0);
  TrialOutcome out;
  try {
    const auto w = leakage_witness(d, j, y);
    Rational avg(0);
    for (std::size_t z = 0; z < j.z_size(); ++z) {
      if (!w.witnesses[z]) continue;
      Rational top(0);
      for (const auto& p : w.witnesses[z]->probs()) top = max_of(top, p);
      expect_that(out, top <= w.caps[z], "witness exceeds its cap");
      expect_that(out, w.gaps[z] * j.z_mass(z) <= w.epsilon, "Lemma 6: gap above eps / P(z)");
      avg += j.z_mass(z) * top;
    }
    const Rational bound = pow2(static_cast<long>(m)) * w.gamma;
    expect_that(out, avg <= bound, "assembled witness exceeds 2^m gamma on average");
    out.certificate = {{"m", m}, {"eps", rj(w.epsilon)}, {"gamma", rj(w.gamma)}, {"caps", rational_array(w.caps)},
                       {"gaps", rational_array(w.gaps)}, {"avg_guess", rj(avg)}};
    track_margin(out, bound - avg);
  } catch (const Error& e) {
    out.violation = std::string("Lemma 6: ") + e.what();
  }
  return out;
}

TrialOutcome ledger(std::uint64_t trial, Rng&) {
  static const std::vector<Rational> gammas{q(1, 16), q(1, 256), q(1, 1024)};
  static const std::vector<Rational> epss{q(1, 4), q(1, 16), q(1, 64)};
  const Rational& gamma = gammas[trial % 3];
  const Rational& eps = epss[(trial / 3) % 3];
  const unsigned t = static_cast<unsigned>((trial / 9) % 3);
  const unsigned m = 2 + static_cast<unsigned>((trial / 27) % 2);
  const LedgerInputs in{EntropyParams(gamma, eps, 1'000'000), 10, m, t, 50};
  const double k = neg_log2(gamma), log_inv_eps = neg_log2(eps), e = to_double(eps);
  struct Expect {
    std::string row;
    double k;
    double eps;
  };
  const std::vector<Expect> rows{{"decomposable", k, e},
                                 {"samplable", k - 2 * log_inv_eps - 7, 8 * std::sqrt(e)},
                                 {"np-oracle", k - log_inv_eps, 8 * std::sqrt(e)},
                                 {"high-entropy", k - log_inv_eps, 8 * std::sqrt(e)},
                                 {"none", k, std::ldexp(e, static_cast<int>(t))},
                                 {"squared", k, std::sqrt(e)}};
  TrialOutcome out;
  Json cert = Json::array();
  for (const auto& ex : rows) {
    const auto row = conversion_ledger(ex.row, in);
    expect_that(out, std::abs(row.k.approx - ex.k) < 1e-9, "row " + ex.row + ": k' arithmetic");
    expect_that(out, std::abs(row.epsilon.approx - ex.eps) < 1e-12, "row " + ex.row + ": eps' arithmetic");
    expect_that(out, !row.size.provenance.empty(), "row " + ex.row + ": size has no provenance");
    Json r{{"row", ex.row},
           {"k", row.k.approx},
           {"epsilon", row.epsilon.exact ? rj(*row.epsilon.exact) : Json(row.epsilon.approx)},
           {"size", row.size.exact ? rj(*row.size.exact) : Json(row.size.formula)},
           {"size_provenance", row.size.provenance}};
    cert.push_back(std::move(r));
  }
  out.certificate = {{"gamma", rj(gamma)}, {"eps", rj(eps)}, {"t", t}, {"m", m}, {"rows", std::move(cert)}};
  return out;
}

TrialOutcome lp_equiv(std::uint64_t, Rng& rng) {
  const unsigned n = 1 + static_cast<unsigned>(below(rng, 3));
  const unsigned m = static_cast<unsigned>(below(rng, 5 - n));
  const std::size_t cells = std::size_t{1} << (n + m);
  const Joint j = random_joint(rng, n, m, (rng() & 1u) ? 1 + below(rng, cells) : 0, 8);
  const auto cls = random_class(rng, n, m, 1 + below(rng, 3));
  const long nx = 1L << n;
  const Rational gamma = q(1 + static_cast<long>(below(rng, static_cast<std::size_t>(nx))), nx);
  TrialOutcome out;
  std::size_t compared = 0;
  for (const auto& d : cls) {
    const auto range = metric_range(d, j, gamma, true);
    expect_that(out, range.upper == lp_metric_avg_extreme(d, j, gamma, true), "metric-avg upper: greedy != LP");
    expect_that(out, range.lower == lp_metric_avg_extreme(d, j, gamma, false), "metric-avg lower: greedy != LP");
    expect_that(out, modulus_min(d, j, gamma, true).value == lp_modulus_avg(d, j, gamma), "modulus-avg: greedy != LP");
    compared += 3;
  }
  const Rational dec = decomposable_min(cls, j, gamma).value;
  expect_that(out, dec == lp_decomposable(cls, j, gamma), "decomposable: greedy != LP");
  out.certificate = {{"n", n}, {"m", m}, {"gamma", rj(gamma)}, {"members", cls.size()}, {"comparisons", compared + 1},
                     {"decomposable", rj(dec)}};
  return out;
}

const std::map<std::string, TrialFn>& registry() {
  static const std::map<std::string, TrialFn> suites{
      {"IT-CHAIN", it_chain}, {"AVG-WORST", avg_worst}, {"MOD-CHAIN", mod_chain}, {"DEC-MOD", dec_mod},
      {"MET-MOD", met_mod},   {"SAMP-MOD", samp_mod},   {"SQ-MOD", sq_mod},       {"COUNT-MOD", count_mod},
      {"REAL-BOOL", real_bool}, {"MET-HILL", met_hill}, {"TIGHT", tight},         {"CORE", core},
      {"LEAK", leak},         {"LEDGER", ledger},       {"LP-EQUIV", lp_equiv},
  };
  return suites;
}

}  // namespace

std::vector<Rational> random_dyadic(std::mt19937_64& rng, std::size_t len, unsigned bits) {
  require(len > 0, ErrorKind::InvalidArgument, "empty probability vector");
  require(bits <= 30, ErrorKind::InvalidArgument, "denominator too large");
  // Cut [0, 2^bits] at len - 1 random points.
  const long total = 1L << bits;
  std::vector<long> cuts{0, total};
  std::uniform_int_distribution<long> at(0, total);
  for (std::size_t i = 1; i < len; ++i) cuts.push_back(at(rng));
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) out.push_back(q(cuts[i + 1] - cuts[i], total));
  return out;
}

Scenario generate_instance(const InstanceSpec& spec, std::uint64_t seed) {
  require(spec.n >= 1 && spec.n + spec.m1 + spec.m2 <= 12, ErrorKind::InvalidArgument,
          "instance domains must satisfy 1 <= n and n + m <= 12");
  require(spec.denom_bits <= 20, ErrorKind::InvalidArgument, "denominator bits must be <= 20");
  Rng rng = trial_rng(seed, 0);
  const unsigned m = spec.m1 + spec.m2;
  std::optional<ZPair> pair;
  if (spec.m2 > 0) pair = ZPair{spec.m1, spec.m2};
  Scenario s;
  s.joint = random_joint(rng, spec.n, m, spec.support, spec.denom_bits, pair);
  for (std::size_t i = 0; i < spec.class_size; ++i) {
    s.cls.push_back(spec.real_valued ? random_real(rng, spec.n, m, 8) : random_boolean(rng, spec.n, m));
  }
  if (spec.complement_closed) s.cls = complement_closure(s.cls);
  s.params = EntropyParams(q(1, 2), q(1, 8));
  s.seed = seed;
  return s;
}

std::vector<std::string> suite_ids() {
  std::vector<std::string> out;
  for (const auto& [id, fn] : registry()) out.push_back(id);
  return out;
}

unsigned threads_from_env() {
  const char* v = std::getenv("ENTLAB_THREADS");
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (v == nullptr) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || n < 1) return 1;
  return std::min(static_cast<unsigned>(n), hw);
}

SuiteReport run_suite(const std::string& id, std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  const auto& reg = registry();
  const auto it = reg.find(id);
  require(it != reg.end(), ErrorKind::UnknownSuite, "unknown suite '" + id + "'");
  require(trials > 0, ErrorKind::InvalidArgument, "a suite needs at least one trial");
  const TrialFn& fn = it->second;

  const auto started = std::chrono::steady_clock::now();
  std::vector<TrialOutcome> results(trials);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t t = next++; t < trials; t = next++) {
      Rng rng = trial_rng(seed, t);
      try {
        results[t] = fn(t, rng);
      } catch (const Error& e) {
        results[t].violation = std::string("error: ") + e.what();
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), trials));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SuiteReport r;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  r.suite = id;
  r.trials = trials;
  r.seed = seed;
  r.instances = trials;
  std::optional<Rational> margin;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto& res = results[t];
    res.certificate["trial"] = t;
    if (res.violation) r.violations.push_back({{"trial", t}, {"reason", *res.violation}, {"certificate", res.certificate}});
    if (res.margin) margin = margin ? min_of(*margin, *res.margin) : *res.margin;
    r.certificates.push_back(std::move(res.certificate));
  }
  r.summary["violations"] = r.violations.size();
  if (margin) r.summary["min_margin"] = to_double(*margin);
  return r;
}

Json report_to_json(const SuiteReport& r, bool with_timing) {
  Json out;
  out["suite"] = r.suite;
  out["trials"] = r.trials;
  out["seed"] = r.seed;
  out["instances"] = r.instances;
  out["pass"] = r.pass();
  out["summary"] = r.summary;
  if (with_timing) out["wall_seconds"] = r.wall_seconds;
  out["violations"] = r.violations;
  out["certificates"] = r.certificates;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct GapProbe {
  Rational weaker;    // optimum of the weaker notion (metric)
  Rational stronger;  // optimum of the stronger notion
};

GapProbe probe(const std::string& target, const Joint& j, const DistinguisherClass& cls, const Rational& gamma) {
  const EntropyParams p(gamma, Rational(0));
  GapProbe g{metric_cond_avg(j, cls, p).worst, Rational(0)};
  g.stronger = target == "metric-vs-modulus" ? modulus_cond(j, cls, p, true).worst : decomposable_min(cls, j, gamma).value;
  return g;
}

}  // namespace

SeparationReport search_separation(const std::string& target, std::uint64_t budget, std::uint64_t seed,
                                   const InstanceSpec& shape) {
  require(target == "metric-vs-modulus" || target == "metric-vs-decomposable", ErrorKind::InvalidArgument,
          "unknown separation target '" + target + "'");
  require(shape.n >= 1 && shape.n + shape.m1 <= 4, ErrorKind::InvalidArgument, "search shape must satisfy n + m <= 4");
  const unsigned n = shape.n, m = shape.m1;
  const std::size_t cells = std::size_t{1} << (n + m);
  SeparationReport rep;
  rep.target = target;
  rep.budget = budget;
  rep.seed = seed;
  rep.best_gap = 0;
  std::vector<Rational> gammas;
  for (long k = 1; k <= static_cast<long>(n); ++k) gammas.push_back(pow2(-k));

  auto consider = [&](const Joint& j, const Distinguisher& d, const Rational& gamma, const char* phase) {
    ++rep.examined;
    const DistinguisherClass cls{d};
    const auto g = probe(target, j, cls, gamma);
    const Rational gap = g.stronger - g.weaker;
    if (gap > rep.best_gap) {
      rep.best_gap = gap;
      rep.found = true;
      Scenario s;
      s.joint = j;
      s.cls = cls;
      s.params = EntropyParams(gamma, g.weaker);
      rep.witness = std::move(s);
      rep.details = {{"phase", phase},
                     {"examined_at", rep.examined},
                     {"weaker_optimum", rj(g.weaker)},
                     {"stronger_optimum", rj(g.stronger)}};
    }
  };

  // Exhaustive: joints with two half-masses (or one full mass), every boolean table.
  const std::size_t tables = cells <= 8 ? std::size_t{1} << cells : 0;
  for (std::size_t a = 0; a < cells && rep.examined < budget; ++a) {
    for (std::size_t b = a; b < cells && rep.examined < budget; ++b) {
      std::vector<Rational> probs(cells, Rational(0));
      probs[a] += q(1, 2);
      probs[b] += q(1, 2);
      const Joint j(Domain(n), Domain(m), probs);
      for (std::size_t t = 0; t < (tables ? tables : 256) && rep.examined < budget; ++t) {
        std::vector<Rational> v(cells, Rational(0));
        Rng local = trial_rng(seed, t);
        for (std::size_t c = 0; c < cells; ++c) v[c] = tables ? static_cast<long>((t >> c) & 1u) : static_cast<long>(local() & 1u);
        const auto d = Distinguisher::from_table(Domain(n), Domain(m), std::move(v));
        for (const auto& g : gammas) {
          if (rep.examined >= budget) break;
          consider(j, d, g, "exhaustive");
        }
      }
    }
  }
  // Random phase with the remaining budget.
  Rng rng = trial_rng(seed, ~std::uint64_t{0});
  while (rep.examined < budget) {
    const Joint j = random_joint(rng, n, m, 1 + below(rng, cells), 6);
    consider(j, random_boolean(rng, n, m), pick(rng, gammas), "random");
  }
  return rep;
}

Json separation_to_json(const SeparationReport& r) {
  Json out;
  out["target"] = r.target;
  out["budget"] = r.budget;
  out["seed"] = r.seed;
  out["examined"] = r.examined;
  out["found"] = r.found;
  out["best_gap"] = rj(r.best_gap);
  out["details"] = r.details;
  if (r.witness) out["witness"] = scenario_to_json(*r.witness);
  return out;
}

}  // namespace entlab
