#include "entlab/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "entlab/engine.hpp"
#include "entlab/error.hpp"
#include "entlab/waterfill.hpp"

namespace entlab {

namespace {

Rational column_target(const Distinguisher& d, const Joint& j, std::size_t z) {
  Rational total(0);
  for (std::size_t x = 0; x < j.x_size(); ++x) total += d.at(x, z) * j.at(x, z);
  return total / j.z_mass(z);
}

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational total(0);
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

std::vector<Rational> to_vec(std::span<const Rational> s) { return {s.begin(), s.end()}; }

Rational max_entry(const std::vector<Rational>& v) {
  Rational best(0);
  for (const auto& r : v) best = max_of(best, r);
  return best;
}

void require_boolean(const Distinguisher& d, const char* what) {
  require(d.is_boolean(), ErrorKind::NonBooleanClass, std::string(what) + " needs a boolean distinguisher");
}

void check_domains(const Distinguisher& d, const Joint& j) {
  require(d.x_domain() == j.x_domain() && d.z_domain() == j.z_domain(), ErrorKind::DomainMismatch,
          "distinguisher and joint live on different domains");
}

// Per-z worst-case distances and the eq. (D) actions.
struct SignedDistances {
  std::vector<Rational> eps;
  std::vector<FlipAction> actions;
};

SignedDistances signed_distances(const Distinguisher& d, const Joint& j, const Rational& gamma) {
  SignedDistances out;
  const Rational cap = min_of(gamma, Rational(1));
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) {
      out.eps.emplace_back(0);
      out.actions.push_back(FlipAction::Zero);
      continue;
    }
    const Rational a = column_target(d, j, z);
    const auto iv = achievable_interval(d.column(z), cap);
    out.eps.push_back(distance_to(a, iv.lower, iv.upper));
    out.actions.push_back(a > iv.upper ? FlipAction::Keep : (a < iv.lower ? FlipAction::Flip : FlipAction::Zero));
  }
  return out;
}

Rational worst_case_advantage(const Distinguisher& d, const Joint& j, const Rational& gamma) {
  return expect(d, j) - max_feasible_expectation(d, j, gamma, false);
}

mpz_class binom(std::uint64_t n, std::uint64_t k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

// P[S in [lo, hi]] for S ~ Bin(ell, p), both ends inclusive, exact.
Rational binomial_range(std::uint64_t ell, const Rational& p, std::int64_t lo, std::int64_t hi) {
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(ell));
  if (lo > hi) return Rational(0);
  if (p == 0) return lo == 0 ? Rational(1) : Rational(0);
  if (p == 1) return hi == static_cast<std::int64_t>(ell) ? Rational(1) : Rational(0);
  const mpz_class a = p.get_num(), b = p.get_den(), rest = b - a;
  // term(s) = C(ell, s) a^s (b-a)^(ell-s); stepped with exact divisions.
  mpz_class term, power;
  mpz_pow_ui(term.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(lo));
  mpz_pow_ui(power.get_mpz_t(), rest.get_mpz_t(), static_cast<unsigned long>(ell - static_cast<std::uint64_t>(lo)));
  term *= power;
  term *= binom(ell, static_cast<std::uint64_t>(lo));
  mpz_class total = term;
  for (std::int64_t s = lo; s < hi; ++s) {
    mpz_divexact(term.get_mpz_t(), term.get_mpz_t(), rest.get_mpz_t());
    term *= a;
    term *= static_cast<unsigned long>(ell - static_cast<std::uint64_t>(s));
    mpz_divexact_ui(term.get_mpz_t(), term.get_mpz_t(), static_cast<unsigned long>(s + 1));
    total += term;
  }
  mpz_class den;
  mpz_pow_ui(den.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(ell));
  Rational out(total, den);
  out.canonicalize();
  return out;
}

// Largest integer strictly below r.
std::int64_t floor_below(const Rational& r) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  if (Rational(f) == r) f -= 1;
  return f.get_si();
}

std::int64_t ceil_of(const Rational& r) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return c.get_si();
}

}  // namespace

// ---------------------------------------------------------------------------

LeakageWitness leakage_witness(const Distinguisher& d, const Joint& jxz, const Dist& y) {
  require(d.z_size() == 1 && d.x_domain() == jxz.x_domain() && y.domain() == jxz.x_domain(),
          ErrorKind::DomainMismatch, "leakage witness: D must depend on x alone and share X's domain");
  require_boolean(d, "the leakage lemma");
  const auto col = d.column(0);
  const Dist xm = jxz.x_marginal();
  LeakageWitness out;
  out.epsilon = abs(dot(col, to_vec(xm.probs())) - dot(col, to_vec(y.probs())));
  out.gamma = guess_prob(y);
  out.certified = true;
  for (std::size_t z = 0; z < jxz.z_size(); ++z) {
    if (!jxz.supported(z)) {
      out.caps.emplace_back(0);
      out.gaps.emplace_back(0);
      out.witnesses.emplace_back(std::nullopt);
      continue;
    }
    const Rational pz = jxz.z_mass(z);
    const Rational cap = min_of(out.gamma / pz, Rational(1));
    const auto cond = condition(jxz, z);
    const Rational target = dot(col, to_vec(cond.probs()));
    auto w = interval_witness(col, cap, target);
    const Rational gap = abs(target - dot(col, w));
    const bool ok = gap <= out.epsilon / pz && max_entry(w) <= cap;
    require(ok, ErrorKind::InfeasibleWitness, "no witness within eps/P(z) at z=" + std::to_string(z));
    out.caps.push_back(cap);
    out.gaps.push_back(gap);
    out.witnesses.emplace_back(Dist(jxz.x_domain(), std::move(w)));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ChainRuleArtifact> modulus_chain_rule(const Joint& j3, const DistinguisherClass& cls,
                                                  const EntropyParams& params) {
  require(j3.pair().has_value(), ErrorKind::InvalidArgument, "chain rule needs a (Z1, Z2) pairing");
  const unsigned m2 = j3.pair()->m2;
  const std::size_t n1 = std::size_t{1} << j3.pair()->m1, n2 = std::size_t{1} << m2;
  const std::size_t nx = j3.x_size(), nz = j3.z_size();
  const Joint j13 = j3.drop_z2();
  const Rational scale = pow2(static_cast<long>(m2));
  std::vector<ChainRuleArtifact> out;

  for (std::size_t member = 0; member < cls.size(); ++member) {
    const Distinguisher& d = cls[member];
    check_domains(d, j3);
    require_boolean(d, "the modulus chain rule");
    ChainRuleArtifact art{member, j3, {}, 0, 0, scale * params.epsilon, scale * params.gamma, false};
    std::vector<Rational> probs(nx * nz, Rational(0));

    for (std::size_t z2 = 0; z2 < n2; ++z2) {
      std::vector<Rational> slice(nx * n1);
      for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t z1 = 0; z1 < n1; ++z1) slice[x * n1 + z1] = d.at(x, z1 * n2 + z2);
      }
      const Distinguisher ds(j13.x_domain(), j13.z_domain(), std::move(slice), DKind::Boolean);
      const ModulusMin mm = modulus_min(ds, j13, params.gamma, true);
      art.slice_values.push_back(mm.value);
      require(mm.value <= params.epsilon, ErrorKind::PreconditionFailed,
              "member " + std::to_string(member) + " slice z2=" + std::to_string(z2) + " has modulus minimum " +
                  to_string(mm.value) + " > eps");
      const Joint yz2 = projection_witness(ds, j13, mm.caps);

      for (std::size_t z1 = 0; z1 < n1; ++z1) {
        if (!j13.supported(z1)) continue;
        const Rational p1 = j13.z_mass(z1);
        std::vector<Rational> ycol(nx);
        for (std::size_t x = 0; x < nx; ++x) ycol[x] = yz2.at(x, z1) / p1;
        const Rational slice_gap = abs(column_target(ds, j13, z1) - dot(ds.column(z1), ycol));
        const std::size_t z = z1 * n2 + z2;
        if (!j3.supported(z)) continue;
        const Rational cond = j3.z_mass(z) / p1;  // P(z2 | z1)
        const Rational cap = min_of(max_entry(ycol) / cond, Rational(1));
        const auto col = d.column(z);
        const Rational target = column_target(d, j3, z);
        const auto w = interval_witness(col, cap, target);
        require(abs(target - dot(col, w)) <= slice_gap / cond, ErrorKind::InfeasibleWitness,
                "leakage step failed at z=" + std::to_string(z));
        for (std::size_t x = 0; x < nx; ++x) probs[x * nz + z] = j3.z_mass(z) * w[x];
      }
    }
    art.witness = Joint(j3.x_domain(), j3.z_domain(), std::move(probs), j3.pair());
    art.modulus = advantage_profile(d, j3, art.witness).modulus;
    art.avg_guess = cond_guess_prob_avg(art.witness);
    art.certified = art.modulus <= art.eps_bound && art.avg_guess <= art.gamma_bound;
    out.push_back(std::move(art));
  }
  return out;
}

// ---------------------------------------------------------------------------

Rational core_event_probability(const Distinguisher& d, const Joint& j, const Rational& gamma,
                                const Rational& epsilon) {
  check_domains(d, j);
  const Rational cap = min_of(gamma, Rational(1));
  const Rational quarter = epsilon / 4;
  Rational p(0);
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    const Rational top = achievable_interval(d.column(z), cap).upper;
    for (std::size_t x = 0; x < j.x_size(); ++x) {
      if (d.at(x, z) - top >= quarter) p += j.at(x, z);
    }
  }
  return p;
}

CoreLemmaResult core_lemma_event(const Distinguisher& d, const Joint& j, const Rational& gamma,
                                 const Rational& epsilon) {
  check_domains(d, j);
  const ModulusMin mm = modulus_min(d, j, gamma, false);
  require(mm.value >= epsilon && epsilon > 0, ErrorKind::HypothesisNotViolated,
          "modulus minimum " + to_string(mm.value) + " is below eps; the lemma does not apply");
  SignedDistances sd = signed_distances(d, j, gamma);
  Distinguisher per_z = flip_select(d, sd.actions);
  const Rational p_per_z = core_event_probability(per_z, j, gamma, epsilon);
  const Distinguisher dc = complement(d);
  const Rational p_d = core_event_probability(d, j, gamma, epsilon);
  const Rational p_dc = core_event_probability(dc, j, gamma, epsilon);
  const bool flip = p_dc > p_d;
  CoreLemmaResult out{mm.value,
                      std::move(sd.eps),
                      std::move(sd.actions),
                      std::move(per_z),
                      p_per_z,
                      flip,
                      flip ? dc : d,
                      flip ? p_dc : p_d,
                      epsilon * epsilon / 16,
                      false};
  out.certified = out.p_star >= out.bound;
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t truncation_overhead(unsigned m, unsigned t) {
  require(t <= m, ErrorKind::InvalidArgument, "truncation level t exceeds m");
  // Per kept z: an m-bit equality test (m literals, m-1 ANDs) and one XOR
  // for the flip; the kept branches are ORed and ANDed with D.
  const std::uint64_t kept = std::uint64_t{1} << (m - t);
  return (2 * std::uint64_t{m} + 1) * kept;
}

TruncationResult heavy_truncation(const Distinguisher& d, const Joint& j, const Rational& gamma, unsigned t) {
  check_domains(d, j);
  const unsigned m = j.z_domain().bits();
  const std::uint64_t overhead = truncation_overhead(m, t);
  SignedDistances sd = signed_distances(d, j, gamma);
  std::vector<std::size_t> order(j.z_size());
  for (std::size_t z = 0; z < order.size(); ++z) order[z] = z;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return j.z_mass(a) * sd.eps[a] > j.z_mass(b) * sd.eps[b];
  });
  const std::size_t keep = std::size_t{1} << (m - t);
  std::vector<FlipAction> actions(j.z_size(), FlipAction::Zero);
  std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(kept.begin(), kept.end());
  for (std::size_t z : kept) actions[z] = sd.actions[z];
  const Distinguisher flipped = flip_select(d, actions);
  Distinguisher truncated(d.x_domain(), d.z_domain(), flipped.values(), d.kind(), d.size() + overhead,
                          "truncate(t=" + std::to_string(t) + "," + d.provenance() + ")");
  Rational original(0);
  for (std::size_t z = 0; z < j.z_size(); ++z) original += j.z_mass(z) * sd.eps[z];
  TruncationResult out{std::move(truncated), std::move(kept), original, 0, original / pow2(static_cast<long>(t)), false};
  out.advantage = worst_case_advantage(out.truncated, j, gamma);
  out.certified = out.advantage >= out.bound;
  return out;
}

// ---------------------------------------------------------------------------

Joint Sampler::joint(const Joint& like) const {
  require(like.x_domain() == x_domain && like.z_domain() == z_domain && columns.size() == z_domain.size(),
          ErrorKind::DomainMismatch, "sampler and joint live on different domains");
  std::vector<Rational> probs(like.x_size() * like.z_size());
  for (std::size_t x = 0; x < like.x_size(); ++x) {
    for (std::size_t z = 0; z < like.z_size(); ++z) probs[x * like.z_size() + z] = like.z_mass(z) * columns[z][x];
  }
  return Joint(x_domain, z_domain, std::move(probs));
}

std::uint64_t sampler_sample_count(const Rational& eps) {
  require(eps > 0 && eps <= 1, ErrorKind::InvalidArgument, "eps must lie in (0,1]");
  const Rational bound = Rational(64) / (eps * eps);
  const std::int64_t ell = ceil_of(bound) - 1;
  require(ell >= 1 && static_cast<std::uint64_t>(ell) <= kMaxSamples, ErrorKind::LTooLarge,
          "ell = " + std::to_string(ell) + " exceeds the sample guard; choose a larger eps");
  return static_cast<std::uint64_t>(ell);
}

SamplerArtifact sampler_distinguisher(const Distinguisher& d_prime, const Joint& j, const Sampler& sampler,
                                      const Rational& eps) {
  check_domains(d_prime, j);
  SamplerArtifact out;
  out.samples = sampler_sample_count(eps);
  const std::size_t nx = j.x_size(), nz = j.z_size();
  std::vector<Rational> acc(nx * nz, Rational(0));
  for (std::size_t z = 0; z < nz; ++z) {
    const Dist& col = sampler.columns.at(z);
    // F_z(v-) = P[D'(Y'|z) < v] per distinct value, raised to the ell-th power.
    std::map<Rational, Rational> below;
    for (std::size_t y = 0; y < nx; ++y) below[d_prime.at(y, z)] += col[y];
    Rational running(0);
    for (auto& [v, m] : below) {
      const Rational here = m;
      m = pow(running, out.samples);
      running += here;
    }
    for (std::size_t x = 0; x < nx; ++x) acc[x * nz + z] = below.at(d_prime.at(x, z));
  }
  out.size = (out.samples + 1) * (d_prime.size() + sampler.size);
  out.acceptance = Distinguisher(d_prime.x_domain(), d_prime.z_domain(), std::move(acc), DKind::Randomized, out.size,
                                 "sampler(ell=" + std::to_string(out.samples) + "," + d_prime.provenance() + ")");
  out.accept_x = expect(out.acceptance, j);
  out.accept_y = expect(out.acceptance, sampler.joint(j));
  out.gap = out.accept_x - out.accept_y;
  out.bound_x = eps * eps / 32;
  out.bound_y = eps * eps / 64;
  out.certified = out.gap >= out.bound_y;
  return out;
}

MonteCarloCheck sampler_monte_carlo(const Distinguisher& d_prime, const Joint& j, const Sampler& sampler,
                                    const SamplerArtifact& art, std::uint64_t trials, std::uint64_t seed) {
  require(trials > 0, ErrorKind::InvalidArgument, "Monte Carlo needs at least one trial");
  const std::size_t nx = j.x_size(), nz = j.z_size();
  std::vector<double> cells, zmass;
  for (const auto& p : j.probs()) cells.push_back(to_double(p));
  for (std::size_t z = 0; z < nz; ++z) zmass.push_back(to_double(j.z_mass(z)));

  // Per z: P[D'(Y'|z) >= D'(x, z)] for every x, and a sampler for Y'|z.
  std::vector<double> hit(nx * nz);
  std::vector<std::discrete_distribution<std::size_t>> cols;
  for (std::size_t z = 0; z < nz; ++z) {
    const Dist& col = sampler.columns.at(z);
    std::vector<double> w;
    for (const auto& p : col.probs()) w.push_back(to_double(p));
    cols.emplace_back(w.begin(), w.end());
    std::map<Rational, Rational, std::greater<>> mass_at;
    for (std::size_t y = 0; y < nx; ++y) mass_at[d_prime.at(y, z)] += col[y];
    Rational running(0);
    for (auto& [v, m] : mass_at) {
      running += m;
      m = running;  // now P[D' >= v]
    }
    for (std::size_t x = 0; x < nx; ++x) hit[x * nz + z] = to_double(mass_at.at(d_prime.at(x, z)));
  }

  // One run of D'' on (x, z). The ell draws stop at the first sample reaching
  // D'(x, z); the index of that sample is geometric, so it is drawn directly.
  auto run = [&](std::mt19937_64& rng, std::size_t x, std::size_t z) {
    const double q = hit[x * nz + z];
    if (q <= 0) return true;
    if (q >= 1) return false;
    std::geometric_distribution<std::uint64_t> first(q);
    return first(rng) >= art.samples;
  };

  auto estimate = [&](std::uint64_t stream, bool x_side) {
    std::seed_seq seq{seed, stream};
    std::mt19937_64 rng(seq);
    std::discrete_distribution<std::size_t> pick_cell(cells.begin(), cells.end());
    std::discrete_distribution<std::size_t> pick_z(zmass.begin(), zmass.end());
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      if (x_side) {
        const std::size_t cell = pick_cell(rng);
        hits += run(rng, cell / nz, cell % nz);
      } else {
        const std::size_t z = pick_z(rng);
        hits += run(rng, cols[z](rng), z);
      }
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
  };

  MonteCarloCheck out;
  out.trials = trials;
  out.estimate_x = estimate(0, true);
  out.estimate_y = estimate(1, false);
  const double px = to_double(art.accept_x), py = to_double(art.accept_y), nt = static_cast<double>(trials);
  out.sigma_x = std::sqrt(px * (1 - px) / nt);
  out.sigma_y = std::sqrt(py * (1 - py) / nt);
  // A zero-variance side must match exactly; the slack covers double rounding.
  out.within = std::abs(out.estimate_x - px) <= 4 * out.sigma_x + 1e-12 &&
               std::abs(out.estimate_y - py) <= 4 * out.sigma_y + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t chernoff_sample_count(unsigned n_minus_k, const Rational& delta1, const Rational& delta2) {
  require(delta1 > 0 && delta1 <= 1 && delta2 > 0 && delta2 < 1, ErrorKind::InvalidArgument,
          "delta parameters out of range");
  const Rational base = Rational(4) * pow2(static_cast<long>(n_minus_k)) / (delta1 * delta1);
  // log2(1/delta2) is exact for powers of two, which is the common case.
  const Rational inv = 1 / delta2;
  double lg = std::log2(to_double(inv));
  if (inv.get_den() == 1 && mpz_popcount(inv.get_num_mpz_t()) == 1) {
    lg = static_cast<double>(mpz_sizeinbase(inv.get_num_mpz_t(), 2) - 1);
  }
  const double bound = to_double(base) * lg;
  const auto ell = static_cast<std::uint64_t>(std::floor(bound)) + 1;
  require(ell <= kMaxSamples, ErrorKind::LTooLarge, "Chernoff sample count exceeds the guard");
  return ell;
}

Rational binomial_deviation(std::uint64_t ell, const Rational& p, const Rational& dev) {
  require(p >= 0 && p <= 1 && dev > 0, ErrorKind::InvalidArgument, "bad binomial parameters");
  // |S/ell - p| >= dev  <=>  S <= ell(p - dev) or S >= ell(p + dev).
  const Rational l(static_cast<unsigned long>(ell));
  const Rational lo_edge = l * (p - dev), hi_edge = l * (p + dev);
  mpz_class lo_floor;
  mpz_fdiv_q(lo_floor.get_mpz_t(), lo_edge.get_num_mpz_t(), lo_edge.get_den_mpz_t());
  Rational total(0);
  if (lo_edge >= 0) total += binomial_range(ell, p, 0, lo_floor.get_si());
  total += binomial_range(ell, p, ceil_of(hi_edge), static_cast<std::int64_t>(ell));
  return total;
}

ClaimCheck chernoff_claim(unsigned n, unsigned k, const Rational& delta1, const Rational& delta2,
                          std::optional<std::uint64_t> samples) {
  require(k <= n, ErrorKind::InvalidArgument, "k must not exceed n");
  ClaimCheck out;
  out.samples = samples ? *samples : chernoff_sample_count(n - k, delta1, delta2);
  const Rational dev = pow2(static_cast<long>(k) - static_cast<long>(n)) * delta1;
  out.worst_failure = 0;
  for (std::uint64_t size = 0; size <= (std::uint64_t{1} << k); ++size) {
    const Rational p = Rational(static_cast<unsigned long>(size)) / pow2(static_cast<long>(n));
    out.worst_failure = max_of(out.worst_failure, binomial_deviation(out.samples, p, dev));
  }
  out.bound = 2 * delta2;
  out.holds = out.worst_failure <= out.bound;
  return out;
}

namespace {

// Smallest odd r with P[majority of r calls wrong] <= target.
std::pair<std::uint64_t, Rational> majority_repeats(const Rational& success, const Rational& target) {
  for (std::uint64_t r = 1; r <= 61; r += 2) {
    const Rational fail = binomial_range(r, 1 - success, static_cast<std::int64_t>(r / 2 + 1), static_cast<std::int64_t>(r));
    if (fail <= target) return {r, fail};
  }
  throw Error(ErrorKind::LTooLarge, "majority amplification needs more than 61 repeats");
}

// Smallest c = q/1000 with c^copies >= 4.
Rational root_bound(unsigned copies) {
  for (long q = 1000;; ++q) {
    Rational c(q, 1000);
    c.canonicalize();
    if (pow(c, copies) >= 4) return c;
  }
}

}  // namespace

CountArtifact approx_count_distinguisher(const Distinguisher& d_prime, const Joint& j, const CountParams& params) {
  check_domains(d_prime, j);
  require_boolean(d_prime, "approximate counting");
  const Rational& eps = params.eps_prime;
  require(eps > 0 && eps <= 1, ErrorKind::InvalidArgument, "eps' must lie in (0,1]");
  require(params.gamma_prime > 0 && params.gamma_prime <= 1, ErrorKind::InvalidArgument, "gamma' must lie in (0,1]");
  const std::size_t nx = j.x_size(), nz = j.z_size();
  const Rational scale = Rational(static_cast<unsigned long>(nx)) * params.gamma_prime;  // 2^(n-k')
  const Rational threshold = 1 - eps / 8;

  CountArtifact out;
  out.mode = params.mode;
  out.bound = eps * eps / 64;
  out.gamma_y = params.gamma_prime * eps * eps / 64;
  require(out.gamma_y * static_cast<long>(nx) >= 1, ErrorKind::CapOutOfRange,
          "Y-side cap gamma' eps'^2/64 is below 2^-n; enlarge the domain");

  // Per-z X-side target and Y-side ceiling of D'.
  std::vector<Rational> x_side(nz), y_side(nz), counts(nz);
  for (std::size_t z = 0; z < nz; ++z) {
    counts[z] = d_prime.count(z);
    y_side[z] = min_of(out.gamma_y * counts[z], Rational(1));
    x_side[z] = j.supported(z) ? column_target(d_prime, j, z) : Rational(0);
  }

  std::vector<Rational> alpha(nz, Rational(0));  // acceptance probability on D' = 1 points
  if (params.mode == CountMode::ChernoffSampling) {
    const unsigned n_minus_k = static_cast<unsigned>(mpz_sizeinbase(scale.get_num_mpz_t(), 2) - 1);
    require(scale.get_den() == 1 && mpz_popcount(scale.get_num_mpz_t()) == 1, ErrorKind::InvalidArgument,
            "sampling mode needs gamma' = 2^-k' with k' <= n");
    out.samples = params.samples ? *params.samples : chernoff_sample_count(n_minus_k, eps / 8, eps * eps / 128);
    require(out.samples <= kMaxSamples, ErrorKind::LTooLarge, "too many samples");
    const Rational l(static_cast<unsigned long>(out.samples));
    // h = scale * S / ell < threshold  <=>  S < ell * threshold / scale.
    const std::int64_t smax = floor_below(l * threshold / scale);
    const Rational dev = eps / (8 * scale);
    out.estimator_failure = 0;
    std::map<Rational, Rational> cache;
    for (std::size_t z = 0; z < nz; ++z) {
      if (counts[z] == 0) continue;
      const Rational p = counts[z] / static_cast<long>(nx);
      auto it = cache.find(p);
      if (it == cache.end()) it = cache.emplace(p, binomial_range(out.samples, p, 0, smax)).first;
      alpha[z] = it->second;
      if (j.supported(z) && counts[z] < 1 / params.gamma_prime) {
        out.estimator_failure = max_of(out.estimator_failure, binomial_deviation(out.samples, p, dev));
      }
    }
  } else {
    require(params.and_copies >= 1, ErrorKind::InvalidArgument, "need at least one copy");
    out.factor = root_bound(params.and_copies);
    const auto [repeats, fail] = majority_repeats(params.base_success, out.bound);
    out.samples = repeats;
    out.estimator_failure = fail;
    out.conjunction_size = params.and_copies * d_prime.size() + params.and_copies - 1;
    out.majority_size = majority_circuit(static_cast<unsigned>(repeats)).size();
    // Adversarial answers: inside the band when amplification succeeds,
    // anything when it fails. Each z is chosen to shrink the gap.
    for (std::size_t z = 0; z < nz; ++z) {
      if (counts[z] == 0) continue;
      const Rational lowest = params.gamma_prime * counts[z] / out.factor;
      const Rational highest = params.gamma_prime * counts[z] * out.factor;
      const bool can_accept = lowest < threshold;
      const bool can_reject = highest >= threshold;
      const Rational kappa = x_side[z] - y_side[z];
      const bool want_accept = kappa < 0;
      const bool good = want_accept ? can_accept : !can_reject;
      alpha[z] = (1 - fail) * (good ? 1 : 0) + fail * (want_accept ? 1 : 0);
    }
  }

  std::vector<Rational> acc(nx * nz);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t z = 0; z < nz; ++z) acc[x * nz + z] = alpha[z] * d_prime.at(x, z);
  }
  out.acceptance = Distinguisher(d_prime.x_domain(), d_prime.z_domain(), std::move(acc), DKind::Randomized,
                                 d_prime.size() + 1, "count(" + d_prime.provenance() + ")");
  out.accept_x = expect(out.acceptance, j);
  out.accept_y = max_feasible_expectation(out.acceptance, j, out.gamma_y, false);
  out.gap = out.accept_x - out.accept_y;
  out.certified = out.gap >= out.bound;
  return out;
}

// ---------------------------------------------------------------------------

ThresholdResult real_to_boolean(const Distinguisher& d, const Joint& j, const Rational& gamma, const Rational& epsilon) {
  check_domains(d, j);
  std::vector<Rational> candidates{Rational(0)};
  for (const auto& v : d.values()) {
    if (v < 1) candidates.push_back(v);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  ThresholdResult out{Rational(0), d, worst_case_advantage(d, j, gamma), Rational(-2), {}, false};
  for (const auto& t : candidates) {
    Distinguisher b = threshold(d, t);
    const Rational adv = worst_case_advantage(b, j, gamma);
    out.scan.emplace_back(t, adv);
    if (adv > out.boolean_advantage) {
      out.boolean_advantage = adv;
      out.threshold = t;
      out.boolean = std::move(b);
    }
  }
  require(out.boolean_advantage >= epsilon, ErrorKind::NoThreshold,
          "no threshold reaches advantage eps; the real-valued advantage is " + to_string(out.real_advantage));
  out.certified = out.boolean_advantage >= epsilon && out.boolean_advantage >= out.real_advantage;
  return out;
}

// ---------------------------------------------------------------------------

TightnessReport tightness_demo(const std::vector<Circuit>& f) {
  require(!f.empty(), ErrorKind::InvalidArgument, "f needs at least one output bit");
  const unsigned in = f.front().n();
  const auto out_bits = static_cast<unsigned>(f.size());
  for (const auto& c : f) {
    require(c.n() == in && c.m() == 0, ErrorKind::DomainMismatch, "every output circuit reads the same x inputs");
  }
  const Domain ydom(out_bits), udom(in);
  const std::size_t ny = ydom.size(), nu = udom.size();
  std::vector<std::size_t> image(nu, 0);
  std::uint64_t size = 2 * std::uint64_t{out_bits};  // XORs against y, ORed, negated
  for (std::size_t b = 0; b < f.size(); ++b) {
    size += f[b].size();
    for (std::size_t u = 0; u < nu; ++u) image[u] |= std::size_t{f[b].eval(u, 0)} << b;
  }
  const Rational pu(1, static_cast<long>(nu));
  std::vector<Rational> probs(ny * nu, Rational(0)), dv(ny * nu, Rational(0));
  for (std::size_t u = 0; u < nu; ++u) {
    probs[image[u] * nu + u] = pu;
    dv[image[u] * nu + u] = 1;
  }
  Joint joint(ydom, udom, std::move(probs));
  Distinguisher d(ydom, udom, std::move(dv), DKind::Boolean, size, "eq(f(x),y)");
  const Rational cap(1, 8);
  const auto v = metric_cond_avg(joint, {d}, EntropyParams(cap, Rational(0)));
  const Rational min_adv = expect(d, joint) - metric_range(d, joint, cap, true).upper;
  Joint worst = *v.witness;

  const auto split = avg_to_worst_split(worst, Rational(1, 3));
  Rational per_good(1);
  for (std::size_t u : split.good_z) {
    Rational e(0);
    for (std::size_t y = 0; y < ny; ++y) e += d.at(y, u) * worst.at(y, u);
    per_good = min_of(per_good, 1 - e / worst.z_mass(u));
  }
  const Rational decomposition = Rational(2, 3) * (1 - split.gamma_new) - Rational(1, 3);
  TightnessReport rep{std::move(joint), std::move(d), cap, min_adv, std::move(worst), split.good_mass,
                      split.gamma_new, per_good, decomposition, false};
  rep.certified = rep.min_advantage >= Rational(1, 12) && rep.good_mass >= Rational(2, 3) &&
                  rep.per_good_gap >= 1 - rep.cap_after_split && rep.decomposition == Rational(1, 12) &&
                  rep.min_advantage >= rep.decomposition;
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

LedgerValue exact_value(std::string formula, const Rational& v, std::string provenance) {
  return {std::move(formula), v, to_double(v), std::move(provenance)};
}

LedgerValue approx_value(std::string formula, double v, std::string provenance) {
  return {std::move(formula), std::nullopt, v, std::move(provenance)};
}

LedgerValue sqrt_value(std::string formula, const Rational& factor, const Rational& radicand, std::string provenance) {
  Rational root;
  if (exact_sqrt(radicand, root)) return exact_value(std::move(formula), factor * root, std::move(provenance));
  return approx_value(std::move(formula), to_double(factor) * std::sqrt(to_double(radicand)), std::move(provenance));
}

LedgerValue k_of(const LedgerValue& gamma) {
  LedgerValue k;
  k.formula = "-log2(" + gamma.formula + ")";
  k.approx = gamma.exact ? neg_log2(*gamma.exact) : -std::log2(gamma.approx);
  k.provenance = gamma.provenance;
  return k;
}

LedgerValue size_value(std::string formula, const std::optional<std::uint64_t>& s, const std::function<Rational(Rational)>& f,
                       std::string provenance) {
  if (!s) return {std::move(formula), std::nullopt, 0, std::move(provenance)};
  return exact_value(std::move(formula), f(Rational(static_cast<unsigned long>(*s))), std::move(provenance));
}

}  // namespace

std::vector<std::string> ledger_assumptions() {
  return {"decomposable", "samplable", "np-oracle", "high-entropy", "none", "squared"};
}

LedgerRow conversion_ledger(const std::string& assumption, const LedgerInputs& in) {
  const Rational& g = in.params.gamma;
  const Rational& e = in.params.epsilon;
  const auto& s = in.params.size_budget;
  LedgerRow row;
  row.assumption = assumption;
  const auto same_size = [](Rational x) { return x; };

  if (assumption == "decomposable") {
    row.gamma = exact_value("gamma", g, "statement");
    row.epsilon = exact_value("eps", e, "statement");
    row.size = size_value("s", s, same_size, "statement");
  } else if (assumption == "samplable") {
    require(e > 0, ErrorKind::InvalidArgument, "eps must be positive");
    row.gamma = exact_value("2^7 * gamma / eps^2", 128 * g / (e * e), "statement");
    row.epsilon = sqrt_value("8 * sqrt(eps)", Rational(8), e, "statement");
    const Rational gsize(static_cast<unsigned long>(in.sampler_size));
    row.size = size_value("s * eps^2 / 64 - size(Gamma)", s, [&](Rational x) -> Rational { return x * e * e / 64 - gsize; },
                          "statement");
    row.extra.emplace_back("eps_violation", exact_value("eps^2 / 64", e * e / 64, "proof"));
    row.extra.emplace_back("samples", approx_value("ceil(64 / eps_violation^2) - 1",
                                                   std::ceil(64.0 / std::pow(to_double(e * e / 64), 2)) - 1, "proof"));
    row.extra.emplace_back("gap", exact_value("eps_violation^2 / 64", pow(e * e / 64, 2) / 64, "proof"));
  } else if (assumption == "np-oracle" || assumption == "high-entropy") {
    require(e > 0 && e < 1, ErrorKind::InvalidArgument, "eps must lie in (0,1)");
    row.gamma = exact_value("gamma / eps", g / e, "statement");
    row.epsilon = sqrt_value("8 * sqrt(eps)", Rational(8), e, "statement");
    if (assumption == "np-oracle") {
      row.size = {"poly(n, 1/eps)", std::nullopt, 0, "asymptotic"};
    } else {
      const double k = neg_log2(g);
      const double factor = std::pow(2.0, k - in.n - 2) * to_double(e) / std::log2(1 / to_double(e));
      row.size = s ? approx_value("s * 2^(k-n-2) * eps / log2(1/eps)", static_cast<double>(*s) * factor, "asymptotic")
                   : LedgerValue{"s * 2^(k-n-2) * eps / log2(1/eps)", std::nullopt, 0, "asymptotic"};
    }
  } else if (assumption == "none") {
    const Rational grow = pow2(static_cast<long>(in.t));
    row.gamma = exact_value("gamma", g, "statement");
    row.epsilon = exact_value("2^t * eps", grow * e, "statement");
    const Rational over(static_cast<unsigned long>(truncation_overhead(in.m, in.t)));
    row.size = size_value("s - (2m+1) * 2^(m-t)", s, [&](Rational x) -> Rational { return x - over; }, "construction");
    row.extra.emplace_back("overhead", exact_value("(2m+1) * 2^(m-t)", over, "construction"));
  } else if (assumption == "squared") {
    row.gamma = exact_value("gamma", g, "statement");
    row.epsilon = sqrt_value("sqrt(eps)", Rational(1), e, "statement");
    row.size = size_value("s", s, same_size, "statement");
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown assumption '" + assumption + "'");
  }
  row.k = k_of(row.gamma);
  return row;
}

EntropyParams modulus_to_hill_params(const EntropyParams& params, unsigned n, unsigned m, const Rational& delta, double c) {
  require(delta > 0 && delta <= 1, ErrorKind::InvalidArgument, "delta must lie in (0,1]");
  require(params.gamma / delta <= 1, ErrorKind::InvalidArgument, "gamma / delta exceeds 1: no entropy left");
  std::optional<std::uint64_t> size;
  if (params.size_budget) {
    const double scaled = static_cast<double>(*params.size_budget) * to_double(delta * delta) /
                          (c * static_cast<double>(n + m));
    size = static_cast<std::uint64_t>(std::floor(scaled));
  }
  return EntropyParams(params.gamma / delta, params.epsilon + 2 * delta, size);
}

}  // namespace entlab
