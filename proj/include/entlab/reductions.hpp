#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entlab/distinguisher.hpp"
#include "entlab/distribution.hpp"

namespace entlab {

// ---- Leakage lemma: per-z witnesses for a distinguisher of x alone ----

struct LeakageWitness {
  Rational epsilon;                  // |E D(X) - E D(Y)|
  Rational gamma;                    // guess_prob(Y)
  std::vector<Rational> caps;        // min(1, gamma / P(z)); 0 off the support
  std::vector<Rational> gaps;        // |E D(X|z) - E D(Y'_z)|
  std::vector<std::optional<Dist>> witnesses;
  bool certified = false;            // every gap <= epsilon / P(z), every cap respected
};

// `d` lives on (x, z) with a one-point z-domain; `jxz` links X to Z.
LeakageWitness leakage_witness(const Distinguisher& d, const Joint& jxz, const Dist& y);

// ---- Chain rule for modulus entropy ----

struct ChainRuleArtifact {
  std::size_t member = 0;
  Joint witness;                      // (Y, Z1, Z2)
  std::vector<Rational> slice_values; // modulus minimum of each z2-slice over (X, Z1)
  Rational modulus;                   // modulus aggregate of D against the witness
  Rational avg_guess;                 // cond_guess_prob_avg of the witness
  Rational eps_bound;                 // 2^m2 * epsilon
  Rational gamma_bound;               // 2^m2 * gamma
  bool certified = false;
};

std::vector<ChainRuleArtifact> modulus_chain_rule(const Joint& j3, const DistinguisherClass& cls,
                                                  const EntropyParams& params);

// ---- Core lemma (worst-case caps) ----

struct CoreLemmaResult {
  Rational violation;                 // min over worst-case Y of the modulus aggregate
  std::vector<Rational> eps_z;        // per-z distance of E D(X|z) to the achievable interval
  std::vector<FlipAction> actions;    // eq. (D)
  Distinguisher per_z;                // D' following eq. (D)
  Rational p_per_z;                   // event probability for the per-z D'
  bool use_complement = false;        // global choice: D or D^c
  Distinguisher chosen;
  Rational p_star;                    // event probability for the global choice
  Rational bound;                     // epsilon^2 / 16
  bool certified = false;
};

// Event: D'(x,z) - max_{Y_z, cap gamma} E D'(Y_z, z) >= epsilon / 4.
Rational core_event_probability(const Distinguisher& d, const Joint& j, const Rational& gamma,
                                const Rational& epsilon);

CoreLemmaResult core_lemma_event(const Distinguisher& d, const Joint& j, const Rational& gamma,
                                 const Rational& epsilon);

// ---- Heavy truncation (metric to modulus without extra assumptions) ----

std::uint64_t truncation_overhead(unsigned m, unsigned t);

struct TruncationResult {
  Distinguisher truncated;
  std::vector<std::size_t> kept;
  Rational original;   // modulus minimum of D under worst-case caps
  Rational advantage;  // E D'(X,Z) - max over worst-case Y of E D'(Y,Z)
  Rational bound;      // 2^-t * original
  bool certified = false;
};

TruncationResult heavy_truncation(const Distinguisher& d, const Joint& j, const Rational& gamma, unsigned t);

// ---- Samplable witness ----

struct Sampler {
  Domain x_domain;
  Domain z_domain;
  std::vector<Dist> columns;  // Y'|Z=z
  std::uint64_t size = 0;     // declared size of the sampling circuit

  Joint joint(const Joint& like) const;  // (Y', Z) with the Z-marginal of `like`
};

inline constexpr std::uint64_t kMaxSamples = 1'000'000;

std::uint64_t sampler_sample_count(const Rational& eps);

struct SamplerArtifact {
  std::uint64_t samples = 0;     // ell
  Distinguisher acceptance;      // P[D''(x,z) = 1], exact
  Rational accept_x;             // P[D''(X,Z) = 1]
  Rational accept_y;             // P[D''(Y',Z) = 1]
  Rational gap;
  Rational bound_x;              // eps^2 / 32
  Rational bound_y;              // eps^2 / 64 (also 1/(ell+1))
  std::uint64_t size = 0;        // (ell + 1)(size(D') + size(Gamma))
  bool certified = false;        // gap >= eps^2 / 64
};

SamplerArtifact sampler_distinguisher(const Distinguisher& d_prime, const Joint& j, const Sampler& sampler,
                                      const Rational& eps);

struct MonteCarloCheck {
  std::uint64_t trials = 0;
  double estimate_x = 0, estimate_y = 0;
  double sigma_x = 0, sigma_y = 0;
  bool within = false;  // both estimates within 4 sigma of the exact values
};

MonteCarloCheck sampler_monte_carlo(const Distinguisher& d_prime, const Joint& j, const Sampler& sampler,
                                    const SamplerArtifact& art, std::uint64_t trials, std::uint64_t seed);

// ---- Approximate counting ----

// Smallest ell with ell > 4 * 2^(n-k) / delta1^2 * log2(1/delta2).
std::uint64_t chernoff_sample_count(unsigned n_minus_k, const Rational& delta1, const Rational& delta2);

// Exact P[|S/ell - p| >= dev] for S ~ Bin(ell, p).
Rational binomial_deviation(std::uint64_t ell, const Rational& p, const Rational& dev);

struct ClaimCheck {
  std::uint64_t samples = 0;
  Rational worst_failure;  // max over |D| <= 2^k
  Rational bound;          // 2 * delta2
  bool holds = false;
};

ClaimCheck chernoff_claim(unsigned n, unsigned k, const Rational& delta1, const Rational& delta2,
                          std::optional<std::uint64_t> samples = std::nullopt);

enum class CountMode { ChernoffSampling, ExactOracle };

struct CountParams {
  Rational gamma_prime;          // 2^-k' : level at which the modulus entropy fails
  Rational eps_prime;            // violation level
  CountMode mode = CountMode::ChernoffSampling;
  std::optional<std::uint64_t> samples;  // sampling mode; default from the Chernoff claim
  Rational oracle_gamma{1, 4};   // target accuracy of the amplified counter
  unsigned and_copies = 6;       // copies in the conjunction
  Rational base_success{3, 4};   // single oracle call success probability
};

struct CountArtifact {
  CountMode mode = CountMode::ChernoffSampling;
  Distinguisher acceptance;       // P[D''(x,z) = 1] under the worst admissible estimator
  Rational gamma_y;               // cap for the Y side: gamma' * eps'^2 / 64
  Rational accept_x, accept_y, gap, bound;
  Rational estimator_failure;     // sampling: max per-z P[|h - 2^-k'|D'|| > eps'/8]; oracle: majority failure
  std::uint64_t samples = 0;      // ell or majority repeats
  Rational factor;                // oracle mode: rational upper bound on 4^(1/copies)
  std::uint64_t conjunction_size = 0;
  std::uint64_t majority_size = 0;
  bool certified = false;
};

CountArtifact approx_count_distinguisher(const Distinguisher& d_prime, const Joint& j, const CountParams& params);

// ---- Real-valued to boolean ----

struct ThresholdResult {
  Rational threshold;
  Distinguisher boolean;
  Rational real_advantage;     // E D(X,Z) - max over worst-case Y of E D(Y,Z)
  Rational boolean_advantage;  // same for the thresholded distinguisher
  std::vector<std::pair<Rational, Rational>> scan;  // (t, advantage) per candidate
  bool certified = false;
};

ThresholdResult real_to_boolean(const Distinguisher& d, const Joint& j, const Rational& gamma, const Rational& epsilon);

// ---- Tightness of the leakage lemma ----

struct TightnessReport {
  Joint joint;                 // (f(U), U)
  Distinguisher d;             // [f(u) = y]
  Rational cap;                // 1/8
  Rational min_advantage;      // exact minimum over feasible Y
  Joint worst_y;
  Rational good_mass;          // mass of u with max_y P(y|u) <= 3/8 under worst_y
  Rational cap_after_split;    // 3/8
  Rational per_good_gap;       // 5/8
  Rational decomposition;      // 2/3 * 5/8 - 1/3 = 1/12
  bool certified = false;      // min_advantage >= 1/12 and the decomposition holds
};

TightnessReport tightness_demo(const std::vector<Circuit>& f);

// ---- Parameter arithmetic ----

struct LedgerValue {
  std::string formula;
  std::optional<Rational> exact;
  double approx = 0;
  std::string provenance;  // "statement", "proof", "construction", "asymptotic"
};

struct LedgerRow {
  std::string assumption;
  LedgerValue gamma;  // 2^-k'
  LedgerValue k;
  LedgerValue epsilon;
  LedgerValue size;
  std::vector<std::pair<std::string, LedgerValue>> extra;
};

struct LedgerInputs {
  EntropyParams params;
  unsigned n = 0;
  unsigned m = 0;
  unsigned t = 0;               // row (e)
  std::uint64_t sampler_size = 0;  // row (b)
};

LedgerRow conversion_ledger(const std::string& assumption, const LedgerInputs& in);
std::vector<std::string> ledger_assumptions();

inline constexpr double kHillSizeConstant = 16.0;

EntropyParams modulus_to_hill_params(const EntropyParams& params, unsigned n, unsigned m, const Rational& delta,
                                     double c = kHillSizeConstant);

}  // namespace entlab
