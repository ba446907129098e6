#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "entlab/rational.hpp"

namespace entlab {

inline constexpr unsigned kMaxDomainBits = 16;

/// {0,1}^bits, points indexed 0..2^bits-1 with bit i of the index being
/// coordinate i.
class Domain {
 public:
  Domain() = default;
  explicit Domain(unsigned bits);

  unsigned bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return std::size_t{1} << bits_; }

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  unsigned bits_ = 0;
};

/// A distribution over a bitstring domain with exact rational masses.
class Dist {
 public:
  Dist(Domain domain, std::vector<Rational> probs);

  static Dist uniform(Domain domain);
  static Dist point_mass(Domain domain, std::size_t point);

  const Domain& domain() const noexcept { return domain_; }
  std::span<const Rational> probs() const noexcept { return probs_; }
  const Rational& operator[](std::size_t x) const { return probs_[x]; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  Domain domain_;
  std::vector<Rational> probs_;
};

/// Declares the z-domain as a pair (Z1, Z2); z = z1 * 2^m2 + z2.
struct ZPair {
  unsigned m1 = 0;
  unsigned m2 = 0;
  friend bool operator==(const ZPair&, const ZPair&) = default;
};

/// Joint distribution of (X, Z). Storage is x-major: P(x, z) at x * |Z| + z.
class Joint {
 public:
  Joint() = default;
  Joint(Domain x_domain, Domain z_domain, std::vector<Rational> probs,
        std::optional<ZPair> pair = std::nullopt);

  /// (X, Z) with Z constant (m = 0).
  static Joint from_dist(const Dist& x);
  /// (X, Z) with X|Z=z given per column; columns[z] must be a Dist over x_domain.
  static Joint from_conditionals(const Dist& z_marginal, std::span<const Dist> columns);

  const Domain& x_domain() const noexcept { return x_domain_; }
  const Domain& z_domain() const noexcept { return z_domain_; }
  std::size_t x_size() const noexcept { return x_domain_.size(); }
  std::size_t z_size() const noexcept { return z_domain_.size(); }
  const std::optional<ZPair>& pair() const noexcept { return pair_; }

  const Rational& at(std::size_t x, std::size_t z) const { return probs_[x * z_size() + z]; }
  std::span<const Rational> probs() const noexcept { return probs_; }

  const Rational& z_mass(std::size_t z) const { return z_marginal_[z]; }
  std::span<const Rational> z_marginal() const noexcept { return z_marginal_; }
  bool supported(std::size_t z) const { return z_marginal_[z] > 0; }

  Dist x_marginal() const;
  Dist z_marginal_dist() const;

  /// Column P(., z) without normalisation.
  std::vector<Rational> column(std::size_t z) const;

  /// Marginalises Z2 out of a paired joint: the result is (X, Z1).
  Joint drop_z2() const;
  /// (X, Z2) | Z1 = z1 for a paired joint.
  Joint slice_z1(std::size_t z1) const;

  friend bool operator==(const Joint& a, const Joint& b) {
    return a.x_domain_ == b.x_domain_ && a.z_domain_ == b.z_domain_ && a.probs_ == b.probs_;
  }

 private:
  Domain x_domain_;
  Domain z_domain_;
  std::vector<Rational> probs_;
  std::vector<Rational> z_marginal_;
  std::optional<ZPair> pair_;
};

/// Quality triple. Entropy levels are carried as guessing probabilities
/// gamma = 2^-k so every bound stays rational.
struct EntropyParams {
  Rational gamma{1};
  Rational epsilon{0};
  std::optional<std::uint64_t> size_budget;

  EntropyParams() = default;
  EntropyParams(Rational g, Rational e, std::optional<std::uint64_t> s = std::nullopt);

  static EntropyParams from_k(long k, Rational e);
  double display_k() const { return neg_log2(gamma); }
};

Rational guess_prob(const Dist& d);

/// sum_z max_x P(x, z) = E_z max_x P(x | z).
Rational cond_guess_prob_avg(const Joint& j);

/// max over supported z of max_x P(x | z). Zero-mass columns are skipped.
Rational cond_guess_prob_worst(const Joint& j);

/// X | Z = z. Throws ZeroMassCondition when P(Z = z) = 0.
Dist condition(const Joint& j, std::size_t z);

/// (1/2) sum |p - q|. Throws DomainMismatch.
Rational statistical_distance(const Dist& p, const Dist& q);

struct AvgWorstSplit {
  Rational gamma_new;
  std::vector<std::size_t> good_z;
  Rational good_mass;
  bool certified = false;  // good_mass >= 1 - delta, checked exactly
};

/// Average-to-worst-case conversion: with gamma_new = avg / delta, the set of z
/// with max_x P(x|z) <= gamma_new carries mass >= 1 - delta.
AvgWorstSplit avg_to_worst_split(const Joint& j, const Rational& delta);

struct ChainRuleVerdict {
  Rational avg_given_both;   // cond_guess_prob_avg over (Z1, Z2)
  Rational avg_given_first;  // cond_guess_prob_avg over Z1
  Rational bound;            // 2^m2 * avg_given_first
  bool holds = false;
};

/// Leakage chain rule for average min-entropy on a paired joint.
ChainRuleVerdict it_chain_rule_check(const Joint& j3);

}  // namespace entlab
