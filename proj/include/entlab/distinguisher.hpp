#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entlab/circuit.hpp"
#include "entlab/distribution.hpp"

namespace entlab {

enum class DKind { Boolean, Real, Randomized };

std::string_view to_string(DKind kind);

/// [0,1]-valued table over (x, z), x-major like Joint. Randomized
/// distinguishers are stored as their acceptance probabilities.
class Distinguisher {
 public:
  Distinguisher() = default;
  Distinguisher(Domain x_domain, Domain z_domain, std::vector<Rational> values, DKind kind,
                std::uint64_t size = 0, std::string provenance = "table");

  /// Kind inferred from the values (Boolean iff every entry is 0 or 1).
  static Distinguisher from_table(Domain x_domain, Domain z_domain, std::vector<Rational> values,
                                  std::uint64_t size = 0);
  /// x input = circuit's x bits, z input = circuit's z bits.
  static Distinguisher from_circuit(const Circuit& c);
  static Distinguisher constant(Domain x_domain, Domain z_domain, const Rational& v);

  const Domain& x_domain() const noexcept { return x_domain_; }
  const Domain& z_domain() const noexcept { return z_domain_; }
  std::size_t x_size() const noexcept { return x_domain_.size(); }
  std::size_t z_size() const noexcept { return z_domain_.size(); }
  const Rational& at(std::size_t x, std::size_t z) const { return values_[x * z_size() + z]; }
  const std::vector<Rational>& values() const noexcept { return values_; }
  DKind kind() const noexcept { return kind_; }
  bool is_boolean() const noexcept { return kind_ == DKind::Boolean; }
  std::uint64_t size() const noexcept { return size_; }
  const std::string& provenance() const noexcept { return provenance_; }
  const std::optional<Circuit>& circuit() const noexcept { return circuit_; }

  /// D(., z) as a vector over x.
  std::vector<Rational> column(std::size_t z) const;
  /// |D(., z)| = sum_x D(x, z).
  Rational count(std::size_t z) const;

  /// Same table, comparing values only.
  bool same_table(const Distinguisher& other) const { return values_ == other.values_; }

 private:
  Domain x_domain_;
  Domain z_domain_;
  std::vector<Rational> values_;
  DKind kind_ = DKind::Boolean;
  std::uint64_t size_ = 0;
  std::string provenance_;
  std::optional<Circuit> circuit_;
};

using DistinguisherClass = std::vector<Distinguisher>;

/// sum_{x,z} P(x,z) D(x,z).
Rational expect(const Distinguisher& d, const Joint& j);
/// |E D(P) - E D(Q)|.
Rational advantage(const Distinguisher& d, const Joint& p, const Joint& q);

struct AdvantageProfile {
  std::vector<Rational> gaps;  // eps_D(z) = E D(X|z, z) - E D(Y|z, z); 0 off the support
  Rational metric;             // sum_z P(z) eps_D(z)
  Rational modulus;            // sum_z P(z) |eps_D(z)|
};

/// Throws ZMarginalMismatch unless p and q have the same z-marginal.
AdvantageProfile advantage_profile(const Distinguisher& d, const Joint& p, const Joint& q);

/// 1 - D; size + 1.
Distinguisher complement(const Distinguisher& d);

/// Pointwise weighted average; size = sum of part sizes + number of parts.
Distinguisher convex_combine(const std::vector<std::pair<Rational, Distinguisher>>& parts);

/// [D > t]; size + 1.
Distinguisher threshold(const Distinguisher& d, const Rational& t);

enum class FlipAction { Keep, Flip, Zero };

/// Per z: D, 1 - D or 0. Size grows by the number of non-keep z values.
Distinguisher flip_select(const Distinguisher& d, const std::vector<FlipAction>& profile);

/// Signs of an advantage profile as flip actions (positive keep, negative flip, zero zero).
std::vector<FlipAction> sign_actions(const AdvantageProfile& profile);

bool is_complement_closed(const DistinguisherClass& cls);
/// Adds 1 - D for every D whose complement table is missing.
DistinguisherClass complement_closure(const DistinguisherClass& cls);

/// Distinguishers from every circuit in the list.
DistinguisherClass class_from_circuits(const std::vector<Circuit>& circuits);

}  // namespace entlab
