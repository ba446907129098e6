#pragma once

#include <optional>
#include <string>
#include <vector>

#include "entlab/distinguisher.hpp"
#include "entlab/distribution.hpp"

namespace entlab {

enum class Notion {
  Min,
  MetricUncond,
  MetricWorst,
  MetricAvg,
  ModulusAvg,
  ModulusWorst,
  HillAvg,
  Decomposable,
  Squared,
};

std::string_view to_string(Notion notion);
/// Accepts the names printed by to_string. Throws InvalidArgument.
Notion parse_notion(std::string_view name);

struct EntropyVerdict {
  Notion notion = Notion::Min;
  EntropyParams params;
  bool holds = true;
  /// Largest optimal distance over the class (or the single optimum for
  /// min/decomposable/HILL). holds iff worst <= epsilon.
  Rational worst{0};
  /// Optimal distance per class member, in class order.
  std::vector<Rational> per_d;
  /// First member attaining `worst` when the verdict fails.
  std::optional<std::size_t> violating;
  /// Witness distribution for the hardest member (HILL: the single Y).
  std::optional<Joint> witness;
  /// Per-z caps m_z of the witness; decomposable: the optimal assignment.
  std::vector<Rational> caps;
  /// Decomposable only: per-z tolerances eps(z).
  std::vector<Rational> tolerances;
};

/// E D(Y, Z) over feasible (Y, Z) with the z-marginal of j: either avg-case
/// (sum_z P(z) m_z <= gamma) or worst-case (m_z <= gamma for every z).
struct MetricRange {
  Rational target;  // E D(X, Z)
  Rational lower;
  Rational upper;
  std::vector<Rational> caps_lower;
  std::vector<Rational> caps_upper;
};
MetricRange metric_range(const Distinguisher& d, const Joint& j, const Rational& gamma, bool average);

/// Largest E D(Y, Z) over feasible (Y, Z).
Rational max_feasible_expectation(const Distinguisher& d, const Joint& j, const Rational& gamma, bool average);

/// min over feasible (Y, Z) of sum_z P(z) |eps_D(z)|, with the minimising caps.
struct ModulusMin {
  Rational value;
  std::vector<Rational> caps;
};
ModulusMin modulus_min(const Distinguisher& d, const Joint& j, const Rational& gamma, bool average);

/// min over budget assignments of E_z eps_z(m_z) where eps_z(m) is the worst
/// member's distance at cap m.
struct DecomposableMin {
  Rational value;
  std::vector<Rational> caps;
  std::vector<Rational> tolerances;
};
DecomposableMin decomposable_min(const DistinguisherClass& cls, const Joint& j, const Rational& gamma);

/// (Y, Z) with Y|Z=z the projection witness for each column at caps[z].
Joint projection_witness(const Distinguisher& d, const Joint& j, const std::vector<Rational>& caps);

EntropyVerdict min_entropy_verdict(const Joint& j, const EntropyParams& params);
EntropyVerdict metric_uncond(const Dist& x, const DistinguisherClass& cls, const EntropyParams& params);
EntropyVerdict metric_cond_worst(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params);
EntropyVerdict metric_cond_avg(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params);
/// Boolean classes only (NonBooleanClass otherwise).
EntropyVerdict modulus_cond(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params, bool average);
EntropyVerdict hill_cond_avg(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params);
EntropyVerdict decomposable_check(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params);

/// sum_z P(z) eps_D(z)^2 between p and q (shared z-marginal).
Rational squared_aggregate(const Distinguisher& d, const Joint& p, const Joint& q);
/// max over the class of squared_aggregate.
Rational squared_advantage(const Joint& p, const Joint& q, const DistinguisherClass& cls);
/// Squared indistinguishability of X from a given Y given Z: holds iff the
/// squared advantage is <= epsilon and Y has avg guess prob <= gamma.
EntropyVerdict squared_check(const Joint& x, const Joint& y, const DistinguisherClass& cls,
                             const EntropyParams& params);

}  // namespace entlab
