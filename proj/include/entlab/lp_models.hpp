#pragma once

#include "entlab/distinguisher.hpp"
#include "entlab/distribution.hpp"

namespace entlab {

// Exact LP formulations of the engine's optimisations. They are independent of
// the greedy allocators and serve as ground truth. Variables are the joint
// masses q(x, z) of (Y, Z) on the support of Z and per-z levels w_z = P(z) m_z.

/// max (or min) of E D(Y, Z) over (Y, Z) with avg guessing prob <= gamma.
Rational lp_metric_avg_extreme(const Distinguisher& d, const Joint& j, const Rational& gamma, bool maximize);

/// min over the same set of sum_z |sum_x D(x, z) (P(x, z) - q(x, z))|.
Rational lp_modulus_avg(const Distinguisher& d, const Joint& j, const Rational& gamma);

/// min sum_z t_z with one witness q_D per member sharing the levels w_z and
/// t_z >= |sum_x D(x, z)(P(x, z) - q_D(x, z))| for every member.
Rational lp_decomposable(const DistinguisherClass& cls, const Joint& j, const Rational& gamma);

struct GameSolution {
  Rational value;  // min over Y of max over D of |E D(X, Z) - E D(Y, Z)|
  Joint witness;   // the minimising (Y, Z)
};
GameSolution lp_hill_game(const DistinguisherClass& cls, const Joint& j, const Rational& gamma);

}  // namespace entlab
