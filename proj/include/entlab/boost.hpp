#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "entlab/distinguisher.hpp"
#include "entlab/distribution.hpp"

namespace entlab {

struct BoostConfig {
  double c = 16.0;               // round-count constant in T = ceil(c ln|Omega| / delta^2)
  unsigned weight_bits = 20;     // averaged weights are rounded to multiples of 2^-weight_bits
};

std::uint64_t boost_length_bound(std::size_t omega, const Rational& delta, double c = 16.0);

struct BoostResult {
  Rational game_value;  // min over feasible Y of max over D of |E D(X,Z) - E D(Y,Z)|
  bool hill_holds = false;
  std::optional<Joint> witness;  // set when hill_holds

  std::uint64_t rounds = 0;
  std::uint64_t length_bound = 0;
  std::optional<Distinguisher> combo;
  std::vector<std::pair<Rational, std::size_t>> weights;  // (weight, class index), support only
  Rational combo_advantage;  // E D'(X,Z) - max over feasible Y of E D'(Y,Z), exact
  bool certified = false;    // combo_advantage >= epsilon
};

// Average-case HILL versus metric against convex combinations. The LP game
// value is ground truth; when it exceeds epsilon, multiplicative weights over
// the class against best-responding Y produces the distinguishing combination.
BoostResult metric_to_hill_boost(const Joint& j, const DistinguisherClass& cls, const Rational& gamma,
                                 const Rational& epsilon, const Rational& delta, const BoostConfig& config = {});

}  // namespace entlab
