#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "entlab/scenario.hpp"

namespace entlab {

struct InstanceSpec {
  unsigned n = 2;
  unsigned m1 = 2;
  unsigned m2 = 0;               // > 0 pairs the z-domain as (Z1, Z2)
  std::size_t class_size = 4;
  bool complement_closed = false;
  bool real_valued = false;
  std::size_t support = 0;       // > 0: mass on this many random cells only
  unsigned denom_bits = 10;      // masses are multiples of 2^-denom_bits
};

/// Deterministic per (spec, seed). Masses are dyadic and sum to exactly 1.
Scenario generate_instance(const InstanceSpec& spec, std::uint64_t seed);

/// Random dyadic probability vector of `len` entries with denominator 2^bits.
std::vector<Rational> random_dyadic(std::mt19937_64& rng, std::size_t len, unsigned bits);

struct SuiteReport {
  std::string suite;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t instances = 0;
  std::vector<Json> violations;    // empty iff the suite passes
  std::vector<Json> certificates;  // one per instance, in trial order
  Json summary = Json::object();
  double wall_seconds = 0;         // measured, but only serialized on request

  bool pass() const { return violations.empty(); }
};

std::vector<std::string> suite_ids();

/// Throws Error(UnknownSuite). Trials run on up to `threads` workers; the
/// report does not depend on the thread count.
SuiteReport run_suite(const std::string& id, std::uint64_t trials, std::uint64_t seed, unsigned threads = 1);

/// Wall-clock time is left out unless asked for, so reports stay byte-identical.
Json report_to_json(const SuiteReport& r, bool with_timing = false);

/// Thread count from ENTLAB_THREADS (default 1, capped at hardware concurrency).
unsigned threads_from_env();

struct SeparationReport {
  std::string target;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::uint64_t examined = 0;
  bool found = false;
  Rational best_gap;        // stronger-notion optimum minus weaker-notion optimum
  std::optional<Scenario> witness;
  Json details = Json::object();
};

/// target: "metric-vs-modulus" or "metric-vs-decomposable". Looks for a joint
/// and class where the weaker notion holds at (gamma, eps) but the stronger
/// one fails. Exhaustive over tiny dyadic tables first, then random.
SeparationReport search_separation(const std::string& target, std::uint64_t budget, std::uint64_t seed,
                                   const InstanceSpec& shape = {2, 1, 0, 1});

Json separation_to_json(const SeparationReport& r);

}  // namespace entlab
