#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "entlab/distinguisher.hpp"
#include "entlab/distribution.hpp"
#include "entlab/engine.hpp"

namespace entlab {

using Json = nlohmann::ordered_json;

/// Input bundle for the CLI: a joint, a class, parameters and free-form
/// per-command options. Rationals are written as "p/q" strings.
struct Scenario {
  Joint joint;
  DistinguisherClass cls;
  EntropyParams params;
  std::optional<std::uint64_t> seed;
  std::uint64_t trials = 0;
  Json options = Json::object();
};

Json rational_json(const Rational& r);
/// Accepts "p/q" strings and JSON integers. Throws Error(ParseError).
Rational rational_from_json(const Json& j);

Json joint_to_json(const Joint& j);
Joint joint_from_json(const Json& j);

Json dist_to_json(const Dist& d);
Dist dist_from_json(const Json& j, const Domain& domain);

Json distinguisher_to_json(const Distinguisher& d);
/// One spec can expand to several members ("dsl_file", "enumerate").
DistinguisherClass distinguishers_from_json(const Json& spec, const Domain& x, const Domain& z,
                                            const std::filesystem::path& base = {});

Json params_to_json(const EntropyParams& p);
EntropyParams params_from_json(const Json& j);

Json scenario_to_json(const Scenario& s);
/// Relative "dsl_file" paths resolve against `base`.
Scenario scenario_from_json(const Json& j, const std::filesystem::path& base = {});
/// Parse errors of any kind surface as Error(ParseError).
Scenario read_scenario(const std::filesystem::path& path);

Json verdict_to_json(const EntropyVerdict& v);

}  // namespace entlab
