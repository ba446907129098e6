#include "entlab/scenario.hpp"

#include <fstream>
#include <sstream>

#include "entlab/error.hpp"

namespace entlab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

unsigned bits_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() > kMaxDomainBits) {
    bad(std::string("'") + key + "' must be an integer in [0, " + std::to_string(kMaxDomainBits) + "]");
  }
  return v.get<unsigned>();
}

std::vector<Rational> rational_list(const Json& j, std::size_t expected, const char* what) {
  if (!j.is_array() || j.size() != expected) {
    bad(std::string(what) + " must be an array of " + std::to_string(expected) + " rationals");
  }
  std::vector<Rational> out;
  out.reserve(expected);
  for (const auto& v : j) out.push_back(rational_from_json(v));
  return out;
}

GateSet gates_from_json(const Json& j) {
  GateSet g{false, false, false, false, false};
  for (const auto& name : j) {
    const std::string s = name.get<std::string>();
    if (s == "not") g.not_ = true;
    else if (s == "and") g.and_ = true;
    else if (s == "or") g.or_ = true;
    else if (s == "xor") g.xor_ = true;
    else if (s == "maj") g.maj = true;
    else bad("unknown gate '" + s + "'");
  }
  return g;
}

Distinguisher single(const Json& spec, const Domain& x, const Domain& z, const std::filesystem::path& base) {
  auto all = distinguishers_from_json(spec, x, z, base);
  if (all.size() != 1) bad("nested distinguisher spec must describe exactly one member");
  return std::move(all.front());
}

}  // namespace

Json rational_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  bad("expected a rational written as \"p/q\"");
}

Json joint_to_json(const Joint& j) {
  Json out;
  out["x_bits"] = j.x_domain().bits();
  if (j.pair()) {
    out["z_pair"] = {j.pair()->m1, j.pair()->m2};
  } else {
    out["z_bits"] = j.z_domain().bits();
  }
  Json probs = Json::array();
  for (const auto& p : j.probs()) probs.push_back(rational_json(p));
  out["probs"] = std::move(probs);
  return out;
}

Joint joint_from_json(const Json& j) {
  const unsigned n = bits_field(j, "x_bits");
  std::optional<ZPair> pair;
  unsigned m = 0;
  if (j.contains("z_pair")) {
    const Json& zp = j.at("z_pair");
    if (!zp.is_array() || zp.size() != 2) bad("'z_pair' must be [m1, m2]");
    pair = ZPair{zp[0].get<unsigned>(), zp[1].get<unsigned>()};
    m = pair->m1 + pair->m2;
  } else {
    m = bits_field(j, "z_bits");
  }
  if (n + m > kMaxDomainBits) bad("x_bits + z_bits exceeds " + std::to_string(kMaxDomainBits));
  const std::size_t cells = std::size_t{1} << (n + m);
  return Joint(Domain(n), Domain(m), rational_list(field(j, "probs"), cells, "'probs'"), pair);
}

Json dist_to_json(const Dist& d) {
  Json out = Json::array();
  for (const auto& p : d.probs()) out.push_back(rational_json(p));
  return out;
}

Dist dist_from_json(const Json& j, const Domain& domain) {
  return Dist(domain, rational_list(j, domain.size(), "distribution"));
}

Json distinguisher_to_json(const Distinguisher& d) {
  Json out;
  out["kind"] = "table";
  out["type"] = std::string(to_string(d.kind()));
  out["size"] = d.size();
  out["provenance"] = d.provenance();
  if (d.circuit()) out["dsl"] = print_circuit(*d.circuit());
  Json vals = Json::array();
  for (const auto& v : d.values()) vals.push_back(rational_json(v));
  out["values"] = std::move(vals);
  return out;
}

DistinguisherClass distinguishers_from_json(const Json& spec, const Domain& x, const Domain& z,
                                            const std::filesystem::path& base) {
  if (spec.is_string()) return {Distinguisher::from_circuit(parse_circuit(spec.get<std::string>(), x.bits(), z.bits()))};
  const std::string kind = field(spec, "kind").get<std::string>();
  const std::size_t cells = x.size() * z.size();
  if (kind == "table") {
    auto values = rational_list(field(spec, "values"), cells, "'values'");
    const std::uint64_t size = spec.value("size", std::uint64_t{0});
    return {Distinguisher::from_table(x, z, std::move(values), size)};
  }
  if (kind == "dsl") {
    return {Distinguisher::from_circuit(parse_circuit(field(spec, "expr").get<std::string>(), x.bits(), z.bits()))};
  }
  if (kind == "dsl_file") {
    std::filesystem::path p = field(spec, "path").get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    return class_from_circuits(read_dsl_file(p, x.bits(), z.bits()));
  }
  if (kind == "enumerate") {
    EnumerateSpec e;
    e.n = x.bits();
    e.m = z.bits();
    e.max_size = spec.value("max_size", 1u);
    if (spec.contains("gates")) e.gates = gates_from_json(spec.at("gates"));
    e.dedup = spec.value("dedup", true);
    return class_from_circuits(enumerate_circuits(e));
  }
  if (kind == "constant") return {Distinguisher::constant(x, z, rational_from_json(field(spec, "value")))};
  if (kind == "complement") return {complement(single(field(spec, "of"), x, z, base))};
  if (kind == "threshold") {
    return {threshold(single(field(spec, "of"), x, z, base), rational_from_json(field(spec, "t")))};
  }
  if (kind == "combo") {
    std::vector<std::pair<Rational, Distinguisher>> parts;
    for (const auto& part : field(spec, "parts")) {
      parts.emplace_back(rational_from_json(field(part, "weight")), single(field(part, "of"), x, z, base));
    }
    return {convex_combine(parts)};
  }
  bad("unknown distinguisher kind '" + kind + "'");
}

Json params_to_json(const EntropyParams& p) {
  Json out;
  out["gamma"] = rational_json(p.gamma);
  out["k"] = p.display_k();
  out["epsilon"] = rational_json(p.epsilon);
  if (p.size_budget) out["size"] = *p.size_budget;
  return out;
}

EntropyParams params_from_json(const Json& j) {
  Rational gamma(1);
  if (j.contains("gamma")) {
    gamma = rational_from_json(j.at("gamma"));
  } else if (j.contains("k")) {
    if (!j.at("k").is_number_integer()) bad("'k' must be an integer; use 'gamma' for fractional levels");
    gamma = pow2(-j.at("k").get<long>());
  } else {
    bad("params need 'gamma' or 'k'");
  }
  const Rational eps = j.contains("epsilon") ? rational_from_json(j.at("epsilon")) : Rational(0);
  std::optional<std::uint64_t> size;
  if (j.contains("size")) size = j.at("size").get<std::uint64_t>();
  return EntropyParams(gamma, eps, size);
}

Json scenario_to_json(const Scenario& s) {
  Json out = joint_to_json(s.joint);
  Json cls = Json::array();
  for (const auto& d : s.cls) cls.push_back(distinguisher_to_json(d));
  out["class"] = std::move(cls);
  out["params"] = params_to_json(s.params);
  if (s.seed) out["seed"] = *s.seed;
  if (s.trials) out["trials"] = s.trials;
  if (!s.options.empty()) out["options"] = s.options;
  return out;
}

Scenario scenario_from_json(const Json& j, const std::filesystem::path& base) {
  try {
    Scenario s;
    s.joint = joint_from_json(j);
    if (j.contains("class")) {
      for (const auto& spec : j.at("class")) {
        for (auto& d : distinguishers_from_json(spec, s.joint.x_domain(), s.joint.z_domain(), base)) {
          s.cls.push_back(std::move(d));
        }
      }
    }
    if (j.value("complement_closure", false)) s.cls = complement_closure(s.cls);
    if (j.contains("params")) s.params = params_from_json(j.at("params"));
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    s.trials = j.value("trials", std::uint64_t{0});
    if (j.contains("options")) s.options = j.at("options");
    return s;
  } catch (const Json::exception& e) {
    bad(std::string("scenario: ") + e.what());
  }
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  return scenario_from_json(j, path.parent_path());
}

Json verdict_to_json(const EntropyVerdict& v) {
  Json out;
  out["notion"] = std::string(to_string(v.notion));
  out["params"] = params_to_json(v.params);
  out["holds"] = v.holds;
  out["worst"] = rational_json(v.worst);
  if (v.notion == Notion::Min) out["k"] = neg_log2(v.worst);
  Json per = Json::array();
  for (const auto& r : v.per_d) per.push_back(rational_json(r));
  out["per_member"] = std::move(per);
  if (v.violating) out["violating"] = *v.violating;
  if (v.witness) out["witness"] = joint_to_json(*v.witness);
  if (!v.caps.empty()) {
    Json caps = Json::array();
    for (const auto& c : v.caps) caps.push_back(rational_json(c));
    out["caps"] = std::move(caps);
  }
  if (!v.tolerances.empty()) {
    Json tol = Json::array();
    for (const auto& t : v.tolerances) tol.push_back(rational_json(t));
    out["tolerances"] = std::move(tol);
  }
  return out;
}

}  // namespace entlab
