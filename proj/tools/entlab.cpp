// Command-line front end: compute, verify, reduce, search, generate.
// Exit codes: 0 ok, 1 violation, 2 usage or input error.

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "entlab/boost.hpp"
#include "entlab/error.hpp"
#include "entlab/harness.hpp"
#include "entlab/reductions.hpp"

using namespace entlab;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

Json rj(const Rational& r) { return rational_json(r); }

Json rlist(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(rj(r));
  return out;
}

Json ledger_value(const LedgerValue& v) {
  Json out{{"formula", v.formula}, {"approx", v.approx}, {"provenance", v.provenance}};
  if (v.exact) out["exact"] = rj(*v.exact);
  return out;
}

Json ledger_row(const LedgerRow& r) {
  Json out{{"assumption", r.assumption},
           {"gamma", ledger_value(r.gamma)},
           {"k", ledger_value(r.k)},
           {"epsilon", ledger_value(r.epsilon)},
           {"size", ledger_value(r.size)}};
  for (const auto& [name, v] : r.extra) out["extra"][name] = ledger_value(v);
  return out;
}

std::string action_name(FlipAction a) {
  switch (a) {
    case FlipAction::Keep: return "keep";
    case FlipAction::Flip: return "flip";
    case FlipAction::Zero: return "zero";
  }
  return "?";
}

const Distinguisher& first_member(const Scenario& s) {
  require(!s.cls.empty(), ErrorKind::InvalidArgument, "scenario class is empty");
  return s.cls.front();
}

// Uses params.epsilon when set, otherwise the worst-case modulus violation.
Rational violation_level(const Distinguisher& d, const Scenario& s) {
  if (s.params.epsilon > 0) return s.params.epsilon;
  return modulus_min(d, s.joint, s.params.gamma, false).value;
}

// ---- compute ----

int run_compute(const std::string& notion_name, const Scenario& s, Json& out) {
  const Notion notion = parse_notion(notion_name);
  EntropyVerdict v;
  switch (notion) {
    case Notion::Min: v = min_entropy_verdict(s.joint, s.params); break;
    case Notion::MetricUncond: v = metric_uncond(s.joint.x_marginal(), s.cls, s.params); break;
    case Notion::MetricWorst: v = metric_cond_worst(s.joint, s.cls, s.params); break;
    case Notion::MetricAvg: v = metric_cond_avg(s.joint, s.cls, s.params); break;
    case Notion::ModulusAvg: v = modulus_cond(s.joint, s.cls, s.params, true); break;
    case Notion::ModulusWorst: v = modulus_cond(s.joint, s.cls, s.params, false); break;
    case Notion::HillAvg: v = hill_cond_avg(s.joint, s.cls, s.params); break;
    case Notion::Decomposable: v = decomposable_check(s.joint, s.cls, s.params); break;
    case Notion::Squared: {
      require(s.options.contains("y"), ErrorKind::InvalidArgument, "squared needs options.y (a joint)");
      v = squared_check(s.joint, joint_from_json(s.options.at("y")), s.cls, s.params);
      break;
    }
  }
  out = verdict_to_json(v);
  return v.holds ? kOk : kViolation;
}

// ---- reduce ----

int run_reduce(const std::string& name, const std::optional<Scenario>& scenario, Json& out) {
  if (name == "tightness" && !scenario) {
    std::vector<Circuit> f;
    for (const char* t : {"x0", "x1", "and(x0,x1)", "xor(x0,x1)"}) f.push_back(parse_circuit(t, 2, 0));
    const auto r = tightness_demo(f);
    out = {{"reduction", name},          {"cap", rj(r.cap)},
           {"min_advantage", rj(r.min_advantage)}, {"good_mass", rj(r.good_mass)},
           {"cap_after_split", rj(r.cap_after_split)}, {"per_good_gap", rj(r.per_good_gap)},
           {"decomposition", rj(r.decomposition)}, {"worst_y", joint_to_json(r.worst_y)},
           {"certified", r.certified}};
    return r.certified ? kOk : kViolation;
  }
  require(scenario.has_value(), ErrorKind::InvalidArgument, "--scenario is required for '" + name + "'");
  const Scenario& s = *scenario;
  const Json& opt = s.options;
  out = Json{{"reduction", name}};

  if (name == "leakage") {
    require(opt.contains("x_distinguisher"), ErrorKind::InvalidArgument, "leakage needs options.x_distinguisher");
    const Domain x = s.joint.x_domain();
    const auto ds = distinguishers_from_json(opt.at("x_distinguisher"), x, Domain(0));
    require(ds.size() == 1, ErrorKind::InvalidArgument, "options.x_distinguisher must be one distinguisher");
    const Dist y = opt.contains("y") ? dist_from_json(opt.at("y"), x) : Dist::uniform(x);
    const auto w = leakage_witness(ds.front(), s.joint, y);
    out["epsilon"] = rj(w.epsilon);
    out["gamma"] = rj(w.gamma);
    out["caps"] = rlist(w.caps);
    out["gaps"] = rlist(w.gaps);
    Json wit = Json::array();
    for (const auto& d : w.witnesses) wit.push_back(d ? dist_to_json(*d) : Json(nullptr));
    out["witnesses"] = std::move(wit);
    out["certified"] = w.certified;
    return w.certified ? kOk : kViolation;
  }
  if (name == "chain-rule") {
    bool ok = true;
    Json arts = Json::array();
    for (const auto& a : modulus_chain_rule(s.joint, s.cls, s.params)) {
      arts.push_back({{"member", a.member},
                      {"slice_values", rlist(a.slice_values)},
                      {"modulus", rj(a.modulus)},
                      {"avg_guess", rj(a.avg_guess)},
                      {"eps_bound", rj(a.eps_bound)},
                      {"gamma_bound", rj(a.gamma_bound)},
                      {"certified", a.certified},
                      {"witness", joint_to_json(a.witness)}});
      ok = ok && a.certified;
    }
    out["artifacts"] = std::move(arts);
    out["certified"] = ok;
    return ok ? kOk : kViolation;
  }
  if (name == "core") {
    const auto& d = first_member(s);
    const auto r = core_lemma_event(d, s.joint, s.params.gamma, violation_level(d, s));
    Json acts = Json::array();
    for (auto a : r.actions) acts.push_back(action_name(a));
    out.update({{"violation", rj(r.violation)}, {"eps_z", rlist(r.eps_z)}, {"actions", acts},
                {"p_per_z", rj(r.p_per_z)}, {"use_complement", r.use_complement}, {"p_star", rj(r.p_star)},
                {"bound", rj(r.bound)}, {"chosen", distinguisher_to_json(r.chosen)}, {"certified", r.certified}});
    return r.certified ? kOk : kViolation;
  }
  if (name == "truncation") {
    const auto r = heavy_truncation(first_member(s), s.joint, s.params.gamma, opt.value("t", 0u));
    Json kept = Json::array();
    for (auto z : r.kept) kept.push_back(z);
    out.update({{"t", opt.value("t", 0u)}, {"kept", kept}, {"original", rj(r.original)},
                {"advantage", rj(r.advantage)}, {"bound", rj(r.bound)},
                {"truncated", distinguisher_to_json(r.truncated)}, {"certified", r.certified}});
    return r.certified ? kOk : kViolation;
  }
  if (name == "sampler") {
    const auto& d = first_member(s);
    const Domain x = s.joint.x_domain();
    std::vector<Dist> cols;
    if (opt.contains("columns")) {
      for (const auto& c : opt.at("columns")) cols.push_back(dist_from_json(c, x));
    } else {
      cols.assign(s.joint.z_size(), Dist::uniform(x));
    }
    const Sampler sampler{x, s.joint.z_domain(), cols, opt.value("sampler_size", std::uint64_t{x.bits()})};
    const auto a = sampler_distinguisher(d, s.joint, sampler, violation_level(d, s));
    out.update({{"samples", a.samples}, {"accept_x", rj(a.accept_x)}, {"accept_y", rj(a.accept_y)},
                {"gap", rj(a.gap)}, {"bound_x", rj(a.bound_x)}, {"bound_y", rj(a.bound_y)}, {"size", a.size},
                {"acceptance", distinguisher_to_json(a.acceptance)}, {"certified", a.certified}});
    if (const auto trials = opt.value("mc_trials", std::uint64_t{0}); trials > 0) {
      const auto mc = sampler_monte_carlo(d, s.joint, sampler, a, trials, s.seed.value_or(0));
      out["monte_carlo"] = {{"trials", mc.trials}, {"estimate_x", mc.estimate_x}, {"estimate_y", mc.estimate_y},
                            {"sigma_x", mc.sigma_x}, {"sigma_y", mc.sigma_y}, {"within", mc.within}};
      if (!mc.within) return kViolation;
    }
    return a.certified ? kOk : kViolation;
  }
  if (name == "count") {
    const auto& d = first_member(s);
    CountParams p;
    p.gamma_prime = s.params.gamma;
    p.eps_prime = violation_level(d, s);
    p.mode = opt.value("mode", std::string("sampling")) == "oracle" ? CountMode::ExactOracle : CountMode::ChernoffSampling;
    if (opt.contains("samples")) p.samples = opt.at("samples").get<std::uint64_t>();
    if (opt.contains("copies")) p.and_copies = opt.at("copies").get<unsigned>();
    const auto a = approx_count_distinguisher(d, s.joint, p);
    out.update({{"mode", p.mode == CountMode::ExactOracle ? "oracle" : "sampling"}, {"gamma_y", rj(a.gamma_y)},
                {"accept_x", rj(a.accept_x)}, {"accept_y", rj(a.accept_y)}, {"gap", rj(a.gap)},
                {"bound", rj(a.bound)}, {"estimator_failure", rj(a.estimator_failure)}, {"samples", a.samples},
                {"factor", rj(a.factor)}, {"conjunction_size", a.conjunction_size},
                {"majority_size", a.majority_size}, {"certified", a.certified}});
    return a.certified ? kOk : kViolation;
  }
  if (name == "threshold") {
    const auto& d = first_member(s);
    const Rational eps = s.params.epsilon > 0 ? s.params.epsilon
                                              : expect(d, s.joint) - max_feasible_expectation(d, s.joint, s.params.gamma, false);
    const auto r = real_to_boolean(d, s.joint, s.params.gamma, eps);
    Json scan = Json::array();
    for (const auto& [t, adv] : r.scan) scan.push_back({rj(t), rj(adv)});
    out.update({{"threshold", rj(r.threshold)}, {"real_advantage", rj(r.real_advantage)},
                {"boolean_advantage", rj(r.boolean_advantage)}, {"scan", scan},
                {"boolean", distinguisher_to_json(r.boolean)}, {"certified", r.certified}});
    return r.certified ? kOk : kViolation;
  }
  if (name == "tightness") {
    std::vector<Circuit> f;
    for (const auto& e : opt.at("f")) f.push_back(parse_circuit(e.get<std::string>(), 2, 0));
    const auto r = tightness_demo(f);
    out.update({{"min_advantage", rj(r.min_advantage)}, {"good_mass", rj(r.good_mass)},
                {"per_good_gap", rj(r.per_good_gap)}, {"decomposition", rj(r.decomposition)},
                {"certified", r.certified}});
    return r.certified ? kOk : kViolation;
  }
  if (name == "ledger") {
    const LedgerInputs in{s.params, opt.value("n", s.joint.x_domain().bits()), opt.value("m", s.joint.z_domain().bits()),
                          opt.value("t", 0u), opt.value("sampler_size", std::uint64_t{0})};
    Json rows = Json::array();
    for (const auto& a : ledger_assumptions()) rows.push_back(ledger_row(conversion_ledger(a, in)));
    out["rows"] = std::move(rows);
    return kOk;
  }
  if (name == "boost") {
    const Rational delta = opt.contains("delta") ? rational_from_json(opt.at("delta")) : Rational(1, 8);
    const auto r = metric_to_hill_boost(s.joint, s.cls, s.params.gamma, s.params.epsilon, delta);
    Json weights = Json::array();
    for (const auto& [w, i] : r.weights) weights.push_back({{"weight", rj(w)}, {"member", i}});
    out.update({{"game_value", rj(r.game_value)}, {"hill_holds", r.hill_holds}, {"rounds", r.rounds},
                {"length_bound", r.length_bound}, {"weights", weights}, {"combo_advantage", rj(r.combo_advantage)},
                {"certified", r.certified}});
    if (r.witness) out["witness"] = joint_to_json(*r.witness);
    return r.hill_holds || r.certified ? kOk : kViolation;
  }
  if (name == "hill-params") {
    const Rational delta = opt.contains("delta") ? rational_from_json(opt.at("delta")) : Rational(1, 8);
    const auto p = modulus_to_hill_params(s.params, opt.value("n", s.joint.x_domain().bits()),
                                          opt.value("m", s.joint.z_domain().bits()), delta);
    out["params"] = params_to_json(p);
    return kOk;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown reduction '" + name + "'");
}

// ---- human-readable output ----

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array() && v.size() > 8) return "[" + std::to_string(v.size()) + " items]";
  return v.dump();
}

void print_pretty(const Json& j, std::ostream& os) {
  std::size_t width = 0;
  for (const auto& [k, v] : j.items()) width = std::max(width, k.size());
  for (const auto& [k, v] : j.items()) {
    if (k == "certificates" || k == "witness") continue;
    os << std::left << std::setw(static_cast<int>(width) + 2) << k << cell(v) << '\n';
  }
  if (j.contains("violations")) {
    for (const auto& v : j.at("violations")) os << "  violation trial " << v.at("trial") << ": " << cell(v.at("reason")) << '\n';
  }
}

void emit(const Json& j, bool pretty) {
  if (pretty) {
    print_pretty(j, std::cout);
  } else {
    std::cout << j.dump() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional pseudoentropy laboratory"};
  app.require_subcommand(1);
  bool pretty = false;
  app.add_flag("--pretty", pretty, "Human-readable table instead of JSON");

  std::string notion, scenario_path, suite, reduction, target = "metric-vs-modulus";
  std::uint64_t trials = 100, seed = 1, budget = 10000;
  unsigned threads = 0;
  InstanceSpec spec;
  InstanceSpec shape{2, 1, 0, 1};

  auto* compute = app.add_subcommand("compute", "Evaluate one entropy notion on a scenario");
  compute->add_option("--notion", notion, "min, metric-uncond, metric-worst, metric-avg, modulus-avg, modulus-worst, "
                                          "hill-avg, decomposable, squared")->required();
  compute->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  compute->add_flag("--pretty", pretty);

  auto* verify = app.add_subcommand("verify", "Run a theorem verification suite");
  verify->add_option("--suite", suite, "Suite id, or 'all'")->required();
  verify->add_option("--trials", trials, "Number of instances")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "Master seed");
  verify->add_option("--threads", threads, "Worker threads (default: ENTLAB_THREADS or 1)");
  verify->add_flag("--pretty", pretty);
  bool timing = false;
  verify->add_flag("--timing", timing, "Include wall-clock seconds (makes reports run-dependent)");

  auto* reduce = app.add_subcommand("reduce", "Run a reduction and print its artifact");
  reduce->add_option("--reduction", reduction,
                     "leakage, chain-rule, core, truncation, sampler, count, threshold, tightness, ledger, boost, "
                     "hill-params")->required();
  reduce->add_option("--scenario", scenario_path, "Scenario JSON file");
  reduce->add_flag("--pretty", pretty);

  auto* search = app.add_subcommand("search", "Search for a separation between two notions");
  search->add_option("--target", target, "metric-vs-modulus or metric-vs-decomposable");
  search->add_option("--budget", budget, "Number of (joint, distinguisher, gamma) triples");
  search->add_option("--seed", seed, "Seed for the random phase");
  search->add_option("--n", shape.n, "x bits");
  search->add_option("--m", shape.m1, "z bits");
  search->add_flag("--pretty", pretty);

  auto* generate = app.add_subcommand("generate", "Print a random scenario");
  generate->add_option("--n", spec.n, "x bits");
  generate->add_option("--m", spec.m1, "z bits (first part)");
  generate->add_option("--m2", spec.m2, "second z part; > 0 pairs the z-domain");
  generate->add_option("--class-size", spec.class_size, "Class members");
  generate->add_flag("--complement-closed", spec.complement_closed);
  generate->add_flag("--real", spec.real_valued);
  generate->add_option("--support", spec.support, "Support size (0: full)");
  generate->add_option("--seed", seed, "Seed");
  generate->add_flag("--pretty", pretty);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Json out;
    int code = kOk;
    if (*compute) {
      code = run_compute(notion, read_scenario(scenario_path), out);
    } else if (*verify) {
      const unsigned workers = threads > 0 ? threads : threads_from_env();
      if (suite == "all") {
        out = Json::array();
        for (const auto& id : suite_ids()) {
          const auto r = run_suite(id, trials, seed, workers);
          if (!r.pass()) code = kViolation;
          out.push_back(report_to_json(r, timing));
        }
      } else {
        const auto r = run_suite(suite, trials, seed, workers);
        code = r.pass() ? kOk : kViolation;
        out = report_to_json(r, timing);
      }
    } else if (*reduce) {
      std::optional<Scenario> s;
      if (!scenario_path.empty()) s = read_scenario(scenario_path);
      code = run_reduce(reduction, s, out);
    } else if (*search) {
      out = separation_to_json(search_separation(target, budget, seed, shape));
    } else if (*generate) {
      out = scenario_to_json(generate_instance(spec, seed));
    }
    if (pretty && out.is_array()) {
      for (const auto& r : out) {
        print_pretty(r, std::cout);
        std::cout << '\n';
      }
    } else {
      emit(out, pretty);
    }
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
