#include "entlab/engine.hpp"

#include <algorithm>
#include <array>

#include "entlab/error.hpp"
#include "entlab/lp_models.hpp"
#include "entlab/waterfill.hpp"

namespace entlab {

namespace {

constexpr std::array<std::pair<Notion, std::string_view>, 9> kNotionNames = {{
    {Notion::Min, "min"},
    {Notion::MetricUncond, "metric-uncond"},
    {Notion::MetricWorst, "metric-worst"},
    {Notion::MetricAvg, "metric-avg"},
    {Notion::ModulusAvg, "modulus-avg"},
    {Notion::ModulusWorst, "modulus-worst"},
    {Notion::HillAvg, "hill-avg"},
    {Notion::Decomposable, "decomposable"},
    {Notion::Squared, "squared"},
}};

void check_domains(const Distinguisher& d, const Joint& j) {
  require(d.x_domain() == j.x_domain() && d.z_domain() == j.z_domain(), ErrorKind::DomainMismatch,
          "distinguisher and joint live on different domains");
}

void check_gamma(const Joint& j, const Rational& gamma) {
  require(gamma * static_cast<long>(j.x_size()) >= 1, ErrorKind::CapOutOfRange,
          "gamma " + to_string(gamma) + " is below 2^-n: no distribution qualifies");
}

Rational column_target(const Distinguisher& d, const Joint& j, std::size_t z) {
  Rational total(0);
  for (std::size_t x = 0; x < j.x_size(); ++x) total += d.at(x, z) * j.at(x, z);
  return total / j.z_mass(z);
}

std::vector<Rational> z_weights(const Joint& j) { return {j.z_marginal().begin(), j.z_marginal().end()}; }

Joint fill_joint(const Distinguisher& d, const Joint& j, const std::vector<Rational>& caps, bool descending) {
  std::vector<Rational> probs(j.x_size() * j.z_size(), Rational(0));
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    const auto mass = waterfill_mass(d.column(z), caps[z], descending);
    for (std::size_t x = 0; x < j.x_size(); ++x) probs[x * j.z_size() + z] = j.z_mass(z) * mass[x];
  }
  return Joint(j.x_domain(), j.z_domain(), std::move(probs));
}

Joint mix(const Joint& a, const Joint& b, const Rational& lambda) {
  std::vector<Rational> probs(a.probs().size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = lambda * a.probs()[i] + (1 - lambda) * b.probs()[i];
  return Joint(a.x_domain(), a.z_domain(), std::move(probs));
}

void require_boolean(const DistinguisherClass& cls) {
  for (const auto& d : cls) {
    require(d.is_boolean(), ErrorKind::NonBooleanClass,
            "modulus entropy is defined against boolean classes; threshold real members first");
  }
}

EntropyVerdict finish(Notion notion, const EntropyParams& params, std::vector<Rational> per_d) {
  EntropyVerdict v;
  v.notion = notion;
  v.params = params;
  v.per_d = std::move(per_d);
  for (std::size_t i = 0; i < v.per_d.size(); ++i) {
    if (v.per_d[i] > v.worst) v.worst = v.per_d[i];
  }
  v.holds = v.worst <= params.epsilon;
  if (!v.holds) {
    for (std::size_t i = 0; i < v.per_d.size(); ++i) {
      if (v.per_d[i] == v.worst) {
        v.violating = i;
        break;
      }
    }
  }
  return v;
}

std::size_t hardest(const EntropyVerdict& v) {
  for (std::size_t i = 0; i < v.per_d.size(); ++i) {
    if (v.per_d[i] == v.worst) return i;
  }
  return 0;
}

EntropyVerdict metric_verdict(Notion notion, const Joint& j, const DistinguisherClass& cls,
                              const EntropyParams& params, bool average) {
  check_gamma(j, params.gamma);
  std::vector<Rational> per_d;
  std::vector<MetricRange> ranges;
  for (const auto& d : cls) {
    ranges.push_back(metric_range(d, j, params.gamma, average));
    per_d.push_back(distance_to(ranges.back().target, ranges.back().lower, ranges.back().upper));
  }
  EntropyVerdict v = finish(notion, params, std::move(per_d));
  if (cls.empty()) return v;
  const std::size_t h = hardest(v);
  const MetricRange& r = ranges[h];
  const Joint hi = fill_joint(cls[h], j, r.caps_upper, true);
  const Joint lo = fill_joint(cls[h], j, r.caps_lower, false);
  if (r.target >= r.upper) {
    v.witness = hi;
    v.caps = r.caps_upper;
  } else if (r.target <= r.lower) {
    v.witness = lo;
    v.caps = r.caps_lower;
  } else {
    const Rational lambda = (r.target - r.lower) / (r.upper - r.lower);
    v.witness = mix(hi, lo, lambda);
    v.caps.resize(j.z_size());
    for (std::size_t z = 0; z < j.z_size(); ++z) v.caps[z] = lambda * r.caps_upper[z] + (1 - lambda) * r.caps_lower[z];
  }
  return v;
}

}  // namespace

std::string_view to_string(Notion notion) {
  for (const auto& [n, name] : kNotionNames) {
    if (n == notion) return name;
  }
  return "min";
}

Notion parse_notion(std::string_view name) {
  for (const auto& [n, s] : kNotionNames) {
    if (s == name) return n;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown notion '" + std::string(name) + "'");
}

MetricRange metric_range(const Distinguisher& d, const Joint& j, const Rational& gamma, bool average) {
  check_domains(d, j);
  check_gamma(j, gamma);
  MetricRange r;
  r.target = expect(d, j);
  if (average) {
    const auto w = z_weights(j);
    std::vector<PiecewiseLinear> up, down;
    for (std::size_t z = 0; z < j.z_size(); ++z) {
      const auto col = d.column(z);
      up.push_back(upper_curve(col));
      down.push_back(lower_curve(col).negated());
    }
    const Allocation a = allocate_concave(w, up, gamma);
    const Allocation b = allocate_concave(w, down, gamma);
    r.upper = a.value;
    r.caps_upper = a.x;
    r.lower = -b.value;
    r.caps_lower = b.x;
    return r;
  }
  const Rational cap = min_of(gamma, Rational(1));
  r.lower = 0;
  r.upper = 0;
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    const auto iv = achievable_interval(d.column(z), cap);
    r.lower += j.z_mass(z) * iv.lower;
    r.upper += j.z_mass(z) * iv.upper;
  }
  r.caps_lower.assign(j.z_size(), cap);
  r.caps_upper = r.caps_lower;
  return r;
}

Rational max_feasible_expectation(const Distinguisher& d, const Joint& j, const Rational& gamma, bool average) {
  check_domains(d, j);
  check_gamma(j, gamma);
  if (!average) return metric_range(d, j, gamma, false).upper;
  std::vector<PiecewiseLinear> up;
  for (std::size_t z = 0; z < j.z_size(); ++z) up.push_back(upper_curve(d.column(z)));
  return allocate_concave(z_weights(j), up, gamma).value;
}

ModulusMin modulus_min(const Distinguisher& d, const Joint& j, const Rational& gamma, bool average) {
  check_domains(d, j);
  check_gamma(j, gamma);
  std::vector<PiecewiseLinear> gains;
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    const Rational a = j.supported(z) ? column_target(d, j, z) : Rational(0);
    gains.push_back(distance_curve(d.column(z), a).negated());
  }
  ModulusMin out;
  if (average) {
    const Allocation a = allocate_concave(z_weights(j), gains, gamma);
    out.value = -a.value;
    out.caps = a.x;
    return out;
  }
  const Rational cap = min_of(gamma, Rational(1));
  out.value = 0;
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (j.supported(z)) out.value -= j.z_mass(z) * gains[z].eval(cap);
  }
  out.caps.assign(j.z_size(), cap);
  return out;
}

DecomposableMin decomposable_min(const DistinguisherClass& cls, const Joint& j, const Rational& gamma) {
  check_gamma(j, gamma);
  const std::size_t nx = j.x_size();
  std::vector<PiecewiseLinear> gains;
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    std::vector<PiecewiseLinear> parts;
    if (j.supported(z)) {
      for (const auto& d : cls) {
        check_domains(d, j);
        parts.push_back(distance_curve(d.column(z), column_target(d, j, z)));
      }
    }
    if (parts.empty()) {
      // Unconstrained column: zero tolerance at every cap.
      parts.push_back(PiecewiseLinear{{Rational(1, static_cast<long>(nx)), Rational(1)}, {Rational(0), Rational(0)}});
      if (nx == 1) parts.back() = PiecewiseLinear{{Rational(1)}, {Rational(0)}};
    }
    gains.push_back(upper_envelope(parts).negated());
  }
  const Allocation a = allocate_concave(z_weights(j), gains, gamma);
  DecomposableMin out;
  out.value = -a.value;
  out.caps = a.x;
  for (std::size_t z = 0; z < j.z_size(); ++z) out.tolerances.push_back(-gains[z].eval(a.x[z]));
  return out;
}

Joint projection_witness(const Distinguisher& d, const Joint& j, const std::vector<Rational>& caps) {
  check_domains(d, j);
  std::vector<Rational> probs(j.x_size() * j.z_size(), Rational(0));
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    const auto y = interval_witness(d.column(z), caps[z], column_target(d, j, z));
    for (std::size_t x = 0; x < j.x_size(); ++x) probs[x * j.z_size() + z] = j.z_mass(z) * y[x];
  }
  return Joint(j.x_domain(), j.z_domain(), std::move(probs));
}

EntropyVerdict min_entropy_verdict(const Joint& j, const EntropyParams& params) {
  EntropyVerdict v;
  v.notion = Notion::Min;
  v.params = params;
  v.worst = cond_guess_prob_avg(j);
  v.holds = v.worst <= params.gamma;
  return v;
}

EntropyVerdict metric_uncond(const Dist& x, const DistinguisherClass& cls, const EntropyParams& params) {
  return metric_verdict(Notion::MetricUncond, Joint::from_dist(x), cls, params, false);
}

EntropyVerdict metric_cond_worst(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params) {
  return metric_verdict(Notion::MetricWorst, j, cls, params, false);
}

EntropyVerdict metric_cond_avg(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params) {
  return metric_verdict(Notion::MetricAvg, j, cls, params, true);
}

EntropyVerdict modulus_cond(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params,
                            bool average) {
  require_boolean(cls);
  check_gamma(j, params.gamma);
  std::vector<Rational> per_d;
  std::vector<std::vector<Rational>> caps;
  for (const auto& d : cls) {
    ModulusMin m = modulus_min(d, j, params.gamma, average);
    per_d.push_back(m.value);
    caps.push_back(std::move(m.caps));
  }
  EntropyVerdict v = finish(average ? Notion::ModulusAvg : Notion::ModulusWorst, params, std::move(per_d));
  if (!cls.empty()) {
    const std::size_t h = hardest(v);
    v.caps = caps[h];
    v.witness = projection_witness(cls[h], j, v.caps);
  }
  return v;
}

EntropyVerdict hill_cond_avg(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params) {
  check_gamma(j, params.gamma);
  GameSolution g = lp_hill_game(cls, j, params.gamma);
  EntropyVerdict v;
  v.notion = Notion::HillAvg;
  v.params = params;
  v.worst = g.value;
  v.holds = g.value <= params.epsilon;
  for (const auto& d : cls) v.per_d.push_back(advantage(d, j, g.witness));
  if (!v.holds) {
    for (std::size_t i = 0; i < v.per_d.size(); ++i) {
      if (v.per_d[i] == v.worst) {
        v.violating = i;
        break;
      }
    }
  }
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    Rational best(0);
    for (std::size_t x = 0; x < j.x_size(); ++x) best = max_of(best, g.witness.at(x, z));
    v.caps.push_back(j.supported(z) ? Rational(best / j.z_mass(z)) : Rational(0));
  }
  v.witness = std::move(g.witness);
  return v;
}

EntropyVerdict decomposable_check(const Joint& j, const DistinguisherClass& cls, const EntropyParams& params) {
  DecomposableMin m = decomposable_min(cls, j, params.gamma);
  EntropyVerdict v;
  v.notion = Notion::Decomposable;
  v.params = params;
  v.worst = m.value;
  v.holds = m.value <= params.epsilon;
  v.caps = std::move(m.caps);
  v.tolerances = std::move(m.tolerances);
  return v;
}

Rational squared_aggregate(const Distinguisher& d, const Joint& p, const Joint& q) {
  const AdvantageProfile prof = advantage_profile(d, p, q);
  Rational total(0);
  for (std::size_t z = 0; z < p.z_size(); ++z) total += p.z_mass(z) * prof.gaps[z] * prof.gaps[z];
  return total;
}

Rational squared_advantage(const Joint& p, const Joint& q, const DistinguisherClass& cls) {
  Rational best(0);
  for (const auto& d : cls) best = max_of(best, squared_aggregate(d, p, q));
  return best;
}

EntropyVerdict squared_check(const Joint& x, const Joint& y, const DistinguisherClass& cls,
                             const EntropyParams& params) {
  std::vector<Rational> per_d;
  for (const auto& d : cls) per_d.push_back(squared_aggregate(d, x, y));
  EntropyVerdict v = finish(Notion::Squared, params, std::move(per_d));
  v.holds = v.holds && cond_guess_prob_avg(y) <= params.gamma;
  v.witness = y;
  return v;
}

}  // namespace entlab
