#include "entlab/distinguisher.hpp"

#include <algorithm>
#include <set>

#include "entlab/error.hpp"

namespace entlab {

std::string_view to_string(DKind kind) {
  switch (kind) {
    case DKind::Boolean: return "boolean";
    case DKind::Real: return "real";
    case DKind::Randomized: return "randomized";
  }
  return "real";
}

namespace {

bool all_boolean(const std::vector<Rational>& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r == 0 || r == 1; });
}

void check_same_domains(const Distinguisher& d, const Joint& j) {
  require(d.x_domain() == j.x_domain() && d.z_domain() == j.z_domain(), ErrorKind::DomainMismatch,
          "distinguisher domain (" + std::to_string(d.x_domain().bits()) + "," +
              std::to_string(d.z_domain().bits()) + ") vs joint (" + std::to_string(j.x_domain().bits()) +
              "," + std::to_string(j.z_domain().bits()) + ")");
}

}  // namespace

Distinguisher::Distinguisher(Domain x_domain, Domain z_domain, std::vector<Rational> values, DKind kind,
                             std::uint64_t size, std::string provenance)
    : x_domain_(x_domain),
      z_domain_(z_domain),
      values_(std::move(values)),
      kind_(kind),
      size_(size),
      provenance_(std::move(provenance)) {
  require(values_.size() == x_domain_.size() * z_domain_.size(), ErrorKind::DomainMismatch,
          "distinguisher table has the wrong length");
  for (const auto& v : values_) {
    require(v >= 0 && v <= 1, ErrorKind::InvalidArgument, "distinguisher value " + to_string(v) + " outside [0,1]");
  }
  if (kind_ == DKind::Boolean) {
    require(all_boolean(values_), ErrorKind::InvalidArgument, "boolean distinguisher with a fractional value");
  }
}

Distinguisher Distinguisher::from_table(Domain x_domain, Domain z_domain, std::vector<Rational> values,
                                        std::uint64_t size) {
  const DKind kind = all_boolean(values) ? DKind::Boolean : DKind::Real;
  return Distinguisher(x_domain, z_domain, std::move(values), kind, size, "table");
}

Distinguisher Distinguisher::from_circuit(const Circuit& c) {
  const TruthTable tt = truth_table(c);
  std::vector<Rational> v(tt.rows());
  for (std::size_t row = 0; row < tt.rows(); ++row) v[row] = tt.get(row) ? 1 : 0;
  Distinguisher d(Domain(c.n()), Domain(c.m()), std::move(v), DKind::Boolean, c.size(),
                  "circuit:" + print_circuit(c));
  d.circuit_ = c;
  return d;
}

Distinguisher Distinguisher::constant(Domain x_domain, Domain z_domain, const Rational& v) {
  return from_table(x_domain, z_domain, std::vector<Rational>(x_domain.size() * z_domain.size(), v));
}

std::vector<Rational> Distinguisher::column(std::size_t z) const {
  std::vector<Rational> col(x_size());
  for (std::size_t x = 0; x < x_size(); ++x) col[x] = at(x, z);
  return col;
}

Rational Distinguisher::count(std::size_t z) const {
  Rational total(0);
  for (std::size_t x = 0; x < x_size(); ++x) total += at(x, z);
  return total;
}

Rational expect(const Distinguisher& d, const Joint& j) {
  check_same_domains(d, j);
  Rational total(0);
  for (std::size_t i = 0; i < d.values().size(); ++i) {
    if (j.probs()[i] != 0 && d.values()[i] != 0) total += j.probs()[i] * d.values()[i];
  }
  return total;
}

Rational advantage(const Distinguisher& d, const Joint& p, const Joint& q) {
  return abs(expect(d, p) - expect(d, q));
}

AdvantageProfile advantage_profile(const Distinguisher& d, const Joint& p, const Joint& q) {
  check_same_domains(d, p);
  check_same_domains(d, q);
  for (std::size_t z = 0; z < p.z_size(); ++z) {
    require(p.z_mass(z) == q.z_mass(z), ErrorKind::ZMarginalMismatch,
            "z-marginals differ at z = " + std::to_string(z));
  }
  AdvantageProfile out;
  out.gaps.assign(p.z_size(), Rational(0));
  out.metric = 0;
  out.modulus = 0;
  for (std::size_t z = 0; z < p.z_size(); ++z) {
    if (!p.supported(z)) continue;
    Rational diff(0);  // P(z) * eps_D(z)
    for (std::size_t x = 0; x < p.x_size(); ++x) diff += d.at(x, z) * (p.at(x, z) - q.at(x, z));
    out.gaps[z] = diff / p.z_mass(z);
    out.metric += diff;
    out.modulus += abs(diff);
  }
  return out;
}

Distinguisher complement(const Distinguisher& d) {
  std::vector<Rational> v(d.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1 - d.values()[i];
  return Distinguisher(d.x_domain(), d.z_domain(), std::move(v), d.kind(), d.size() + 1,
                       "complement(" + d.provenance() + ")");
}

Distinguisher convex_combine(const std::vector<std::pair<Rational, Distinguisher>>& parts) {
  require(!parts.empty(), ErrorKind::BadWeights, "empty combination");
  Rational total(0);
  for (const auto& [w, d] : parts) {
    require(w >= 0, ErrorKind::BadWeights, "negative weight " + to_string(w));
    require(d.x_domain() == parts.front().second.x_domain() && d.z_domain() == parts.front().second.z_domain(),
            ErrorKind::DomainMismatch, "combination parts over different domains");
    total += w;
  }
  require(total == 1, ErrorKind::BadWeights, "weights sum to " + to_string(total));
  const auto& first = parts.front().second;
  std::vector<Rational> v(first.values().size(), Rational(0));
  std::uint64_t size = parts.size();
  bool randomized = false;
  for (const auto& [w, d] : parts) {
    if (w == 0) continue;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += w * d.values()[i];
    size += d.size();
    randomized = randomized || d.kind() != DKind::Real;
  }
  const DKind kind = all_boolean(v) ? DKind::Boolean : (randomized ? DKind::Randomized : DKind::Real);
  return Distinguisher(first.x_domain(), first.z_domain(), std::move(v), kind, size,
                       "combo(" + std::to_string(parts.size()) + " parts)");
}

Distinguisher threshold(const Distinguisher& d, const Rational& t) {
  std::vector<Rational> v(d.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = d.values()[i] > t ? 1 : 0;
  return Distinguisher(d.x_domain(), d.z_domain(), std::move(v), DKind::Boolean, d.size() + 1,
                       "threshold(" + d.provenance() + "," + to_string(t) + ")");
}

Distinguisher flip_select(const Distinguisher& d, const std::vector<FlipAction>& profile) {
  require(profile.size() == d.z_size(), ErrorKind::DomainMismatch, "one flip action per z required");
  std::vector<Rational> v(d.values().size());
  std::uint64_t extra = 0;
  for (std::size_t z = 0; z < d.z_size(); ++z) {
    if (profile[z] != FlipAction::Keep) ++extra;
    for (std::size_t x = 0; x < d.x_size(); ++x) {
      const Rational& a = d.at(x, z);
      switch (profile[z]) {
        case FlipAction::Keep: v[x * d.z_size() + z] = a; break;
        case FlipAction::Flip: v[x * d.z_size() + z] = 1 - a; break;
        case FlipAction::Zero: v[x * d.z_size() + z] = 0; break;
      }
    }
  }
  return Distinguisher(d.x_domain(), d.z_domain(), std::move(v), d.kind(), d.size() + extra,
                       "flip_select(" + d.provenance() + ")");
}

std::vector<FlipAction> sign_actions(const AdvantageProfile& profile) {
  std::vector<FlipAction> out;
  out.reserve(profile.gaps.size());
  for (const auto& g : profile.gaps) {
    out.push_back(g > 0 ? FlipAction::Keep : (g < 0 ? FlipAction::Flip : FlipAction::Zero));
  }
  return out;
}

bool is_complement_closed(const DistinguisherClass& cls) {
  std::set<std::vector<Rational>> tables;
  for (const auto& d : cls) tables.insert(d.values());
  for (const auto& d : cls) {
    if (!tables.count(complement(d).values())) return false;
  }
  return true;
}

DistinguisherClass complement_closure(const DistinguisherClass& cls) {
  DistinguisherClass out = cls;
  std::set<std::vector<Rational>> tables;
  for (const auto& d : cls) tables.insert(d.values());
  for (const auto& d : cls) {
    Distinguisher c = complement(d);
    if (tables.insert(c.values()).second) out.push_back(std::move(c));
  }
  return out;
}

DistinguisherClass class_from_circuits(const std::vector<Circuit>& circuits) {
  DistinguisherClass out;
  out.reserve(circuits.size());
  for (const auto& c : circuits) out.push_back(Distinguisher::from_circuit(c));
  return out;
}

}  // namespace entlab
