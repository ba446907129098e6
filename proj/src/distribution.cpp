#include "entlab/distribution.hpp"

#include <algorithm>
#include <string>

#include "entlab/error.hpp"

namespace entlab {

Domain::Domain(unsigned bits) : bits_(bits) {
  require(bits <= kMaxDomainBits, ErrorKind::InvalidArgument,
          "domain of " + std::to_string(bits) + " bits exceeds the " +
              std::to_string(kMaxDomainBits) + "-bit guard");
}

namespace {

void check_masses(std::span<const Rational> probs, const char* what) {
  Rational total(0);
  for (const auto& p : probs) {
    require(p >= 0 && p <= 1, ErrorKind::InvalidArgument,
            std::string(what) + ": probability " + to_string(p) + " outside [0,1]");
    total += p;
  }
  require(total == 1, ErrorKind::InvalidArgument,
          std::string(what) + ": total mass " + to_string(total) + " != 1");
}

}  // namespace

Dist::Dist(Domain domain, std::vector<Rational> probs) : domain_(domain), probs_(std::move(probs)) {
  require(probs_.size() == domain_.size(), ErrorKind::DomainMismatch,
          "distribution has " + std::to_string(probs_.size()) + " entries for a domain of size " +
              std::to_string(domain_.size()));
  check_masses(probs_, "Dist");
}

Dist Dist::uniform(Domain domain) {
  return Dist(domain, std::vector<Rational>(domain.size(), Rational(1, domain.size())));
}

Dist Dist::point_mass(Domain domain, std::size_t point) {
  std::vector<Rational> p(domain.size(), Rational(0));
  require(point < domain.size(), ErrorKind::RangeError, "point outside domain");
  p[point] = 1;
  return Dist(domain, std::move(p));
}

Joint::Joint(Domain x_domain, Domain z_domain, std::vector<Rational> probs, std::optional<ZPair> pair)
    : x_domain_(x_domain), z_domain_(z_domain), probs_(std::move(probs)), pair_(pair) {
  require(probs_.size() == x_domain_.size() * z_domain_.size(), ErrorKind::DomainMismatch,
          "joint table has " + std::to_string(probs_.size()) + " entries, expected " +
              std::to_string(x_domain_.size() * z_domain_.size()));
  if (pair_) {
    require(pair_->m1 + pair_->m2 == z_domain_.bits(), ErrorKind::DomainMismatch,
            "z pair (m1, m2) does not add up to the z-domain width");
  }
  check_masses(probs_, "Joint");
  z_marginal_.assign(z_size(), Rational(0));
  for (std::size_t x = 0; x < x_size(); ++x) {
    for (std::size_t z = 0; z < z_size(); ++z) z_marginal_[z] += at(x, z);
  }
}

Joint Joint::from_dist(const Dist& x) {
  return Joint(x.domain(), Domain(0), std::vector<Rational>(x.probs().begin(), x.probs().end()));
}

Joint Joint::from_conditionals(const Dist& z_marginal, std::span<const Dist> columns) {
  require(columns.size() == z_marginal.size(), ErrorKind::DomainMismatch,
          "one conditional per z value required");
  const Domain xd = columns.empty() ? Domain(0) : columns.front().domain();
  std::vector<Rational> probs(xd.size() * z_marginal.size());
  for (std::size_t z = 0; z < columns.size(); ++z) {
    require(columns[z].domain() == xd, ErrorKind::DomainMismatch, "conditional domains differ");
    for (std::size_t x = 0; x < xd.size(); ++x) probs[x * columns.size() + z] = z_marginal[z] * columns[z][x];
  }
  return Joint(xd, z_marginal.domain(), std::move(probs));
}

Dist Joint::x_marginal() const {
  std::vector<Rational> p(x_size(), Rational(0));
  for (std::size_t x = 0; x < x_size(); ++x) {
    for (std::size_t z = 0; z < z_size(); ++z) p[x] += at(x, z);
  }
  return Dist(x_domain_, std::move(p));
}

Dist Joint::z_marginal_dist() const { return Dist(z_domain_, z_marginal_); }

std::vector<Rational> Joint::column(std::size_t z) const {
  std::vector<Rational> col(x_size());
  for (std::size_t x = 0; x < x_size(); ++x) col[x] = at(x, z);
  return col;
}

Joint Joint::drop_z2() const {
  require(pair_.has_value(), ErrorKind::InvalidArgument, "joint has no declared (Z1, Z2) pair");
  const Domain z1d(pair_->m1);
  const std::size_t n2 = std::size_t{1} << pair_->m2;
  std::vector<Rational> probs(x_size() * z1d.size(), Rational(0));
  for (std::size_t x = 0; x < x_size(); ++x) {
    for (std::size_t z = 0; z < z_size(); ++z) probs[x * z1d.size() + z / n2] += at(x, z);
  }
  return Joint(x_domain_, z1d, std::move(probs));
}

Joint Joint::slice_z1(std::size_t z1) const {
  require(pair_.has_value(), ErrorKind::InvalidArgument, "joint has no declared (Z1, Z2) pair");
  const Domain z2d(pair_->m2);
  const std::size_t n2 = z2d.size();
  require(z1 < (std::size_t{1} << pair_->m1), ErrorKind::RangeError, "z1 out of range");
  Rational mass(0);
  for (std::size_t z2 = 0; z2 < n2; ++z2) mass += z_marginal_[z1 * n2 + z2];
  require(mass > 0, ErrorKind::ZeroMassCondition, "P(Z1 = " + std::to_string(z1) + ") = 0");
  std::vector<Rational> probs(x_size() * n2);
  for (std::size_t x = 0; x < x_size(); ++x) {
    for (std::size_t z2 = 0; z2 < n2; ++z2) probs[x * n2 + z2] = at(x, z1 * n2 + z2) / mass;
  }
  return Joint(x_domain_, z2d, std::move(probs));
}

EntropyParams::EntropyParams(Rational g, Rational e, std::optional<std::uint64_t> s)
    : gamma(std::move(g)), epsilon(std::move(e)), size_budget(s) {
  require(gamma > 0 && gamma <= 1, ErrorKind::InvalidArgument, "gamma must lie in (0, 1]");
  require(epsilon >= 0 && epsilon <= 1, ErrorKind::InvalidArgument, "epsilon must lie in [0, 1]");
}

EntropyParams EntropyParams::from_k(long k, Rational e) { return EntropyParams(pow2(-k), std::move(e)); }

Rational guess_prob(const Dist& d) {
  return *std::max_element(d.probs().begin(), d.probs().end());
}

Rational cond_guess_prob_avg(const Joint& j) {
  Rational total(0);
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    Rational best(0);
    for (std::size_t x = 0; x < j.x_size(); ++x) {
      if (j.at(x, z) > best) best = j.at(x, z);
    }
    total += best;
  }
  return total;
}

Rational cond_guess_prob_worst(const Joint& j) {
  Rational worst(0);
  bool any = false;
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    any = true;
    Rational best(0);
    for (std::size_t x = 0; x < j.x_size(); ++x) {
      if (j.at(x, z) > best) best = j.at(x, z);
    }
    best /= j.z_mass(z);
    if (best > worst) worst = best;
  }
  require(any, ErrorKind::ZeroMassCondition, "joint has empty z-support");
  return worst;
}

Dist condition(const Joint& j, std::size_t z) {
  require(z < j.z_size(), ErrorKind::RangeError, "z out of range");
  require(j.supported(z), ErrorKind::ZeroMassCondition, "P(Z = " + std::to_string(z) + ") = 0");
  std::vector<Rational> p(j.x_size());
  for (std::size_t x = 0; x < j.x_size(); ++x) p[x] = j.at(x, z) / j.z_mass(z);
  return Dist(j.x_domain(), std::move(p));
}

Rational statistical_distance(const Dist& p, const Dist& q) {
  require(p.domain() == q.domain(), ErrorKind::DomainMismatch, "statistical distance across domains");
  Rational total(0);
  for (std::size_t x = 0; x < p.size(); ++x) total += abs(p[x] - q[x]);
  return total / 2;
}

AvgWorstSplit avg_to_worst_split(const Joint& j, const Rational& delta) {
  require(delta > 0 && delta <= 1, ErrorKind::InvalidArgument, "delta must lie in (0, 1]");
  AvgWorstSplit split;
  split.gamma_new = cond_guess_prob_avg(j) / delta;
  split.good_mass = 0;
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    Rational best(0);
    for (std::size_t x = 0; x < j.x_size(); ++x) {
      if (j.at(x, z) > best) best = j.at(x, z);
    }
    if (best <= split.gamma_new * j.z_mass(z)) {
      split.good_z.push_back(z);
      split.good_mass += j.z_mass(z);
    }
  }
  // Markov: the bad set carries sum_z P(z) m_z > bad_mass * avg / delta.
  split.certified = split.good_mass >= 1 - delta;
  return split;
}

ChainRuleVerdict it_chain_rule_check(const Joint& j3) {
  require(j3.pair().has_value(), ErrorKind::InvalidArgument, "chain rule needs a (Z1, Z2) joint");
  ChainRuleVerdict v;
  v.avg_given_both = cond_guess_prob_avg(j3);
  v.avg_given_first = cond_guess_prob_avg(j3.drop_z2());
  v.bound = pow2(static_cast<long>(j3.pair()->m2)) * v.avg_given_first;
  v.holds = v.avg_given_both <= v.bound;
  return v;
}

}  // namespace entlab
