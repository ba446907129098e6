#include "entlab/lp_models.hpp"

#include "entlab/error.hpp"
#include "entlab/lp.hpp"

namespace entlab {

namespace {

// q(x, z) for supported z plus the level w_z, with sum_x q = P(z), q <= w_z and
// sum_z w_z <= gamma.
struct YVars {
  std::vector<std::size_t> zs;
  std::vector<std::vector<std::size_t>> q;  // q[slot][x]
  std::vector<std::size_t> w;
};

YVars add_y(LinearProgram& lp, const Joint& j, const Rational& gamma) {
  YVars y;
  std::vector<std::pair<std::size_t, Rational>> budget;
  for (std::size_t z = 0; z < j.z_size(); ++z) {
    if (!j.supported(z)) continue;
    y.zs.push_back(z);
    y.w.push_back(lp.add_var());
    budget.emplace_back(y.w.back(), Rational(1));
    y.q.emplace_back();
    std::vector<std::pair<std::size_t, Rational>> mass;
    for (std::size_t x = 0; x < j.x_size(); ++x) {
      y.q.back().push_back(lp.add_var());
      mass.emplace_back(y.q.back().back(), Rational(1));
      lp.add_row({{y.q.back().back(), Rational(1)}, {y.w.back(), Rational(-1)}}, Sense::LessEq, Rational(0));
    }
    lp.add_row(std::move(mass), Sense::Equal, j.z_mass(z));
  }
  lp.add_row(std::move(budget), Sense::LessEq, gamma);
  return y;
}

LPResult solve_checked(const LinearProgram& lp) {
  LPResult r = solve_lp(lp);
  require(r.status == LPStatus::Optimal, ErrorKind::InvalidArgument,
          "LP model not optimal (gamma below 2^-n makes it infeasible)");
  return r;
}

// Rows t + sum_x D q >= sum_x D P and t - sum_x D q >= -sum_x D P over a set
// of z values.
void add_abs_rows(LinearProgram& lp, const Distinguisher& d, const Joint& j, const YVars& y,
                  const std::vector<std::size_t>& slots, std::size_t t) {
  std::vector<std::pair<std::size_t, Rational>> plus{{t, Rational(1)}}, minus{{t, Rational(1)}};
  Rational target(0);
  for (std::size_t s : slots) {
    const std::size_t z = y.zs[s];
    for (std::size_t x = 0; x < j.x_size(); ++x) {
      const Rational& v = d.at(x, z);
      if (v == 0) continue;
      plus.emplace_back(y.q[s][x], v);
      minus.emplace_back(y.q[s][x], -v);
      target += v * j.at(x, z);
    }
  }
  lp.add_row(std::move(plus), Sense::GreaterEq, target);
  lp.add_row(std::move(minus), Sense::GreaterEq, -target);
}

}  // namespace

Rational lp_metric_avg_extreme(const Distinguisher& d, const Joint& j, const Rational& gamma, bool maximize) {
  LinearProgram lp;
  const YVars y = add_y(lp, j, gamma);
  for (std::size_t s = 0; s < y.zs.size(); ++s) {
    for (std::size_t x = 0; x < j.x_size(); ++x) {
      const Rational& v = d.at(x, y.zs[s]);
      lp.set_objective(y.q[s][x], maximize ? v : Rational(-v));
    }
  }
  const LPResult r = solve_checked(lp);
  return maximize ? r.value : Rational(-r.value);
}

Rational lp_modulus_avg(const Distinguisher& d, const Joint& j, const Rational& gamma) {
  LinearProgram lp;
  const YVars y = add_y(lp, j, gamma);
  for (std::size_t s = 0; s < y.zs.size(); ++s) {
    const std::size_t t = lp.add_var(Rational(-1));
    add_abs_rows(lp, d, j, y, {s}, t);
  }
  return -solve_checked(lp).value;
}

Rational lp_decomposable(const DistinguisherClass& cls, const Joint& j, const Rational& gamma) {
  LinearProgram lp;
  // Shared levels; each member gets its own witness columns tied to them.
  const YVars base = add_y(lp, j, gamma);
  std::vector<std::size_t> t;
  for (std::size_t s = 0; s < base.zs.size(); ++s) t.push_back(lp.add_var(Rational(-1)));
  for (std::size_t k = 0; k < cls.size(); ++k) {
    YVars y = base;
    if (k > 0) {
      for (std::size_t s = 0; s < base.zs.size(); ++s) {
        std::vector<std::pair<std::size_t, Rational>> mass;
        for (std::size_t x = 0; x < j.x_size(); ++x) {
          y.q[s][x] = lp.add_var();
          mass.emplace_back(y.q[s][x], Rational(1));
          lp.add_row({{y.q[s][x], Rational(1)}, {base.w[s], Rational(-1)}}, Sense::LessEq, Rational(0));
        }
        lp.add_row(std::move(mass), Sense::Equal, j.z_mass(base.zs[s]));
      }
    }
    for (std::size_t s = 0; s < base.zs.size(); ++s) add_abs_rows(lp, cls[k], j, y, {s}, t[s]);
  }
  return -solve_checked(lp).value;
}

GameSolution lp_hill_game(const DistinguisherClass& cls, const Joint& j, const Rational& gamma) {
  LinearProgram lp;
  const YVars y = add_y(lp, j, gamma);
  const std::size_t t = lp.add_var(Rational(-1));
  std::vector<std::size_t> all(y.zs.size());
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = s;
  for (const auto& d : cls) add_abs_rows(lp, d, j, y, all, t);
  const LPResult r = solve_checked(lp);
  std::vector<Rational> probs(j.x_size() * j.z_size(), Rational(0));
  for (std::size_t s = 0; s < y.zs.size(); ++s) {
    for (std::size_t x = 0; x < j.x_size(); ++x) probs[x * j.z_size() + y.zs[s]] = r.x[y.q[s][x]];
  }
  return {-r.value, Joint(j.x_domain(), j.z_domain(), std::move(probs))};
}

}  // namespace entlab
