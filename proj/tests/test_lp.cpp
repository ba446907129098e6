#include <doctest.h>

#include "entlab/error.hpp"
#include "entlab/lp.hpp"
#include "test_util.hpp"

using namespace entlab;

TEST_CASE("small LPs with known optima") {
  // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3 -> (3, 1), value 11.
  LinearProgram lp;
  const auto x = lp.add_var(Rational(3)), y = lp.add_var(Rational(2));
  lp.add_row({{x, Rational(1)}, {y, Rational(1)}}, Sense::LessEq, Rational(4));
  lp.add_row({{x, Rational(1)}, {y, Rational(3)}}, Sense::LessEq, Rational(6));
  lp.add_row({{x, Rational(1)}}, Sense::LessEq, Rational(3));
  const auto r = solve_lp(lp);
  CHECK(r.status == LPStatus::Optimal);
  CHECK(r.value == 11);
  CHECK(r.x[x] == 3);
  CHECK(r.x[y] == 1);

  // Equalities and >= rows: min x + y s.t. x + 2y = 3, x >= 1/2.
  LinearProgram eq;
  const auto a = eq.add_var(Rational(-1)), b = eq.add_var(Rational(-1));
  eq.add_row({{a, Rational(1)}, {b, Rational(2)}}, Sense::Equal, Rational(3));
  eq.add_row({{a, Rational(1)}}, Sense::GreaterEq, Rational(1, 2));
  const auto re = solve_lp(eq);
  CHECK(re.status == LPStatus::Optimal);
  CHECK(re.value == Rational(-7, 4));

  LinearProgram bad;
  const auto u = bad.add_var(Rational(1));
  bad.add_row({{u, Rational(1)}}, Sense::GreaterEq, Rational(2));
  bad.add_row({{u, Rational(1)}}, Sense::LessEq, Rational(1));
  CHECK(solve_lp(bad).status == LPStatus::Infeasible);

  LinearProgram unb;
  const auto v = unb.add_var(Rational(1));
  unb.add_row({{v, Rational(1)}}, Sense::GreaterEq, Rational(1));
  CHECK(solve_lp(unb).status == LPStatus::Unbounded);

  // Redundant equality rows survive phase one.
  LinearProgram red;
  const auto p = red.add_var(Rational(1)), q = red.add_var(Rational(0));
  red.add_row({{p, Rational(1)}, {q, Rational(1)}}, Sense::Equal, Rational(1));
  red.add_row({{p, Rational(2)}, {q, Rational(2)}}, Sense::Equal, Rational(2));
  CHECK(solve_lp(red).value == 1);

  LinearProgram huge;
  for (std::size_t i = 0; i <= kMaxLPVars; ++i) huge.add_var();
  CHECK_THROWS_AS(solve_lp(huge), Error);
}

TEST_CASE("random LPs against vertex enumeration") {
  // Two-variable LPs: the optimum sits on a vertex formed by two tight
  // constraints (including the axes). Enumerate them all.
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    LinearProgram lp;
    const Rational c0(static_cast<long>(rng() % 7) - 2), c1(static_cast<long>(rng() % 7) - 2);
    lp.add_var(c0);
    lp.add_var(c1);
    struct Con {
      Rational a, b, r;
    };
    std::vector<Con> cons{{Rational(1), Rational(1), Rational(10)}};  // keeps it bounded
    for (int k = 0; k < 3; ++k) {
      cons.push_back({Rational(static_cast<long>(rng() % 7) - 3), Rational(static_cast<long>(rng() % 7) - 3),
                      Rational(static_cast<long>(rng() % 9))});
    }
    for (const auto& c : cons) lp.add_row({{0, c.a}, {1, c.b}}, Sense::LessEq, c.r);
    std::vector<Con> lines = cons;
    lines.push_back({Rational(-1), Rational(0), Rational(0)});
    lines.push_back({Rational(0), Rational(-1), Rational(0)});
    bool any = false;
    Rational best;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t k = i + 1; k < lines.size(); ++k) {
        const Rational det = lines[i].a * lines[k].b - lines[i].b * lines[k].a;
        if (det == 0) continue;
        const Rational x = (lines[i].r * lines[k].b - lines[i].b * lines[k].r) / det;
        const Rational y = (lines[i].a * lines[k].r - lines[i].r * lines[k].a) / det;
        if (x < 0 || y < 0) continue;
        bool ok = true;
        for (const auto& c : cons) ok = ok && c.a * x + c.b * y <= c.r;
        if (!ok) continue;
        const Rational val = c0 * x + c1 * y;
        if (!any || val > best) best = val;
        any = true;
      }
    }
    const auto r = solve_lp(lp);
    if (!any) {
      CHECK(r.status == LPStatus::Infeasible);
    } else {
      REQUIRE(r.status == LPStatus::Optimal);
      CHECK(r.value == best);
    }
  }
}
