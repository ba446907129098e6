#include <doctest.h>

#include <algorithm>

#include "entlab/error.hpp"
#include "entlab/waterfill.hpp"
#include "test_util.hpp"

using namespace entlab;

namespace {

// Oracle: the feasible set {y : 0 <= y <= c, sum y = 1} has vertices with
// floor(1/c) coordinates at c and at most one carrying the remainder. Scan them all.
AchievableInterval brute_interval(const std::vector<Rational>& v, const Rational& cap) {
  const std::size_t n = v.size();
  const Rational c = min_of(cap, Rational(1));
  Rational lo(2), hi(-1);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const long full = __builtin_popcount(mask);
    const Rational rest = 1 - c * full;
    if (rest < 0 || rest > c) continue;
    for (std::size_t extra = 0; extra <= n; ++extra) {
      if (extra < n && (mask >> extra) & 1u) continue;
      if (extra == n && rest != 0) continue;
      Rational e(0);
      for (std::size_t i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) e += c * v[i];
      }
      if (extra < n) e += rest * v[extra];
      lo = min_of(lo, e);
      hi = max_of(hi, e);
    }
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("achievable interval") {
  // Boolean |D| = 2 over n = 3 at cap 1/4: min(1, 2 * 1/4) = 1/2 on top, 0 below.
  std::vector<Rational> d(8, Rational(0));
  d[1] = d[6] = 1;
  const auto iv = achievable_interval(d, Rational(1, 4));
  CHECK(iv.upper == Rational(1, 2));
  CHECK(iv.lower == 0);

  const std::vector<Rational> real{Rational(1), Rational(1, 2), Rational(1, 4), Rational(0)};
  CHECK(achievable_interval(real, Rational(1, 2)).upper == Rational(3, 4));
  CHECK_THROWS_AS(achievable_interval(real, Rational(1, 5)), Error);

  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<Rational> v(n);
    for (auto& x : v) x = testutil::q(static_cast<long>(rng() % 9), 8);
    const long den = static_cast<long>(n + rng() % 12);
    const Rational cap = testutil::q(static_cast<long>(1 + rng() % den), den);
    if (cap * static_cast<long>(n) < 1) continue;
    const auto got = achievable_interval(v, cap);
    const auto want = brute_interval(v, cap);
    CHECK(got.lower == want.lower);
    CHECK(got.upper == want.upper);
    // Endpoints at the extremes.
    CHECK(achievable_interval(v, Rational(1)).upper == *std::max_element(v.begin(), v.end()));
    Rational mean(0);
    for (const auto& x : v) mean += x;
    mean /= static_cast<long>(n);
    const auto flat = achievable_interval(v, testutil::q(1, static_cast<long>(n)));
    CHECK(flat.lower == mean);
    CHECK(flat.upper == mean);
    // Curves agree with the direct computation.
    CHECK(upper_curve(v).eval(min_of(cap, Rational(1))) == got.upper);
    CHECK(lower_curve(v).eval(min_of(cap, Rational(1))) == got.lower);
    // Projection witness respects the cap and hits the clamped target.
    const Rational target = testutil::q(static_cast<long>(rng() % 9), 8);
    const auto w = interval_witness(v, cap, target);
    Rational total(0), e(0);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(w[k] <= cap);
      CHECK(w[k] >= 0);
      total += w[k];
      e += w[k] * v[k];
    }
    CHECK(total == 1);
    CHECK(e == min_of(max_of(target, got.lower), got.upper));
  }
}

TEST_CASE("upper envelope") {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 200; ++i) {
    std::vector<PiecewiseLinear> fs;
    const int count = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < count; ++k) {
      PiecewiseLinear f;
      f.xs = {Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)};
      if (rng() & 1u) f.xs = {Rational(0), Rational(2, 3), Rational(1)};
      for (std::size_t p = 0; p < f.xs.size(); ++p) f.ys.push_back(testutil::q(static_cast<long>(rng() % 17) - 8, 4));
      fs.push_back(f);
    }
    const auto env = upper_envelope(fs);
    for (long t = 0; t <= 48; ++t) {
      const Rational x = testutil::q(t, 48);
      Rational best = fs[0].eval(x);
      for (const auto& f : fs) best = max_of(best, f.eval(x));
      CHECK(env.eval(x) == best);
    }
    // Breakpoints are where the envelope really bends: it is exact between them.
    for (std::size_t b = 0; b + 1 < env.xs.size(); ++b) {
      const Rational mid = (env.xs[b] + env.xs[b + 1]) / 2;
      Rational best = fs[0].eval(mid);
      for (const auto& f : fs) best = max_of(best, f.eval(mid));
      CHECK(env.eval(mid) == best);
    }
  }
}

TEST_CASE("distance curve") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    std::vector<Rational> v(4);
    for (auto& x : v) x = testutil::q(static_cast<long>(rng() % 5), 4);
    const Rational a = testutil::q(static_cast<long>(rng() % 9), 8);
    const auto g = distance_curve(v, a);
    for (long den = 1; den <= 4; ++den) {
      for (long num = 1; num <= den; ++num) {
        const Rational cap = testutil::q(num, den);
        if (cap * 4 < 1) continue;
        const auto iv = achievable_interval(v, cap);
        CHECK(g.eval(cap) == distance_to(a, iv.lower, iv.upper));
      }
    }
    // Convex and non-increasing.
    for (std::size_t b = 1; b < g.xs.size(); ++b) CHECK(g.ys[b] <= g.ys[b - 1]);
  }
}

TEST_CASE("concave allocation against exhaustive grid") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 100; ++i) {
    std::vector<Rational> w{Rational(1, 4), Rational(3, 4)};
    std::vector<PiecewiseLinear> fs;
    for (int k = 0; k < 2; ++k) {
      std::vector<Rational> v(4);
      for (auto& x : v) x = testutil::q(static_cast<long>(rng() % 5), 4);
      fs.push_back(upper_curve(v));
    }
    const Rational budget = testutil::q(static_cast<long>(2 + rng() % 6), 8);
    const auto got = allocate_concave(w, fs, budget);
    Rational used(0);
    for (std::size_t z = 0; z < 2; ++z) used += w[z] * got.x[z];
    CHECK(used <= budget);
    CHECK(got.value == w[0] * fs[0].eval(got.x[0]) + w[1] * fs[1].eval(got.x[1]));
    // Grid oracle on a lattice containing every breakpoint: never beats greedy.
    for (long a = 3; a <= 12; ++a) {
      for (long b = 3; b <= 12; ++b) {
        const Rational xa = testutil::q(a, 12), xb = testutil::q(b, 12);
        if (w[0] * xa + w[1] * xb > budget) continue;
        CHECK(w[0] * fs[0].eval(xa) + w[1] * fs[1].eval(xb) <= got.value);
      }
    }
  }
  CHECK_THROWS_AS(allocate_concave({Rational(1)}, {upper_curve({Rational(0), Rational(1)})}, Rational(1, 4)), Error);
}
