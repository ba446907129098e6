#include "entlab/waterfill.hpp"

#include <algorithm>
#include <numeric>

#include "entlab/error.hpp"

namespace entlab {

namespace {

std::vector<std::size_t> order(const std::vector<Rational>& values, bool descending) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? values[a] > values[b] : values[a] < values[b];
  });
  return idx;
}

void check_cap(std::size_t n, const Rational& cap) {
  require(n > 0, ErrorKind::InvalidArgument, "empty column");
  require(cap * static_cast<long>(n) >= 1, ErrorKind::CapOutOfRange,
          "cap " + to_string(cap) + " below 1/" + std::to_string(n));
}

}  // namespace

std::vector<Rational> waterfill_mass(const std::vector<Rational>& values, const Rational& cap, bool descending) {
  check_cap(values.size(), cap);
  const Rational c = min_of(cap, Rational(1));
  std::vector<Rational> mass(values.size(), Rational(0));
  Rational left(1);
  for (std::size_t i : order(values, descending)) {
    if (left == 0) break;
    mass[i] = min_of(c, left);
    left -= mass[i];
  }
  return mass;
}

namespace {

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational total(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != 0 && b[i] != 0) total += a[i] * b[i];
  }
  return total;
}

}  // namespace

AchievableInterval achievable_interval(const std::vector<Rational>& values, const Rational& cap) {
  return {dot(values, waterfill_mass(values, cap, false)), dot(values, waterfill_mass(values, cap, true))};
}

std::vector<Rational> interval_witness(const std::vector<Rational>& values, const Rational& cap,
                                       const Rational& target) {
  const auto hi = waterfill_mass(values, cap, true);
  const auto lo = waterfill_mass(values, cap, false);
  const Rational up = dot(values, hi), down = dot(values, lo);
  if (target >= up) return hi;
  if (target <= down) return lo;
  const Rational lambda = (target - down) / (up - down);
  std::vector<Rational> mix(values.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = lambda * hi[i] + (1 - lambda) * lo[i];
  return mix;
}

Rational distance_to(const Rational& a, const Rational& lo, const Rational& hi) {
  if (a > hi) return a - hi;
  if (a < lo) return lo - a;
  return Rational(0);
}

Rational PiecewiseLinear::eval(const Rational& x) const {
  require(!xs.empty() && x >= xs.front() && x <= xs.back(), ErrorKind::RangeError,
          "piecewise-linear evaluation outside the domain");
  const auto it = std::lower_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  if (xs[i] == x) return ys[i];
  const Rational t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

PiecewiseLinear PiecewiseLinear::negated() const {
  PiecewiseLinear out{xs, ys};
  for (auto& y : out.ys) y = -y;
  return out;
}

PiecewiseLinear upper_curve(const std::vector<Rational>& values) {
  const std::size_t n = values.size();
  require(n > 0, ErrorKind::InvalidArgument, "empty column");
  std::vector<Rational> sorted = values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // At cap 1/j the fill puts 1/j on each of the top j values.
  std::vector<Rational> prefix(n + 1, Rational(0));
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + sorted[j];
  PiecewiseLinear f;
  for (std::size_t j = n; j >= 1; --j) {
    f.xs.emplace_back(1, static_cast<long>(j));
    f.ys.push_back(prefix[j] / static_cast<long>(j));
  }
  return f;
}

PiecewiseLinear lower_curve(const std::vector<Rational>& values) {
  std::vector<Rational> neg(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) neg[i] = -values[i];
  return upper_curve(neg).negated();
}

namespace {

struct Line {
  Rational slope;
  Rational at_left;  // value at the left end of the current interval
};

}  // namespace

PiecewiseLinear upper_envelope(const std::vector<PiecewiseLinear>& fs) {
  require(!fs.empty(), ErrorKind::InvalidArgument, "envelope of nothing");
  std::vector<Rational> grid;
  for (const auto& f : fs) {
    require(f.xs.front() == fs.front().xs.front() && f.xs.back() == fs.front().xs.back(), ErrorKind::DomainMismatch,
            "envelope pieces over different domains");
    grid.insert(grid.end(), f.xs.begin(), f.xs.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  PiecewiseLinear out;
  auto push = [&](const Rational& x, const Rational& y) {
    if (!out.xs.empty() && out.xs.back() == x) return;
    out.xs.push_back(x);
    out.ys.push_back(y);
  };

  // Value of every piece at each grid point, then sweep interval by interval.
  std::vector<std::vector<Rational>> vals(fs.size());
  for (std::size_t k = 0; k < fs.size(); ++k) {
    vals[k].reserve(grid.size());
    std::size_t seg = 0;
    const auto& f = fs[k];
    for (const auto& x : grid) {
      while (seg + 1 < f.xs.size() && f.xs[seg + 1] < x) ++seg;
      if (f.xs[seg] == x) {
        vals[k].push_back(f.ys[seg]);
      } else if (seg + 1 < f.xs.size() && f.xs[seg + 1] == x) {
        vals[k].push_back(f.ys[seg + 1]);
      } else {
        const Rational t = (x - f.xs[seg]) / (f.xs[seg + 1] - f.xs[seg]);
        vals[k].push_back(f.ys[seg] + t * (f.ys[seg + 1] - f.ys[seg]));
      }
    }
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    Rational best = vals[0][g];
    for (std::size_t k = 1; k < fs.size(); ++k) best = max_of(best, vals[k][g]);
    push(grid[g], best);
    if (g + 1 == grid.size()) break;
    const Rational& l = grid[g];
    const Rational& r = grid[g + 1];
    const Rational width = r - l;
    std::vector<Line> lines(fs.size());
    for (std::size_t k = 0; k < fs.size(); ++k) lines[k] = {(vals[k][g + 1] - vals[k][g]) / width, vals[k][g]};
    // Walk the envelope: start with the top line (steepest among ties), jump to
    // the first steeper line that overtakes it.
    std::size_t cur = 0;
    for (std::size_t k = 1; k < lines.size(); ++k) {
      if (lines[k].at_left > lines[cur].at_left ||
          (lines[k].at_left == lines[cur].at_left && lines[k].slope > lines[cur].slope)) {
        cur = k;
      }
    }
    Rational x = l;
    for (;;) {
      std::size_t next = cur;
      Rational cross = r;
      const Rational cur_at_x = lines[cur].at_left + lines[cur].slope * (x - l);
      for (std::size_t k = 0; k < lines.size(); ++k) {
        if (lines[k].slope <= lines[cur].slope) continue;
        const Rational k_at_x = lines[k].at_left + lines[k].slope * (x - l);
        const Rational c = x + (cur_at_x - k_at_x) / (lines[k].slope - lines[cur].slope);
        if (c < cross || (c == cross && next != cur && lines[k].slope > lines[next].slope)) {
          cross = c;
          next = k;
        }
      }
      if (next == cur || cross >= r) break;
      push(cross, lines[next].at_left + lines[next].slope * (cross - l));
      x = cross;
      cur = next;
    }
  }
  return out;
}

PiecewiseLinear distance_curve(const std::vector<Rational>& values, const Rational& a) {
  PiecewiseLinear above = upper_curve(values).negated();
  for (auto& y : above.ys) y += a;
  PiecewiseLinear below = lower_curve(values);
  for (auto& y : below.ys) y -= a;
  PiecewiseLinear zero{above.xs, std::vector<Rational>(above.xs.size(), Rational(0))};
  return upper_envelope({above, below, zero});
}

namespace {

struct Piece {
  Rational slope;
  Rational width;
  std::size_t owner;
  std::size_t index;
};

}  // namespace

Allocation allocate_concave(const std::vector<Rational>& weights, const std::vector<PiecewiseLinear>& fs,
                            const Rational& budget) {
  require(weights.size() == fs.size(), ErrorKind::DomainMismatch, "one weight per function required");
  Allocation out;
  out.value = 0;
  Rational left = budget;
  std::vector<Piece> pieces;
  for (std::size_t z = 0; z < fs.size(); ++z) {
    const auto& f = fs[z];
    out.x.push_back(f.xs.front());
    if (weights[z] == 0) continue;
    left -= weights[z] * f.xs.front();
    out.value += weights[z] * f.ys.front();
    for (std::size_t i = 0; i + 1 < f.xs.size(); ++i) {
      const Rational width = f.xs[i + 1] - f.xs[i];
      pieces.push_back({(f.ys[i + 1] - f.ys[i]) / width, width, z, i});
    }
  }
  require(left >= 0, ErrorKind::CapOutOfRange, "budget " + to_string(budget) + " below the minimum feasible level");
  // Concavity makes each function's pieces appear in order after the sort.
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.slope > b.slope; });
  for (const auto& p : pieces) {
    if (p.slope <= 0 || left == 0) break;
    const Rational& w = weights[p.owner];
    const Rational cost = w * p.width;
    const Rational step = cost <= left ? p.width : left / w;
    out.x[p.owner] += step;
    out.value += w * p.slope * step;
    left -= w * step;
  }
  return out;
}

}  // namespace entlab
