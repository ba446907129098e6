#include "entlab/boost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entlab/engine.hpp"
#include "entlab/error.hpp"
#include "entlab/lp_models.hpp"

namespace entlab {

namespace {

// Floating-point best response: the Y maximising E D(Y,Z) under the average
// cap, by the same concave allocation the exact engine uses. Only steers the
// search; every reported number is recomputed exactly.
struct FastResponder {
  std::size_t nx, nz;
  std::vector<double> pz;
  double gamma;

  std::vector<double> respond(const std::vector<double>& d) const {
    struct Seg {
      double slope, width;
      std::size_t z;
    };
    std::vector<std::vector<std::size_t>> order(nz);
    std::vector<Seg> segs;
    double left = gamma;
    for (std::size_t z = 0; z < nz; ++z) {
      if (pz[z] <= 0) continue;
      auto& o = order[z];
      o.resize(nx);
      std::iota(o.begin(), o.end(), std::size_t{0});
      std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return d[a * nz + z] > d[b * nz + z]; });
      left -= pz[z] / static_cast<double>(nx);
      // Curve points (1/j, mean of top j); walk j from nx down to 1.
      double prefix = 0;
      std::vector<double> ys(nx + 1);
      for (std::size_t k = 1; k <= nx; ++k) {
        prefix += d[o[k - 1] * nz + z];
        ys[k] = prefix / static_cast<double>(k);
      }
      for (std::size_t k = nx; k >= 2; --k) {
        const double w = 1.0 / static_cast<double>(k - 1) - 1.0 / static_cast<double>(k);
        segs.push_back({(ys[k - 1] - ys[k]) / w, w, z});
      }
    }
    std::stable_sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.slope > b.slope; });
    std::vector<double> cap(nz, 1.0 / static_cast<double>(nx));
    for (const auto& s : segs) {
      if (left <= 0 || s.slope <= 0) break;
      const double take = std::min(s.width, left / pz[s.z]);
      cap[s.z] += take;
      left -= take * pz[s.z];
    }
    std::vector<double> y(nx * nz, 0.0);
    for (std::size_t z = 0; z < nz; ++z) {
      if (pz[z] <= 0) continue;
      double mass = 1.0;
      for (std::size_t k = 0; k < nx && mass > 0; ++k) {
        const double put = std::min(cap[z], mass);
        y[order[z][k] * nz + z] = pz[z] * put;
        mass -= put;
      }
    }
    return y;
  }
};

std::vector<std::pair<Rational, std::size_t>> round_weights(const std::vector<double>& w, unsigned bits) {
  const long scale = 1L << bits;
  std::vector<long> units(w.size());
  long used = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    units[i] = static_cast<long>(std::floor(w[i] * static_cast<double>(scale)));
    used += units[i];
  }
  const auto top = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  units[top] += scale - used;
  std::vector<std::pair<Rational, std::size_t>> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (units[i] <= 0) continue;
    Rational r(units[i], scale);
    r.canonicalize();
    out.emplace_back(r, i);
  }
  return out;
}

}  // namespace

std::uint64_t boost_length_bound(std::size_t omega, const Rational& delta, double c) {
  require(delta > 0, ErrorKind::InvalidArgument, "delta must be positive");
  require(omega >= 2, ErrorKind::InvalidArgument, "the sample space needs at least two points");
  const double d = to_double(delta);
  return static_cast<std::uint64_t>(std::ceil(c * std::log(static_cast<double>(omega)) / (d * d)));
}

BoostResult metric_to_hill_boost(const Joint& j, const DistinguisherClass& cls, const Rational& gamma,
                                 const Rational& epsilon, const Rational& delta, const BoostConfig& config) {
  require(!cls.empty(), ErrorKind::InvalidArgument, "empty class");
  require(is_complement_closed(cls), ErrorKind::NonClosedClass,
          "boosting needs a class closed under D -> 1 - D");
  BoostResult out;
  const std::size_t nx = j.x_size(), nz = j.z_size();
  out.length_bound = boost_length_bound(nx * nz, delta, config.c);

  GameSolution game = lp_hill_game(cls, j, gamma);
  out.game_value = game.value;
  out.hill_holds = game.value <= epsilon;
  if (out.hill_holds) {
    out.witness = std::move(game.witness);
    return out;
  }

  FastResponder responder{nx, nz, {}, to_double(gamma)};
  for (std::size_t z = 0; z < nz; ++z) responder.pz.push_back(to_double(j.z_mass(z)));
  const std::size_t count = cls.size();
  std::vector<std::vector<double>> table(count);
  std::vector<double> target(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (const auto& v : cls[i].values()) table[i].push_back(to_double(v));
    target[i] = to_double(expect(cls[i], j));
  }

  const std::uint64_t rounds = out.length_bound;
  const double eta = count > 1 ? std::sqrt(2.0 * std::log(static_cast<double>(count)) / static_cast<double>(rounds)) : 0.0;
  std::vector<double> score(count, 0.0), avg(count, 0.0), lambda(count);
  std::vector<double> mixed(nx * nz);
  for (std::uint64_t t = 0; t < rounds; ++t) {
    const double top = *std::max_element(score.begin(), score.end());
    double norm = 0;
    for (std::size_t i = 0; i < count; ++i) norm += lambda[i] = std::exp(eta * (score[i] - top));
    std::fill(mixed.begin(), mixed.end(), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      lambda[i] /= norm;
      avg[i] += lambda[i];
      for (std::size_t k = 0; k < mixed.size(); ++k) mixed[k] += lambda[i] * table[i][k];
    }
    const auto y = responder.respond(mixed);
    for (std::size_t i = 0; i < count; ++i) {
      double ey = 0;
      for (std::size_t k = 0; k < y.size(); ++k) ey += y[k] * table[i][k];
      score[i] += target[i] - ey;
    }
  }
  out.rounds = rounds;
  for (auto& a : avg) a /= static_cast<double>(rounds);

  out.weights = round_weights(avg, config.weight_bits);
  std::vector<std::pair<Rational, Distinguisher>> parts;
  for (const auto& [w, i] : out.weights) parts.emplace_back(w, cls[i]);
  Distinguisher combo = convex_combine(parts);
  out.combo_advantage = expect(combo, j) - max_feasible_expectation(combo, j, gamma, true);
  out.certified = out.combo_advantage >= epsilon;
  out.combo = std::move(combo);
  return out;
}

}  // namespace entlab
