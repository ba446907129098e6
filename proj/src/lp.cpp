#include "entlab/lp.hpp"

#include <string>

#include "entlab/error.hpp"

namespace entlab {

std::size_t LinearProgram::add_var(Rational objective) {
  objective_.push_back(std::move(objective));
  return objective_.size() - 1;
}

void LinearProgram::set_objective(std::size_t var, Rational c) {
  require(var < objective_.size(), ErrorKind::RangeError, "LP variable out of range");
  objective_[var] = std::move(c);
}

void LinearProgram::add_row(std::vector<std::pair<std::size_t, Rational>> coeffs, Sense sense, Rational rhs) {
  for (const auto& [v, c] : coeffs) require(v < objective_.size(), ErrorKind::RangeError, "LP variable out of range");
  rows_.push_back({std::move(coeffs), sense, std::move(rhs)});
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : cols_(cols), cells_(rows, std::vector<Rational>(cols + 1)) {}

  std::vector<Rational>& row(std::size_t i) { return cells_[i]; }
  std::size_t rows() const { return cells_.size(); }
  std::size_t cols() const { return cols_; }
  Rational& rhs(std::size_t i) { return cells_[i][cols_]; }

  void erase_row(std::size_t i) { cells_.erase(cells_.begin() + static_cast<std::ptrdiff_t>(i)); }

 private:
  std::size_t cols_;
  std::vector<std::vector<Rational>> cells_;
};

class Simplex {
 public:
  Simplex(Tableau& t, std::vector<std::size_t>& basis, std::vector<bool>& allowed)
      : t_(t), basis_(basis), allowed_(allowed) {}

  // Reduced costs for objective c (maximize). d_j = c_j - sum_i c_B(i) T[i][j].
  void load_objective(const std::vector<Rational>& c) {
    d_.assign(t_.cols() + 1, Rational(0));
    for (std::size_t j = 0; j < t_.cols(); ++j) d_[j] = c[j];
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      const Rational& cb = c[basis_[i]];
      if (cb == 0) continue;
      auto& r = t_.row(i);
      for (std::size_t j = 0; j <= t_.cols(); ++j) {
        if (r[j] != 0) d_[j] -= cb * r[j];
      }
    }
  }

  // Returns false when unbounded.
  bool run(std::size_t& pivots) {
    bool bland = false;
    for (;;) {
      std::size_t enter = t_.cols();
      for (std::size_t j = 0; j < t_.cols(); ++j) {
        if (!allowed_[j] || d_[j] <= 0) continue;
        if (enter == t_.cols()) {
          enter = j;
          if (bland) break;
        } else if (d_[j] > d_[enter]) {
          enter = j;
        }
      }
      if (enter == t_.cols()) return true;
      std::size_t leave = t_.rows();
      Rational best;
      for (std::size_t i = 0; i < t_.rows(); ++i) {
        const Rational& a = t_.row(i)[enter];
        if (a <= 0) continue;
        Rational ratio = t_.rhs(i) / a;
        if (leave == t_.rows() || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (leave == t_.rows()) return false;
      bland = (best == 0);
      pivot(leave, enter);
      ++pivots;
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    auto& pr = t_.row(r);
    const Rational inv = 1 / pr[c];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= t_.cols(); ++j) {
      if (pr[j] == 0) continue;
      pr[j] *= inv;
      nz.push_back(j);
    }
    Rational tmp;
    auto eliminate = [&](std::vector<Rational>& row) {
      if (row[c] == 0) return;
      const Rational f = row[c];
      for (std::size_t j : nz) {
        tmp = f * pr[j];
        row[j] -= tmp;
      }
    };
    for (std::size_t i = 0; i < t_.rows(); ++i) {
      if (i != r) eliminate(t_.row(i));
    }
    eliminate(d_);
    basis_[r] = c;
  }

 private:
  Tableau& t_;
  std::vector<std::size_t>& basis_;
  std::vector<bool>& allowed_;
  std::vector<Rational> d_;
};

}  // namespace

LPResult solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  require(n <= kMaxLPVars, ErrorKind::LPBudgetExceeded,
          "LP with " + std::to_string(n) + " variables exceeds the " + std::to_string(kMaxLPVars) + " guard");
  const std::size_t m = lp.num_rows();

  // Normalise to nonnegative right-hand sides.
  struct NormRow {
    std::vector<std::pair<std::size_t, Rational>> coeffs;
    Sense sense;
    Rational rhs;
  };
  std::vector<NormRow> rows;
  rows.reserve(m);
  std::size_t slack_count = 0, art_count = 0;
  for (const auto& r : lp.rows()) {
    NormRow nr{r.coeffs, r.sense, r.rhs};
    if (nr.rhs < 0) {
      for (auto& [v, c] : nr.coeffs) c = -c;
      nr.rhs = -nr.rhs;
      if (nr.sense == Sense::LessEq) {
        nr.sense = Sense::GreaterEq;
      } else if (nr.sense == Sense::GreaterEq) {
        nr.sense = Sense::LessEq;
      }
    }
    if (nr.sense != Sense::Equal) ++slack_count;
    if (nr.sense != Sense::LessEq) ++art_count;
    rows.push_back(std::move(nr));
  }

  const std::size_t cols = n + slack_count + art_count;
  Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  std::vector<bool> allowed(cols, true);
  std::size_t next_slack = n, next_art = n + slack_count;
  for (std::size_t i = 0; i < m; ++i) {
    auto& row = t.row(i);
    for (const auto& [v, c] : rows[i].coeffs) row[v] += c;
    t.rhs(i) = rows[i].rhs;
    switch (rows[i].sense) {
      case Sense::LessEq:
        row[next_slack] = 1;
        basis[i] = next_slack++;
        break;
      case Sense::GreaterEq:
        row[next_slack++] = -1;
        row[next_art] = 1;
        basis[i] = next_art++;
        break;
      case Sense::Equal:
        row[next_art] = 1;
        basis[i] = next_art++;
        break;
    }
  }

  LPResult result;
  Simplex sx(t, basis, allowed);
  const std::size_t first_art = n + slack_count;
  if (art_count > 0) {
    std::vector<Rational> phase1(cols, Rational(0));
    for (std::size_t j = first_art; j < cols; ++j) phase1[j] = -1;
    sx.load_objective(phase1);
    sx.run(result.pivots);
    Rational infeas(0);
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (basis[i] >= first_art) infeas += t.rhs(i);
    }
    if (infeas != 0) {
      result.status = LPStatus::Infeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (basis[i] < first_art) {
        ++i;
        continue;
      }
      std::size_t col = first_art;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (t.row(i)[j] != 0) {
          col = j;
          break;
        }
      }
      if (col == first_art) {
        t.erase_row(i);
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      sx.pivot(i, col);
      ++result.pivots;
      ++i;
    }
    for (std::size_t j = first_art; j < cols; ++j) allowed[j] = false;
  }

  std::vector<Rational> c(cols, Rational(0));
  for (std::size_t j = 0; j < n; ++j) c[j] = lp.objective()[j];
  sx.load_objective(c);
  if (!sx.run(result.pivots)) {
    result.status = LPStatus::Unbounded;
    return result;
  }
  result.status = LPStatus::Optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.rows(); ++i) {
    if (basis[i] < n) result.x[basis[i]] = t.rhs(i);
  }
  result.value = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.objective()[j] != 0) result.value += lp.objective()[j] * result.x[j];
  }
  return result;
}

}  // namespace entlab
