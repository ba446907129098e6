#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "entlab/rational.hpp"

namespace entlab {

enum class Sense { LessEq, GreaterEq, Equal };

/// maximize c.x subject to rows and x >= 0.
class LinearProgram {
 public:
  std::size_t add_var(Rational objective = Rational(0));
  void set_objective(std::size_t var, Rational c);
  void add_row(std::vector<std::pair<std::size_t, Rational>> coeffs, Sense sense, Rational rhs);

  std::size_t num_vars() const noexcept { return objective_.size(); }
  std::size_t num_rows() const noexcept { return rows_.size(); }

  struct Row {
    std::vector<std::pair<std::size_t, Rational>> coeffs;
    Sense sense;
    Rational rhs;
  };
  const std::vector<Rational>& objective() const noexcept { return objective_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }

 private:
  std::vector<Rational> objective_;
  std::vector<Row> rows_;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Rational value;
  std::vector<Rational> x;
  std::size_t pivots = 0;
};

inline constexpr std::size_t kMaxLPVars = 2000;

/// Two-phase dense tableau simplex in exact arithmetic. Entering column by the
/// largest reduced cost, switching to Bland's rule while pivots are degenerate
/// so the method cannot cycle. Throws LPBudgetExceeded past kMaxLPVars
/// structural variables.
LPResult solve_lp(const LinearProgram& lp);

}  // namespace entlab
