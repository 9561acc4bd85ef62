// Dense two-phase tableau simplex with Bland's rule.

#include <algorithm>
#include <cmath>

#include "agentplan/error.hpp"
#include "agentplan/optimizer.hpp"

namespace agentplan {

namespace {

class Tableau {
 public:
  // Rows are m constraints in equality form with a nonnegative rhs; the last
  // column holds the rhs.
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows, std::vector<double>(cols + 1, 0.0)) {}

  double& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  double& rhs(std::size_t r) { return a_[r][n_]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t row, std::size_t col) {
    const double p = a_[row][col];
    for (auto& v : a_[row]) v /= p;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == row) continue;
      const double f = a_[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) a_[r][c] -= f * a_[row][c];
      a_[r][col] = 0.0;
    }
    basis_[row] = col;
  }

  void drop_row(std::size_t row) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(row));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(row));
    --m_;
  }

  /// Minimizes cost . x over the current basis. `allowed` masks columns that
  /// may enter.
  void optimize(const std::vector<double>& cost, const std::vector<bool>& allowed, const SimplexOptions& opts,
                std::int64_t& iterations) {
    for (;;) {
      // Reduced costs: c_j - c_B B^-1 A_j, with the tableau already holding B^-1 A.
      std::size_t enter = n_;
      for (std::size_t c = 0; c < n_ && enter == n_; ++c) {
        if (!allowed[c]) continue;
        double reduced = cost[c];
        for (std::size_t r = 0; r < m_; ++r) reduced -= cost[basis_[r]] * a_[r][c];
        if (reduced < -opts.pivot_tolerance) enter = c;
      }
      if (enter == n_) return;
      std::size_t leave = m_;
      double best_ratio = kInf;
      for (std::size_t r = 0; r < m_; ++r) {
        if (a_[r][enter] <= opts.pivot_tolerance) continue;
        const double ratio = a_[r][n_] / a_[r][enter];
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && leave < m_ && basis_[r] < basis_[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave == m_) throw Error(ErrorCode::Unbounded, "objective decreases without bound");
      if (++iterations > opts.max_iterations) {
        throw Error(ErrorCode::CycleLimit, "simplex exceeded " + std::to_string(opts.max_iterations) + " pivots");
      }
      pivot(leave, enter);
    }
  }

  double value(std::size_t col) const {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] == col) return a_[r][n_];
    }
    return 0.0;
  }

 private:
  std::size_t m_, n_;
  std::vector<std::vector<double>> a_;
  std::vector<std::size_t> basis_;
};

struct Constraint {
  std::vector<double> coeffs;
  RowSense sense;
  double rhs;
};

}  // namespace

LpSolution solve_simplex(const LpStandardForm& lp, const SimplexOptions& opts) {
  const std::size_t nv = lp.vars.size();
  if (lp.objective.size() != nv) throw Error(ErrorCode::ShapeMismatch, "objective length differs from variable count");
  for (const auto& row : lp.rows) {
    if (row.coeffs.size() != nv) throw Error(ErrorCode::ShapeMismatch, "row '" + row.name + "' has wrong length");
  }

  // Shift every variable to v' = v - lower >= 0; finite uppers become rows.
  std::vector<Constraint> cons;
  double offset = 0.0;
  for (std::size_t k = 0; k < nv; ++k) {
    const auto& v = lp.vars[k];
    if (!std::isfinite(v.lower)) throw Error(ErrorCode::InvalidArgument, "variable '" + v.name + "' needs a finite lower bound");
    if (v.upper < v.lower) throw Error(ErrorCode::Infeasible, "variable '" + v.name + "' has upper < lower");
    offset += lp.objective[k] * v.lower;
  }
  for (const auto& row : lp.rows) {
    double rhs = row.rhs;
    for (std::size_t k = 0; k < nv; ++k) rhs -= row.coeffs[k] * lp.vars[k].lower;
    cons.push_back({row.coeffs, row.sense, rhs});
  }
  for (std::size_t k = 0; k < nv; ++k) {
    const auto& v = lp.vars[k];
    if (!std::isfinite(v.upper)) continue;
    std::vector<double> coeffs(nv, 0.0);
    coeffs[k] = 1.0;
    cons.push_back({std::move(coeffs), RowSense::Le, v.upper - v.lower});
  }
  for (auto& c : cons) {
    if (c.rhs < 0.0) {
      for (auto& v : c.coeffs) v = -v;
      c.rhs = -c.rhs;
      if (c.sense == RowSense::Le) c.sense = RowSense::Ge;
      else if (c.sense == RowSense::Ge) c.sense = RowSense::Le;
    }
  }

  // Columns: originals, then one slack/surplus per inequality, then artificials.
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& c : cons) {
    if (c.sense != RowSense::Eq) ++n_slack;
    if (c.sense != RowSense::Le) ++n_art;
  }
  const std::size_t m = cons.size();
  const std::size_t n_cols = nv + n_slack + n_art;
  Tableau t(m, n_cols);
  t.basis().assign(m, 0);
  std::size_t slack_col = nv, art_col = nv + n_slack;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = 0; k < nv; ++k) t.at(r, k) = cons[r].coeffs[k];
    t.rhs(r) = cons[r].rhs;
    switch (cons[r].sense) {
      case RowSense::Le:
        t.at(r, slack_col) = 1.0;
        t.basis()[r] = slack_col++;
        break;
      case RowSense::Ge:
        t.at(r, slack_col++) = -1.0;
        t.at(r, art_col) = 1.0;
        t.basis()[r] = art_col++;
        break;
      case RowSense::Eq:
        t.at(r, art_col) = 1.0;
        t.basis()[r] = art_col++;
        break;
    }
  }

  std::int64_t iterations = 0;
  std::vector<bool> allowed(n_cols, true);
  if (n_art > 0) {
    std::vector<double> phase1(n_cols, 0.0);
    for (std::size_t c = nv + n_slack; c < n_cols; ++c) phase1[c] = 1.0;
    t.optimize(phase1, allowed, opts, iterations);
    double infeasibility = 0.0;
    double scale = 1.0;
    for (const auto& c : cons) scale = std::max(scale, std::abs(c.rhs));
    for (std::size_t c = nv + n_slack; c < n_cols; ++c) infeasibility += t.value(c);
    if (infeasibility > 1e-9 * scale) {
      throw Error(ErrorCode::Infeasible, "no point satisfies every constraint (phase-1 residual " +
                                             std::to_string(infeasibility) + ")");
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t r = t.rows(); r-- > 0;) {
      if (t.basis()[r] < nv + n_slack) continue;
      std::size_t enter = nv + n_slack;
      for (std::size_t c = 0; c < nv + n_slack; ++c) {
        if (std::abs(t.at(r, c)) > opts.pivot_tolerance) {
          enter = c;
          break;
        }
      }
      if (enter < nv + n_slack) t.pivot(r, enter);
      else t.drop_row(r);
    }
    for (std::size_t c = nv + n_slack; c < n_cols; ++c) allowed[c] = false;
  }

  std::vector<double> cost(n_cols, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), cost.begin());
  t.optimize(cost, allowed, opts, iterations);

  LpSolution sol;
  sol.values.resize(nv);
  sol.objective = offset;
  for (std::size_t k = 0; k < nv; ++k) {
    sol.values[k] = lp.vars[k].lower + t.value(k);
    sol.objective += lp.objective[k] * t.value(k);
  }
  sol.iterations = iterations;
  return sol;
}

}  // namespace agentplan
