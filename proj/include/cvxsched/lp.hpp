#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cvxsched {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// maximize c.x  subject to  G x <= h,  0 <= x <= u.
// Rows are stored sparse, entries per row sorted by column index so pivot
// order is reproducible. Row tags are opaque to the solver; callers use
// them to map duals back to their origin.
struct LpInstance {
  int num_vars = 0;
  Eigen::VectorXd objective;                                // c, size num_vars
  std::vector<std::vector<std::pair<int, double>>> rows;    // G, per-row sparse
  Eigen::VectorXd rhs;                                      // h, size rows
  Eigen::VectorXd upper;                                    // u, +inf allowed
  std::vector<std::string> row_tags;                        // optional labels

  int num_rows() const { return static_cast<int>(rows.size()); }

  // Appends a row and returns its index. Entries get sorted by column.
  int add_row(std::vector<std::pair<int, double>> entries, double bound,
              std::string tag = {});

  // Convenience for building instances incrementally.
  void set_sizes(int vars, double default_upper = 1.0);
  void add_entry(int row, int col, double coeff);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  Eigen::VectorXd x;            // structural primal values
  Eigen::VectorXd y;            // row duals, >= 0 for binding <= rows
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  long iterations = 0;          // bound flips + basis changes
  long pivots = 0;              // basis changes only
};

// Bounded-variable primal simplex. Status is always returned, never thrown.
// tol is relative; iter_limit < 0 selects 50 * (rows + vars).
LpSolution lp_solve(const LpInstance& lp, double tol = 1e-6,
                    long iter_limit = -1);

// Scaled violations of the optimality conditions for an allegedly optimal
// solution: row/bound feasibility, y >= 0, |primal - dual| gap, and row
// complementary slackness. All should sit below the solve tolerance.
struct LpCertificate {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double duality_gap = 0.0;
  double complementary_slackness = 0.0;

  double worst() const {
    return std::max(std::max(primal_infeasibility, dual_infeasibility),
                    std::max(duality_gap, complementary_slackness));
  }
};

LpCertificate lp_certificate(const LpInstance& lp, const LpSolution& sol);

}  // namespace cvxsched
