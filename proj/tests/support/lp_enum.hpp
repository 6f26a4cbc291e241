#pragma once

// Exhaustive vertex enumeration for tiny box-constrained LPs. Independent of
// the production solver: walks every choice of n active constraints among
// {rows, x_j = 0, x_j = u_j}, solves the square system, keeps the feasible
// point with the best objective. Only usable when every upper bound is
// finite and n is small.

#include "cvxsched/lp.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace testsupport {

struct EnumResult {
  double objective = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
  bool feasible_point_found = false;
};

inline EnumResult lp_enumerate(const cvxsched::LpInstance& lp,
                               double eps = 1e-9) {
  const int n = lp.num_vars;
  const int m = lp.num_rows();
  EnumResult best;

  // constraint list: a.x = b candidates
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> offsets;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const auto& [j, v] : lp.rows[i]) a[j] += v;
    normals.push_back(a);
    offsets.push_back(lp.rhs[i]);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a[j] = 1.0;
    normals.push_back(a);
    offsets.push_back(0.0);
    normals.push_back(a);
    offsets.push_back(lp.upper[j]);
  }
  const int total = static_cast<int>(normals.size());

  auto feasible = [&](const Eigen::VectorXd& x) {
    for (int j = 0; j < n; ++j) {
      if (x[j] < -eps || x[j] > lp.upper[j] + eps) return false;
    }
    for (int i = 0; i < m; ++i) {
      double gx = 0.0;
      for (const auto& [j, v] : lp.rows[i]) gx += v * x[j];
      if (gx > lp.rhs[i] + eps * (1.0 + std::abs(lp.rhs[i]))) return false;
    }
    return true;
  };

  std::vector<int> pick(n);
  auto recurse = [&](auto&& self, int depth, int start) -> void {
    if (depth == n) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd b(n);
      for (int k = 0; k < n; ++k) {
        A.row(k) = normals[pick[k]].transpose();
        b[k] = offsets[pick[k]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!feasible(x)) return;
      const double obj = lp.objective.dot(x);
      best.feasible_point_found = true;
      if (obj > best.objective) {
        best.objective = obj;
        best.x = x;
      }
      return;
    }
    for (int i = start; i <= total - (n - depth); ++i) {
      pick[depth] = i;
      self(self, depth + 1, i + 1);
    }
  };
  if (n > 0) recurse(recurse, 0, 0);
  return best;
}

}  // namespace testsupport
