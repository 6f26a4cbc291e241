#pragma once

// Seeded generator of feasible, bounded LPs for certificate testing. A random
// interior-ish point x0 is drawn first and each row's bound is set at or
// above G x0, so instances are never infeasible and finite upper bounds keep
// them bounded.

#include "cvxsched/lp.hpp"
#include "cvxsched/rng.hpp"

namespace testsupport {

inline cvxsched::LpInstance random_lp(cvxsched::Rng& rng, int n, int m) {
  cvxsched::LpInstance lp;
  lp.set_sizes(n);
  for (int j = 0; j < n; ++j) {
    lp.objective[j] = rng.uniform(-1.0, 2.0);
    lp.upper[j] = rng.uniform(0.5, 2.0);
  }
  Eigen::VectorXd x0(n);
  for (int j = 0; j < n; ++j) x0[j] = rng.uniform(0.0, lp.upper[j]);

  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> entries;
    double gx0 = 0.0;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.7) {
        const double v = rng.uniform(-2.0, 3.0);
        if (v != 0.0) {
          entries.emplace_back(j, v);
          gx0 += v * x0[j];
        }
      }
    }
    // every third row is tight at x0 so duals have something to bind on
    const double margin = (i % 3 == 0) ? 0.0 : rng.uniform(0.0, 1.5);
    lp.add_row(std::move(entries), gx0 + margin);
  }
  return lp;
}

}  // namespace testsupport
