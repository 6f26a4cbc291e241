#include "cvxsched/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace cvxsched {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int LpInstance::add_row(std::vector<std::pair<int, double>> entries,
                        double bound, std::string tag) {
  std::sort(entries.begin(), entries.end());
  rows.push_back(std::move(entries));
  const int idx = num_rows() - 1;
  rhs.conservativeResize(num_rows());
  rhs[idx] = bound;
  row_tags.push_back(std::move(tag));
  return idx;
}

void LpInstance::set_sizes(int vars, double default_upper) {
  num_vars = vars;
  objective = VectorXd::Zero(vars);
  upper = VectorXd::Constant(vars, default_upper);
}

void LpInstance::add_entry(int row, int col, double coeff) {
  rows.at(row).emplace_back(col, coeff);
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

namespace {

constexpr double kPivEps = 1e-9;   // ratio test ignores smaller pivots
constexpr double kDegStep = 1e-10; // step below this counts as degenerate
constexpr int kBlandTrigger = 64;  // degenerate steps before Bland's rule

enum : int { kAtLower = -1, kAtUpper = -2 };

// Tightest ratio-test limit; ties go to the larger pivot magnitude, then the
// smaller basic variable index, so the pivot sequence is reproducible.
struct RatioPicker {
  bool has = false;
  double step = kInf;
  int position = -1;  // blocking basic position, -1 = entering's own bound
  int to_upper = 0;
  double w = 0.0;
  int var = -1;

  void offer(double limit, int pos, int up, double piv, int v) {
    if (limit < 0.0) limit = 0.0;
    if (!has) {
      has = true;
      step = limit, position = pos, to_upper = up, w = piv, var = v;
      return;
    }
    const double tie = 1e-12 * (1.0 + step);
    if (limit < step - tie) {
      step = limit, position = pos, to_upper = up, w = piv, var = v;
    } else if (limit < step + tie &&
               (std::abs(piv) > std::abs(w) * (1.0 + 1e-12) ||
                (std::abs(piv) >= std::abs(w) * (1.0 - 1e-12) && v < var))) {
      step = std::min(step, limit), position = pos, to_upper = up, w = piv,
      var = v;
    }
  }
};

// ---------------------------------------------------------------------------
// Dense engine: explicit basis inverse, two phases. For small or
// unstructured instances; each iteration costs O(rows^2 + nnz).
// ---------------------------------------------------------------------------

class DenseSimplex {
 public:
  DenseSimplex(const LpInstance& lp, double tol, long iter_limit)
      : lp_(lp), tol_(tol), iter_limit_(iter_limit) {
    n_ = lp.num_vars;
    m_ = lp.num_rows();
    cols_.resize(n_);
    for (int i = 0; i < m_; ++i)
      for (const auto& [j, v] : lp.rows[i])
        if (v != 0.0) cols_[j].emplace_back(i, v);

    for (int i = 0; i < m_; ++i)
      if (lp.rhs[i] < 0.0) art_rows_.push_back(i);
    a_ = static_cast<int>(art_rows_.size());
    total_ = n_ + m_ + a_;

    up_ = VectorXd::Constant(total_, kInf);
    up_.head(n_) = lp.upper;
    cost_ = VectorXd::Zero(total_);
    cost_.head(n_) = lp.objective;
    cscale_ = 1.0 + (n_ > 0 ? lp.objective.cwiseAbs().maxCoeff() : 0.0);

    place_.assign(total_, kAtLower);
    basis_.resize(m_);
    Binv_ = MatrixXd::Identity(m_, m_);
    xB_ = lp.rhs;
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
    for (int t = 0; t < a_; ++t) {
      const int row = art_rows_[t];
      basis_[row] = n_ + m_ + t;
      Binv_(row, row) = -1.0;
      xB_[row] = -lp_.rhs[row];
    }
    for (int i = 0; i < m_; ++i) place_[basis_[i]] = i;
  }

  LpSolution run() {
    if (a_ > 0) {
      VectorXd phase1 = VectorXd::Zero(total_);
      for (int t = 0; t < a_; ++t) phase1[n_ + m_ + t] = -1.0;
      const double save = cscale_;
      cscale_ = 1.0;
      const LpStatus s1 = iterate(phase1, true);
      cscale_ = save;
      if (s1 == LpStatus::IterationLimit) return extract(s1);
      double infeas = 0.0;
      for (int t = 0; t < a_; ++t) infeas += value_of(n_ + m_ + t);
      if (infeas > tol_ * (1.0 + lp_.rhs.cwiseAbs().maxCoeff()))
        return extract(LpStatus::Infeasible);
      for (int t = 0; t < a_; ++t) up_[n_ + m_ + t] = 0.0;  // pin at zero
    }
    return extract(iterate(cost_, false));
  }

 private:
  double value_of(int var) const {
    if (place_[var] == kAtLower) return 0.0;
    if (place_[var] == kAtUpper) return up_[var];
    return xB_[place_[var]];
  }

  VectorXd column(int var) const {
    VectorXd a = VectorXd::Zero(m_);
    if (var < n_) {
      for (const auto& [i, v] : cols_[var]) a[i] = v;
    } else if (var < n_ + m_) {
      a[var - n_] = 1.0;
    } else {
      a[art_rows_[var - n_ - m_]] = -1.0;
    }
    return a;
  }

  double reduced_cost(int var, const VectorXd& c, const VectorXd& y) const {
    double d = c[var];
    if (var < n_) {
      for (const auto& [i, v] : cols_[var]) d -= y[i] * v;
    } else if (var < n_ + m_) {
      d -= y[var - n_];
    } else {
      d += y[art_rows_[var - n_ - m_]];
    }
    return d;
  }

  VectorXd duals(const VectorXd& c) const {
    VectorXd cB(m_);
    for (int i = 0; i < m_; ++i) cB[i] = c[basis_[i]];
    return Binv_.transpose() * cB;
  }

  void refactorize() {
    MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    Binv_ = B.partialPivLu().inverse();
    VectorXd rhs = lp_.rhs;
    for (int v = 0; v < total_; ++v)
      if (place_[v] == kAtUpper) rhs -= column(v) * up_[v];
    xB_ = Binv_ * rhs;
  }

  LpStatus iterate(const VectorXd& c, bool phase1) {
    const double dtol = tol_ * cscale_;
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iters_ >= iter_limit_) return LpStatus::IterationLimit;
      const VectorXd y = duals(c);

      int enter = -1;
      double best_viol = dtol;
      for (int v = 0; v < total_; ++v) {
        if (place_[v] >= 0 || up_[v] == 0.0) continue;
        const double d = reduced_cost(v, c, y);
        const double viol = place_[v] == kAtLower ? d : -d;
        if (viol > best_viol) {
          enter = v;
          best_viol = viol;
          if (bland) break;  // smallest violating index
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      const int dir = place_[enter] == kAtLower ? 1 : -1;
      const VectorXd w = Binv_ * column(enter);

      RatioPicker pick;
      for (int p = 0; p < m_; ++p) {
        const double rate = dir * w[p];
        const int bv = basis_[p];
        if (rate > kPivEps) {
          pick.offer(xB_[p] / rate, p, 0, w[p], bv);
        } else if (rate < -kPivEps && std::isfinite(up_[bv])) {
          pick.offer((up_[bv] - xB_[p]) / -rate, p, 1, w[p], bv);
        }
      }
      const double bound_limit =
          std::isfinite(up_[enter]) ? up_[enter] : kInf;
      if (!pick.has && !std::isfinite(bound_limit)) {
        // phase-1 objective is bounded, so this can only be round-off
        return phase1 ? LpStatus::IterationLimit : LpStatus::Unbounded;
      }

      // prefer the bound flip on ties: same step, no basis change
      const bool flip =
          bound_limit <=
          pick.step + 1e-12 * (1.0 + std::min(bound_limit, pick.step));
      const double step = flip ? bound_limit : pick.step;
      ++iters_;
      if (step <= kDegStep) {
        if (++degenerate_run > kBlandTrigger) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      xB_ -= (dir * step) * w;
      if (flip) {
        place_[enter] = place_[enter] == kAtLower ? kAtUpper : kAtLower;
        continue;
      }
      const int p = pick.position;
      const int leave = basis_[p];
      place_[leave] = pick.to_upper ? kAtUpper : kAtLower;
      basis_[p] = enter;
      place_[enter] = p;
      xB_[p] = dir > 0 ? step : up_[enter] - step;
      const double piv = w[p];
      Binv_.row(p) /= piv;
      for (int i = 0; i < m_; ++i)
        if (i != p && w[i] != 0.0) Binv_.row(i) -= w[i] * Binv_.row(p);
      if (++pivots_ % 128 == 0) refactorize();
    }
  }

  LpSolution extract(LpStatus status) {
    if (m_ > 0) refactorize();
    LpSolution sol;
    sol.status = status;
    sol.iterations = iters_;
    sol.pivots = pivots_;
    sol.x = VectorXd::Zero(n_);
    for (int j = 0; j < n_; ++j) sol.x[j] = value_of(j);
    sol.y = duals(cost_);
    sol.primal_objective = n_ > 0 ? lp_.objective.dot(sol.x) : 0.0;
    sol.dual_objective = lp_.rhs.dot(sol.y);
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(up_[j])) continue;
      const double mu = reduced_cost(j, cost_, sol.y);
      if (mu > 0.0) sol.dual_objective += up_[j] * mu;
    }
    return sol;
  }

  const LpInstance& lp_;
  double tol_;
  long iter_limit_;
  int n_ = 0, m_ = 0, a_ = 0, total_ = 0;
  double cscale_ = 1.0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<int> art_rows_;
  VectorXd cost_, up_, xB_;
  std::vector<int> basis_, place_;
  MatrixXd Binv_;
  long iters_ = 0, pivots_ = 0;
};

// ---------------------------------------------------------------------------
// Partitioned engine for instances dominated by disjoint unit-coefficient
// choice rows (one per task) plus a few coupling rows. The basis is kept as
// one covering column per choice row plus a dense core over the coupling
// rows, so iterations cost O(core^2) instead of O(rows^2).
// ---------------------------------------------------------------------------

struct Structure {
  bool usable = false;
  std::vector<int> gub_of_row;   // row -> choice-row index or -1
  std::vector<int> core_of_row;  // row -> coupling-row index or -1
  int gub_count = 0;
  int core_count = 0;
};

Structure detect_structure(const LpInstance& lp) {
  Structure st;
  const int m = lp.num_rows();
  st.gub_of_row.assign(m, -1);
  st.core_of_row.assign(m, -1);
  if (m > 0 && lp.rhs.minCoeff() < 0.0) return st;

  std::vector<char> claimed(lp.num_vars, 0);
  for (int i = 0; i < m; ++i) {
    bool unit = true;
    for (const auto& [j, v] : lp.rows[i]) {
      if (v != 1.0 || claimed[j]) {
        unit = false;
        break;
      }
    }
    if (unit) {
      st.gub_of_row[i] = st.gub_count++;
      for (const auto& [j, v] : lp.rows[i]) claimed[j] = 1;
    } else {
      st.core_of_row[i] = st.core_count++;
    }
  }
  st.usable = st.gub_count >= 16 && st.core_count <= 512;
  return st;
}

class PartitionedSimplex {
 public:
  PartitionedSimplex(const LpInstance& lp, const Structure& st, double tol,
                     long iter_limit)
      : lp_(lp), st_(st), tol_(tol), iter_limit_(iter_limit) {
    n_ = lp.num_vars;
    m_ = lp.num_rows();
    g_ = st.gub_count;
    d_ = st.core_count;
    total_ = n_ + m_;
    cscale_ = 1.0 + (n_ > 0 ? lp.objective.cwiseAbs().maxCoeff() : 0.0);

    gub_of_var_.assign(total_, -1);
    core_col_.resize(total_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, v] : lp.rows[i]) {
        if (v == 0.0) continue;
        if (st.gub_of_row[i] >= 0)
          gub_of_var_[j] = st.gub_of_row[i];
        else
          core_col_[j].emplace_back(st.core_of_row[i], v);
      }
    }
    for (int i = 0; i < m_; ++i) {
      const int slack = n_ + i;
      if (st.gub_of_row[i] >= 0)
        gub_of_var_[slack] = st.gub_of_row[i];
      else
        core_col_[slack].emplace_back(st.core_of_row[i], 1.0);
    }
    up_ = VectorXd::Constant(total_, kInf);
    up_.head(n_) = lp.upper;
    cost_ = VectorXd::Zero(total_);
    cost_.head(n_) = lp.objective;

    // all-slack start; detection guarantees rhs >= 0
    key_.resize(g_);
    key_val_.assign(g_, 0.0);
    core_.resize(d_);
    core_val_.assign(d_, 0.0);
    place_.assign(total_, kAtLower);
    for (int i = 0; i < m_; ++i) {
      if (st.gub_of_row[i] >= 0) {
        const int gi = st.gub_of_row[i];
        key_[gi] = n_ + i;
        key_val_[gi] = lp.rhs[i];
      } else {
        const int ci = st.core_of_row[i];
        core_[ci] = n_ + i;
        core_val_[ci] = lp.rhs[i];
      }
      place_[n_ + i] = 1;  // basic marker
    }
    wg_mark_.assign(g_, 0);
    if (g_ >= 64) crash_start();
    refactorize_core();
    recompute_duals();
  }

  LpSolution run() {
    LpStatus status = LpStatus::Optimal;
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (iters_ >= iter_limit_) {
        status = LpStatus::IterationLimit;
        break;
      }
      const int enter = bland ? first_candidate() : next_candidate();
      if (enter < 0) break;

      const int dir = place_[enter] == kAtLower ? 1 : -1;
      ftran(enter);

      RatioPicker pick;
      for (int j = 0; j < d_; ++j) {
        const double rate = dir * w_core_[j];
        const int bv = core_[j];
        if (rate > kPivEps) {
          pick.offer(core_val_[j] / rate, j, 0, w_core_[j], bv);
        } else if (rate < -kPivEps && std::isfinite(up_[bv])) {
          pick.offer((up_[bv] - core_val_[j]) / -rate, j, 1, w_core_[j], bv);
        }
      }
      for (const auto& [gi, wv] : w_gub_) {
        const double rate = dir * wv;
        const int bv = key_[gi];
        if (rate > kPivEps) {
          pick.offer(key_val_[gi] / rate, d_ + gi, 0, wv, bv);
        } else if (rate < -kPivEps && std::isfinite(up_[bv])) {
          pick.offer((up_[bv] - key_val_[gi]) / -rate, d_ + gi, 1, wv, bv);
        }
      }
      const double bound_limit =
          std::isfinite(up_[enter]) ? up_[enter] : kInf;
      if (!pick.has && !std::isfinite(bound_limit)) {
        status = LpStatus::Unbounded;
        break;
      }

      // prefer the bound flip on ties: same step, no basis change
      const bool flip =
          bound_limit <=
          pick.step + 1e-12 * (1.0 + std::min(bound_limit, pick.step));
      const double step = flip ? bound_limit : pick.step;
      ++iters_;

      apply_step(dir, step);
      bool neutral = false;  // local key swap, cannot cycle on its own
      if (flip) {
        place_[enter] = place_[enter] == kAtLower ? kAtUpper : kAtLower;
      } else {
        // the candidate pool survives pivots; entries are revalidated
        // against fresh duals when popped
        const bool core_changed =
            pivot(enter, dir, step, pick.position, pick.to_upper);
        if (++pivots_ % 128 == 0) refactorize_core();
        if (core_changed)
          recompute_duals();
        else
          neutral = true;
      }
      if (step > kDegStep) {
        degenerate_run = 0;
        bland = false;
      } else if (!neutral) {
        if (++degenerate_run > kBlandTrigger) bland = true;
      }
      if (iters_ % 4096 == 0) recompute_values();
    }
    return extract(status);
  }

 private:
  // Crash start in two steps. First a projected-subgradient pass on the
  // aggregate dual estimates coupling-row prices; then profitable columns are
  // set at their upper bound in reduced-density order while the slack basis
  // stays feasible. The simplex starts near the optimum and only repairs,
  // instead of walking the whole way one pivot at a time.
  void crash_start() {
    VectorXd b = VectorXd::Zero(d_);
    for (int i = 0; i < m_; ++i)
      if (st_.core_of_row[i] >= 0) b[st_.core_of_row[i]] = lp_.rhs[i];

    std::vector<int> head(g_, -1), nxt(n_, -1);
    std::vector<int> loose;
    std::vector<double> gub_rhs(g_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (st_.gub_of_row[i] >= 0) gub_rhs[st_.gub_of_row[i]] = lp_.rhs[i];
    for (int j = n_ - 1; j >= 0; --j) {
      const int gi = gub_of_var_[j];
      if (gi >= 0) {
        nxt[j] = head[gi];
        head[gi] = j;
      } else {
        loose.push_back(j);
      }
    }

    VectorXd lambda = VectorXd::Zero(d_), best_lambda = lambda, grad(d_);
    double best_dual = std::numeric_limits<double>::infinity();
    auto col_price = [&](int j) {
      double rc = cost_[j];
      for (const auto& [i, v] : core_col_[j]) rc -= lambda[i] * v;
      return rc;
    };
    for (int it = 0; it < 40; ++it) {
      grad = b;
      double dual = lambda.dot(b);
      for (int gi = 0; gi < g_; ++gi) {
        double best_rc = 0.0;
        int best_j = -1;
        for (int j = head[gi]; j >= 0; j = nxt[j]) {
          const double rc = col_price(j);
          if (rc > best_rc) {
            best_rc = rc;
            best_j = j;
          }
        }
        if (best_j < 0) continue;
        const double w = std::isfinite(up_[best_j])
                             ? std::min(gub_rhs[gi], up_[best_j])
                             : gub_rhs[gi];
        dual += w * best_rc;
        for (const auto& [i, v] : core_col_[best_j]) grad[i] -= v * w;
      }
      for (const int j : loose) {
        if (!std::isfinite(up_[j])) continue;
        const double rc = col_price(j);
        if (rc <= 0.0) continue;
        dual += up_[j] * rc;
        for (const auto& [i, v] : core_col_[j]) grad[i] -= v * up_[j];
      }
      if (dual < best_dual) {
        best_dual = dual;
        best_lambda = lambda;
      }
      const double theta = 0.5 / std::sqrt(1.0 + it);
      for (int k = 0; k < d_; ++k)
        lambda[k] = std::max(
            0.0, lambda[k] - theta * cscale_ * grad[k] / std::max(b[k], 1e-9));
    }
    lambda = best_lambda;

    std::vector<std::pair<double, int>> order;
    order.reserve(n_);
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(up_[j])) continue;
      double rc = cost_[j];
      double load = 1e-12;
      for (const auto& [i, v] : core_col_[j]) {
        rc -= lambda[i] * v;
        load += std::abs(v) / std::max(b[i], 1e-9);
      }
      if (rc <= 0.0) continue;
      order.emplace_back(-rc / load, j);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [neg_dens, j] : order) {
      const double uj = up_[j];
      const int gi = gub_of_var_[j];
      if (gi >= 0 && key_val_[gi] < uj) continue;
      bool fits = true;
      for (const auto& [i, v] : core_col_[j])
        if (core_val_[i] < v * uj) {
          fits = false;
          break;
        }
      if (!fits) continue;
      place_[j] = kAtUpper;
      if (gi >= 0) key_val_[gi] -= uj;
      for (const auto& [i, v] : core_col_[j]) core_val_[i] -= v * uj;
    }
  }

  // Core matrix column for a basic variable sitting at core position j:
  // its coupling-row slice minus the slice of its choice row's key column.
  void core_column_of(int var, VectorXd& out) const {
    out.setZero();
    for (const auto& [i, v] : core_col_[var]) out[i] += v;
    const int gi = gub_of_var_[var];
    if (gi >= 0)
      for (const auto& [i, v] : core_col_[key_[gi]]) out[i] -= v;
  }

  void refactorize_core() {
    M_.resize(d_, d_);
    VectorXd col(d_);
    for (int j = 0; j < d_; ++j) {
      core_column_of(core_[j], col);
      M_.col(j) = col;
    }
    Minv_ = d_ > 0 ? MatrixXd(M_.partialPivLu().inverse()) : MatrixXd();
  }

  // Sherman-Morrison update after column j of the core matrix changes.
  void update_core_column(int j) {
    VectorXd col(d_);
    core_column_of(core_[j], col);
    const VectorXd delta = col - M_.col(j);
    if (delta.isZero(0.0)) return;
    const VectorXd v = Minv_ * delta;
    const double denom = 1.0 + v[j];
    if (std::abs(denom) < 1e-8) {
      M_.col(j) = col;
      refactorize_core();
      return;
    }
    M_.col(j) = col;
    const Eigen::RowVectorXd row_j = Minv_.row(j);
    Minv_.noalias() -= (v / denom) * row_j;
  }

  // Core-row duals; choice-row duals are derived per key on demand so a
  // pivot costs O(core^2), not O(rows).
  void recompute_duals() {
    if (d_ > 0) {
      VectorXd cq(d_);
      for (int j = 0; j < d_; ++j) {
        const int gi = gub_of_var_[core_[j]];
        cq[j] = cost_[core_[j]] - (gi >= 0 ? cost_[key_[gi]] : 0.0);
      }
      z_.noalias() = Minv_.transpose() * cq;
    } else {
      z_ = VectorXd();
    }
  }

  double gub_dual(int gi) const {
    double y = cost_[key_[gi]];
    for (const auto& [i, v] : core_col_[key_[gi]]) y -= z_[i] * v;
    return y;
  }

  double reduced_cost(int var) const {
    double r = cost_[var];
    const int gi = gub_of_var_[var];
    if (gi >= 0) r -= gub_dual(gi);
    for (const auto& [i, v] : core_col_[var]) r -= z_[i] * v;
    return r;
  }

  // w = B^-1 * column(enter): dense over core positions, sparse over keys.
  void ftran(int enter) {
    VectorXd rhs = VectorXd::Zero(d_);
    for (const auto& [i, v] : core_col_[enter]) rhs[i] += v;
    const int ge = gub_of_var_[enter];
    if (ge >= 0)
      for (const auto& [i, v] : core_col_[key_[ge]]) rhs[i] -= v;
    if (d_ > 0)
      w_core_.noalias() = Minv_ * rhs;
    else
      w_core_.resize(0);

    for (const auto& [gi, wv] : w_gub_) wg_mark_[gi] = 0;
    w_gub_.clear();
    auto touch = [&](int gi, double v) {
      if (!wg_mark_[gi]) {
        wg_mark_[gi] = 1;
        w_gub_.emplace_back(gi, v);
      } else {
        for (auto& [gg, vv] : w_gub_)
          if (gg == gi) {
            vv += v;
            break;
          }
      }
    };
    if (ge >= 0) touch(ge, 1.0);
    for (int j = 0; j < d_; ++j) {
      const int gi = gub_of_var_[core_[j]];
      if (gi >= 0 && w_core_[j] != 0.0) touch(gi, -w_core_[j]);
    }
  }

  void apply_step(int dir, double step) {
    if (step == 0.0) return;
    for (int j = 0; j < d_; ++j) core_val_[j] -= dir * step * w_core_[j];
    for (const auto& [gi, wv] : w_gub_) key_val_[gi] -= dir * step * wv;
  }

  // Returns true when the core matrix or core duals changed; a key swap in a
  // choice row with no core members leaves both untouched.
  bool pivot(int enter, int dir, double step, int position, int to_upper) {
    const double enter_val = dir > 0 ? step : up_[enter] - step;
    if (position < d_) {
      place_[core_[position]] = to_upper ? kAtUpper : kAtLower;
      core_[position] = enter;
      core_val_[position] = enter_val;
      place_[enter] = 1;
      update_core_column(position);
      return true;
    }
    const int gi = position - d_;
    place_[key_[gi]] = to_upper ? kAtUpper : kAtLower;
    if (gub_of_var_[enter] == gi) {
      key_[gi] = enter;
      key_val_[gi] = enter_val;
    } else {
      int promote = -1;
      for (int j = 0; j < d_; ++j)
        if (gub_of_var_[core_[j]] == gi) {
          promote = j;
          break;
        }
      assert(promote >= 0 && "key pivot without core coverage");
      key_[gi] = core_[promote];
      key_val_[gi] = core_val_[promote];
      core_[promote] = enter;
      core_val_[promote] = enter_val;
    }
    place_[enter] = 1;
    // the key of this choice row changed: every core column tied to it moved
    int touched = 0;
    for (int j = 0; j < d_; ++j) {
      if (gub_of_var_[core_[j]] == gi || core_[j] == enter) {
        update_core_column(j);
        ++touched;
      }
    }
    return touched > 0;
  }

  // Exact basic values from the current bound pattern.
  void recompute_values() {
    VectorXd rhs_core = VectorXd::Zero(d_);
    VectorXd rhs_gub = VectorXd::Zero(g_);
    for (int i = 0; i < m_; ++i) {
      if (st_.gub_of_row[i] >= 0)
        rhs_gub[st_.gub_of_row[i]] = lp_.rhs[i];
      else
        rhs_core[st_.core_of_row[i]] = lp_.rhs[i];
    }
    for (int v = 0; v < total_; ++v) {
      if (place_[v] != kAtUpper) continue;
      const double uv = up_[v];
      const int gi = gub_of_var_[v];
      if (gi >= 0) rhs_gub[gi] -= uv;
      for (const auto& [i, val] : core_col_[v]) rhs_core[i] -= val * uv;
    }
    for (int gi = 0; gi < g_; ++gi) {
      if (rhs_gub[gi] == 0.0) continue;
      for (const auto& [i, v] : core_col_[key_[gi]])
        rhs_core[i] -= v * rhs_gub[gi];
    }
    if (d_ > 0) {
      const VectorXd w2 = Minv_ * rhs_core;
      for (int j = 0; j < d_; ++j) core_val_[j] = w2[j];
      for (int gi = 0; gi < g_; ++gi) key_val_[gi] = rhs_gub[gi];
      for (int j = 0; j < d_; ++j) {
        const int gi = gub_of_var_[core_[j]];
        if (gi >= 0) key_val_[gi] -= w2[j];
      }
    } else {
      for (int gi = 0; gi < g_; ++gi) key_val_[gi] = rhs_gub[gi];
    }
  }

  // One scan fills a max-heap of violating candidates; entries go stale as
  // duals move, so each pop is revalidated before use. A fresh scan finding
  // nothing is the optimality proof.
  static bool cand_less(const std::pair<double, int>& a,
                        const std::pair<double, int>& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  }

  void rescan() {
    cands_.clear();
    const double dtol = tol_ * cscale_;
    for (int v = 0; v < total_; ++v) {
      if (place_[v] >= 0) continue;
      const double r = reduced_cost(v);
      const double viol = place_[v] == kAtLower ? r : -r;
      if (viol > dtol) cands_.emplace_back(viol, v);
    }
    std::make_heap(cands_.begin(), cands_.end(), cand_less);
    dirty_ = false;
    ++rescans_;
  }

  int next_candidate() {
    const double dtol = tol_ * cscale_;
    if (dirty_) rescan();
    while (true) {
      while (!cands_.empty()) {
        std::pop_heap(cands_.begin(), cands_.end(), cand_less);
        const int v = cands_.back().second;
        cands_.pop_back();
        if (place_[v] >= 0) continue;
        const double r = reduced_cost(v);
        const double viol = place_[v] == kAtLower ? r : -r;
        if (viol <= dtol) continue;  // stale since the scan
        return v;
      }
      rescan();
      if (cands_.empty()) return -1;
    }
  }

  // Bland's rule: smallest violating index under fresh duals.
  int first_candidate() {
    const double dtol = tol_ * cscale_;
    dirty_ = true;
    for (int v = 0; v < total_; ++v) {
      if (place_[v] >= 0) continue;
      const double r = reduced_cost(v);
      const double viol = place_[v] == kAtLower ? r : -r;
      if (viol > dtol) return v;
    }
    return -1;
  }

  LpSolution extract(LpStatus status) {
    refactorize_core();
    recompute_values();
    recompute_duals();
    LpSolution sol;
    sol.status = status;
    sol.iterations = iters_;
    sol.pivots = pivots_;
    sol.x = VectorXd::Zero(n_);
    for (int j = 0; j < n_; ++j)
      if (place_[j] == kAtUpper) sol.x[j] = up_[j];
    for (int j = 0; j < d_; ++j)
      if (core_[j] < n_) sol.x[core_[j]] = core_val_[j];
    for (int gi = 0; gi < g_; ++gi)
      if (key_[gi] < n_) sol.x[key_[gi]] = key_val_[gi];
    sol.y = VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i)
      sol.y[i] = st_.gub_of_row[i] >= 0 ? gub_dual(st_.gub_of_row[i])
                                        : z_[st_.core_of_row[i]];
    sol.primal_objective = n_ > 0 ? lp_.objective.dot(sol.x) : 0.0;
    sol.dual_objective = lp_.rhs.dot(sol.y);
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(up_[j])) continue;
      const double mu = reduced_cost(j);
      if (mu > 0.0) sol.dual_objective += up_[j] * mu;
    }
    return sol;
  }

  const LpInstance& lp_;
  const Structure& st_;
  double tol_;
  long iter_limit_;
  int n_ = 0, m_ = 0, g_ = 0, d_ = 0, total_ = 0;
  double cscale_ = 1.0;
  std::vector<int> gub_of_var_;
  std::vector<std::vector<std::pair<int, double>>> core_col_;
  VectorXd cost_, up_;
  std::vector<int> key_, core_, place_;
  std::vector<double> key_val_, core_val_;
  MatrixXd M_, Minv_;
  VectorXd z_, w_core_;
  std::vector<std::pair<int, double>> w_gub_;
  std::vector<char> wg_mark_;
  std::vector<std::pair<double, int>> cands_;
  bool dirty_ = true;
  long iters_ = 0, pivots_ = 0, rescans_ = 0;
};

}  // namespace

LpSolution lp_solve(const LpInstance& lp, double tol, long iter_limit) {
  const int n = lp.num_vars;
  const int m = lp.num_rows();
  if (iter_limit < 0) iter_limit = 50L * (n + m);

  if (n == 0) {
    LpSolution sol;
    sol.y = VectorXd::Zero(m);
    sol.status = (m == 0 || lp.rhs.minCoeff() >= -tol) ? LpStatus::Optimal
                                                       : LpStatus::Infeasible;
    return sol;
  }
  if (m == 0) {
    LpSolution sol;
    sol.x = VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
      if (lp.objective[j] > 0.0) {
        if (!std::isfinite(lp.upper[j])) {
          sol.status = LpStatus::Unbounded;
          return sol;
        }
        sol.x[j] = lp.upper[j];
      }
    }
    sol.status = LpStatus::Optimal;
    sol.primal_objective = sol.dual_objective = lp.objective.dot(sol.x);
    return sol;
  }

  const Structure st = detect_structure(lp);
  if (st.usable) return PartitionedSimplex(lp, st, tol, iter_limit).run();
  return DenseSimplex(lp, tol, iter_limit).run();
}

LpCertificate lp_certificate(const LpInstance& lp, const LpSolution& sol) {
  LpCertificate cert;
  const int n = lp.num_vars;
  const int m = lp.num_rows();
  const double cmax =
      1.0 + (n > 0 ? lp.objective.cwiseAbs().maxCoeff() : 0.0);

  for (int j = 0; j < n; ++j) {
    cert.primal_infeasibility =
        std::max(cert.primal_infeasibility, -sol.x[j]);
    if (std::isfinite(lp.upper[j]))
      cert.primal_infeasibility =
          std::max(cert.primal_infeasibility,
                   (sol.x[j] - lp.upper[j]) / (1.0 + lp.upper[j]));
  }
  for (int i = 0; i < m; ++i) {
    double gx = 0.0;
    for (const auto& [j, v] : lp.rows[i]) gx += v * sol.x[j];
    const double scale = 1.0 + std::abs(lp.rhs[i]);
    cert.primal_infeasibility =
        std::max(cert.primal_infeasibility, (gx - lp.rhs[i]) / scale);
    cert.dual_infeasibility =
        std::max(cert.dual_infeasibility, -sol.y[i] / cmax);
    cert.complementary_slackness =
        std::max(cert.complementary_slackness,
                 std::abs(sol.y[i] * (lp.rhs[i] - gx)) / scale);
  }
  cert.duality_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                     (1.0 + std::abs(sol.primal_objective));
  return cert;
}

}  // namespace cvxsched
