#pragma once

#include "cvxsched/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace cvxsched {

// Pooled residual capacity of one machine shape.
struct ShapePool {
  Vec capacity;      // componentwise sum of remaining over the shape's servers
  int server_count = 0;
};

// Sums remaining capacity per shape. Shapes with no servers are omitted, so
// the key count equals the number of distinct shapes actually present.
std::map<std::string, ShapePool> aggregate_shapes(const Cluster& cluster);

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;     // stable machine-readable tag
  std::string subject;  // offending task/server/shape/group id
  std::string message;
};

// Checks every type invariant; never throws. Errors make the problem
// unusable, warnings (e.g. structurally unplaceable tasks) do not.
std::vector<Diagnostic> validate_problem(const PlacementProblem& problem);

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

struct ProblemStats {
  long long binary_vars = 0;     // t * s, the exact formulation
  long long lp_vars = 0;         // t * m (shape mode) or t (global mode)
  long long capacity_rows = 0;
  long long assignment_rows = 0;
  long long group_rows = 0;
};

ProblemStats problem_stats(const PlacementProblem& problem);

}  // namespace cvxsched
