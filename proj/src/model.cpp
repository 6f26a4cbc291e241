#include "cvxsched/model.hpp"

#include <set>
#include <sstream>

namespace cvxsched {

std::map<std::string, ShapePool> aggregate_shapes(const Cluster& cluster) {
  std::map<std::string, ShapePool> pools;
  const int r = cluster.resource_dim();
  for (const Server& s : cluster.servers) {
    if (s.shape < 0 || s.shape >= static_cast<int>(cluster.shapes.size()))
      continue;  // flagged by validate_problem
    const std::string& id = cluster.shapes[s.shape].id;
    auto [it, inserted] = pools.try_emplace(id);
    if (inserted) it->second.capacity = Vec::Zero(r);
    it->second.capacity += s.remaining;
    it->second.server_count += 1;
  }
  return pools;
}

namespace {

void add(std::vector<Diagnostic>& out, Severity sev, std::string code,
         std::string subject, std::string message) {
  out.push_back({sev, std::move(code), std::move(subject), std::move(message)});
}

}  // namespace

std::vector<Diagnostic> validate_problem(const PlacementProblem& problem) {
  std::vector<Diagnostic> diags;
  const Cluster& cl = problem.cluster;
  const int r = cl.resource_dim();

  {
    std::set<std::string> names;
    int gpu_kinds = 0;
    for (const ResourceKind& k : cl.resources) {
      if (!names.insert(k.name).second)
        add(diags, Severity::Error, "duplicate-resource", k.name,
            "resource kind name repeats within the problem");
      if (k.unit == ResourceUnit::GpuCount) ++gpu_kinds;
    }
    if (gpu_kinds > 1)
      add(diags, Severity::Error, "multiple-gpu-kinds", "",
          "more than one gpu-count resource dimension");
  }

  std::set<std::string> shape_ids;
  for (const MachineShape& sh : cl.shapes) {
    if (!shape_ids.insert(sh.id).second)
      add(diags, Severity::Error, "duplicate-shape", sh.id,
          "shape id repeats");
    if (sh.per_server_capacity.size() != r)
      add(diags, Severity::Error, "shape-dim-mismatch", sh.id,
          "capacity vector length differs from resource dimension");
    else if (!(sh.per_server_capacity.array() > 0.0).any())
      add(diags, Severity::Error, "shape-zero-capacity", sh.id,
          "capacity is not positive in any dimension");
  }

  std::set<std::string> server_ids;
  for (const Server& s : cl.servers) {
    if (!server_ids.insert(s.id).second)
      add(diags, Severity::Error, "duplicate-server", s.id,
          "server id repeats");
    if (s.shape < 0 || s.shape >= static_cast<int>(cl.shapes.size())) {
      add(diags, Severity::Error, "unknown-shape", s.id,
          "server references a shape index outside the catalog");
      continue;
    }
    if (s.remaining.size() != r) {
      add(diags, Severity::Error, "server-dim-mismatch", s.id,
          "remaining vector length differs from resource dimension");
      continue;
    }
    const Vec& cap = cl.shapes[s.shape].per_server_capacity;
    if (cap.size() == r &&
        ((s.remaining.array() < -kEpsCap).any() ||
         (s.remaining.array() > cap.array() + kEpsCap).any()))
      add(diags, Severity::Error, "remaining-out-of-range", s.id,
          "remaining capacity outside [0, shape capacity]");
    for (const auto& [gid, count] : s.group_counts) {
      auto it = problem.groups.find(gid);
      if (it == problem.groups.end())
        add(diags, Severity::Error, "unknown-group", s.id,
            "server counts tasks of an undeclared group '" + gid + "'");
      else if (count > it->second.limit)
        add(diags, Severity::Error, "group-over-limit", s.id,
            "group '" + gid + "' count exceeds its limit");
      if (count < 0)
        add(diags, Severity::Error, "negative-group-count", s.id,
            "negative group count for '" + gid + "'");
    }
  }

  for (const auto& [gid, g] : problem.groups) {
    if (g.limit < 1)
      add(diags, Severity::Error, "nonpositive-group-limit", gid,
          "anti-affinity limit must be >= 1");
  }

  const int gpu = cl.gpu_dim();
  std::set<std::string> task_ids;
  for (const Task& t : problem.tasks) {
    if (!task_ids.insert(t.id).second)
      add(diags, Severity::Error, "duplicate-task", t.id, "task id repeats");
    if (!(t.priority > 0.0))
      add(diags, Severity::Error, "nonpositive priority", t.id,
          "priority weight must be positive");
    if (t.demand.size() != r) {
      add(diags, Severity::Error, "task-dim-mismatch", t.id,
          "demand vector length differs from resource dimension");
      continue;
    }
    if ((t.demand.array() < 0.0).any())
      add(diags, Severity::Error, "negative-demand", t.id,
          "demand has a negative component");
    else if (!(t.demand.array() > 0.0).any())
      add(diags, Severity::Error, "zero-demand", t.id,
          "demand is all zero");
    if (!(t.duration_s > 0.0))
      add(diags, Severity::Error, "nonpositive-duration", t.id,
          "duration must be positive");
    if (t.arrival_s < 0.0)
      add(diags, Severity::Error, "negative-arrival", t.id,
          "arrival time must be >= 0");
    if (!t.group.empty() && problem.groups.find(t.group) == problem.groups.end())
      add(diags, Severity::Error, "unknown group", t.id,
          "task references undeclared group '" + t.group + "'");

    bool eligible = false;
    for (const MachineShape& sh : cl.shapes) {
      if (sh.per_server_capacity.size() == r && shape_eligible(t, sh, gpu)) {
        eligible = true;
        break;
      }
    }
    if (!eligible && t.demand.size() == r)
      add(diags, Severity::Warning, "structurally-unplaceable", t.id,
          "no shape satisfies the task's labels/GPU requirements");
  }

  return diags;
}

ProblemStats problem_stats(const PlacementProblem& problem) {
  ProblemStats st;
  const auto t = static_cast<long long>(problem.tasks.size());
  const auto s = static_cast<long long>(problem.cluster.servers.size());
  const auto r = static_cast<long long>(problem.cluster.resource_dim());
  const auto m = problem.options.mode == PricingMode::Global
                     ? 1LL
                     : static_cast<long long>(problem.cluster.shapes.size());
  st.binary_vars = t * s;
  st.lp_vars = t * m;
  st.assignment_rows = t;
  st.capacity_rows = t == 0 ? 0 : m * r;
  if (problem.options.anti_affinity_in_lp)
    st.group_rows = t == 0 ? 0 : static_cast<long long>(problem.groups.size()) * m;
  return st;
}

}  // namespace cvxsched
