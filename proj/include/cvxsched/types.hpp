#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cvxsched {

// Resource quantities are plain Eigen vectors; the problem fixes the
// dimension and the meaning of each component.
using Vec = Eigen::VectorXd;

// Absolute slack used by every capacity comparison, so LP round-off never
// flips a feasibility decision.
inline constexpr double kEpsCap = 1e-9;

enum class ResourceUnit { Millicore, Megabyte, GpuCount, SyntheticUnit };

struct ResourceKind {
  std::string name;
  ResourceUnit unit = ResourceUnit::SyntheticUnit;
};

struct Task {
  std::string id;
  Vec demand;                                // length = resource dimension
  double priority = 1.0;                     // p_j > 0
  std::string group;                         // empty = no anti-affinity group
  std::vector<std::string> required_labels;  // sorted, unique
  double arrival_s = 0.0;
  double duration_s = 1.0;
};

struct JobGroup {
  std::string id;
  int limit = 1;  // max co-located replicas per server
};

struct MachineShape {
  std::string id;
  Vec per_server_capacity;
  std::vector<std::string> labels;  // sorted, unique
  bool is_gpu = false;
};

struct Server {
  std::string id;
  int shape = -1;  // index into Cluster::shapes
  Vec remaining;
  std::map<std::string, int> group_counts;  // group id -> tasks on this server
};

struct Cluster {
  std::vector<ResourceKind> resources;
  std::vector<MachineShape> shapes;
  std::vector<Server> servers;

  int resource_dim() const { return static_cast<int>(resources.size()); }

  // Index of the gpu-count dimension, or -1 when the problem has none.
  int gpu_dim() const {
    for (int k = 0; k < resource_dim(); ++k)
      if (resources[k].unit == ResourceUnit::GpuCount) return k;
    return -1;
  }

  int shape_index(const std::string& shape_id) const {
    for (int m = 0; m < static_cast<int>(shapes.size()); ++m)
      if (shapes[m].id == shape_id) return m;
    return -1;
  }
};

enum class PricingMode { Shape, Global };

// Reserved shape id for the single pooled pseudo-shape in global mode.
inline constexpr const char* kGlobalPoolId = "*";

struct PricingOptions {
  PricingMode mode = PricingMode::Shape;
  bool anti_affinity_in_lp = false;
  // GPU knobs; unset values resolve against the task mix (see
  // resolve_gpu_knobs in pricing.hpp).
  std::optional<double> gpu_penalty;    // rho >= 0
  std::optional<double> gpu_surcharge;  // sigma >= 0
  std::optional<double> gpu_boost;      // beta >= 0
  double lp_tolerance = 1e-6;
  std::uint64_t seed = 0;
};

struct PlacementProblem {
  std::vector<Task> tasks;
  Cluster cluster;
  std::map<std::string, JobGroup> groups;
  PricingOptions options;
};

// True when `remaining` covers `demand` in every dimension, up to kEpsCap.
inline bool covers(const Vec& remaining, const Vec& demand) {
  return (remaining.array() + kEpsCap >= demand.array()).all();
}

// Subset test on sorted unique label vectors.
inline bool labels_satisfied(const std::vector<std::string>& required,
                             const std::vector<std::string>& offered) {
  return std::includes(offered.begin(), offered.end(), required.begin(),
                       required.end());
}

// A task is eligible for a shape when the shape offers the required labels
// and, if the task demands GPUs, the shape actually has them.
inline bool shape_eligible(const Task& task, const MachineShape& shape,
                           int gpu_dim) {
  if (!labels_satisfied(task.required_labels, shape.labels)) return false;
  if (gpu_dim >= 0 && task.demand[gpu_dim] > 0.0 && !shape.is_gpu)
    return false;
  return true;
}

}  // namespace cvxsched
