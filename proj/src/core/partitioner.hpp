#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/lane_model.hpp"

namespace lanebal {

struct Placement {
  std::string lane_id;
  std::string device_id;

  bool operator==(const Placement&) const = default;
};

// Total map from lanes to devices, stored in lane input order.
struct Assignment {
  std::string strategy;
  std::optional<uint64_t> seed;
  std::vector<Placement> placements;

  bool operator==(const Assignment&) const = default;
};

struct LoadReport {
  // Cluster device order.
  std::vector<std::pair<std::string, double>> per_device_load;
  double makespan = 0.0;
  double lower_bound = 0.0;
  double imbalance = 1.0;
};

enum class GreedyRule {
  // Device minimizing load + effective_time(lane, device).
  kIncrement,
  // Device with the smallest current load, as in the literal listing.
  kEmptiest,
};

inline constexpr size_t kDefaultExactLimit = 16;

Assignment greedy_partition(const std::vector<LaneSpec>& lanes,
                            const ClusterSpec& cluster,
                            GreedyRule rule = GreedyRule::kIncrement,
                            double per_lane_overhead = 0.0);

Assignment random_partition(const std::vector<LaneSpec>& lanes,
                            const ClusterSpec& cluster, uint64_t seed);

Assignment round_robin_partition(const std::vector<LaneSpec>& lanes,
                                 const ClusterSpec& cluster);

// Minimum-makespan assignment by branch-and-bound. Among optima the
// lexicographically smallest device-index vector (lanes in input order) wins.
// Throws ErrorKind::kSolverLimit when lanes.size() > limit.
Assignment exact_partition(const std::vector<LaneSpec>& lanes,
                           const ClusterSpec& cluster,
                           size_t limit = kDefaultExactLimit,
                           double per_lane_overhead = 0.0);

// Device index per lane (lane input order). Throws on dangling references,
// missing or duplicated lanes.
std::vector<size_t> resolve(const Assignment& assignment,
                            const std::vector<LaneSpec>& lanes,
                            const ClusterSpec& cluster);

// Lower bound on any assignment's makespan:
//   max(W / sum_d(1 / f_d), max_lane_work * f_min)
// where W is the total lane work including per-lane overhead. The first term
// is the fluid bound (all devices finishing together), the second says the
// largest lane cannot run faster than on the fastest device.
double makespan_lower_bound(const std::vector<LaneSpec>& lanes,
                            const ClusterSpec& cluster,
                            double per_lane_overhead = 0.0);

LoadReport load_report(const Assignment& assignment,
                       const std::vector<LaneSpec>& lanes,
                       const ClusterSpec& cluster,
                       double per_lane_overhead = 0.0);

// Per-device loads for a resolved index vector; used on hot campaign paths.
double makespan_of(const std::vector<size_t>& device_of_lane,
                   const std::vector<double>& lane_works,
                   const ClusterSpec& cluster);

}  // namespace lanebal
