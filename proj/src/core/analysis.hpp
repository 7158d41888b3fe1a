#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/lane_model.hpp"
#include "core/partitioner.hpp"
#include "core/workload.hpp"

namespace lanebal {

// Sample Pearson correlation, clamped to [-1, 1].
double pearson(std::span<const double> xs, std::span<const double> ys);

// Synthetic measured runtimes effective_time * exp(N(0, noise_sigma)) from the
// seeded stream, correlated against the noiseless prediction. Requires at
// least 10 lanes covering at least 3 distinct lane works.
double validate_cost_model(const std::vector<LaneSpec>& lanes,
                           const DeviceSpec& device, double noise_sigma,
                           uint64_t seed);

struct StrategyRun {
  std::string strategy;
  std::optional<uint64_t> seed;
  double makespan = 0.0;
  double step_time = 0.0;
  // makespan / greedy makespan.
  double ratio = 1.0;
};

struct ComparisonReport {
  std::string scenario;
  size_t random_seeds = 0;
  double greedy_makespan = 0.0;
  double random_mean = 0.0;
  // Sample standard deviation; 0 when only one seed ran (see single_seed).
  double random_stddev = 0.0;
  double random_min = 0.0;
  double random_max = 0.0;
  bool single_seed = false;
  double round_robin_makespan = 0.0;
  std::optional<double> exact_makespan;
  double ratio_random_over_greedy = 1.0;
  // Wall-clock seconds spent in greedy_partition. Informational only.
  double plan_time = 0.0;
  std::vector<StrategyRun> runs;
};

// Greedy, round-robin, K seeded random partitions and, when the lane count is
// within exact_limit, the exact optimum, all evaluated on the scenario cluster.
// Random seeds are mix_seed(scenario.seed, k) for k in [0, K).
ComparisonReport compare_strategies(const Scenario& scenario,
                                    size_t random_seeds,
                                    double per_lane_overhead = 0.0,
                                    size_t exact_limit = kDefaultExactLimit);

// mean(random makespan) / greedy makespan for one lane set, K random draws.
double random_over_greedy(const std::vector<LaneSpec>& lanes,
                          const ClusterSpec& cluster, size_t random_seeds,
                          uint64_t seed);

struct RatioCampaign {
  std::vector<double> ratios;  // one per workload seed
  double mean = 0.0;
  double min = 0.0;
};

// random_over_greedy over lanes-N style workloads regenerated per seed.
RatioCampaign ratio_campaign(size_t lane_count, const ClusterSpec& cluster,
                             const std::vector<uint64_t>& workload_seeds,
                             size_t random_seeds);

}  // namespace lanebal
