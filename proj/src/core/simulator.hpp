#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/lane_model.hpp"
#include "core/partitioner.hpp"

namespace lanebal {

enum class Mode { kModelParallel, kDataParallel };

std::string_view to_string(Mode mode);
// Accepts "model", "model-parallel", "data", "data-parallel".
Mode parse_mode(std::string_view text);

struct TrainConfig {
  int64_t samples_per_epoch = 60000;
  int64_t batch_size = 100;
  // Batch size at which lane_work is expressed; compute scales by
  // batch_size / reference_batch.
  int64_t reference_batch = 100;
  double per_lane_overhead = 0.0;

  bool operator==(const TrainConfig&) const = default;
};

void validate(const TrainConfig& cfg);

// The final partial batch is charged as a full step.
int64_t steps_per_epoch(const TrainConfig& cfg);

struct EpochReport {
  Mode mode = Mode::kModelParallel;
  size_t device_count = 0;
  int64_t batch_size = 0;
  int64_t steps = 0;
  double step_time = 0.0;
  double epoch_time = 0.0;
  double compute_time = 0.0;
  double sync_time = 0.0;
  double network_time = 0.0;
};

// Step time = makespan * B / B_ref + sync + network, where sync is charged
// when more than one device holds lanes and network once per extra host.
EpochReport sim_model_parallel(const std::vector<LaneSpec>& lanes,
                               const ClusterSpec& cluster,
                               const Assignment& assignment,
                               const TrainConfig& cfg);

// Replicated model; the slowest replica gates every step.
EpochReport sim_data_parallel(double total_work, const ClusterSpec& cluster,
                              const TrainConfig& cfg, double allreduce_base,
                              double allreduce_per_device);

// Same, taking the allreduce constants from the cluster.
EpochReport sim_data_parallel(double total_work, const ClusterSpec& cluster,
                              const TrainConfig& cfg);

// Sum of lane_work + per_lane_overhead: what one data-parallel replica runs.
double replica_work(const std::vector<LaneSpec>& lanes, double per_lane_overhead);

}  // namespace lanebal
