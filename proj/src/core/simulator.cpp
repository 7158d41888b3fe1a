#include "core/simulator.hpp"

#include <cmath>
#include <set>

#include "core/error.hpp"

namespace lanebal {

std::string_view to_string(Mode mode) {
  return mode == Mode::kModelParallel ? "model-parallel" : "data-parallel";
}

Mode parse_mode(std::string_view text) {
  if (text == "model" || text == "model-parallel") return Mode::kModelParallel;
  if (text == "data" || text == "data-parallel") return Mode::kDataParallel;
  throw_input("unknown mode '" + std::string(text) +
              "' (expected model-parallel or data-parallel)");
}

void validate(const TrainConfig& cfg) {
  if (cfg.samples_per_epoch < 1 || cfg.batch_size < 1 || cfg.reference_batch < 1) {
    throw_invariant("samples_per_epoch, batch_size and reference_batch must be >= 1");
  }
  if (cfg.batch_size > cfg.samples_per_epoch) {
    throw_invariant("batch_size exceeds samples_per_epoch");
  }
  if (!(cfg.per_lane_overhead >= 0.0) || !std::isfinite(cfg.per_lane_overhead)) {
    throw_invariant("per_lane_overhead must be non-negative");
  }
}

int64_t steps_per_epoch(const TrainConfig& cfg) {
  return (cfg.samples_per_epoch + cfg.batch_size - 1) / cfg.batch_size;
}

namespace {

double batch_scale(const TrainConfig& cfg) {
  return static_cast<double>(cfg.batch_size) /
         static_cast<double>(cfg.reference_batch);
}

void finish(EpochReport& r, const TrainConfig& cfg) {
  r.batch_size = cfg.batch_size;
  r.steps = steps_per_epoch(cfg);
  r.step_time = r.compute_time + r.sync_time + r.network_time;
  r.epoch_time = static_cast<double>(r.steps) * r.step_time;
}

}  // namespace

EpochReport sim_model_parallel(const std::vector<LaneSpec>& lanes,
                               const ClusterSpec& cluster,
                               const Assignment& assignment,
                               const TrainConfig& cfg) {
  validate(cfg);
  if (lanes.empty()) throw_invariant("lane list is empty");
  const LoadReport loads =
      load_report(assignment, lanes, cluster, cfg.per_lane_overhead);

  const std::vector<size_t> device_of_lane = resolve(assignment, lanes, cluster);
  std::set<size_t> used;
  std::set<std::string> hosts;
  for (size_t d : device_of_lane) {
    used.insert(d);
    hosts.insert(cluster.devices[d].host);
  }

  EpochReport r;
  r.mode = Mode::kModelParallel;
  r.device_count = cluster.size();
  r.compute_time = loads.makespan * batch_scale(cfg);
  r.sync_time = used.size() > 1 ? cluster.intra_host_sync : 0.0;
  r.network_time =
      cluster.inter_host_penalty * static_cast<double>(hosts.size() - 1);
  finish(r, cfg);
  return r;
}

EpochReport sim_data_parallel(double total_work, const ClusterSpec& cluster,
                              const TrainConfig& cfg, double allreduce_base,
                              double allreduce_per_device) {
  validate(cluster);
  validate(cfg);
  if (!(total_work > 0.0) || !std::isfinite(total_work)) {
    throw_invariant("total_work must be positive");
  }
  if (!(allreduce_base >= 0.0) || !(allreduce_per_device >= 0.0)) {
    throw_invariant("allreduce constants must be non-negative");
  }
  const auto replicas = static_cast<double>(cluster.size());
  EpochReport r;
  r.mode = Mode::kDataParallel;
  r.device_count = cluster.size();
  r.compute_time =
      total_work * batch_scale(cfg) / replicas * cluster.slowest_factor();
  r.sync_time = cluster.size() > 1
                    ? allreduce_base + allreduce_per_device * (replicas - 1.0)
                    : 0.0;
  r.network_time = 0.0;
  finish(r, cfg);
  return r;
}

EpochReport sim_data_parallel(double total_work, const ClusterSpec& cluster,
                              const TrainConfig& cfg) {
  return sim_data_parallel(total_work, cluster, cfg, cluster.allreduce_base,
                           cluster.allreduce_per_device);
}

double replica_work(const std::vector<LaneSpec>& lanes, double per_lane_overhead) {
  double total = 0.0;
  for (const auto& lane : lanes) total += lane_work(lane) + per_lane_overhead;
  return total;
}

}  // namespace lanebal
