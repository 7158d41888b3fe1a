#include "core/workload.hpp"

#include "core/error.hpp"
#include "core/rng.hpp"

namespace lanebal {
namespace {

// Overhead constants for the fig3/batch-sweep presets, obtained with
// fit_overheads: model-parallel matched to a speedup of 7.18 on 8 devices,
// data-parallel to half that parallel efficiency (3.59 on 8 devices).
constexpr double kFig3IntraHostSync = 3.654596100278553;
constexpr double kFig3AllreducePerDevice = 5.615598885793872;

constexpr double kHomogeneousSync = 1.0;
constexpr double kHeterogeneousSync = 1.0;
constexpr double kInterHostPenalty = 5.0;

ClusterSpec k80_single_host(size_t count) {
  ClusterSpec c;
  for (size_t i = 0; i < count; ++i) {
    c.devices.push_back({"k80-" + std::to_string(i), 1.0, "node-0"});
  }
  return c;
}

Scenario fig3_scenario(std::string name) {
  Scenario s;
  s.name = std::move(name);
  for (int i = 0; i < 8; ++i) {
    s.lanes.push_back({"lane-" + std::to_string(i), 4, 2});
  }
  s.cluster = k80_single_host(8);
  s.cluster.intra_host_sync = kFig3IntraHostSync;
  s.cluster.allreduce_per_device = kFig3AllreducePerDevice;
  s.seed = 0;
  return s;
}

}  // namespace

void validate(const Scenario& scenario) {
  if (scenario.name.empty()) throw_invariant("scenario name must not be empty");
  if (scenario.lanes.empty()) throw_invariant("scenario has no lanes");
  validate(scenario.lanes);
  validate(scenario.cluster);
  validate(scenario.train);
  for (int64_t b : scenario.batches) {
    TrainConfig cfg = scenario.train;
    cfg.batch_size = b;
    validate(cfg);
  }
}

std::vector<LaneSpec> gen_uniform_lanes(size_t n, IntRange widths,
                                        IntRange depths, uint64_t seed) {
  if (n < 1) throw_invariant("lane count must be >= 1");
  if (widths.min < 1 || widths.min > widths.max || depths.min < 1 ||
      depths.min > depths.max) {
    throw_invariant("invalid width/depth range");
  }
  Rng rng(seed);
  std::vector<LaneSpec> lanes;
  lanes.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const int w = rng.uniform_int(widths.min, widths.max);
    const int d = rng.uniform_int(depths.min, depths.max);
    lanes.push_back({"lane-" + std::to_string(i), w, d});
  }
  return lanes;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "homog-4xK80", "hetero-4gpu", "lanes-6",   "lanes-9",
      "lanes-12",    "lanes-24",    "fig3-8lane", "batch-sweep",
  };
  return names;
}

ClusterSpec homogeneous_k80_cluster() {
  ClusterSpec c = k80_single_host(4);
  c.intra_host_sync = kHomogeneousSync;
  return c;
}

ClusterSpec heterogeneous_cluster() {
  // Published speedups relative to the K80.
  const FactorMap factors = factors_from_speedups(
      {{"k80", 1.0}, {"m40", 3.1}, {"p100", 4.2}, {"v100", 6.0}}, "k80");
  ClusterSpec c;
  int host = 0;
  for (const char* id : {"k80", "m40", "p100", "v100"}) {
    c.devices.push_back({id, factors.at(id), "node-" + std::to_string(host++)});
  }
  c.intra_host_sync = kHeterogeneousSync;
  c.inter_host_penalty = kInterHostPenalty;
  return c;
}

uint64_t lanes_preset_seed(size_t lane_count) { return 1000 + lane_count; }

Scenario uniform_lane_scenario(size_t lane_count, uint64_t seed,
                               const ClusterSpec& cluster) {
  Scenario s;
  s.name = "lanes-" + std::to_string(lane_count);
  s.lanes = gen_uniform_lanes(lane_count, kPresetWidths, kPresetDepths, seed);
  s.cluster = cluster;
  s.seed = seed;
  s.batches = {s.train.batch_size};
  return s;
}

Scenario preset_scenario(const std::string& name) {
  Scenario s;
  if (name == "homog-4xK80" || name == "hetero-4gpu") {
    s = uniform_lane_scenario(24, lanes_preset_seed(24),
                              name == "homog-4xK80" ? homogeneous_k80_cluster()
                                                    : heterogeneous_cluster());
    s.name = name;
  } else if (name == "lanes-6" || name == "lanes-9" || name == "lanes-12" ||
             name == "lanes-24") {
    const size_t n = std::stoul(name.substr(6));
    s = uniform_lane_scenario(n, lanes_preset_seed(n), homogeneous_k80_cluster());
  } else if (name == "fig3-8lane") {
    s = fig3_scenario(name);
    s.batches = {s.train.batch_size};
  } else if (name == "batch-sweep") {
    s = fig3_scenario(name);
    s.batches = {100, 150, 300, 600};
  } else {
    std::string catalog;
    for (const auto& n : preset_names()) catalog += (catalog.empty() ? "" : ", ") + n;
    throw_input("unknown scenario '" + name + "'; catalog: " + catalog);
  }
  return s;
}

}  // namespace lanebal
