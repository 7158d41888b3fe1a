#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/lane_model.hpp"
#include "core/simulator.hpp"

namespace lanebal {

struct IntRange {
  int min = 1;
  int max = 1;
};

struct Scenario {
  std::string name;
  std::vector<LaneSpec> lanes;
  ClusterSpec cluster;
  TrainConfig train;
  uint64_t seed = 0;
  // Batch sizes a plain `simulate` run reports; defaults to {train.batch_size}.
  std::vector<int64_t> batches;

  bool operator==(const Scenario&) const = default;
};

void validate(const Scenario& scenario);

// Widths and depths drawn independently and uniformly from the seeded stream.
// Ids are lane-0 .. lane-(n-1).
std::vector<LaneSpec> gen_uniform_lanes(size_t n, IntRange widths,
                                        IntRange depths, uint64_t seed);

// Preset names, catalog order.
const std::vector<std::string>& preset_names();

// Throws ErrorKind::kInvalidInput listing the catalog on unknown names.
Scenario preset_scenario(const std::string& name);

// Four K80s on one host.
ClusterSpec homogeneous_k80_cluster();
// One K80, M40, P100 and V100, each on its own host.
ClusterSpec heterogeneous_cluster();

// Lane counts and generator ranges used by the lanes-N presets.
inline constexpr IntRange kPresetWidths{1, 5};
inline constexpr IntRange kPresetDepths{1, 5};
uint64_t lanes_preset_seed(size_t lane_count);

// A lanes-N style scenario regenerated from an arbitrary workload seed.
Scenario uniform_lane_scenario(size_t lane_count, uint64_t seed,
                               const ClusterSpec& cluster);

}  // namespace lanebal
