#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lanebal {

// A lane is the unit of placement. Width is filters per convolution, depth is
// the number of convolutional steps.
struct LaneSpec {
  std::string id;
  int width = 1;
  int depth = 1;

  bool operator==(const LaneSpec&) const = default;
};

// time_factor is relative slowness: 1.0 is the fastest device, 2.0 takes twice
// as long for the same work.
struct DeviceSpec {
  std::string id;
  double time_factor = 1.0;
  std::string host;

  bool operator==(const DeviceSpec&) const = default;
};

struct ClusterSpec {
  std::vector<DeviceSpec> devices;
  // Per training step, charged once more than one device holds work.
  double intra_host_sync = 0.0;
  // Per training step, per additional host spanned by the used devices.
  double inter_host_penalty = 0.0;
  // Data-parallel gradient exchange: base + per_device * (G - 1).
  double allreduce_base = 0.0;
  double allreduce_per_device = 0.0;

  bool operator==(const ClusterSpec&) const = default;

  size_t size() const { return devices.size(); }
  double fastest_factor() const;
  double slowest_factor() const;
  // First `count` devices, communication constants preserved.
  ClusterSpec prefix(size_t count) const;
};

struct ProbeResult {
  std::string device_id;
  double runtime = 0.0;
};

using FactorMap = std::map<std::string, double>;

void validate(const LaneSpec& lane);
void validate(const std::vector<LaneSpec>& lanes);
void validate(const DeviceSpec& device);
void validate(const ClusterSpec& cluster);

// Device-independent cost of a lane: width^2 * depth.
double lane_work(const LaneSpec& lane);

// (lane_work + per_lane_overhead) * time_factor.
double effective_time(const LaneSpec& lane, const DeviceSpec& device,
                      double per_lane_overhead = 0.0);

// Normalizes probe runtimes by the smallest one. Output preserves probe ids.
FactorMap calibrate(const std::vector<ProbeResult>& probes);

// Converts published speedups (larger is faster, relative to reference_id)
// into time factors: max_speedup / speedup.
FactorMap factors_from_speedups(const FactorMap& speedups,
                                const std::string& reference_id);

// Stand-in for running a tiny lane on real hardware. Each probe runtime is
// the mean of `repeats` executions of probe_work * time_factor, each scaled by
// exp(N(0, noise_sigma)).
struct ProbeSimulation {
  double probe_work = 1.0;
  double noise_sigma = 0.0;
  int repeats = 10;
};

std::vector<ProbeResult> synthetic_probes(const std::vector<DeviceSpec>& devices,
                                          const ProbeSimulation& sim,
                                          uint64_t seed);

}  // namespace lanebal
