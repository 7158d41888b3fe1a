#include "core/lane_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace lanebal {

double ClusterSpec::fastest_factor() const {
  double best = devices.at(0).time_factor;
  for (const auto& d : devices) best = std::min(best, d.time_factor);
  return best;
}

double ClusterSpec::slowest_factor() const {
  double worst = devices.at(0).time_factor;
  for (const auto& d : devices) worst = std::max(worst, d.time_factor);
  return worst;
}

ClusterSpec ClusterSpec::prefix(size_t count) const {
  if (count == 0 || count > devices.size()) {
    throw_input("requested " + std::to_string(count) +
                " devices but the cluster has " +
                std::to_string(devices.size()));
  }
  ClusterSpec out = *this;
  out.devices.resize(count);
  return out;
}

void validate(const LaneSpec& lane) {
  if (lane.id.empty()) throw_invariant("lane id must not be empty");
  if (lane.width < 1 || lane.depth < 1) {
    throw_invariant("lane " + lane.id + ": width and depth must be >= 1");
  }
}

void validate(const std::vector<LaneSpec>& lanes) {
  std::set<std::string> seen;
  for (const auto& lane : lanes) {
    validate(lane);
    if (!seen.insert(lane.id).second) {
      throw_invariant("duplicate lane id " + lane.id);
    }
  }
}

void validate(const DeviceSpec& device) {
  if (device.id.empty()) throw_invariant("device id must not be empty");
  if (!(device.time_factor > 0.0) || !std::isfinite(device.time_factor)) {
    throw_invariant("device " + device.id + ": time_factor must be positive");
  }
}

void validate(const ClusterSpec& cluster) {
  if (cluster.devices.empty()) throw_invariant("cluster has no devices");
  std::set<std::string> seen;
  for (const auto& d : cluster.devices) {
    validate(d);
    if (!seen.insert(d.id).second) {
      throw_invariant("duplicate device id " + d.id);
    }
  }
  for (double c : {cluster.intra_host_sync, cluster.inter_host_penalty,
                   cluster.allreduce_base, cluster.allreduce_per_device}) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw_invariant("communication constants must be non-negative");
    }
  }
}

double lane_work(const LaneSpec& lane) {
  const double w = lane.width;
  return w * w * static_cast<double>(lane.depth);
}

double effective_time(const LaneSpec& lane, const DeviceSpec& device,
                      double per_lane_overhead) {
  return (lane_work(lane) + per_lane_overhead) * device.time_factor;
}

FactorMap calibrate(const std::vector<ProbeResult>& probes) {
  if (probes.empty()) throw_invariant("no probes");
  FactorMap out;
  double fastest = 0.0;
  for (const auto& p : probes) {
    if (!(p.runtime > 0.0) || !std::isfinite(p.runtime)) {
      throw_invariant("invalid runtime for device " + p.device_id);
    }
    if (out.count(p.device_id) != 0) {
      throw_invariant("duplicate probe for device " + p.device_id);
    }
    out[p.device_id] = p.runtime;
    fastest = fastest == 0.0 ? p.runtime : std::min(fastest, p.runtime);
  }
  for (auto& [id, runtime] : out) runtime /= fastest;
  return out;
}

FactorMap factors_from_speedups(const FactorMap& speedups,
                                const std::string& reference_id) {
  auto ref = speedups.find(reference_id);
  if (ref == speedups.end()) {
    throw_invariant("reference device " + reference_id + " missing");
  }
  if (ref->second != 1.0) {
    throw_invariant("reference device " + reference_id +
                    " must have speedup 1.0");
  }
  double max_speedup = 0.0;
  for (const auto& [id, s] : speedups) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw_invariant("non-positive speedup for device " + id);
    }
    max_speedup = std::max(max_speedup, s);
  }
  FactorMap out;
  for (const auto& [id, s] : speedups) out[id] = max_speedup / s;
  return out;
}

std::vector<ProbeResult> synthetic_probes(const std::vector<DeviceSpec>& devices,
                                          const ProbeSimulation& sim,
                                          uint64_t seed) {
  if (!(sim.probe_work > 0.0) || !(sim.noise_sigma >= 0.0) || sim.repeats < 1) {
    throw_invariant("probe simulation needs positive work and repeats");
  }
  Rng rng(seed);
  std::vector<ProbeResult> out;
  out.reserve(devices.size());
  for (const auto& d : devices) {
    validate(d);
    double total = 0.0;
    for (int r = 0; r < sim.repeats; ++r) {
      total += sim.probe_work * d.time_factor * std::exp(sim.noise_sigma * rng.normal());
    }
    out.push_back({d.id, total / sim.repeats});
  }
  return out;
}

}  // namespace lanebal
