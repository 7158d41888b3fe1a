#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/simulator.hpp"
#include "core/workload.hpp"

namespace lanebal {

struct SimRow {
  std::string scenario;
  EpochReport report;
  // epoch_time on the first device alone, same mode and batch, over this
  // row's epoch_time.
  double speedup = 1.0;
};

// Epoch report for the first `device_count` devices of the scenario cluster
// at the scenario's train.batch_size. Model-parallel runs place lanes with
// greedy_partition unless an assignment is given.
EpochReport simulate_scenario(const Scenario& scenario, Mode mode,
                              size_t device_count,
                              const Assignment* assignment = nullptr);

// One row per device count; speedups relative to one device, same batch.
std::vector<SimRow> speedup_curve(const Scenario& scenario,
                                  const std::vector<size_t>& device_counts,
                                  Mode mode);

// Cross product of modes x device counts x batches, sorted by
// (mode, devices, batch). A one-device row is always present per mode.
std::vector<SimRow> sweep(const Scenario& scenario,
                          std::vector<size_t> device_counts,
                          std::vector<int64_t> batches,
                          std::vector<Mode> modes);

struct SpeedupObservation {
  size_t device_count = 1;
  double speedup = 1.0;
};

struct FittedConstant {
  std::string name;
  double value = 0.0;
};

struct FitResult {
  std::vector<FittedConstant> constants;
  // simulated - observed speedup, one per observation.
  std::vector<double> residuals;
  double rms = 0.0;
  // Scenario cluster with the fitted constants written in.
  ClusterSpec cluster;
};

// Least-squares fit of the mode's overhead constants to observed speedups by
// a grid search followed by successive zoomed grids. Free constants, in
// priority order, are intra_host_sync then inter_host_penalty (the latter only
// when the observed device prefixes span several hosts) for model-parallel,
// allreduce_per_device then allreduce_base for data-parallel. At most one
// constant per distinct multi-device observation is freed; the rest keep the
// scenario's values. Never fails on a poor fit: inspect rms and residuals.
FitResult fit_overheads(const std::vector<SpeedupObservation>& observations,
                        const Scenario& scenario, Mode mode);

}  // namespace lanebal
