#include "lanebal/lanebal.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <utility>

#include <json.hpp>

#include "core/analysis.hpp"
#include "core/error.hpp"
#include "core/partitioner.hpp"
#include "core/serialize.hpp"
#include "core/sweep.hpp"
#include "core/workload.hpp"

struct lb_scenario {
  lanebal::Scenario value;
};

struct lb_assignment {
  lanebal::Assignment value;
};

namespace {

thread_local std::string g_last_error;

lb_status fail(lb_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
lb_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return LB_OK;
  } catch (const lanebal::Error& e) {
    return fail(static_cast<lb_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LB_ERR_INTERNAL, e.what());
  }
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_out(char** out, const std::string& s) {
  if (out != nullptr) *out = copy_out(s);
}

void require(const void* p, const char* what) {
  if (p == nullptr) lanebal::throw_input(std::string(what) + " must not be null");
}

lanebal::Mode to_mode(lb_mode mode) {
  switch (mode) {
    case LB_MODE_MODEL_PARALLEL: return lanebal::Mode::kModelParallel;
    case LB_MODE_DATA_PARALLEL: return lanebal::Mode::kDataParallel;
  }
  lanebal::throw_input("unknown mode");
}

std::string render(const std::vector<lanebal::SimRow>& rows, lb_format format) {
  switch (format) {
    case LB_FORMAT_CSV: return lanebal::io::sim_rows_csv(rows);
    case LB_FORMAT_JSON: return lanebal::io::sim_rows_json(rows);
  }
  lanebal::throw_input("unknown output format");
}

}  // namespace

extern "C" {

const char* lb_version(void) { return LANEBAL_VERSION; }

const char* lb_last_error(void) { return g_last_error.c_str(); }

void lb_string_free(char* s) { std::free(s); }

lb_status lb_calibrate(const char* probes_json, char** out_factors_json) {
  return guarded([&] {
    require(probes_json, "probes_json");
    require(out_factors_json, "out_factors_json");
    const auto probes = lanebal::io::parse_probes(probes_json);
    const auto factors = lanebal::calibrate(probes);
    *out_factors_json = copy_out(lanebal::io::factors_to_json(probes, factors));
  });
}

lb_status lb_catalog(char** out_names_json) {
  return guarded([&] {
    require(out_names_json, "out_names_json");
    *out_names_json = copy_out(nlohmann::json(lanebal::preset_names()).dump() + "\n");
  });
}

lb_status lb_scenario_preset(const char* name, lb_scenario** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new lb_scenario{lanebal::preset_scenario(name)};
  });
}

lb_status lb_scenario_parse(const char* scenario_json, lb_scenario** out) {
  return guarded([&] {
    require(scenario_json, "scenario_json");
    require(out, "out");
    *out = new lb_scenario{lanebal::io::parse_scenario(scenario_json)};
  });
}

void lb_scenario_free(lb_scenario* scenario) { delete scenario; }

lb_status lb_scenario_dump(const lb_scenario* scenario, char** out_json) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out_json, "out_json");
    *out_json = copy_out(lanebal::io::scenario_to_json(scenario->value));
  });
}

size_t lb_scenario_lane_count(const lb_scenario* scenario) {
  return scenario == nullptr ? 0 : scenario->value.lanes.size();
}

size_t lb_scenario_device_count(const lb_scenario* scenario) {
  return scenario == nullptr ? 0 : scenario->value.cluster.size();
}

lb_status lb_scenario_set_lanes(lb_scenario* scenario, const char* lanes_json) {
  return guarded([&] {
    require(scenario, "scenario");
    require(lanes_json, "lanes_json");
    lanebal::Scenario next = scenario->value;
    next.lanes = lanebal::io::parse_lanes(lanes_json);
    lanebal::validate(next);
    scenario->value = std::move(next);
  });
}

lb_status lb_scenario_set_devices(lb_scenario* scenario, const char* devices_json) {
  return guarded([&] {
    require(scenario, "scenario");
    require(devices_json, "devices_json");
    lanebal::Scenario next = scenario->value;
    next.cluster.devices = lanebal::io::parse_devices(devices_json);
    lanebal::validate(next);
    scenario->value = std::move(next);
  });
}

lb_status lb_scenario_set_cluster_from(lb_scenario* scenario, const lb_scenario* donor) {
  return guarded([&] {
    require(scenario, "scenario");
    require(donor, "donor");
    scenario->value.cluster = donor->value.cluster;
  });
}

lb_status lb_scenario_set_per_lane_overhead(lb_scenario* scenario, double overhead) {
  return guarded([&] {
    require(scenario, "scenario");
    lanebal::Scenario next = scenario->value;
    next.train.per_lane_overhead = overhead;
    lanebal::validate(next);
    scenario->value = std::move(next);
  });
}

lb_status lb_plan(const lb_scenario* scenario, const lb_plan_options* options,
                  lb_assignment** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(options, "options");
    require(out, "out");
    const auto& s = scenario->value;
    lanebal::Assignment a;
    switch (options->strategy) {
      case LB_STRATEGY_GREEDY:
        a = lanebal::greedy_partition(s.lanes, s.cluster,
                                      options->rule == LB_GREEDY_EMPTIEST
                                          ? lanebal::GreedyRule::kEmptiest
                                          : lanebal::GreedyRule::kIncrement);
        break;
      case LB_STRATEGY_RANDOM:
        a = lanebal::random_partition(s.lanes, s.cluster, options->seed);
        break;
      case LB_STRATEGY_ROUND_ROBIN:
        a = lanebal::round_robin_partition(s.lanes, s.cluster);
        break;
      case LB_STRATEGY_EXACT:
        a = lanebal::exact_partition(
            s.lanes, s.cluster,
            options->exact_limit == 0 ? lanebal::kDefaultExactLimit : options->exact_limit);
        break;
      default:
        lanebal::throw_input("unknown strategy");
    }
    *out = new lb_assignment{std::move(a)};
  });
}

lb_status lb_assignment_parse(const char* assignment_json, lb_assignment** out) {
  return guarded([&] {
    require(assignment_json, "assignment_json");
    require(out, "out");
    *out = new lb_assignment{lanebal::io::parse_assignment(assignment_json)};
  });
}

void lb_assignment_free(lb_assignment* assignment) { delete assignment; }

lb_status lb_assignment_dump(const lb_assignment* assignment, const lb_scenario* scenario,
                             char** out_json) {
  return guarded([&] {
    require(assignment, "assignment");
    require(scenario, "scenario");
    require(out_json, "out_json");
    const auto& s = scenario->value;
    const auto report = lanebal::load_report(assignment->value, s.lanes, s.cluster,
                                             s.train.per_lane_overhead);
    *out_json = copy_out(lanebal::io::assignment_to_json(assignment->value, report));
  });
}

lb_status lb_assignment_makespan(const lb_assignment* assignment, const lb_scenario* scenario,
                                 double* out_makespan) {
  return guarded([&] {
    require(assignment, "assignment");
    require(scenario, "scenario");
    require(out_makespan, "out_makespan");
    const auto& s = scenario->value;
    *out_makespan = lanebal::load_report(assignment->value, s.lanes, s.cluster,
                                         s.train.per_lane_overhead)
                        .makespan;
  });
}

lb_status lb_simulate(const lb_scenario* scenario, lb_mode mode, size_t device_count,
                      const lb_assignment* assignment, lb_format format, char** out_table) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out_table, "out_table");
    const lanebal::Mode m = to_mode(mode);
    if (assignment != nullptr && m != lanebal::Mode::kModelParallel) {
      lanebal::throw_input("an assignment only applies to model-parallel simulation");
    }
    const auto& base = scenario->value;
    size_t g = device_count == 0 ? base.cluster.size() : device_count;
    if (assignment != nullptr) g = base.cluster.size();
    std::vector<lanebal::SimRow> rows;
    for (int64_t batch : base.batches) {
      lanebal::Scenario s = base;
      s.train.batch_size = batch;
      const double baseline = lanebal::simulate_scenario(s, m, 1).epoch_time;
      lanebal::SimRow row{s.name,
                          lanebal::simulate_scenario(
                              s, m, g, assignment ? &assignment->value : nullptr),
                          1.0};
      row.speedup = baseline / row.report.epoch_time;
      rows.push_back(std::move(row));
    }
    *out_table = copy_out(render(rows, format));
  });
}

lb_status lb_sweep(const lb_scenario* scenario, const size_t* device_counts,
                   size_t n_device_counts, const int64_t* batches, size_t n_batches,
                   const lb_mode* modes, size_t n_modes, lb_format format,
                   char** out_table) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out_table, "out_table");
    if (n_device_counts == 0 || n_batches == 0 || n_modes == 0) {
      lanebal::throw_input("sweep lists must be non-empty");
    }
    require(device_counts, "device_counts");
    require(batches, "batches");
    require(modes, "modes");
    std::vector<lanebal::Mode> ms;
    for (size_t i = 0; i < n_modes; ++i) ms.push_back(to_mode(modes[i]));
    const auto rows = lanebal::sweep(
        scenario->value, {device_counts, device_counts + n_device_counts},
        {batches, batches + n_batches}, ms);
    *out_table = copy_out(render(rows, format));
  });
}

lb_status lb_fit_overheads(lb_scenario* scenario, lb_mode mode, const size_t* device_counts,
                           const double* speedups, size_t n_observations,
                           char** out_fit_json) {
  return guarded([&] {
    require(scenario, "scenario");
    if (n_observations == 0) lanebal::throw_input("no observations to fit");
    require(device_counts, "device_counts");
    require(speedups, "speedups");
    std::vector<lanebal::SpeedupObservation> obs;
    for (size_t i = 0; i < n_observations; ++i) obs.push_back({device_counts[i], speedups[i]});
    const auto fit = lanebal::fit_overheads(obs, scenario->value, to_mode(mode));
    set_out(out_fit_json, lanebal::io::fit_to_json(fit));
    scenario->value.cluster = fit.cluster;
  });
}

lb_status lb_bench_partition(const lb_scenario* const* scenarios, size_t n_scenarios,
                             size_t random_seeds, char** out_summary_csv,
                             char** out_runs_csv, char** out_summary_json) {
  return guarded([&] {
    if (n_scenarios == 0) lanebal::throw_input("no scenarios to benchmark");
    require(scenarios, "scenarios");
    std::vector<lanebal::ComparisonReport> reports;
    for (size_t i = 0; i < n_scenarios; ++i) {
      require(scenarios[i], "scenario");
      const auto& s = scenarios[i]->value;
      reports.push_back(
          lanebal::compare_strategies(s, random_seeds, s.train.per_lane_overhead));
    }
    set_out(out_summary_csv, lanebal::io::comparison_summary_csv(reports));
    set_out(out_runs_csv, lanebal::io::comparison_runs_csv(reports));
    set_out(out_summary_json, lanebal::io::comparison_json(reports));
  });
}

}  // extern "C"
