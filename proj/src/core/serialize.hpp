#pragma once

#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/lane_model.hpp"
#include "core/partitioner.hpp"
#include "core/sweep.hpp"
#include "core/workload.hpp"

// JSON documents in, JSON/CSV out. Parsers reject unknown keys and raise
// ErrorKind::kInvalidInput for malformed documents; domain invariants are then
// checked by the owning module (ErrorKind::kInvariant).
namespace lanebal::io {

std::vector<LaneSpec> parse_lanes(const std::string& text);
std::vector<DeviceSpec> parse_devices(const std::string& text);
std::vector<ProbeResult> parse_probes(const std::string& text);

std::string lanes_to_json(const std::vector<LaneSpec>& lanes);
std::string devices_to_json(const std::vector<DeviceSpec>& devices);

// [{"device_id", "time_factor"}] in probe order.
std::string factors_to_json(const std::vector<ProbeResult>& probes,
                            const FactorMap& factors);

Scenario parse_scenario(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);

Assignment parse_assignment(const std::string& text);
std::string assignment_to_json(const Assignment& assignment,
                               const LoadReport& report);

// Fixed six significant digits.
std::string format_number(double value);

inline constexpr const char* kSimCsvHeader =
    "scenario,mode,devices,batch,steps,step_time,epoch_time,compute,sync,"
    "network,speedup";
inline constexpr const char* kRunCsvHeader =
    "scenario,strategy,seed,makespan,step_time,ratio";
inline constexpr const char* kSummaryCsvHeader =
    "scenario,random_seeds,greedy_makespan,random_mean,random_stddev,"
    "random_min,random_max,round_robin_makespan,exact_makespan,"
    "ratio_random_over_greedy,single_seed";

std::string sim_rows_csv(const std::vector<SimRow>& rows);
std::string sim_rows_json(const std::vector<SimRow>& rows);

std::string comparison_summary_csv(const std::vector<ComparisonReport>& reports);
std::string comparison_runs_csv(const std::vector<ComparisonReport>& reports);
std::string comparison_json(const std::vector<ComparisonReport>& reports);

std::string fit_to_json(const FitResult& fit);

}  // namespace lanebal::io
