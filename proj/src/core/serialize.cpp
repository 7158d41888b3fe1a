#include "core/serialize.hpp"

#include <cstdio>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "core/error.hpp"

namespace lanebal::io {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw_input(std::string("malformed JSON: ") + e.what());
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional,
                const std::string& what) {
  if (!obj.is_object()) throw_input(what + " must be a JSON object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    allowed.insert(k);
    if (!obj.contains(k)) throw_input(what + " is missing key \"" + k + "\"");
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& item : obj.items()) {
    if (allowed.count(item.key()) == 0) {
      throw_input(what + " has unknown key \"" + item.key() + "\"");
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& what) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw_input(what + ": key \"" + key + "\" has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& what) {
  return obj.contains(key) ? get<T>(obj, key, what) : fallback;
}

const json& require_array(const json& doc, const std::string& what) {
  if (!doc.is_array()) throw_input(what + " must be a JSON array");
  return doc;
}

// Integers in JSON may arrive as floats ("4.0"); only exact integers pass.
int get_int(const json& obj, const char* key, const std::string& what) {
  const json& v = obj.at(key);
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float() && v.get<double>() == static_cast<int>(v.get<double>())) {
    return static_cast<int>(v.get<double>());
  }
  throw_input(what + ": key \"" + key + "\" must be an integer");
}

LaneSpec lane_from(const json& j) {
  check_keys(j, {"id", "width", "depth"}, {}, "lane");
  LaneSpec lane{get<std::string>(j, "id", "lane"), get_int(j, "width", "lane"),
                get_int(j, "depth", "lane")};
  return lane;
}

DeviceSpec device_from(const json& j) {
  check_keys(j, {"id", "time_factor", "host"}, {}, "device");
  return {get<std::string>(j, "id", "device"),
          get<double>(j, "time_factor", "device"),
          get<std::string>(j, "host", "device")};
}

ordered_json lane_to(const LaneSpec& lane) {
  return {{"id", lane.id}, {"width", lane.width}, {"depth", lane.depth}};
}

ordered_json device_to(const DeviceSpec& d) {
  return {{"id", d.id}, {"time_factor", d.time_factor}, {"host", d.host}};
}

ordered_json lanes_array(const std::vector<LaneSpec>& lanes) {
  ordered_json out = ordered_json::array();
  for (const auto& lane : lanes) out.push_back(lane_to(lane));
  return out;
}

ordered_json devices_array(const std::vector<DeviceSpec>& devices) {
  ordered_json out = ordered_json::array();
  for (const auto& d : devices) out.push_back(device_to(d));
  return out;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::vector<LaneSpec> parse_lanes(const std::string& text) {
  const json doc = parse_document(text);
  std::vector<LaneSpec> lanes;
  for (const auto& j : require_array(doc, "lane list")) lanes.push_back(lane_from(j));
  validate(lanes);
  return lanes;
}

std::vector<DeviceSpec> parse_devices(const std::string& text) {
  const json doc = parse_document(text);
  std::vector<DeviceSpec> devices;
  for (const auto& j : require_array(doc, "device list")) devices.push_back(device_from(j));
  return devices;
}

std::vector<ProbeResult> parse_probes(const std::string& text) {
  const json doc = parse_document(text);
  std::vector<ProbeResult> probes;
  for (const auto& j : require_array(doc, "probe list")) {
    check_keys(j, {"device_id", "runtime"}, {}, "probe");
    probes.push_back({get<std::string>(j, "device_id", "probe"),
                      get<double>(j, "runtime", "probe")});
  }
  return probes;
}

std::string lanes_to_json(const std::vector<LaneSpec>& lanes) {
  return dump(lanes_array(lanes));
}

std::string devices_to_json(const std::vector<DeviceSpec>& devices) {
  return dump(devices_array(devices));
}

std::string factors_to_json(const std::vector<ProbeResult>& probes,
                            const FactorMap& factors) {
  ordered_json out = ordered_json::array();
  for (const auto& p : probes) {
    out.push_back({{"device_id", p.device_id}, {"time_factor", factors.at(p.device_id)}});
  }
  return dump(out);
}

Scenario parse_scenario(const std::string& text) {
  const json doc = parse_document(text);
  check_keys(doc, {"name", "lanes", "cluster"}, {"seed", "train", "batches"},
             "scenario");
  Scenario s;
  s.name = get<std::string>(doc, "name", "scenario");
  s.seed = get_or<uint64_t>(doc, "seed", 0, "scenario");
  for (const auto& j : require_array(doc.at("lanes"), "scenario lanes")) {
    s.lanes.push_back(lane_from(j));
  }

  const json& c = doc.at("cluster");
  check_keys(c, {"devices"},
             {"intra_host_sync", "inter_host_penalty", "allreduce_base",
              "allreduce_per_device"},
             "cluster");
  for (const auto& j : require_array(c.at("devices"), "cluster devices")) {
    s.cluster.devices.push_back(device_from(j));
  }
  s.cluster.intra_host_sync = get_or(c, "intra_host_sync", 0.0, "cluster");
  s.cluster.inter_host_penalty = get_or(c, "inter_host_penalty", 0.0, "cluster");
  s.cluster.allreduce_base = get_or(c, "allreduce_base", 0.0, "cluster");
  s.cluster.allreduce_per_device = get_or(c, "allreduce_per_device", 0.0, "cluster");

  if (doc.contains("train")) {
    const json& t = doc.at("train");
    check_keys(t, {},
               {"samples_per_epoch", "batch_size", "reference_batch",
                "per_lane_overhead"},
               "train");
    TrainConfig& cfg = s.train;
    cfg.samples_per_epoch = get_or(t, "samples_per_epoch", cfg.samples_per_epoch, "train");
    cfg.batch_size = get_or(t, "batch_size", cfg.batch_size, "train");
    cfg.reference_batch = get_or(t, "reference_batch", cfg.reference_batch, "train");
    cfg.per_lane_overhead = get_or(t, "per_lane_overhead", cfg.per_lane_overhead, "train");
  }
  if (doc.contains("batches")) {
    s.batches = get<std::vector<int64_t>>(doc, "batches", "scenario");
  }
  if (s.batches.empty()) s.batches = {s.train.batch_size};
  validate(s);
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json cluster;
  cluster["devices"] = devices_array(s.cluster.devices);
  cluster["intra_host_sync"] = s.cluster.intra_host_sync;
  cluster["inter_host_penalty"] = s.cluster.inter_host_penalty;
  cluster["allreduce_base"] = s.cluster.allreduce_base;
  cluster["allreduce_per_device"] = s.cluster.allreduce_per_device;

  ordered_json train;
  train["samples_per_epoch"] = s.train.samples_per_epoch;
  train["batch_size"] = s.train.batch_size;
  train["reference_batch"] = s.train.reference_batch;
  train["per_lane_overhead"] = s.train.per_lane_overhead;

  ordered_json out;
  out["name"] = s.name;
  out["seed"] = s.seed;
  out["lanes"] = lanes_array(s.lanes);
  out["cluster"] = cluster;
  out["train"] = train;
  out["batches"] = s.batches;
  return dump(out);
}

Assignment parse_assignment(const std::string& text) {
  const json doc = parse_document(text);
  check_keys(doc, {"strategy", "assignment"},
             {"seed", "makespan", "per_device_load", "imbalance", "lower_bound"},
             "assignment");
  Assignment a;
  a.strategy = get<std::string>(doc, "strategy", "assignment");
  if (doc.contains("seed") && !doc.at("seed").is_null()) {
    a.seed = get<uint64_t>(doc, "seed", "assignment");
  }
  for (const auto& j : require_array(doc.at("assignment"), "assignment entries")) {
    check_keys(j, {"lane_id", "device_id"}, {}, "assignment entry");
    a.placements.push_back({get<std::string>(j, "lane_id", "assignment entry"),
                            get<std::string>(j, "device_id", "assignment entry")});
  }
  return a;
}

std::string assignment_to_json(const Assignment& a, const LoadReport& report) {
  ordered_json out;
  out["strategy"] = a.strategy;
  out["seed"] = a.seed ? ordered_json(*a.seed) : ordered_json(nullptr);
  ordered_json entries = ordered_json::array();
  for (const auto& p : a.placements) {
    entries.push_back({{"lane_id", p.lane_id}, {"device_id", p.device_id}});
  }
  out["assignment"] = entries;
  out["makespan"] = report.makespan;
  ordered_json loads = ordered_json::object();
  for (const auto& [id, load] : report.per_device_load) loads[id] = load;
  out["per_device_load"] = loads;
  out["imbalance"] = report.imbalance;
  out["lower_bound"] = report.lower_bound;
  return dump(out);
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string sim_rows_csv(const std::vector<SimRow>& rows) {
  std::string out = std::string(kSimCsvHeader) + "\n";
  for (const auto& row : rows) {
    const EpochReport& r = row.report;
    out += row.scenario + "," + std::string(to_string(r.mode)) + "," +
           std::to_string(r.device_count) + "," + std::to_string(r.batch_size) + "," +
           std::to_string(r.steps) + "," + format_number(r.step_time) + "," +
           format_number(r.epoch_time) + "," + format_number(r.compute_time) + "," +
           format_number(r.sync_time) + "," + format_number(r.network_time) + "," +
           format_number(row.speedup) + "\n";
  }
  return out;
}

std::string sim_rows_json(const std::vector<SimRow>& rows) {
  ordered_json out = ordered_json::array();
  for (const auto& row : rows) {
    const EpochReport& r = row.report;
    ordered_json j;
    j["scenario"] = row.scenario;
    j["mode"] = std::string(to_string(r.mode));
    j["devices"] = r.device_count;
    j["batch"] = r.batch_size;
    j["steps"] = r.steps;
    j["step_time"] = r.step_time;
    j["epoch_time"] = r.epoch_time;
    j["compute"] = r.compute_time;
    j["sync"] = r.sync_time;
    j["network"] = r.network_time;
    j["speedup"] = row.speedup;
    out.push_back(j);
  }
  return dump(out);
}

std::string comparison_summary_csv(const std::vector<ComparisonReport>& reports) {
  std::string out = std::string(kSummaryCsvHeader) + "\n";
  for (const auto& r : reports) {
    out += r.scenario + "," + std::to_string(r.random_seeds) + "," +
           format_number(r.greedy_makespan) + "," + format_number(r.random_mean) + "," +
           format_number(r.random_stddev) + "," + format_number(r.random_min) + "," +
           format_number(r.random_max) + "," + format_number(r.round_robin_makespan) + "," +
           (r.exact_makespan ? format_number(*r.exact_makespan) : "") + "," +
           format_number(r.ratio_random_over_greedy) + "," +
           (r.single_seed ? "1" : "0") + "\n";
  }
  return out;
}

std::string comparison_runs_csv(const std::vector<ComparisonReport>& reports) {
  std::string out = std::string(kRunCsvHeader) + "\n";
  for (const auto& r : reports) {
    for (const auto& run : r.runs) {
      out += r.scenario + "," + run.strategy + "," +
             (run.seed ? std::to_string(*run.seed) : "") + "," +
             format_number(run.makespan) + "," + format_number(run.step_time) + "," +
             format_number(run.ratio) + "\n";
    }
  }
  return out;
}

std::string comparison_json(const std::vector<ComparisonReport>& reports) {
  ordered_json out = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["random_seeds"] = r.random_seeds;
    j["greedy_makespan"] = r.greedy_makespan;
    j["random_mean"] = r.random_mean;
    j["random_stddev"] = r.random_stddev;
    j["random_min"] = r.random_min;
    j["random_max"] = r.random_max;
    j["single_seed"] = r.single_seed;
    j["round_robin_makespan"] = r.round_robin_makespan;
    j["exact_makespan"] =
        r.exact_makespan ? ordered_json(*r.exact_makespan) : ordered_json(nullptr);
    j["ratio_random_over_greedy"] = r.ratio_random_over_greedy;
    j["plan_time"] = r.plan_time;
    out.push_back(j);
  }
  return dump(out);
}

std::string fit_to_json(const FitResult& fit) {
  ordered_json out;
  ordered_json constants = ordered_json::object();
  for (const auto& c : fit.constants) constants[c.name] = c.value;
  out["constants"] = constants;
  out["residuals"] = fit.residuals;
  out["rms"] = fit.rms;
  return dump(out);
}

}  // namespace lanebal::io
