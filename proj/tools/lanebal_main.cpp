// lanebal command-line tool. Talks to the library only through the C API.

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lanebal/lanebal.h"

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

// Exit codes: 0 ok, 2 input error, 3 invariant violation, 4 solver limit.
struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void input_error(const std::string& message) { throw CliError{2, message}; }

void check(lb_status status) {
  if (status != LB_OK) throw CliError{static_cast<int>(status), lb_last_error()};
}

struct StringDeleter {
  void operator()(char* s) const { lb_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ScenarioDeleter {
  void operator()(lb_scenario* s) const { lb_scenario_free(s); }
};
using ScenarioPtr = std::unique_ptr<lb_scenario, ScenarioDeleter>;

struct AssignmentDeleter {
  void operator()(lb_assignment* a) const { lb_assignment_free(a); }
};
using AssignmentPtr = std::unique_ptr<lb_assignment, AssignmentDeleter>;

std::string take(char* raw) {
  OwnedString owned(raw);
  return owned ? std::string(owned.get()) : std::string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot read " + path + ": " + std::strerror(errno));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Write-temp-then-rename so readers never see a partial file.
void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) input_error("cannot write " + tmp);
    out << content;
    if (!out.flush()) input_error("short write to " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) input_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

ScenarioPtr load_scenario(const std::string& spec) {
  lb_scenario* raw = nullptr;
  if (fs::is_regular_file(spec)) {
    check(lb_scenario_parse(read_file(spec).c_str(), &raw));
  } else {
    check(lb_scenario_preset(spec.c_str(), &raw));
  }
  return ScenarioPtr(raw);
}

ordered_json scenario_json(const lb_scenario* s) {
  char* raw = nullptr;
  check(lb_scenario_dump(s, &raw));
  return ordered_json::parse(take(raw));
}

lb_mode parse_mode(const std::string& text) {
  if (text == "model" || text == "model-parallel") return LB_MODE_MODEL_PARALLEL;
  if (text == "data" || text == "data-parallel") return LB_MODE_DATA_PARALLEL;
  input_error("unknown mode '" + text + "' (expected model-parallel or data-parallel)");
}

const char* mode_name(lb_mode mode) {
  return mode == LB_MODE_MODEL_PARALLEL ? "model-parallel" : "data-parallel";
}

lb_format parse_format(const std::string& text) {
  if (text == "csv") return LB_FORMAT_CSV;
  if (text == "json") return LB_FORMAT_JSON;
  input_error("unknown format '" + text + "' (expected csv or json)");
}

struct Observation {
  size_t devices;
  double speedup;
};

// "8:7.18" -> {8, 7.18}
Observation parse_observation(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) input_error("observation '" + text + "' is not DEVICES:SPEEDUP");
  try {
    size_t used = 0;
    const unsigned long devices = std::stoul(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    const std::string rest = text.substr(colon + 1);
    const double speedup = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {devices, speedup};
  } catch (const std::logic_error&) {
    input_error("observation '" + text + "' is not DEVICES:SPEEDUP");
  }
}

ordered_json apply_fits(lb_scenario* scenario, lb_mode mode,
                        const std::vector<std::string>& observations) {
  if (observations.empty()) return nullptr;
  std::vector<size_t> devices;
  std::vector<double> speedups;
  for (const auto& text : observations) {
    const Observation o = parse_observation(text);
    devices.push_back(o.devices);
    speedups.push_back(o.speedup);
  }
  char* raw = nullptr;
  check(lb_fit_overheads(scenario, mode, devices.data(), speedups.data(), devices.size(), &raw));
  return ordered_json::parse(take(raw));
}

uint64_t default_seed() {
  const char* env = std::getenv("LANEBAL_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (env[used] != '\0') throw std::invalid_argument(env);
    return v;
  } catch (const std::logic_error&) {
    input_error(std::string("LANEBAL_SEED is not an unsigned integer: ") + env);
  }
}

std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

// Everything needed to rerun a command: `argv` is the canonical invocation
// with every default spelled out; `replay` feeds it back in.
void write_manifest(const std::string& command, const std::vector<std::string>& argv,
                    ordered_json config, ordered_json seeds,
                    const std::vector<std::string>& outputs) {
  ordered_json m;
  m["command"] = command;
  m["tool_version"] = lb_version();
  m["argv"] = argv;
  m["config"] = std::move(config);
  m["seeds"] = std::move(seeds);
  m["outputs"] = outputs;
  m["created_utc"] = utc_now();
  write_atomic(manifest_path(outputs.front()), m.dump(2) + "\n");
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream out;
  for (size_t i = 0; i < items.size(); ++i) out << (i ? "," : "") << items[i];
  return out.str();
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  const std::string stem = (p.parent_path() / p.stem()).string();
  return stem + suffix;
}

// ---------------------------------------------------------------------------

struct CalibrateArgs {
  std::string probes;
  std::string out;
};

void run_calibrate(const CalibrateArgs& a) {
  char* raw = nullptr;
  check(lb_calibrate(read_file(a.probes).c_str(), &raw));
  write_atomic(a.out, take(raw));
  write_manifest("calibrate", {"calibrate", "--probes", a.probes, "--out", a.out},
                 {{"probes", a.probes}}, ordered_json::array(), {a.out});
}

struct PlanArgs {
  std::string scenario;
  std::string lanes;
  std::string devices;
  std::string cluster;
  std::string strategy = "greedy";
  uint64_t seed = 0;
  std::string greedy_rule = "increment";
  size_t exact_limit = 16;
  std::string out;
};

ScenarioPtr plan_scenario(const PlanArgs& a) {
  ScenarioPtr scenario;
  if (!a.scenario.empty()) {
    scenario = load_scenario(a.scenario);
  } else {
    if (a.lanes.empty() || a.devices.empty()) {
      input_error("plan needs --scenario, or both --lanes and --devices");
    }
    const std::string doc = "{\"name\": \"custom\", \"lanes\": " + read_file(a.lanes) +
                            ", \"cluster\": {\"devices\": " + read_file(a.devices) + "}}";
    lb_scenario* raw = nullptr;
    check(lb_scenario_parse(doc.c_str(), &raw));
    scenario.reset(raw);
  }
  if (!a.scenario.empty() && !a.lanes.empty()) {
    check(lb_scenario_set_lanes(scenario.get(), read_file(a.lanes).c_str()));
  }
  if (!a.scenario.empty() && !a.devices.empty()) {
    check(lb_scenario_set_devices(scenario.get(), read_file(a.devices).c_str()));
  }
  if (!a.cluster.empty()) {
    ScenarioPtr donor = load_scenario(a.cluster);
    check(lb_scenario_set_cluster_from(scenario.get(), donor.get()));
  }
  return scenario;
}

void run_plan(const PlanArgs& a) {
  ScenarioPtr scenario = plan_scenario(a);
  lb_plan_options options{};
  if (a.strategy == "greedy") {
    options.strategy = LB_STRATEGY_GREEDY;
  } else if (a.strategy == "random") {
    options.strategy = LB_STRATEGY_RANDOM;
  } else if (a.strategy == "roundrobin") {
    options.strategy = LB_STRATEGY_ROUND_ROBIN;
  } else if (a.strategy == "exact") {
    options.strategy = LB_STRATEGY_EXACT;
  } else {
    input_error("unknown strategy '" + a.strategy + "'");
  }
  if (a.greedy_rule == "increment") {
    options.rule = LB_GREEDY_INCREMENT;
  } else if (a.greedy_rule == "emptiest") {
    options.rule = LB_GREEDY_EMPTIEST;
  } else {
    input_error("unknown greedy rule '" + a.greedy_rule + "'");
  }
  options.seed = a.seed;
  options.exact_limit = a.exact_limit;

  lb_assignment* raw_assignment = nullptr;
  check(lb_plan(scenario.get(), &options, &raw_assignment));
  AssignmentPtr assignment(raw_assignment);

  char* raw = nullptr;
  check(lb_assignment_dump(assignment.get(), scenario.get(), &raw));
  write_atomic(a.out, take(raw));
  double makespan = 0.0;
  check(lb_assignment_makespan(assignment.get(), scenario.get(), &makespan));
  std::cout << "makespan " << makespan << "\n";

  std::vector<std::string> argv = {"plan"};
  for (const auto& [flag, value] : {std::pair{"--scenario", a.scenario},
                                    std::pair{"--lanes", a.lanes},
                                    std::pair{"--devices", a.devices},
                                    std::pair{"--cluster", a.cluster}}) {
    if (!value.empty()) argv.insert(argv.end(), {flag, value});
  }
  argv.insert(argv.end(), {"--strategy", a.strategy, "--seed", std::to_string(a.seed),
                           "--greedy-rule", a.greedy_rule, "--exact-limit",
                           std::to_string(a.exact_limit), "--out", a.out});
  ordered_json config = {{"strategy", a.strategy},
                         {"seed", a.seed},
                         {"greedy_rule", a.greedy_rule},
                         {"exact_limit", a.exact_limit},
                         {"scenario", scenario_json(scenario.get())}};
  write_manifest("plan", argv, std::move(config), ordered_json::array({a.seed}), {a.out});
}

struct SimulateArgs {
  std::string scenario;
  std::string mode = "model-parallel";
  size_t gpus = 0;
  std::string assignment;
  std::vector<std::string> fit;
  std::string format = "csv";
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  ScenarioPtr scenario = load_scenario(a.scenario);
  const lb_mode mode = parse_mode(a.mode);
  const lb_format format = parse_format(a.format);
  ordered_json fit = apply_fits(scenario.get(), mode, a.fit);

  AssignmentPtr assignment;
  if (!a.assignment.empty()) {
    lb_assignment* raw = nullptr;
    check(lb_assignment_parse(read_file(a.assignment).c_str(), &raw));
    assignment.reset(raw);
  }
  char* raw = nullptr;
  check(lb_simulate(scenario.get(), mode, a.gpus, assignment.get(), format, &raw));
  write_atomic(a.out, take(raw));

  std::vector<std::string> argv = {"simulate", "--scenario", a.scenario, "--mode",
                                   mode_name(mode), "--gpus", std::to_string(a.gpus)};
  if (!a.assignment.empty()) argv.insert(argv.end(), {"--assignment", a.assignment});
  for (const auto& f : a.fit) argv.insert(argv.end(), {"--fit", f});
  argv.insert(argv.end(), {"--format", a.format, "--out", a.out});

  ordered_json config;
  config["mode"] = mode_name(mode);
  config["gpus"] = a.gpus == 0 ? lb_scenario_device_count(scenario.get()) : a.gpus;
  config["placement"] = mode == LB_MODE_DATA_PARALLEL ? "replicated"
                        : a.assignment.empty()        ? "greedy"
                                                      : "file:" + a.assignment;
  config["fit"] = fit;
  config["format"] = a.format;
  config["scenario"] = scenario_json(scenario.get());
  write_manifest("simulate", argv, std::move(config),
                 ordered_json::array({config["scenario"]["seed"]}), {a.out});
}

struct SweepArgs {
  std::string scenario;
  std::vector<size_t> gpus = {1, 2, 4, 8};
  std::vector<int64_t> batches;
  std::vector<std::string> modes = {"model-parallel", "data-parallel"};
  std::vector<std::string> fit_model;
  std::vector<std::string> fit_data;
  std::string format = "csv";
  std::string out;
};

void run_sweep(SweepArgs a) {
  ScenarioPtr scenario = load_scenario(a.scenario);
  ordered_json fits;
  fits["model-parallel"] = apply_fits(scenario.get(), LB_MODE_MODEL_PARALLEL, a.fit_model);
  fits["data-parallel"] = apply_fits(scenario.get(), LB_MODE_DATA_PARALLEL, a.fit_data);
  const ordered_json resolved = scenario_json(scenario.get());
  if (a.batches.empty()) a.batches = resolved["batches"].get<std::vector<int64_t>>();

  std::vector<lb_mode> modes;
  for (auto& m : a.modes) {
    modes.push_back(parse_mode(m));
    m = mode_name(modes.back());
  }
  const lb_format format = parse_format(a.format);
  char* raw = nullptr;
  check(lb_sweep(scenario.get(), a.gpus.data(), a.gpus.size(), a.batches.data(),
                 a.batches.size(), modes.data(), modes.size(), format, &raw));
  write_atomic(a.out, take(raw));

  std::vector<std::string> argv = {"sweep", "--scenario", a.scenario, "--gpus", join(a.gpus),
                                   "--batches", join(a.batches), "--modes", join(a.modes)};
  for (const auto& f : a.fit_model) argv.insert(argv.end(), {"--fit-model", f});
  for (const auto& f : a.fit_data) argv.insert(argv.end(), {"--fit-data", f});
  argv.insert(argv.end(), {"--format", a.format, "--out", a.out});

  ordered_json config;
  config["gpus"] = a.gpus;
  config["batches"] = a.batches;
  config["modes"] = a.modes;
  config["fit"] = fits;
  config["format"] = a.format;
  config["scenario"] = resolved;
  write_manifest("sweep", argv, std::move(config), ordered_json::array({resolved["seed"]}),
                 {a.out});
}

struct BenchArgs {
  std::vector<std::string> scenarios = {"lanes-6", "lanes-9", "lanes-12", "lanes-24"};
  std::string cluster;
  size_t k = 1000;
  double overhead = -1.0;  // negative keeps each scenario's own value
  std::string out;
  std::string runs_out;
  std::string json_out;
};

void run_bench(BenchArgs a) {
  if (a.k < 1) throw CliError{3, "--k must be >= 1"};
  if (a.runs_out.empty()) a.runs_out = with_suffix(a.out, ".runs.csv");
  if (a.json_out.empty()) a.json_out = with_suffix(a.out, ".json");

  ScenarioPtr donor;
  if (!a.cluster.empty()) donor = load_scenario(a.cluster);
  std::vector<ScenarioPtr> owned;
  std::vector<const lb_scenario*> views;
  ordered_json resolved = ordered_json::array();
  ordered_json seeds = ordered_json::array();
  for (const auto& name : a.scenarios) {
    owned.push_back(load_scenario(name));
    if (donor) check(lb_scenario_set_cluster_from(owned.back().get(), donor.get()));
    if (a.overhead >= 0.0) {
      check(lb_scenario_set_per_lane_overhead(owned.back().get(), a.overhead));
    }
    views.push_back(owned.back().get());
    resolved.push_back(scenario_json(owned.back().get()));
    seeds.push_back(resolved.back()["seed"]);
  }

  char* summary_csv = nullptr;
  char* runs_csv = nullptr;
  char* summary_json = nullptr;
  check(lb_bench_partition(views.data(), views.size(), a.k, &summary_csv, &runs_csv,
                           &summary_json));
  write_atomic(a.out, take(summary_csv));
  write_atomic(a.runs_out, take(runs_csv));
  write_atomic(a.json_out, take(summary_json));

  std::vector<std::string> argv = {"bench-partition", "--scenarios", join(a.scenarios)};
  if (!a.cluster.empty()) argv.insert(argv.end(), {"--cluster", a.cluster});
  argv.insert(argv.end(), {"--k", std::to_string(a.k)});
  if (a.overhead >= 0.0) {
    std::ostringstream v;
    v.precision(17);
    v << a.overhead;
    argv.insert(argv.end(), {"--overhead", v.str()});
  }
  argv.insert(argv.end(), {"--out", a.out, "--runs-out", a.runs_out, "--json-out", a.json_out});

  ordered_json config;
  config["random_seeds"] = a.k;
  config["random_seed_derivation"] = "splitmix64(scenario.seed, k) for k in [0, K)";
  config["scenarios"] = resolved;
  write_manifest("bench-partition", argv, std::move(config), std::move(seeds),
                 {a.out, a.runs_out, a.json_out});
}

struct ScenarioArgs {
  std::string name;
  std::string out;
};

void run_scenario_dump(const ScenarioArgs& a) {
  ScenarioPtr scenario = load_scenario(a.name);
  char* raw = nullptr;
  check(lb_scenario_dump(scenario.get(), &raw));
  const std::string doc = take(raw);
  if (a.out.empty()) {
    std::cout << doc;
    return;
  }
  write_atomic(a.out, doc);
  write_manifest("scenario dump", {"scenario", "dump", "--name", a.name, "--out", a.out},
                 {{"name", a.name}}, ordered_json::array({ordered_json::parse(doc)["seed"]}),
                 {a.out});
}

void run_scenario_list() {
  char* raw = nullptr;
  check(lb_catalog(&raw));
  for (const auto& name : ordered_json::parse(take(raw))) {
    std::cout << name.get<std::string>() << "\n";
  }
}

int run(std::vector<std::string> args);

void run_replay(const std::string& manifest) {
  ordered_json m;
  try {
    m = ordered_json::parse(read_file(manifest));
  } catch (const ordered_json::exception& e) {
    input_error("manifest " + manifest + " is not valid JSON: " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) input_error("manifest has no argv");
  const auto argv = m["argv"].get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") input_error("refusing to replay a replay");
  const int code = run(argv);
  if (code != 0) throw CliError{code, "replayed command failed"};
}

int run(std::vector<std::string> args) {
  CLI::App app{"lanebal: lane placement and multi-accelerator timing model"};
  app.set_version_flag("--version", std::string(lb_version()));
  app.require_subcommand(1);

  CalibrateArgs calibrate;
  auto* cal = app.add_subcommand("calibrate", "Normalize probe runtimes into device time factors");
  cal->add_option("--probes", calibrate.probes, "Probe list JSON")->required();
  cal->add_option("--out", calibrate.out, "Factor file to write")->required();

  PlanArgs plan;
  auto* pl = app.add_subcommand("plan", "Assign lanes to devices");
  pl->add_option("--scenario", plan.scenario, "Preset name or scenario JSON file");
  pl->add_option("--lanes", plan.lanes, "Lane list JSON (replaces scenario lanes)");
  pl->add_option("--devices", plan.devices, "Device list JSON (replaces scenario devices)");
  pl->add_option("--cluster", plan.cluster, "Take devices and comm costs from this scenario");
  pl->add_option("--strategy", plan.strategy, "greedy|random|roundrobin|exact")
      ->check(CLI::IsMember({"greedy", "random", "roundrobin", "exact"}));
  auto* seed_opt = pl->add_option("--seed", plan.seed,
                                  "Seed for the random strategy (default $LANEBAL_SEED or 0)");
  pl->add_option("--greedy-rule", plan.greedy_rule, "increment|emptiest")
      ->check(CLI::IsMember({"increment", "emptiest"}));
  pl->add_option("--exact-limit", plan.exact_limit, "Largest lane count for the exact solver");
  pl->add_option("--out", plan.out, "Assignment JSON to write")->required();

  SimulateArgs simulate;
  auto* sim = app.add_subcommand("simulate", "Per-epoch timing for a scenario");
  sim->add_option("--scenario", simulate.scenario, "Preset name or scenario JSON file")->required();
  sim->add_option("--mode", simulate.mode, "model-parallel|data-parallel");
  sim->add_option("--gpus", simulate.gpus, "Use the first N devices (0 = all)");
  sim->add_option("--assignment", simulate.assignment, "Assignment JSON (model-parallel)");
  sim->add_option("--fit", simulate.fit, "Fit overheads to DEVICES:SPEEDUP observations");
  sim->add_option("--format", simulate.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  sim->add_option("--out", simulate.out, "Output table")->required();

  SweepArgs sweep;
  auto* sw = app.add_subcommand("sweep", "Devices x batches x modes grid");
  sw->add_option("--scenario", sweep.scenario, "Preset name or scenario JSON file")->required();
  sw->add_option("--gpus", sweep.gpus, "Device counts")->delimiter(',');
  sw->add_option("--batches", sweep.batches, "Batch sizes (default: scenario batches)")
      ->delimiter(',');
  sw->add_option("--modes", sweep.modes, "Modes")->delimiter(',');
  sw->add_option("--fit-model", sweep.fit_model, "Model-parallel DEVICES:SPEEDUP observations");
  sw->add_option("--fit-data", sweep.fit_data, "Data-parallel DEVICES:SPEEDUP observations");
  sw->add_option("--format", sweep.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  sw->add_option("--out", sweep.out, "Output table")->required();

  BenchArgs bench;
  auto* bp = app.add_subcommand("bench-partition", "Greedy vs random vs round-robin campaigns");
  bp->add_option("--scenarios", bench.scenarios, "Scenario presets or files")->delimiter(',');
  bp->add_option("--cluster", bench.cluster, "Take devices and comm costs from this scenario");
  bp->add_option("--k", bench.k, "Random assignments per scenario");
  bp->add_option("--overhead", bench.overhead, "Per-lane overhead for evaluation");
  bp->add_option("--out", bench.out, "Summary CSV")->required();
  bp->add_option("--runs-out", bench.runs_out, "Per-run CSV (default <out>.runs.csv)");
  bp->add_option("--json-out", bench.json_out, "Summary JSON (default <out>.json)");

  ScenarioArgs scenario;
  auto* sc = app.add_subcommand("scenario", "Inspect scenario presets");
  sc->require_subcommand(1);
  auto* dump = sc->add_subcommand("dump", "Write a scenario as JSON");
  dump->add_option("--name", scenario.name, "Preset name or scenario file")->required();
  dump->add_option("--out", scenario.out, "Output file (default stdout)");
  auto* list = sc->add_subcommand("list", "List preset names");

  std::string manifest;
  auto* rp = app.add_subcommand("replay", "Rerun a command from its manifest");
  rp->add_option("manifest", manifest, "Manifest JSON")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cal) run_calibrate(calibrate);
    if (*pl) {
      if (seed_opt->count() == 0) plan.seed = default_seed();
      run_plan(plan);
    }
    if (*sim) run_simulate(simulate);
    if (*sw) run_sweep(sweep);
    if (*bp) run_bench(bench);
    if (*dump) run_scenario_dump(scenario);
    if (*list) run_scenario_list();
    if (*rp) run_replay(manifest);
  } catch (const CliError& e) {
    std::cerr << "lanebal: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "lanebal: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  return run(std::vector<std::string>(argv + 1, argv + argc));
}
