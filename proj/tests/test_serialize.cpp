#include <doctest.h>

#include <json.hpp>

#include "core/analysis.hpp"
#include "core/error.hpp"
#include "core/serialize.hpp"
#include "core/sweep.hpp"

using namespace lanebal;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected lanebal::Error");
  return ErrorKind::kInvalidInput;
}

}  // namespace

TEST_CASE("lane list parsing") {
  const auto lanes = io::parse_lanes(R"([{"id":"a","width":3,"depth":2}])");
  REQUIRE(lanes.size() == 1);
  CHECK(lanes[0] == LaneSpec{"a", 3, 2});

  CHECK(kind_of([] { io::parse_lanes("[{"); }) == ErrorKind::kInvalidInput);
  CHECK(kind_of([] { io::parse_lanes(R"({"id":"a"})"); }) == ErrorKind::kInvalidInput);
  CHECK(kind_of([] { io::parse_lanes(R"([{"id":"a","width":3}])"); }) ==
        ErrorKind::kInvalidInput);
  CHECK(kind_of([] { io::parse_lanes(R"([{"id":"a","width":3,"depth":2,"type":"x"}])"); }) ==
        ErrorKind::kInvalidInput);
  CHECK(kind_of([] { io::parse_lanes(R"([{"id":"a","width":"3","depth":2}])"); }) ==
        ErrorKind::kInvalidInput);
  CHECK(kind_of([] { io::parse_lanes(R"([{"id":"a","width":2.5,"depth":2}])"); }) ==
        ErrorKind::kInvalidInput);
  // Well-formed but violates the lane invariant.
  CHECK(kind_of([] { io::parse_lanes(R"([{"id":"a","width":0,"depth":2}])"); }) ==
        ErrorKind::kInvariant);
}

TEST_CASE("device and probe parsing") {
  const auto d = io::parse_devices(R"([{"id":"g","time_factor":1.5,"host":"h"}])");
  CHECK(d[0] == DeviceSpec{"g", 1.5, "h"});
  CHECK(kind_of([] { io::parse_devices(R"([{"id":"g","time_factor":1.5}])"); }) ==
        ErrorKind::kInvalidInput);
  const auto p = io::parse_probes(R"([{"device_id":"g","runtime":2.0}])");
  CHECK(p[0].device_id == "g");
  CHECK(p[0].runtime == 2.0);
  CHECK(kind_of([] { io::parse_probes(R"([{"device_id":"g","runtime":2.0,"x":1}])"); }) ==
        ErrorKind::kInvalidInput);
}

TEST_CASE("calibration output") {
  const std::vector<ProbeResult> probes{{"b", 4.0}, {"a", 2.0}};
  const auto j = nlohmann::json::parse(io::factors_to_json(probes, calibrate(probes)));
  REQUIRE(j.size() == 2);
  CHECK(j[0]["device_id"] == "b");
  CHECK(j[0]["time_factor"] == 2.0);
  CHECK(j[1]["device_id"] == "a");
  CHECK(j[1]["time_factor"] == 1.0);
}

TEST_CASE("scenario round trip for every preset") {
  for (const auto& name : preset_names()) {
    const auto s = preset_scenario(name);
    const auto text = io::scenario_to_json(s);
    const auto back = io::parse_scenario(text);
    CHECK(back == s);
    CHECK(io::scenario_to_json(back) == text);
  }
}

TEST_CASE("scenario parsing defaults and rejections") {
  const auto s = io::parse_scenario(R"({
    "name": "tiny",
    "lanes": [{"id":"a","width":1,"depth":1}],
    "cluster": {"devices": [{"id":"g","time_factor":1.0,"host":"h"}]}
  })");
  CHECK(s.train == TrainConfig{});
  CHECK(s.batches == std::vector<int64_t>{s.train.batch_size});
  CHECK(s.cluster.intra_host_sync == 0.0);

  CHECK(kind_of([] {
          io::parse_scenario(R"({"name":"t","lanes":[],"cluster":{"devices":[]},"extra":1})");
        }) == ErrorKind::kInvalidInput);
  CHECK(kind_of([] {
          io::parse_scenario(R"({"name":"t","lanes":[{"id":"a","width":1,"depth":1}],
            "cluster":{"devices":[{"id":"g","time_factor":1.0,"host":"h"}],"bogus":2}})");
        }) == ErrorKind::kInvalidInput);
  CHECK(kind_of([] {
          io::parse_scenario(R"({"name":"t","lanes":[{"id":"a","width":1,"depth":1}],
            "cluster":{"devices":[{"id":"g","time_factor":0.0,"host":"h"}]}})");
        }) == ErrorKind::kInvariant);
}

TEST_CASE("assignment round trip") {
  const auto s = preset_scenario("lanes-9");
  const auto a = random_partition(s.lanes, s.cluster, 42);
  const auto text = io::assignment_to_json(a, load_report(a, s.lanes, s.cluster));
  const auto back = io::parse_assignment(text);
  CHECK(back == a);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["seed"] == 42);
  CHECK(j["assignment"].size() == 9);
  CHECK(j.contains("makespan"));
  CHECK(j.contains("per_device_load"));

  const auto g = greedy_partition(s.lanes, s.cluster);
  const auto gj = nlohmann::json::parse(io::assignment_to_json(g, load_report(g, s.lanes, s.cluster)));
  CHECK(gj["seed"].is_null());
  CHECK(io::parse_assignment(gj.dump()) == g);

  CHECK(kind_of([] { io::parse_assignment(R"({"strategy":"x","assignment":[],"z":0})"); }) ==
        ErrorKind::kInvalidInput);
}

TEST_CASE("number formatting") {
  CHECK(io::format_number(1.0) == "1");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333");
  CHECK(io::format_number(7.619047619) == "7.61905");
  CHECK(io::format_number(1234567.0) == "1.23457e+06");
}

TEST_CASE("simulation tables") {
  const auto s = preset_scenario("fig3-8lane");
  const auto rows = speedup_curve(s, {1, 8}, Mode::kModelParallel);
  const auto csv = io::sim_rows_csv(rows);
  CHECK(csv.rfind(std::string(io::kSimCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("fig3-8lane,model-parallel,8,100,600,") != std::string::npos);

  const auto j = nlohmann::json::parse(io::sim_rows_json(rows));
  REQUIRE(j.size() == 2);
  CHECK(j[1]["devices"] == 8);
  CHECK(j[1]["speedup"].get<double>() == doctest::Approx(7.18).epsilon(1e-9));
}

TEST_CASE("comparison tables") {
  const auto r = compare_strategies(preset_scenario("lanes-6"), 3);
  const auto summary = io::comparison_summary_csv({r});
  CHECK(summary.rfind(std::string(io::kSummaryCsvHeader) + "\n", 0) == 0);
  const auto runs = io::comparison_runs_csv({r});
  CHECK(runs.rfind(std::string(io::kRunCsvHeader) + "\n", 0) == 0);
  // greedy, roundrobin, exact, 3 random, header.
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 7);
  const auto j = nlohmann::json::parse(io::comparison_json({r}));
  CHECK(j[0].contains("plan_time"));
  CHECK(j[0]["exact_makespan"].is_number());
}
