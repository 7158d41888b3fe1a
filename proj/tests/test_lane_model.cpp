#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/lane_model.hpp"
#include "core/rng.hpp"

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

TEST_CASE("lane_work is width squared times depth") {
  CHECK(lane_work({"a", 1, 1}) == 1.0);
  CHECK(lane_work({"a", 4, 2}) == 32.0);
  CHECK(lane_work({"a", 5, 5}) == 125.0);
}

TEST_CASE("lane_work scaling laws") {
  for (int w = 1; w <= 12; ++w) {
    for (int d = 1; d <= 12; ++d) {
      const double base = lane_work({"x", w, d});
      CHECK(lane_work({"x", 2 * w, d}) == 4.0 * base);
      CHECK(lane_work({"x", w, 2 * d}) == 2.0 * base);
      CHECK(lane_work({"x", w + 1, d}) > base);
      CHECK(lane_work({"x", w, d + 1}) > base);
    }
  }
}

TEST_CASE("effective_time adds overhead before scaling") {
  const LaneSpec lane{"l", 2, 3};
  CHECK(effective_time(lane, {"d", 1.0, "h"}, 0.0) == 12.0);
  CHECK(effective_time(lane, {"d", 2.0, "h"}, 0.0) == 24.0);
  CHECK(effective_time(lane, {"d", 1.0, "h"}, 0.5) == 12.5);
}

TEST_CASE("effective_time is strictly increasing in every argument") {
  const LaneSpec lane{"l", 3, 2};
  const DeviceSpec dev{"d", 1.5, "h"};
  const double base = effective_time(lane, dev, 0.25);
  CHECK(effective_time({"l", 4, 2}, dev, 0.25) > base);
  CHECK(effective_time({"l", 3, 3}, dev, 0.25) > base);
  CHECK(effective_time(lane, {"d", 1.6, "h"}, 0.25) > base);
  CHECK(effective_time(lane, dev, 0.5) > base);
}

TEST_CASE("calibrate normalizes by the fastest probe") {
  SUBCASE("symmetric") {
    const auto f = calibrate({{"a", 10.0}, {"b", 10.0}});
    CHECK(f.at("a") == 1.0);
    CHECK(f.at("b") == 1.0);
  }
  SUBCASE("paper-like device set") {
    const auto f = calibrate({{"v100", 10.0}, {"p100", 14.29}, {"m40", 19.35}, {"k80", 60.0}});
    CHECK(f.at("v100") == 1.0);
    CHECK(f.at("p100") == doctest::Approx(1.429).epsilon(1e-12));
    CHECK(f.at("m40") == doctest::Approx(1.935).epsilon(1e-12));
    CHECK(f.at("k80") == doctest::Approx(6.0).epsilon(1e-12));
  }
  SUBCASE("single device") { CHECK(calibrate({{"x", 5.0}}).at("x") == 1.0); }
}

TEST_CASE("calibrate errors") {
  CHECK(kind_of([] { calibrate({}); }) == ErrorKind::kInvariant);
  CHECK(kind_of([] { calibrate({{"a", 1.0}, {"a", 2.0}}); }) == ErrorKind::kInvariant);
  CHECK(kind_of([] { calibrate({{"a", 0.0}}); }) == ErrorKind::kInvariant);
  CHECK(kind_of([] { calibrate({{"a", -3.0}}); }) == ErrorKind::kInvariant);

  try {
    calibrate({{"gpu-7", 1.0}, {"gpu-7", 2.0}});
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("duplicate probe") != std::string::npos);
    CHECK(std::string(e.what()).find("gpu-7") != std::string::npos);
  }
}

TEST_CASE("calibrate properties over random probe sets") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    std::vector<ProbeResult> probes;
    for (int i = 0; i < n; ++i) {
      probes.push_back({"d" + std::to_string(i), 0.01 + 100.0 * rng.canonical()});
    }
    const auto f = calibrate(probes);
    int ones = 0;
    for (const auto& [id, v] : f) {
      CHECK(v >= 1.0);
      ones += v == 1.0 ? 1 : 0;
    }
    CHECK(ones >= 1);

    // Ordering follows runtimes.
    for (const auto& a : probes) {
      for (const auto& b : probes) {
        if (a.runtime < b.runtime) CHECK(f.at(a.device_id) <= f.at(b.device_id));
      }
    }

    // Scale invariance.
    const double c = 0.1 + 10.0 * rng.canonical();
    auto scaled = probes;
    for (auto& p : scaled) p.runtime *= c;
    const auto g = calibrate(scaled);
    for (const auto& [id, v] : f) CHECK(g.at(id) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("factors_from_speedups converts published speedups") {
  const auto f = factors_from_speedups(
      {{"k80", 1.0}, {"m40", 3.1}, {"p100", 4.2}, {"v100", 6.0}}, "k80");
  CHECK(f.at("k80") == 6.0);
  CHECK(f.at("m40") == doctest::Approx(1.9355).epsilon(1e-4));
  CHECK(f.at("p100") == doctest::Approx(1.4286).epsilon(1e-4));
  CHECK(f.at("v100") == 1.0);

  CHECK(factors_from_speedups({{"a", 1.0}}, "a").at("a") == 1.0);
  const auto two = factors_from_speedups({{"a", 1.0}, {"b", 2.0}}, "a");
  CHECK(two.at("a") == 2.0);
  CHECK(two.at("b") == 1.0);

  CHECK(kind_of([] { factors_from_speedups({{"a", 1.0}}, "zz"); }) == ErrorKind::kInvariant);
  CHECK(kind_of([] { factors_from_speedups({{"a", 1.0}, {"b", 0.0}}, "a"); }) ==
        ErrorKind::kInvariant);
  CHECK(kind_of([] { factors_from_speedups({{"a", 2.0}}, "a"); }) == ErrorKind::kInvariant);
}

TEST_CASE("validation rejects broken lanes and clusters") {
  CHECK(kind_of([] { validate(LaneSpec{"l", 0, 1}); }) == ErrorKind::kInvariant);
  CHECK(kind_of([] { validate(LaneSpec{"l", 1, 0}); }) == ErrorKind::kInvariant);
  CHECK(kind_of([] { validate(std::vector<LaneSpec>{{"l", 1, 1}, {"l", 2, 2}}); }) ==
        ErrorKind::kInvariant);
  CHECK(kind_of([] { validate(ClusterSpec{}); }) == ErrorKind::kInvariant);
  ClusterSpec dup{{{"a", 1.0, "h"}, {"a", 1.0, "h"}}};
  CHECK(kind_of([&] { validate(dup); }) == ErrorKind::kInvariant);
  ClusterSpec negative{{{"a", 1.0, "h"}}, -1.0};
  CHECK(kind_of([&] { validate(negative); }) == ErrorKind::kInvariant);
}

TEST_CASE("synthetic probes recover the true factors without noise") {
  const std::vector<DeviceSpec> devices = {
      {"k80", 6.0, "a"}, {"m40", 1.9355, "b"}, {"v100", 1.0, "c"}};
  const auto probes = synthetic_probes(devices, {2.5, 0.0, 10}, 3);
  const auto f = calibrate(probes);
  CHECK(f.at("k80") == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(f.at("m40") == doctest::Approx(1.9355).epsilon(1e-12));
  CHECK(f.at("v100") == 1.0);

  // Same seed, same stream.
  const auto a = synthetic_probes(devices, {1.0, 0.05, 10}, 11);
  const auto b = synthetic_probes(devices, {1.0, 0.05, 10}, 11);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].runtime == b[i].runtime);
}

TEST_CASE("rng helpers stay in range and are seed-deterministic") {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 1000; ++i) {
    const int v = a.uniform_int(1, 5);
    CHECK(v == b.uniform_int(1, 5));
    CHECK(v >= 1);
    CHECK(v <= 5);
    const double u = a.canonical();
    CHECK(u == b.canonical());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  // Standard normal moments.
  Rng n(17);
  double sum = 0.0;
  double sq = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double z = n.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / count) < 0.01);
  CHECK(std::abs(sq / count - 1.0) < 0.02);
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}
