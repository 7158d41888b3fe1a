#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "core/error.hpp"
#include "core/partitioner.hpp"
#include "core/rng.hpp"
#include "oracle.hpp"

using namespace lanebal;

namespace {

// Width 1 lanes so lane_work equals depth.
std::vector<LaneSpec> lanes_of(const std::vector<int>& works) {
  std::vector<LaneSpec> lanes;
  for (size_t i = 0; i < works.size(); ++i) {
    lanes.push_back({"l" + std::to_string(i), 1, works[i]});
  }
  return lanes;
}

ClusterSpec cluster_of(const std::vector<double>& factors) {
  ClusterSpec c;
  for (size_t i = 0; i < factors.size(); ++i) {
    c.devices.push_back({"d" + std::to_string(i), factors[i], "h"});
  }
  return c;
}

std::vector<double> works_of(const std::vector<LaneSpec>& lanes) {
  std::vector<double> w;
  for (const auto& l : lanes) w.push_back(lane_work(l));
  return w;
}

std::vector<double> factors_of(const ClusterSpec& c) {
  std::vector<double> f;
  for (const auto& d : c.devices) f.push_back(d.time_factor);
  return f;
}

double span(const Assignment& a, const std::vector<LaneSpec>& lanes, const ClusterSpec& c) {
  return load_report(a, lanes, c).makespan;
}

struct Instance {
  std::vector<LaneSpec> lanes;
  ClusterSpec cluster;
};

Instance random_instance(Rng& rng, size_t max_lanes, size_t max_devices, bool identical) {
  const size_t n = 1 + rng.below(max_lanes);
  const size_t m = 2 + rng.below(max_devices - 1);
  Instance in;
  for (size_t i = 0; i < n; ++i) {
    in.lanes.push_back({"l" + std::to_string(i), rng.uniform_int(1, 5), rng.uniform_int(1, 5)});
  }
  std::vector<double> f(m, 1.0);
  if (!identical) {
    for (auto& x : f) x = 1.0 + 5.0 * rng.canonical();
  }
  in.cluster = cluster_of(f);
  return in;
}

}  // namespace

TEST_CASE("greedy on the two-device example") {
  const auto lanes = lanes_of({5, 4, 3, 3, 3});
  const auto c = cluster_of({1.0, 1.0});
  const auto a = greedy_partition(lanes, c);
  CHECK(a.strategy == "greedy");
  CHECK_FALSE(a.seed.has_value());
  const auto r = load_report(a, lanes, c);
  CHECK(r.per_device_load[0].second == 8.0);
  CHECK(r.per_device_load[1].second == 10.0);
  CHECK(r.makespan == 10.0);

  const auto bf = oracle::brute_force(works_of(lanes), factors_of(c));
  CHECK(bf.makespan == 9.0);
  CHECK(r.lower_bound == doctest::Approx(bf.makespan));
  CHECK(r.imbalance == doctest::Approx(10.0 / 9.0));
}

TEST_CASE("greedy prefers the fast device on heterogeneous input") {
  const auto lanes = lanes_of({4, 2});
  const auto c = cluster_of({1.0, 2.0});
  const auto a = greedy_partition(lanes, c);
  CHECK(span(a, lanes, c) == 4.0);
  CHECK(a.placements[0].device_id == "d0");
  CHECK(a.placements[1].device_id == "d1");
}

TEST_CASE("greedy tie-breaking") {
  SUBCASE("equal loads go to the faster device") {
    const auto lanes = lanes_of({1});
    const auto a = greedy_partition(lanes, cluster_of({1.5, 1.0}), GreedyRule::kEmptiest);
    CHECK(a.placements[0].device_id == "d1");
  }
  SUBCASE("identical devices fall back to input order") {
    const auto lanes = lanes_of({3, 3, 3, 3});
    const auto a = greedy_partition(lanes, cluster_of({1, 1, 1, 1}));
    for (size_t i = 0; i < 4; ++i) CHECK(a.placements[i].device_id == "d" + std::to_string(i));
  }
  SUBCASE("equal works keep lane input order") {
    const auto lanes = lanes_of({2, 5, 2});
    const auto a = greedy_partition(lanes, cluster_of({1, 1}));
    CHECK(a.placements[1].device_id == "d0");
    CHECK(a.placements[0].device_id == "d1");
    CHECK(a.placements[2].device_id == "d1");
  }
}

TEST_CASE("greedy rules agree on identical devices") {
  Rng rng(314);
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng, 14, 4, true);
    const auto inc = greedy_partition(in.lanes, in.cluster, GreedyRule::kIncrement);
    const auto emp = greedy_partition(in.lanes, in.cluster, GreedyRule::kEmptiest);
    CHECK(inc.placements == emp.placements);
    CHECK(emp.strategy == "greedy-emptiest");
  }
}

TEST_CASE("emptiest rule can lose to the increment rule") {
  // The literal rule puts the big lane on the idle but slow device.
  const auto lanes = lanes_of({10, 1});
  const auto c = cluster_of({1.0, 6.0});
  const auto emp = greedy_partition(lanes, c, GreedyRule::kEmptiest);
  const auto inc = greedy_partition(lanes, c, GreedyRule::kIncrement);
  CHECK(span(inc, lanes, c) <= span(emp, lanes, c));
}

TEST_CASE("round robin deals cyclically") {
  const auto lanes = lanes_of({9, 1, 9, 1});
  const auto c = cluster_of({1, 1});
  const auto a = round_robin_partition(lanes, c);
  CHECK(a.strategy == "roundrobin");
  const auto r = load_report(a, lanes, c);
  CHECK(r.per_device_load[0].second == 18.0);
  CHECK(r.per_device_load[1].second == 2.0);

  const auto three = round_robin_partition(lanes_of({1, 2, 3}), cluster_of({1, 1, 1}));
  for (size_t i = 0; i < 3; ++i) CHECK(three.placements[i].device_id == "d" + std::to_string(i));
}

TEST_CASE("random partition") {
  const auto lanes = lanes_of(std::vector<int>(24, 1));
  const auto c = cluster_of({1, 1, 1, 1});

  SUBCASE("single device takes everything") {
    const auto a = random_partition(lanes, cluster_of({2.0}), 77);
    for (const auto& p : a.placements) CHECK(p.device_id == "d0");
  }
  SUBCASE("seed determinism") {
    CHECK(random_partition(lanes, c, 42) == random_partition(lanes, c, 42));
    CHECK(random_partition(lanes, c, 42).seed == std::optional<uint64_t>(42));
    CHECK_FALSE(random_partition(lanes, c, 42).placements ==
                random_partition(lanes, c, 43).placements);
  }
  SUBCASE("per-device counts average to n / m") {
    std::map<std::string, double> counts;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
      for (const auto& p : random_partition(lanes, c, s).placements) counts[p.device_id] += 1;
    }
    for (const auto& [dev, total] : counts) {
      CHECK(total / seeds == doctest::Approx(6.0).epsilon(0.5 / 6.0));
    }
  }
}

TEST_CASE("exact solver matches brute force on the fixed examples") {
  {
    const auto lanes = lanes_of({5, 4, 3, 3, 3});
    const auto c = cluster_of({1, 1});
    const auto a = exact_partition(lanes, c);
    CHECK(a.strategy == "exact");
    CHECK(span(a, lanes, c) == 9.0);
    CHECK(span(a, lanes, c) == oracle::brute_force(works_of(lanes), factors_of(c)).makespan);
  }
  {
    const auto lanes = lanes_of({4, 2});
    const auto c = cluster_of({1, 2});
    const auto a = exact_partition(lanes, c);
    CHECK(span(a, lanes, c) == 4.0);
    CHECK(span(a, lanes, c) == oracle::brute_force(works_of(lanes), factors_of(c)).makespan);
  }
  {
    // n identical lanes on n identical devices.
    const auto lanes = lanes_of({7, 7, 7, 7, 7});
    const auto c = cluster_of({1, 1, 1, 1, 1});
    const auto a = exact_partition(lanes, c);
    CHECK(span(a, lanes, c) == 7.0);
    for (size_t i = 0; i < 5; ++i) CHECK(a.placements[i].device_id == "d" + std::to_string(i));
  }
}

TEST_CASE("exact solver limit") {
  const auto lanes = lanes_of(std::vector<int>(17, 2));
  const auto c = cluster_of({1, 1});
  try {
    exact_partition(lanes, c);
    FAIL("expected solver limit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSolverLimit);
    CHECK(std::string(e.what()).find("instance too large for exact solver") !=
          std::string::npos);
  }
  CHECK_NOTHROW(exact_partition(lanes, c, 17));
}

TEST_CASE("exact solver equals brute force, including the chosen optimum") {
  Rng rng(2024);
  for (int t = 0; t < 300; ++t) {
    const auto in = random_instance(rng, 8, 3, t % 2 == 0);
    const auto a = exact_partition(in.lanes, in.cluster);
    const auto bf = oracle::brute_force(works_of(in.lanes), factors_of(in.cluster));
    const auto idx = resolve(a, in.lanes, in.cluster);
    CHECK(span(a, in.lanes, in.cluster) == doctest::Approx(bf.makespan).epsilon(1e-12));
    CHECK(idx == bf.assignment);
  }
}

TEST_CASE("Graham bound on identical devices") {
  Rng rng(4242);
  for (int t = 0; t < 300; ++t) {
    const auto in = random_instance(rng, 12, 4, true);
    const double g = span(greedy_partition(in.lanes, in.cluster), in.lanes, in.cluster);
    const double opt = oracle::brute_force(works_of(in.lanes), factors_of(in.cluster)).makespan;
    const double m = static_cast<double>(in.cluster.size());
    CHECK(g >= opt - 1e-9);
    CHECK(g <= (4.0 / 3.0 - 1.0 / (3.0 * m)) * opt + 1e-9);
  }
}

TEST_CASE("heterogeneous safety bound") {
  Rng rng(777);
  for (int t = 0; t < 300; ++t) {
    const auto in = random_instance(rng, 10, 3, false);
    const double g = span(greedy_partition(in.lanes, in.cluster), in.lanes, in.cluster);
    const double opt = oracle::brute_force(works_of(in.lanes), factors_of(in.cluster)).makespan;
    CHECK(g >= opt - 1e-9);
    CHECK(g <= 2.0 * opt + 1e-9);
  }
}

TEST_CASE("every strategy is bounded below by the optimum") {
  Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    const auto in = random_instance(rng, 9, 3, t % 3 == 0);
    const double opt = span(exact_partition(in.lanes, in.cluster), in.lanes, in.cluster);
    CHECK(span(random_partition(in.lanes, in.cluster, t), in.lanes, in.cluster) >= opt - 1e-9);
    CHECK(span(round_robin_partition(in.lanes, in.cluster), in.lanes, in.cluster) >=
          opt - 1e-9);
    CHECK(makespan_lower_bound(in.lanes, in.cluster) <= opt + 1e-9);
  }
}

TEST_CASE("greedy choice is scale invariant") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto in = random_instance(rng, 12, 4, t % 2 == 0);
    // Doubling width quadruples every lane's work.
    auto scaled = in.lanes;
    for (auto& l : scaled) l.width *= 2;
    CHECK(greedy_partition(in.lanes, in.cluster).placements ==
          greedy_partition(scaled, in.cluster).placements);
  }
}

TEST_CASE("permuting identical devices relabels the assignment") {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    auto in = random_instance(rng, 12, 4, true);
    auto permuted = in.cluster;
    std::reverse(permuted.devices.begin(), permuted.devices.end());
    const auto a = greedy_partition(in.lanes, in.cluster);
    const auto b = greedy_partition(in.lanes, permuted);
    // Same position in input order means same bin.
    const auto ia = resolve(a, in.lanes, in.cluster);
    const auto ib = resolve(b, in.lanes, permuted);
    CHECK(ia == ib);
    CHECK(load_report(a, in.lanes, in.cluster).makespan ==
          load_report(b, in.lanes, permuted).makespan);
  }
}

TEST_CASE("every strategy returns a total assignment") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto in = random_instance(rng, 12, 4, false);
    for (const auto& a : {greedy_partition(in.lanes, in.cluster),
                          greedy_partition(in.lanes, in.cluster, GreedyRule::kEmptiest),
                          random_partition(in.lanes, in.cluster, t),
                          round_robin_partition(in.lanes, in.cluster),
                          exact_partition(in.lanes, in.cluster)}) {
      REQUIRE(a.placements.size() == in.lanes.size());
      for (size_t i = 0; i < in.lanes.size(); ++i) {
        CHECK(a.placements[i].lane_id == in.lanes[i].id);
      }
      CHECK_NOTHROW(resolve(a, in.lanes, in.cluster));
    }
  }
}

TEST_CASE("load report edge cases and errors") {
  const auto lanes = lanes_of({3});
  const auto c = cluster_of({2.0, 1.0});
  Assignment fast{"manual", std::nullopt, {{"l0", "d1"}}};
  CHECK(load_report(fast, lanes, c).imbalance == 1.0);

  const auto many = lanes_of({1, 2, 3, 4});
  const auto one = cluster_of({3.0});
  CHECK(load_report(greedy_partition(many, one), many, one).imbalance == 1.0);

  CHECK(load_report(fast, lanes, c, 1.0).makespan == 4.0);

  Assignment dangling{"manual", std::nullopt, {{"l0", "zz"}}};
  Assignment unknown{"manual", std::nullopt, {{"nope", "d0"}}};
  Assignment twice{"manual", std::nullopt, {{"l0", "d0"}, {"l0", "d1"}}};
  Assignment missing{"manual", std::nullopt, {}};
  for (const auto* bad : {&dangling, &unknown, &twice, &missing}) {
    try {
      load_report(*bad, lanes, c);
      FAIL("expected invariant error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kInvariant);
    }
  }
}

TEST_CASE("partitioners reject empty inputs") {
  const auto lanes = lanes_of({1});
  const ClusterSpec empty_cluster;
  CHECK_THROWS_AS(greedy_partition({}, cluster_of({1})), Error);
  CHECK_THROWS_AS(greedy_partition(lanes, empty_cluster), Error);
  CHECK_THROWS_AS(random_partition({}, cluster_of({1}), 1), Error);
  CHECK_THROWS_AS(round_robin_partition(lanes, empty_cluster), Error);
}
