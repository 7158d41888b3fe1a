#include "core/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/simulator.hpp"

namespace lanebal {

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw_invariant("pearson: length mismatch");
  if (xs.size() < 2) throw_invariant("pearson: need at least two points");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw_invariant("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double validate_cost_model(const std::vector<LaneSpec>& lanes,
                           const DeviceSpec& device, double noise_sigma,
                           uint64_t seed) {
  validate(lanes);
  validate(device);
  std::set<double> works;
  for (const auto& lane : lanes) works.insert(lane_work(lane));
  if (lanes.size() < 10 || works.size() < 3) {
    throw_invariant("cost-model validation needs >= 10 lanes and >= 3 distinct works");
  }
  if (!(noise_sigma >= 0.0)) throw_invariant("noise_sigma must be non-negative");

  Rng rng(seed);
  std::vector<double> predicted;
  std::vector<double> measured;
  for (const auto& lane : lanes) {
    const double t = effective_time(lane, device);
    predicted.push_back(t);
    measured.push_back(t * std::exp(noise_sigma * rng.normal()));
  }
  return pearson(predicted, measured);
}

ComparisonReport compare_strategies(const Scenario& scenario,
                                    size_t random_seeds,
                                    double per_lane_overhead,
                                    size_t exact_limit) {
  if (random_seeds < 1) throw_input("need at least one random seed");
  validate(scenario);
  TrainConfig cfg = scenario.train;
  cfg.per_lane_overhead = per_lane_overhead;

  ComparisonReport report;
  report.scenario = scenario.name;
  report.random_seeds = random_seeds;

  auto evaluate = [&](const Assignment& a) {
    StrategyRun run;
    run.strategy = a.strategy;
    run.seed = a.seed;
    run.makespan = load_report(a, scenario.lanes, scenario.cluster, per_lane_overhead).makespan;
    run.step_time = sim_model_parallel(scenario.lanes, scenario.cluster, a, cfg).step_time;
    return run;
  };

  const auto start = std::chrono::steady_clock::now();
  const Assignment greedy = greedy_partition(scenario.lanes, scenario.cluster);
  report.plan_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  report.runs.push_back(evaluate(greedy));
  report.greedy_makespan = report.runs.back().makespan;

  report.runs.push_back(evaluate(round_robin_partition(scenario.lanes, scenario.cluster)));
  report.round_robin_makespan = report.runs.back().makespan;

  if (scenario.lanes.size() <= exact_limit) {
    report.runs.push_back(
        evaluate(exact_partition(scenario.lanes, scenario.cluster, exact_limit)));
    report.exact_makespan = report.runs.back().makespan;
  }

  double sum = 0.0;
  report.random_min = std::numeric_limits<double>::infinity();
  report.random_max = 0.0;
  std::vector<double> random_makespans;
  random_makespans.reserve(random_seeds);
  for (size_t k = 0; k < random_seeds; ++k) {
    report.runs.push_back(evaluate(random_partition(
        scenario.lanes, scenario.cluster, mix_seed(scenario.seed, k))));
    const double m = report.runs.back().makespan;
    random_makespans.push_back(m);
    sum += m;
    report.random_min = std::min(report.random_min, m);
    report.random_max = std::max(report.random_max, m);
  }
  const auto k = static_cast<double>(random_seeds);
  report.random_mean = sum / k;
  // The mean can round just outside [min, max] when all samples are equal.
  report.random_mean = std::clamp(report.random_mean, report.random_min, report.random_max);
  report.single_seed = random_seeds == 1;
  if (!report.single_seed) {
    double ss = 0.0;
    for (double m : random_makespans) ss += (m - report.random_mean) * (m - report.random_mean);
    report.random_stddev = std::sqrt(ss / (k - 1.0));
  }
  report.ratio_random_over_greedy = report.random_mean / report.greedy_makespan;
  for (auto& run : report.runs) run.ratio = run.makespan / report.greedy_makespan;
  return report;
}

double random_over_greedy(const std::vector<LaneSpec>& lanes,
                          const ClusterSpec& cluster, size_t random_seeds,
                          uint64_t seed) {
  if (random_seeds < 1) throw_input("need at least one random seed");
  std::vector<double> works;
  works.reserve(lanes.size());
  for (const auto& lane : lanes) works.push_back(lane_work(lane));

  const double greedy =
      makespan_of(resolve(greedy_partition(lanes, cluster), lanes, cluster), works, cluster);
  double sum = 0.0;
  std::vector<size_t> device_of_lane(lanes.size());
  for (size_t k = 0; k < random_seeds; ++k) {
    // Same stream as random_partition, without building string maps.
    Rng rng(mix_seed(seed, k));
    for (auto& d : device_of_lane) d = rng.below(cluster.size());
    sum += makespan_of(device_of_lane, works, cluster);
  }
  return sum / static_cast<double>(random_seeds) / greedy;
}

RatioCampaign ratio_campaign(size_t lane_count, const ClusterSpec& cluster,
                             const std::vector<uint64_t>& workload_seeds,
                             size_t random_seeds) {
  if (workload_seeds.empty()) throw_input("no workload seeds");
  RatioCampaign out;
  for (uint64_t seed : workload_seeds) {
    const auto lanes = gen_uniform_lanes(lane_count, kPresetWidths, kPresetDepths, seed);
    out.ratios.push_back(random_over_greedy(lanes, cluster, random_seeds, seed));
  }
  double sum = 0.0;
  for (double r : out.ratios) sum += r;
  out.mean = sum / static_cast<double>(out.ratios.size());
  out.min = *std::min_element(out.ratios.begin(), out.ratios.end());
  return out;
}

}  // namespace lanebal
