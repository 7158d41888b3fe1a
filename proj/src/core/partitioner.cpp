#include "core/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace lanebal {
namespace {

constexpr double kRelTol = 1e-9;

double tolerance(double a, double b) {
  return kRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

bool definitely_less(double a, double b) { return a < b - tolerance(a, b); }

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= tolerance(a, b);
}

void check_inputs(const std::vector<LaneSpec>& lanes,
                  const ClusterSpec& cluster) {
  if (lanes.empty()) throw_invariant("lane list is empty");
  validate(lanes);
  validate(cluster);
}

Assignment from_indices(std::string strategy, std::optional<uint64_t> seed,
                        const std::vector<LaneSpec>& lanes,
                        const ClusterSpec& cluster,
                        const std::vector<size_t>& device_of_lane) {
  Assignment out{std::move(strategy), seed, {}};
  out.placements.reserve(lanes.size());
  for (size_t i = 0; i < lanes.size(); ++i) {
    out.placements.push_back(
        {lanes[i].id, cluster.devices[device_of_lane[i]].id});
  }
  return out;
}

// Exhaustive search in lexicographic order of device choices.
class ExactSearch {
 public:
  ExactSearch(std::vector<double> works, const ClusterSpec& cluster,
              std::vector<size_t> incumbent, double incumbent_makespan)
      : works_(std::move(works)),
        best_(std::move(incumbent)),
        best_value_(incumbent_makespan) {
    const size_t m = cluster.size();
    factors_.reserve(m);
    for (const auto& d : cluster.devices) factors_.push_back(d.time_factor);
    load_.assign(m, 0.0);
    count_.assign(m, 0);
    current_.assign(works_.size(), 0);
    suffix_.assign(works_.size() + 1, 0.0);
    for (size_t i = works_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + works_[i];
    twin_.assign(m, m);
    for (size_t d = 0; d < m; ++d) {
      for (size_t p = d; p-- > 0;) {
        if (factors_[p] == factors_[d]) {
          twin_[d] = p;
          break;
        }
      }
    }
  }

  std::vector<size_t> run() {
    search(0, 0.0);
    return best_;
  }

 private:
  // Once a solution has been recorded by the search itself, only strictly
  // better ones may replace it; before that, ties with the greedy incumbent
  // are accepted so the lexicographically first optimum is kept.
  bool can_still_win(double value) const {
    return found_ ? definitely_less(value, best_value_)
                  : !definitely_less(best_value_, value);
  }

  bool capacity_exhausted(size_t next) const {
    double capacity = 0.0;
    const double cap_to = best_value_ + tolerance(best_value_, best_value_);
    for (size_t d = 0; d < load_.size(); ++d) {
      capacity += std::max(0.0, (cap_to - load_[d]) / factors_[d]);
    }
    return definitely_less(capacity, suffix_[next]);
  }

  void search(size_t i, double current_max) {
    if (i == works_.size()) {
      if (can_still_win(current_max)) {
        best_ = current_;
        best_value_ = std::min(best_value_, current_max);
        found_ = true;
      }
      return;
    }
    if (capacity_exhausted(i)) return;
    for (size_t d = 0; d < load_.size(); ++d) {
      // Identical empty devices are interchangeable; only the first is tried.
      if (count_[d] == 0 && twin_[d] < load_.size() && count_[twin_[d]] == 0) {
        continue;
      }
      const double next_load = load_[d] + works_[i] * factors_[d];
      const double next_max = std::max(current_max, next_load);
      if (!can_still_win(next_max)) continue;
      const double saved = load_[d];
      load_[d] = next_load;
      ++count_[d];
      current_[i] = d;
      search(i + 1, next_max);
      --count_[d];
      load_[d] = saved;
    }
  }

  std::vector<double> works_;
  std::vector<double> factors_;
  std::vector<double> load_;
  std::vector<size_t> count_;
  std::vector<size_t> current_;
  std::vector<double> suffix_;
  std::vector<size_t> twin_;
  std::vector<size_t> best_;
  double best_value_;
  bool found_ = false;
};

std::vector<double> works_with_overhead(const std::vector<LaneSpec>& lanes,
                                        double per_lane_overhead) {
  std::vector<double> works;
  works.reserve(lanes.size());
  for (const auto& lane : lanes) works.push_back(lane_work(lane) + per_lane_overhead);
  return works;
}

}  // namespace

Assignment greedy_partition(const std::vector<LaneSpec>& lanes,
                            const ClusterSpec& cluster, GreedyRule rule,
                            double per_lane_overhead) {
  check_inputs(lanes, cluster);
  std::vector<size_t> order(lanes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return lane_work(lanes[a]) > lane_work(lanes[b]);
  });

  const size_t m = cluster.size();
  std::vector<double> load(m, 0.0);
  std::vector<size_t> device_of_lane(lanes.size(), 0);
  for (size_t lane_index : order) {
    const LaneSpec& lane = lanes[lane_index];
    size_t best = 0;
    double best_key = std::numeric_limits<double>::infinity();
    for (size_t d = 0; d < m; ++d) {
      const double increment =
          effective_time(lane, cluster.devices[d], per_lane_overhead);
      const double key =
          rule == GreedyRule::kIncrement ? load[d] + increment : load[d];
      if (d == 0 || definitely_less(key, best_key) ||
          (nearly_equal(key, best_key) &&
           cluster.devices[d].time_factor < cluster.devices[best].time_factor)) {
        best = d;
        best_key = key;
      }
    }
    load[best] += effective_time(lane, cluster.devices[best], per_lane_overhead);
    device_of_lane[lane_index] = best;
  }
  return from_indices(
      rule == GreedyRule::kIncrement ? "greedy" : "greedy-emptiest",
      std::nullopt, lanes, cluster, device_of_lane);
}

Assignment random_partition(const std::vector<LaneSpec>& lanes,
                            const ClusterSpec& cluster, uint64_t seed) {
  check_inputs(lanes, cluster);
  Rng rng(seed);
  std::vector<size_t> device_of_lane(lanes.size());
  for (auto& d : device_of_lane) d = rng.below(cluster.size());
  return from_indices("random", seed, lanes, cluster, device_of_lane);
}

Assignment round_robin_partition(const std::vector<LaneSpec>& lanes,
                                 const ClusterSpec& cluster) {
  check_inputs(lanes, cluster);
  std::vector<size_t> device_of_lane(lanes.size());
  for (size_t i = 0; i < lanes.size(); ++i) device_of_lane[i] = i % cluster.size();
  return from_indices("roundrobin", std::nullopt, lanes, cluster,
                      device_of_lane);
}

Assignment exact_partition(const std::vector<LaneSpec>& lanes,
                           const ClusterSpec& cluster, size_t limit,
                           double per_lane_overhead) {
  check_inputs(lanes, cluster);
  if (lanes.size() > limit) {
    throw Error(ErrorKind::kSolverLimit,
                "instance too large for exact solver (" +
                    std::to_string(lanes.size()) + " lanes, limit " +
                    std::to_string(limit) + ")");
  }
  const Assignment greedy =
      greedy_partition(lanes, cluster, GreedyRule::kIncrement, per_lane_overhead);
  std::vector<size_t> incumbent = resolve(greedy, lanes, cluster);
  std::vector<double> works = works_with_overhead(lanes, per_lane_overhead);
  const double incumbent_makespan = makespan_of(incumbent, works, cluster);
  ExactSearch search(std::move(works), cluster, std::move(incumbent),
                     incumbent_makespan);
  return from_indices("exact", std::nullopt, lanes, cluster, search.run());
}

std::vector<size_t> resolve(const Assignment& assignment,
                            const std::vector<LaneSpec>& lanes,
                            const ClusterSpec& cluster) {
  std::map<std::string, size_t> lane_index;
  for (size_t i = 0; i < lanes.size(); ++i) lane_index[lanes[i].id] = i;
  std::map<std::string, size_t> device_index;
  for (size_t d = 0; d < cluster.size(); ++d) device_index[cluster.devices[d].id] = d;

  constexpr size_t kUnset = std::numeric_limits<size_t>::max();
  std::vector<size_t> out(lanes.size(), kUnset);
  for (const auto& p : assignment.placements) {
    auto lane = lane_index.find(p.lane_id);
    if (lane == lane_index.end()) {
      throw_invariant("assignment references unknown lane " + p.lane_id);
    }
    auto device = device_index.find(p.device_id);
    if (device == device_index.end()) {
      throw_invariant("assignment references unknown device " + p.device_id);
    }
    if (out[lane->second] != kUnset) {
      throw_invariant("lane " + p.lane_id + " assigned more than once");
    }
    out[lane->second] = device->second;
  }
  for (size_t i = 0; i < lanes.size(); ++i) {
    if (out[i] == kUnset) throw_invariant("lane " + lanes[i].id + " is unassigned");
  }
  return out;
}

double makespan_lower_bound(const std::vector<LaneSpec>& lanes,
                            const ClusterSpec& cluster,
                            double per_lane_overhead) {
  double total = 0.0;
  double largest = 0.0;
  for (const auto& lane : lanes) {
    const double w = lane_work(lane) + per_lane_overhead;
    total += w;
    largest = std::max(largest, w);
  }
  double speed = 0.0;
  for (const auto& d : cluster.devices) speed += 1.0 / d.time_factor;
  return std::max(total / speed, largest * cluster.fastest_factor());
}

LoadReport load_report(const Assignment& assignment,
                       const std::vector<LaneSpec>& lanes,
                       const ClusterSpec& cluster, double per_lane_overhead) {
  validate(cluster);
  const std::vector<size_t> device_of_lane = resolve(assignment, lanes, cluster);
  LoadReport report;
  std::vector<double> load(cluster.size(), 0.0);
  for (size_t i = 0; i < lanes.size(); ++i) {
    const size_t d = device_of_lane[i];
    load[d] += effective_time(lanes[i], cluster.devices[d], per_lane_overhead);
  }
  for (size_t d = 0; d < cluster.size(); ++d) {
    report.per_device_load.emplace_back(cluster.devices[d].id, load[d]);
    report.makespan = std::max(report.makespan, load[d]);
  }
  if (lanes.empty()) return report;
  report.lower_bound = makespan_lower_bound(lanes, cluster, per_lane_overhead);
  // The bound is analytic; rounding can put it a hair above a tight makespan.
  report.imbalance = std::max(1.0, report.makespan / report.lower_bound);
  return report;
}

double makespan_of(const std::vector<size_t>& device_of_lane,
                   const std::vector<double>& lane_works,
                   const ClusterSpec& cluster) {
  std::vector<double> load(cluster.size(), 0.0);
  for (size_t i = 0; i < device_of_lane.size(); ++i) {
    const size_t d = device_of_lane[i];
    load[d] += lane_works[i] * cluster.devices[d].time_factor;
  }
  return *std::max_element(load.begin(), load.end());
}

}  // namespace lanebal
