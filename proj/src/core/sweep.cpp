#include "core/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "core/error.hpp"

namespace lanebal {

EpochReport simulate_scenario(const Scenario& scenario, Mode mode,
                              size_t device_count, const Assignment* assignment) {
  const ClusterSpec cluster = scenario.cluster.prefix(device_count);
  if (mode == Mode::kDataParallel) {
    return sim_data_parallel(
        replica_work(scenario.lanes, scenario.train.per_lane_overhead), cluster,
        scenario.train);
  }
  if (assignment != nullptr) {
    return sim_model_parallel(scenario.lanes, cluster, *assignment,
                              scenario.train);
  }
  // Placement ignores per-lane overhead.
  const Assignment greedy = greedy_partition(scenario.lanes, cluster);
  return sim_model_parallel(scenario.lanes, cluster, greedy, scenario.train);
}

std::vector<SimRow> speedup_curve(const Scenario& scenario,
                                  const std::vector<size_t>& device_counts,
                                  Mode mode) {
  const double baseline = simulate_scenario(scenario, mode, 1).epoch_time;
  std::vector<SimRow> rows;
  rows.reserve(device_counts.size());
  for (size_t g : device_counts) {
    SimRow row{scenario.name, simulate_scenario(scenario, mode, g), 1.0};
    row.speedup = baseline / row.report.epoch_time;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SimRow> sweep(const Scenario& scenario,
                          std::vector<size_t> device_counts,
                          std::vector<int64_t> batches,
                          std::vector<Mode> modes) {
  if (device_counts.empty() || batches.empty() || modes.empty()) {
    throw_input("sweep needs at least one device count, batch and mode");
  }
  device_counts.push_back(1);
  std::sort(device_counts.begin(), device_counts.end());
  device_counts.erase(std::unique(device_counts.begin(), device_counts.end()),
                      device_counts.end());
  std::sort(batches.begin(), batches.end());
  batches.erase(std::unique(batches.begin(), batches.end()), batches.end());
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());

  std::vector<SimRow> rows;
  for (Mode mode : modes) {
    for (size_t g : device_counts) {
      for (int64_t b : batches) {
        Scenario at_batch = scenario;
        at_batch.train.batch_size = b;
        const double baseline = simulate_scenario(at_batch, mode, 1).epoch_time;
        SimRow row{scenario.name, simulate_scenario(at_batch, mode, g), 1.0};
        row.speedup = baseline / row.report.epoch_time;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

namespace {

using Setter = void (*)(ClusterSpec&, double);

struct FreeConstant {
  const char* name;
  Setter set;
};

constexpr FreeConstant kIntraHostSync{
    "intra_host_sync", [](ClusterSpec& c, double v) { c.intra_host_sync = v; }};
constexpr FreeConstant kInterHostPenalty{
    "inter_host_penalty",
    [](ClusterSpec& c, double v) { c.inter_host_penalty = v; }};
constexpr FreeConstant kAllreducePerDevice{
    "allreduce_per_device",
    [](ClusterSpec& c, double v) { c.allreduce_per_device = v; }};
constexpr FreeConstant kAllreduceBase{
    "allreduce_base", [](ClusterSpec& c, double v) { c.allreduce_base = v; }};

bool spans_hosts(const ClusterSpec& cluster, size_t prefix) {
  std::set<std::string> hosts;
  for (size_t d = 0; d < prefix && d < cluster.size(); ++d) {
    hosts.insert(cluster.devices[d].host);
  }
  return hosts.size() > 1;
}

class Objective {
 public:
  Objective(const Scenario& scenario, Mode mode,
            const std::vector<SpeedupObservation>& observations,
            std::vector<FreeConstant> free)
      : scenario_(scenario), mode_(mode), observations_(observations),
        free_(std::move(free)) {
    // Placements do not depend on the overhead constants.
    if (mode_ == Mode::kModelParallel) {
      for (const auto& o : observations_) {
        placements_.push_back(
            greedy_partition(scenario_.lanes, scenario_.cluster.prefix(o.device_count)));
      }
    }
    const EpochReport single = simulate_scenario(scenario_, mode_, 1);
    baseline_ = single.epoch_time;
    upper_ = 100.0 * single.step_time;
  }

  Scenario with(const std::vector<double>& values) const {
    Scenario s = scenario_;
    for (size_t i = 0; i < free_.size(); ++i) free_[i].set(s.cluster, values[i]);
    return s;
  }

  std::vector<double> residuals(const std::vector<double>& values) const {
    const Scenario s = with(values);
    std::vector<double> out;
    out.reserve(observations_.size());
    for (size_t i = 0; i < observations_.size(); ++i) {
      const auto& o = observations_[i];
      const Assignment* placement =
          mode_ == Mode::kModelParallel ? &placements_[i] : nullptr;
      const double t = simulate_scenario(s, mode_, o.device_count, placement).epoch_time;
      out.push_back(baseline_ / t - o.speedup);
    }
    return out;
  }

  double sum_of_squares(const std::vector<double>& values) const {
    double total = 0.0;
    for (double r : residuals(values)) total += r * r;
    return total;
  }

  // Overheads beyond 100 single-device steps only push speedups toward zero.
  double upper() const { return upper_; }

 private:
  const Scenario& scenario_;
  Mode mode_;
  const std::vector<SpeedupObservation>& observations_;
  std::vector<FreeConstant> free_;
  std::vector<Assignment> placements_;
  double baseline_ = 0.0;
  double upper_ = 0.0;
};

// Grid over [0, upper], then repeated re-gridding of the two cells around the
// incumbent until the cell width drops below the resolution floor.
template <typename F>
double grid_refine_1d(F&& f, double upper, double* best_value) {
  constexpr int kCoarse = 200;
  constexpr int kFine = 10;
  const double floor = 1e-13 * std::max(1.0, upper);
  double lo = 0.0;
  double hi = upper;
  double best = 0.0;
  double value = f(0.0);
  int points = kCoarse;
  while (true) {
    const double step = (hi - lo) / points;
    for (int i = 0; i <= points; ++i) {
      const double x = lo + step * i;
      const double v = f(x);
      if (v < value) {
        value = v;
        best = x;
      }
    }
    if (step <= floor || value == 0.0) break;
    lo = std::max(0.0, best - step);
    hi = std::min(upper, best + step);
    points = kFine;
  }
  *best_value = value;
  return best;
}

// Nested one-dimensional searches: each outer candidate is scored by the best
// value reachable over the remaining constants. Follows the narrow valleys
// that correlated constants (base vs per-device allreduce) produce, where a
// joint box zoom can lock onto the wrong cell.
double search(const Objective& objective, std::vector<double>& values, size_t dim) {
  if (dim == values.size()) return objective.sum_of_squares(values);
  const double upper = objective.upper();
  auto profile = [&](double x) {
    values[dim] = x;
    return search(objective, values, dim + 1);
  };
  double best_value = 0.0;
  const double best = grid_refine_1d(profile, upper, &best_value);
  values[dim] = best;
  search(objective, values, dim + 1);
  return best_value;
}

}  // namespace

FitResult fit_overheads(const std::vector<SpeedupObservation>& observations,
                        const Scenario& scenario, Mode mode) {
  if (observations.empty()) throw_input("no observations to fit");
  validate(scenario);
  std::set<size_t> informative;
  bool multi_host = false;
  for (const auto& o : observations) {
    if (o.device_count == 0 || o.device_count > scenario.cluster.size()) {
      throw_input("observation device count " + std::to_string(o.device_count) +
                  " outside the scenario cluster");
    }
    if (!(o.speedup > 0.0)) throw_input("observed speedups must be positive");
    if (o.device_count > 1) informative.insert(o.device_count);
    multi_host = multi_host || spans_hosts(scenario.cluster, o.device_count);
  }
  if (informative.empty()) {
    throw_input("observations need at least one multi-device measurement");
  }

  std::vector<FreeConstant> candidates;
  if (mode == Mode::kModelParallel) {
    candidates.push_back(kIntraHostSync);
    if (multi_host) candidates.push_back(kInterHostPenalty);
  } else {
    candidates = {kAllreducePerDevice, kAllreduceBase};
  }
  candidates.resize(std::min(candidates.size(), informative.size()));

  const Objective objective(scenario, mode, observations, candidates);
  // Overheads beyond 100 single-device steps only push speedups toward zero.
  std::vector<double> best(candidates.size(), 0.0);
  search(objective, best, 0);

  FitResult result;
  for (size_t i = 0; i < candidates.size(); ++i) {
    result.constants.push_back({candidates[i].name, best[i]});
  }
  result.residuals = objective.residuals(best);
  double ss = 0.0;
  for (double r : result.residuals) ss += r * r;
  result.rms = std::sqrt(ss / static_cast<double>(result.residuals.size()));
  result.cluster = objective.with(best).cluster;
  return result;
}

}  // namespace lanebal
