#include "crossview/bench_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "crossview/baseline.hpp"
#include "crossview/tracker.hpp"

namespace crossview {

namespace {

using Clock = std::chrono::steady_clock;

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) ;
  return v[std::min(v.size() - 1, idx == 0 ? 0 : idx - 1)];
}

}  // namespace

ScenarioSpec bench_scenario(int cameras, int people, const BenchOptions& options) {
  ScenarioSpec spec;
  spec.people = people;
  spec.motion = MotionKind::Waypoint;
  spec.area_x = 6.0;
  spec.area_y = 6.0;
  spec.noise_px = options.noise_px;
  spec.duration = options.duration;
  spec.seed = options.seed;
  spec.rig.kind = options.rig;
  if (options.rig == RigKind::Ring) {
    spec.rig.count = cameras;
    spec.rig.radius = 6.0;
    spec.rig.height = 2.8;
  } else {
    // Closest to square grid with exactly `cameras` cells.
    int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(cameras))));
    while (rows > 1 && cameras % rows != 0) --rows;
    spec.rig.grid_rows = rows;
    spec.rig.grid_cols = cameras / rows;
    spec.rig.height = 3.5;
  }
  return spec;
}

BenchRow run_bench(int cameras, int people, const TrackerConfig& cfg, const BenchOptions& options) {
  const Scenario scenario = generate(bench_scenario(cameras, people, options));
  BenchRow row;
  row.cameras = static_cast<int>(scenario.cameras.size());
  row.people = people;
  row.steps = static_cast<long>(scenario.stream.size());
  row.frames = static_cast<double>(row.steps) / row.cameras;

  double best_total = std::numeric_limits<double>::infinity();
  std::vector<double> best_latencies;
  for (int rep = 0; rep < std::max(1, options.repeats); ++rep) {
    Tracker tracker(scenario.cameras, cfg, kNumJoints, options.exec);
    std::vector<double> latencies;
    latencies.reserve(scenario.stream.size());
    const auto start = Clock::now();
    for (const FrameBatch& f : scenario.stream) {
      const auto t0 = Clock::now();
      const TrackOutput out = tracker.step(f);
      latencies.push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
    }
    const double total = std::chrono::duration<double>(Clock::now() - start).count();
    if (total < best_total) {
      best_total = total;
      best_latencies = std::move(latencies);
    }
  }
  row.tracker_ms_per_frame = 1e3 * best_total / row.frames;
  row.fps = row.frames / best_total;
  row.p50_us = percentile(best_latencies, 0.50);
  row.p90_us = percentile(best_latencies, 0.90);
  row.p99_us = percentile(best_latencies, 0.99);

  if (options.baseline) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t groups = 0;
    for (int rep = 0; rep < std::max(1, options.repeats); ++rep) {
      const auto start = Clock::now();
      const auto out = baseline_stream(scenario.stream, scenario.cameras, cfg, kNumJoints, options.exec);
      best = std::min(best, std::chrono::duration<double>(Clock::now() - start).count());
      groups = out.size();
    }
    row.baseline_ms_per_frame = 1e3 * best / static_cast<double>(std::max<std::size_t>(groups, 1));
  }
  return row;
}

void write_bench_csv_header(std::ostream& out) {
  out << "cameras,people,steps,frames,tracker_ms_per_frame,fps,p50_us,p90_us,p99_us,baseline_ms_per_frame\n";
}

void write_bench_csv_row(std::ostream& out, const BenchRow& row) {
  out << row.cameras << ',' << row.people << ',' << row.steps << ',' << row.frames << ','
      << row.tracker_ms_per_frame << ',' << row.fps << ',' << row.p50_us << ',' << row.p90_us << ','
      << row.p99_us << ',';
  if (row.baseline_ms_per_frame) out << *row.baseline_ms_per_frame;
  out << '\n';
}

}  // namespace crossview
