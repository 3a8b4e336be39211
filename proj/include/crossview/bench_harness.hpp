#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "crossview/config.hpp"
#include "crossview/kernels.hpp"
#include "crossview/simulator.hpp"

namespace crossview {

// One "frame" is one update of every camera.
struct BenchRow {
  int cameras = 0;
  int people = 0;
  long steps = 0;
  double frames = 0.0;
  double tracker_ms_per_frame = 0.0;
  double fps = 0.0;
  double p50_us = 0.0;  // per-step latency percentiles
  double p90_us = 0.0;
  double p99_us = 0.0;
  std::optional<double> baseline_ms_per_frame;
};

struct BenchOptions {
  double duration = 4.0;
  bool baseline = false;
  std::uint64_t seed = 7;
  double noise_px = 1.0;
  RigKind rig = RigKind::Ring;
  Execution exec = Execution::Serial;
  int repeats = 1;  // best of n runs
};

ScenarioSpec bench_scenario(int cameras, int people, const BenchOptions& options);

BenchRow run_bench(int cameras, int people, const TrackerConfig& cfg, const BenchOptions& options);

void write_bench_csv_header(std::ostream& out);
void write_bench_csv_row(std::ostream& out, const BenchRow& row);

}  // namespace crossview
