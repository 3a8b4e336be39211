// crossview: track / simulate / evaluate / bench

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossview/bench_harness.hpp"
#include "crossview/evaluation.hpp"
#include "crossview/io.hpp"
#include "crossview/simulator.hpp"
#include "crossview/tracker.hpp"

namespace cv = crossview;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cv::Error(cv::ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cv::Error(cv::ErrorCode::Io, "cannot open '" + path + "'");
  return in;
}

struct TrackArgs {
  std::string calib, config, input = "-", output = "-";
  bool parallel = false;
};

int run_track(const TrackArgs& a) {
  const cv::CameraSet cams = cv::io::load_calibration(a.calib);
  const cv::TrackerConfig cfg = a.config.empty() ? cv::TrackerConfig{} : cv::io::load_config(a.config);
  cv::Tracker tracker(cams, cfg, cv::kNumJoints, a.parallel ? cv::Execution::Parallel : cv::Execution::Serial);

  std::ifstream in_file;
  std::istream* in = &std::cin;
  if (a.input != "-") {
    in_file = open_in(a.input);
    in = &in_file;
  }
  std::ofstream out_file;
  std::ostream* out = &std::cout;
  if (a.output != "-") {
    out_file = open_out(a.output);
    out = &out_file;
  }

  std::string line;
  long line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const cv::FrameBatch frame = cv::io::frame_from_line(line, cams, tracker.num_joints(), line_no);
    const cv::TrackOutput result = tracker.step(frame);
    *out << cv::io::output_to_line(result, cams) << '\n';
    if (out == &std::cout) out->flush();
  }
  out->flush();
  if (!*out) throw cv::Error(cv::ErrorCode::Io, "write failed");
  return 0;
}

struct SimulateArgs {
  std::string spec, out_dir;
};

int run_simulate(const SimulateArgs& a) {
  const cv::ScenarioSpec spec = cv::io::load_scenario(a.spec);
  const cv::Scenario scenario = cv::generate(spec);
  fs::create_directories(a.out_dir);
  {
    auto out = open_out((fs::path(a.out_dir) / "calibration.jsonl").string());
    cv::io::write_calibration(out, scenario.cameras);
  }
  {
    auto out = open_out((fs::path(a.out_dir) / "stream.jsonl").string());
    cv::io::write_frames(out, scenario.stream, scenario.cameras);
  }
  {
    auto out = open_out((fs::path(a.out_dir) / "truth.jsonl").string());
    cv::io::write_truth(out, scenario.truth, scenario.cameras);
  }
  std::cerr << "simulate: " << scenario.cameras.size() << " cameras, " << scenario.stream.size()
            << " frames -> " << a.out_dir << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string truth, tracks, report, calib, stream, config;
  bool mot = false;
  std::vector<int> sweep;
  double mot_threshold = 50.0;
};

int run_evaluate(const EvaluateArgs& a) {
  const cv::CameraSet cams = cv::io::load_calibration(a.calib);
  auto truth_in = open_in(a.truth);
  const cv::GroundTruth truth = cv::io::read_truth(truth_in, cams);
  auto tracks_in = open_in(a.tracks);
  const std::vector<cv::TrackOutput> tracks = cv::io::read_outputs(tracks_in, cams);

  auto out = open_out(a.report);
  out << "metric,scope,value\n";
  const cv::PcpReport pcp = cv::pcp(tracks, truth);
  out << "pcp,overall," << pcp.overall.score() << '\n';
  for (const auto& [part, score] : pcp.parts) out << "pcp,part:" << cv::to_string(part) << ',' << score.score() << '\n';
  for (const auto& [person, score] : pcp.persons) out << "pcp,person:" << person << ',' << score.score() << '\n';

  const cv::AssociationReport assoc = cv::association_accuracy(cv::collect_labels(tracks), truth);
  out << "association_accuracy,overall," << assoc.overall.score() << '\n';
  for (const auto& [camera, score] : assoc.cameras)
    out << "association_accuracy,camera:" << cams[static_cast<std::size_t>(camera)].id() << ',' << score.score() << '\n';
  out << "note,association_accuracy,majority identity per track\n";

  if (a.mot) {
    cv::MotOptions opts;
    opts.dist_threshold = a.mot_threshold;
    const cv::MotReport mot = cv::mot_metrics(tracks, truth, cams, opts);
    auto emit = [&](const std::string& scope, const cv::MotCounts& c) {
      out << "mota," << scope << ',' << c.mota() << '\n';
      out << "idf1," << scope << ',' << c.idf1() << '\n';
      out << "fp," << scope << ',' << c.fp << '\n';
      out << "fn," << scope << ',' << c.fn << '\n';
      out << "ids," << scope << ',' << c.ids << '\n';
    };
    emit("overall", mot.overall);
    for (const auto& [camera, c] : mot.cameras) emit("camera:" + cams[static_cast<std::size_t>(camera)].id(), c);
    out << "note,mot,simplified root-distance matching\n";
  }

  if (!a.sweep.empty()) {
    if (a.stream.empty()) throw cv::Error(cv::ErrorCode::InvalidConfig, "--framerate-sweep needs --stream");
    const cv::TrackerConfig cfg = a.config.empty() ? cv::TrackerConfig{} : cv::io::load_config(a.config);
    auto stream_in = open_in(a.stream);
    const auto stream = cv::io::read_frames(stream_in, cams, cv::kNumJoints);
    const auto rows = cv::framerate_sweep(stream, cams, truth, a.sweep, cfg);
    auto tsv = open_out(a.report + ".sweep.tsv");
    tsv << "n\tweighted_pcp\tunweighted_pcp\tweighted_time_diff_s\tunweighted_time_diff_s\n";
    for (const auto& r : rows) {
      tsv << r.n << '\t' << r.weighted_pcp << '\t' << r.unweighted_pcp << '\t' << r.weighted_time_diff << '\t'
          << r.unweighted_time_diff << '\n';
      out << "sweep_weighted_pcp,n:" << r.n << ',' << r.weighted_pcp << '\n';
      out << "sweep_unweighted_pcp,n:" << r.n << ',' << r.unweighted_pcp << '\n';
    }
  }
  return 0;
}

struct BenchArgs {
  std::vector<int> cameras{4, 8, 16, 32};
  std::vector<int> people{5};
  double duration = 4.0;
  bool baseline = false;
  std::string rig = "ring";
  std::string output = "-";
  std::string config;
  bool parallel = false;
  int repeats = 1;
  std::uint64_t seed = 7;
};

int run_bench_cmd(const BenchArgs& a) {
  const cv::TrackerConfig cfg = a.config.empty() ? cv::TrackerConfig{} : cv::io::load_config(a.config);
  cv::BenchOptions opts;
  opts.duration = a.duration;
  opts.baseline = a.baseline;
  opts.rig = a.rig == "grid" ? cv::RigKind::CeilingGrid : cv::RigKind::Ring;
  opts.exec = a.parallel ? cv::Execution::Parallel : cv::Execution::Serial;
  opts.repeats = a.repeats;
  opts.seed = a.seed;

  std::ofstream out_file;
  std::ostream* out = &std::cout;
  if (a.output != "-") {
    out_file = open_out(a.output);
    out = &out_file;
  }
  cv::write_bench_csv_header(*out);
  for (int p : a.people)
    for (int c : a.cameras) cv::write_bench_csv_row(*out, cv::run_bench(c, p, cfg, opts));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-view multi-person 3D pose tracking from unsynchronized cameras"};
  app.require_subcommand(1);

  TrackArgs track;
  auto* track_cmd = app.add_subcommand("track", "Track a line-delimited detection stream");
  track_cmd->add_option("--calib", track.calib, "Calibration JSONL")->required()->check(CLI::ExistingFile);
  track_cmd->add_option("--config", track.config, "Tracker config (key=value or JSON)")->check(CLI::ExistingFile);
  track_cmd->add_option("--input", track.input, "Detection stream JSONL, '-' for stdin");
  track_cmd->add_option("--output", track.output, "Track output JSONL, '-' for stdout");
  track_cmd->add_flag("--parallel", track.parallel, "Use OpenMP kernels inside each step");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic scene");
  sim_cmd->add_option("--spec", sim.spec, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out-dir", sim.out_dir, "Writes calibration.jsonl, stream.jsonl, truth.jsonl")->required();

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score tracker output against ground truth");
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--tracks", eval.tracks, "Tracker output JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--report", eval.report, "CSV report path")->required();
  eval_cmd->add_option("--calib", eval.calib, "Calibration JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_flag("--mot", eval.mot, "Add simplified MOTA / IDF1 / FP / FN / IDS");
  eval_cmd->add_option("--mot-threshold", eval.mot_threshold, "Root matching distance in px");
  eval_cmd->add_option("--framerate-sweep", eval.sweep, "Subsampling factors n1,n2,...")->delimiter(',');
  eval_cmd->add_option("--stream", eval.stream, "Detection stream for --framerate-sweep");
  eval_cmd->add_option("--config", eval.config, "Tracker config for --framerate-sweep");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Per-frame runtime vs camera count");
  bench_cmd->add_option("--cameras", bench.cameras, "Camera counts")->delimiter(',');
  bench_cmd->add_option("--people", bench.people, "Person counts")->delimiter(',');
  bench_cmd->add_option("--duration", bench.duration, "Simulated seconds per run");
  bench_cmd->add_flag("--baseline", bench.baseline, "Also time the per-frame pairwise baseline");
  bench_cmd->add_option("--rig", bench.rig, "ring or grid")->check(CLI::IsMember({"ring", "grid"}));
  bench_cmd->add_option("--output", bench.output, "CSV path, '-' for stdout");
  bench_cmd->add_option("--config", bench.config, "Tracker config");
  bench_cmd->add_option("--repeats", bench.repeats, "Best of n timing runs");
  bench_cmd->add_option("--seed", bench.seed, "Scenario seed");
  bench_cmd->add_flag("--parallel", bench.parallel, "Use OpenMP kernels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*track_cmd) return run_track(track);
    if (*sim_cmd) return run_simulate(sim);
    if (*eval_cmd) return run_evaluate(eval);
    if (*bench_cmd) return run_bench_cmd(bench);
  } catch (const cv::Error& e) {
    std::cerr << "crossview: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "crossview: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
