#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "crossview/config.hpp"
#include "crossview/geometry.hpp"
#include "crossview/simulator.hpp"
#include "crossview/skeleton.hpp"
#include "crossview/tracker.hpp"

namespace crossview {

struct PartScore {
  long correct = 0;
  long total = 0;

  double score() const { return total > 0 ? 100.0 * static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
  void add(bool ok) {
    ++total;
    if (ok) ++correct;
  }
};

struct PcpReport {
  std::map<BodyPart, PartScore> parts;
  std::map<int, PartScore> persons;
  std::map<int, std::map<BodyPart, PartScore>> person_parts;
  PartScore overall;
};

struct PcpOptions {
  double alpha = 0.5;
  double match_distance = 0.5;   // m, mean joint error gate for estimate/person pairing
  int min_observed_cameras = 2;  // persons seen by fewer cameras are not scored
};

// Looks up truth frames by (camera, timestamp).
class TruthIndex {
 public:
  explicit TruthIndex(const GroundTruth& truth);

  const TruthFrame* find(int camera, double timestamp) const;
  // Person and camera of a detection; nullopt for unknown ids.
  std::optional<std::pair<int, int>> detection(std::int64_t id) const;
  const GroundTruth& truth() const { return *truth_; }

 private:
  static std::int64_t key(int camera, double timestamp);
  const GroundTruth* truth_;
  std::unordered_map<std::int64_t, std::size_t> frames_;
  std::unordered_map<std::int64_t, std::pair<int, int>> detections_;
};

PcpReport pcp(std::span<const TrackOutput> estimates, const GroundTruth& truth,
              const PcpOptions& options = {}, const std::vector<Bone>& bones = default_bones());

// Scores one pose pair: one entry per bone, true when the mean endpoint
// error is within alpha times the true bone length.
std::vector<bool> pcp_bones(const TargetPose& estimate, const std::vector<Vec3>& truth,
                            double alpha, const std::vector<Bone>& bones = default_bones());

// Latest label per detection id across the output records.
std::unordered_map<std::int64_t, std::int64_t> collect_labels(std::span<const TrackOutput> outputs);

struct AssociationReport {
  std::map<int, PartScore> cameras;  // correct / total detections per camera
  PartScore overall;
};

// A detection is correct when its track's majority person (over all
// detections carrying that track id) is the detection's own person.
// Unlabelled detections count as errors.
AssociationReport association_accuracy(const std::unordered_map<std::int64_t, std::int64_t>& labels,
                                       const GroundTruth& truth);

struct MotCounts {
  long fp = 0;
  long fn = 0;
  long ids = 0;
  long gt = 0;
  long estimates = 0;
  long idtp = 0;

  double mota() const;
  double idf1() const;
};

struct MotReport {
  std::map<int, MotCounts> cameras;
  MotCounts overall;
};

struct MotOptions {
  double dist_threshold = 50.0;  // px
  int min_observed_cameras = 2;
};

// Simplified MOT metrics: each output record's target roots (hip midpoints)
// are projected into the record's camera and matched greedily, nearest first,
// to the truth roots of that frame.
MotReport mot_metrics(std::span<const TrackOutput> estimates, const GroundTruth& truth,
                      const CameraSet& cams, const MotOptions& options = {});

struct FrameRow {
  // One matching frame: ids of estimates and truths, and the root distance
  // matrix in px. Exposed for direct testing of the counting logic.
  std::vector<std::int64_t> estimate_ids;
  std::vector<int> truth_ids;
  std::vector<std::vector<double>> distance;
};

MotCounts mot_from_rows(std::span<const FrameRow> rows, double dist_threshold);

struct SweepRow {
  int n = 1;
  double weighted_pcp = 0.0;
  double unweighted_pcp = 0.0;
  double weighted_time_diff = 0.0;    // mean (t - t_i) per triangulation, s
  double unweighted_time_diff = 0.0;
};

// Keeps every n-th frame of each camera. Cameras start at staggered frame
// offsets so that the kept frames of different cameras interleave.
std::vector<FrameBatch> subsample_stream(std::span<const FrameBatch> stream, int num_cameras, int n);

std::vector<SweepRow> framerate_sweep(std::span<const FrameBatch> stream, const CameraSet& cams,
                                      const GroundTruth& truth, std::span<const int> ns,
                                      const TrackerConfig& cfg, const PcpOptions& options = {});

// Runs a tracker over a preloaded stream.
std::vector<TrackOutput> run_tracker(std::span<const FrameBatch> stream, const CameraSet& cams,
                                     const TrackerConfig& cfg, TrackerStats* stats = nullptr,
                                     Execution exec = Execution::Serial);

}  // namespace crossview
