#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crossview/affinity.hpp"
#include "crossview/config.hpp"
#include "crossview/geometry.hpp"
#include "crossview/kernels.hpp"
#include "crossview/skeleton.hpp"
#include "crossview/types.hpp"

namespace crossview {

// Per camera, the unassociated detections of that camera's newest frame.
class UnmatchedPool {
 public:
  explicit UnmatchedPool(std::size_t num_cameras = 0) : frames_(num_cameras) {}

  // Replaces whatever camera `camera` held before.
  void replace(int camera, double timestamp, std::vector<Detection> detections);

  // Drops every camera frame older than `horizon` seconds before `now`.
  void expire(double now, double horizon);

  void remove(std::int64_t detection_id);

  std::vector<const Detection*> items() const;
  const std::vector<Detection>& detections(int camera) const {
    return frames_[static_cast<std::size_t>(camera)].detections;
  }
  std::size_t size() const;
  std::size_t num_cameras() const { return frames_.size(); }

 private:
  struct CameraFrame {
    double timestamp = 0.0;
    std::vector<Detection> detections;
  };
  std::vector<CameraFrame> frames_;
};

struct NewTarget {
  Target target;
  std::vector<std::int64_t> detection_ids;
};

// Clusters the pool with epipolar affinities and creates one target per
// cluster of at least min_views_init detections in which some joint could be
// triangulated. Consumed detections are removed from the pool. Clusters whose
// pose lies within alpha3D (mean joint distance) of a live target in
// `existing` are left in the pool instead of spawning a duplicate.
std::vector<NewTarget> initialize_targets(UnmatchedPool& pool, const CameraSet& cams,
                                          const TrackerConfig& cfg, int num_joints,
                                          std::int64_t& next_id, double now,
                                          Execution exec = Execution::Serial,
                                          std::span<const Target> existing = {});

struct TargetPose {
  std::int64_t id = -1;
  std::vector<std::optional<Vec3>> joints;
  std::vector<std::optional<double>> updated;
};

struct DetectionLabel {
  std::int64_t detection = -1;
  std::int64_t target = -1;
};

struct TrackOutput {
  double timestamp = 0.0;
  int camera = -1;
  std::vector<TargetPose> targets;
  std::vector<DetectionLabel> matches;
  std::vector<std::int64_t> retired;
};

struct TrackerStats {
  std::int64_t steps = 0;
  std::int64_t triangulations = 0;
  double sum_mean_time_diff = 0.0;  // summed per-collection mean (t - t_i)
  std::int64_t targets_created = 0;
  std::int64_t targets_retired = 0;

  double mean_time_diff() const {
    return triangulations > 0 ? sum_mean_time_diff / static_cast<double>(triangulations) : 0.0;
  }
};

// Iterative cross-view tracker: one camera frame per step. Not thread-safe;
// steps must be serialized, but the object may move between threads.
class Tracker {
 public:
  Tracker(CameraSet cams, TrackerConfig cfg, int num_joints = kNumJoints,
          Execution exec = Execution::Serial);

  // Throws ChronologyViolation, UnknownCamera.
  TrackOutput step(const FrameBatch& frame);

  std::vector<std::int64_t> retire_targets(double now);

  const CameraSet& cameras() const { return cams_; }
  const TrackerConfig& config() const { return cfg_; }
  const std::vector<Target>& targets() const { return targets_; }
  const UnmatchedPool& pool() const { return pool_; }
  const TrackerStats& stats() const { return stats_; }
  int num_joints() const { return num_joints_; }

 private:
  void update_targets(const FrameBatch& frame, const std::vector<Match>& accepted);
  TargetPose pose_of(const Target& target) const;

  CameraSet cams_;
  TrackerConfig cfg_;
  int num_joints_;
  Execution exec_;
  std::vector<Target> targets_;
  UnmatchedPool pool_;
  std::vector<std::optional<double>> last_frame_time_;
  std::int64_t next_target_id_ = 1;
  std::int64_t next_detection_id_ = 0;
  TrackerStats stats_;
};

// Records a triangulated joint state and refreshes its velocity estimate.
void commit_joint(JointState& joint, const Vec3& X, double t, int velocity_window);

}  // namespace crossview
