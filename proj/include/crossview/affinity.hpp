#pragma once

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "crossview/config.hpp"
#include "crossview/geometry.hpp"
#include "crossview/types.hpp"

namespace crossview {

struct TimedPoint3 {
  double t;
  Vec3 X;
};

struct Observation2D {
  Vec2 x;
  double confidence;
  double t;
};

struct VelocityEstimate {
  Vec3 velocity = Vec3::Zero();
  bool valid = false;
};

// Per-joint state of a tracked target.
struct JointState {
  bool has_3d = false;
  Vec3 X = Vec3::Zero();
  double t3d = 0.0;  // last 3D update
  VelocityEstimate velocity;
  std::vector<std::optional<Observation2D>> last_2d;  // indexed by camera
  std::deque<TimedPoint3> history;                    // sorted by time
};

class Target {
 public:
  Target(std::int64_t id, int num_joints, int num_cameras, double created)
      : id_(id), joints_(static_cast<std::size_t>(num_joints)), created_(created),
        last_matched_(created) {
    for (auto& j : joints_) j.last_2d.resize(static_cast<std::size_t>(num_cameras));
  }

  std::int64_t id() const { return id_; }
  double created() const { return created_; }
  double last_matched() const { return last_matched_; }
  void set_last_matched(double t) { last_matched_ = t; }

  int num_joints() const { return static_cast<int>(joints_.size()); }
  const JointState& joint(int k) const { return joints_[static_cast<std::size_t>(k)]; }
  JointState& joint(int k) { return joints_[static_cast<std::size_t>(k)]; }
  const std::vector<JointState>& joints() const { return joints_; }

  bool has_any_3d() const {
    for (const auto& j : joints_)
      if (j.has_3d) return true;
    return false;
  }

 private:
  std::int64_t id_;
  std::vector<JointState> joints_;
  double created_;
  double last_matched_;
};

// A_2D: same-camera displacement score. Returns kForbidden when the two
// observations share a timestamp but differ in position. Throws
// ChronologyViolation if t precedes prev_t by more than the clock epsilon.
double affinity_2d(const Vec2& prev_x, double prev_t, const Vec2& x, double t,
                   const TrackerConfig& cfg);

// A_3D: distance between the motion-predicted joint and the detection's ray.
// Returns 0 for a joint that has never been triangulated.
double affinity_3d(const JointState& joint, const Vec2& x, double t, const CameraView& cam,
                   const TrackerConfig& cfg);

// Linear least-squares slope of the most recent `window` samples.
VelocityEstimate estimate_velocity(const std::deque<TimedPoint3>& history, int window);

double body_affinity(const Target& target, const Detection& det, const CameraView& cam,
                     const TrackerConfig& cfg);

// Mean symmetric epipolar score over joints visible in both detections;
// kForbidden below min_shared_joints. F maps d1's image to d2's image.
// Throws SameCamera.
double epipolar_affinity(const Detection& d1, const Detection& d2, const Mat3& F,
                         const TrackerConfig& cfg);

}  // namespace crossview
