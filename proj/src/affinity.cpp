#include "crossview/affinity.hpp"

#include <cmath>
#include <string>

namespace crossview {

void TrackerConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, what);
  };
  require(w2D >= 0.0 && w3D >= 0.0, "w2D and w3D must be >= 0");
  require(alpha2D > 0.0 && alpha3D > 0.0 && alpha2D_epi > 0.0, "alpha thresholds must be > 0");
  require(lambda_a >= 0.0 && lambda_t >= 0.0, "penalty rates must be >= 0");
  require(velocity_window >= 2, "velocity_window must be >= 2");
  require(retire_after > 0.0, "retire_after must be > 0");
  require(min_views_init >= 2, "min_views_init must be >= 2");
  require(min_shared_joints >= 1, "min_shared_joints must be >= 1");
  require(max_exact_partition >= 0, "max_exact_partition must be >= 0");
  require(min_joint_confidence >= 0.0, "min_joint_confidence must be >= 0");
}

double affinity_2d(const Vec2& prev_x, double prev_t, const Vec2& x, double t,
                   const TrackerConfig& cfg) {
  const double dt = t - prev_t;
  if (dt < -kClockEpsilon) {
    throw Error(ErrorCode::ChronologyViolation,
                "2D observation at t=" + std::to_string(t) + " precedes t''=" + std::to_string(prev_t));
  }
  const double dist = (x - prev_x).norm();
  if (dt <= 0.0) return dist == 0.0 ? cfg.w2D : kForbidden;
  return cfg.w2D * (1.0 - dist / (cfg.alpha2D * dt)) * std::exp(-cfg.lambda_a * dt);
}

double affinity_3d(const JointState& joint, const Vec2& x, double t, const CameraView& cam,
                   const TrackerConfig& cfg) {
  if (!joint.has_3d) return 0.0;
  const double dt = t - joint.t3d;
  Vec3 predicted = joint.X;
  if (joint.velocity.valid) predicted += joint.velocity.velocity * dt;
  const double d = point_to_ray_distance(predicted, back_project(cam, x));
  return cfg.w3D * (1.0 - d / cfg.alpha3D) * std::exp(-cfg.lambda_a * std::max(dt, 0.0));
}

VelocityEstimate estimate_velocity(const std::deque<TimedPoint3>& history, int window) {
  VelocityEstimate out;
  const std::size_t n = std::min(history.size(), static_cast<std::size_t>(std::max(window, 0)));
  if (n < 2) return out;
  const std::size_t first = history.size() - n;
  if (history.back().t - history[first].t < 1e-3) return out;

  double mean_t = 0.0;
  Vec3 mean_X = Vec3::Zero();
  for (std::size_t i = first; i < history.size(); ++i) {
    mean_t += history[i].t;
    mean_X += history[i].X;
  }
  mean_t /= static_cast<double>(n);
  mean_X /= static_cast<double>(n);

  double stt = 0.0;
  Vec3 stX = Vec3::Zero();
  for (std::size_t i = first; i < history.size(); ++i) {
    const double dt = history[i].t - mean_t;
    stt += dt * dt;
    stX += dt * (history[i].X - mean_X);
  }
  out.velocity = stX / stt;
  out.valid = true;
  return out;
}

double body_affinity(const Target& target, const Detection& det, const CameraView& cam,
                     const TrackerConfig& cfg) {
  const int K = std::min(target.num_joints(), static_cast<int>(det.joints.size()));
  const auto c = static_cast<std::size_t>(det.camera);
  double score = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& kp = det.joints[static_cast<std::size_t>(k)];
    if (!kp || kp->confidence < cfg.min_joint_confidence) continue;
    const JointState& joint = target.joint(k);
    if (c < joint.last_2d.size() && joint.last_2d[c]) {
      const Observation2D& prev = *joint.last_2d[c];
      score += affinity_2d(prev.x, prev.t, kp->x, det.timestamp, cfg);
    }
    score += affinity_3d(joint, kp->x, det.timestamp, cam, cfg);
  }
  return score;
}

double epipolar_affinity(const Detection& d1, const Detection& d2, const Mat3& F,
                         const TrackerConfig& cfg) {
  if (d1.camera == d2.camera) {
    throw Error(ErrorCode::SameCamera, "epipolar affinity between detections of one camera");
  }
  const std::size_t K = std::min(d1.joints.size(), d2.joints.size());
  double sum = 0.0;
  int shared = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& a = d1.joints[k];
    const auto& b = d2.joints[k];
    if (!a || !b) continue;
    if (a->confidence < cfg.min_joint_confidence || b->confidence < cfg.min_joint_confidence) continue;
    const auto line_in_2 = epipolar_line(F, a->x);
    const auto line_in_1 = epipolar_line(F.transpose(), b->x);
    const double d_right = line_in_2 ? line_in_2->distance(b->x) : 0.0;
    const double d_left = line_in_1 ? line_in_1->distance(a->x) : 0.0;
    sum += 1.0 - (d_left + d_right) / (2.0 * cfg.alpha2D_epi);
    ++shared;
  }
  if (shared < cfg.min_shared_joints || shared == 0) return kForbidden;
  return sum / shared;
}

}  // namespace crossview
