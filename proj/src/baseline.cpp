#include "crossview/baseline.hpp"

#include <algorithm>

#include "crossview/assignment.hpp"
#include "crossview/reconstruction.hpp"

namespace crossview {

std::vector<TargetPose> baseline_frame(std::span<const Detection> detections, const CameraSet& cams,
                                       const TrackerConfig& cfg, int num_joints, Execution exec) {
  std::vector<const Detection*> items;
  items.reserve(detections.size());
  for (const Detection& d : detections) items.push_back(&d);

  const Eigen::MatrixXd a = epipolar_affinity_matrix(items, cams, cfg, exec);
  const Partition partition = partition_cycle_consistent(a, cfg.max_exact_partition);

  std::vector<TargetPose> poses;
  std::vector<JointObservation> obs;
  for (const std::vector<int>& cluster : partition.clusters()) {
    if (cluster.size() < 2) continue;
    TargetPose pose;
    pose.id = static_cast<std::int64_t>(poses.size());
    pose.joints.resize(static_cast<std::size_t>(num_joints));
    pose.updated.resize(static_cast<std::size_t>(num_joints));
    bool any = false;
    for (int k = 0; k < num_joints; ++k) {
      obs.clear();
      double t = 0.0;
      for (int idx : cluster) {
        const Detection& d = *items[static_cast<std::size_t>(idx)];
        if (static_cast<std::size_t>(k) >= d.joints.size()) continue;
        const auto& kp = d.joints[static_cast<std::size_t>(k)];
        if (!kp || kp->confidence < cfg.min_joint_confidence) continue;
        obs.push_back({d.camera, kp->x, d.timestamp, kp->confidence});
        t = std::max(t, d.timestamp);
      }
      const TriangulationResult r = triangulate(obs, cams);
      if (!r.ok()) continue;
      pose.joints[static_cast<std::size_t>(k)] = r.X;
      pose.updated[static_cast<std::size_t>(k)] = t;
      any = true;
    }
    if (any) poses.push_back(std::move(pose));
  }
  return poses;
}

std::vector<TrackOutput> baseline_stream(std::span<const FrameBatch> stream, const CameraSet& cams,
                                         const TrackerConfig& cfg, int num_joints, Execution exec) {
  std::vector<std::vector<const FrameBatch*>> per_camera(cams.size());
  for (const FrameBatch& f : stream) {
    if (f.camera < 0 || static_cast<std::size_t>(f.camera) >= cams.size()) {
      throw Error(ErrorCode::UnknownCamera, "camera index " + std::to_string(f.camera));
    }
    per_camera[static_cast<std::size_t>(f.camera)].push_back(&f);
  }
  std::size_t groups = 0;
  for (const auto& frames : per_camera) groups = std::max(groups, frames.size());

  std::vector<TrackOutput> out;
  out.reserve(groups);
  std::vector<Detection> detections;
  for (std::size_t n = 0; n < groups; ++n) {
    detections.clear();
    TrackOutput rec;
    for (const auto& frames : per_camera) {
      if (n >= frames.size()) continue;
      const FrameBatch& f = *frames[n];
      if (rec.camera < 0 || f.timestamp >= rec.timestamp) {
        rec.timestamp = f.timestamp;
        rec.camera = f.camera;
      }
      for (Detection d : f.detections) {
        d.camera = f.camera;
        d.timestamp = f.timestamp;
        detections.push_back(std::move(d));
      }
    }
    rec.targets = baseline_frame(detections, cams, cfg, num_joints, exec);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace crossview
