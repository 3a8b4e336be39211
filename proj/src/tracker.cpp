#include "crossview/tracker.hpp"

#include <algorithm>
#include <string>

#include "crossview/assignment.hpp"
#include "crossview/reconstruction.hpp"

namespace crossview {

void UnmatchedPool::replace(int camera, double timestamp, std::vector<Detection> detections) {
  auto& f = frames_[static_cast<std::size_t>(camera)];
  f.timestamp = timestamp;
  f.detections = std::move(detections);
}

void UnmatchedPool::expire(double now, double horizon) {
  for (auto& f : frames_)
    if (!f.detections.empty() && now - f.timestamp > horizon) f.detections.clear();
}

void UnmatchedPool::remove(std::int64_t detection_id) {
  for (auto& f : frames_) {
    std::erase_if(f.detections, [&](const Detection& d) { return d.id == detection_id; });
  }
}

std::vector<const Detection*> UnmatchedPool::items() const {
  std::vector<const Detection*> out;
  for (const auto& f : frames_)
    for (const auto& d : f.detections) out.push_back(&d);
  return out;
}

std::size_t UnmatchedPool::size() const {
  std::size_t n = 0;
  for (const auto& f : frames_) n += f.detections.size();
  return n;
}

void commit_joint(JointState& joint, const Vec3& X, double t, int velocity_window) {
  joint.has_3d = true;
  joint.X = X;
  joint.t3d = t;
  joint.history.push_back({t, X});
  while (joint.history.size() > static_cast<std::size_t>(velocity_window)) joint.history.pop_front();
  joint.velocity = estimate_velocity(joint.history, velocity_window);
}

namespace {

bool usable(const std::optional<Keypoint>& kp, const TrackerConfig& cfg) {
  return kp && kp->confidence >= cfg.min_joint_confidence;
}

// A cluster that lands on a live target is a re-detection of that target
// (e.g. one whose body affinity dipped below the threshold for a frame), not a
// new person.
bool duplicates_existing(const Target& candidate, std::span<const Target> existing, double now,
                         const TrackerConfig& cfg) {
  for (const Target& other : existing) {
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < std::min(candidate.num_joints(), other.num_joints()); ++k) {
      const JointState& a = candidate.joint(k);
      const JointState& b = other.joint(k);
      if (!a.has_3d || !b.has_3d) continue;
      Vec3 predicted = b.X;
      if (b.velocity.valid) predicted += b.velocity.velocity * std::max(now - b.t3d, 0.0);
      sum += (a.X - predicted).norm();
      ++n;
    }
    if (n > 0 && sum / n < cfg.alpha3D) return true;
  }
  return false;
}

}  // namespace

std::vector<NewTarget> initialize_targets(UnmatchedPool& pool, const CameraSet& cams,
                                          const TrackerConfig& cfg, int num_joints,
                                          std::int64_t& next_id, double now, Execution exec,
                                          std::span<const Target> existing) {
  std::vector<NewTarget> created;
  const std::vector<const Detection*> items = pool.items();
  if (items.size() < static_cast<std::size_t>(cfg.min_views_init)) return created;

  const Eigen::MatrixXd a = epipolar_affinity_matrix(items, cams, cfg, exec);
  const Partition partition = partition_cycle_consistent(a, cfg.max_exact_partition);

  std::vector<std::int64_t> consumed;
  for (const std::vector<int>& cluster : partition.clusters()) {
    if (cluster.size() < static_cast<std::size_t>(cfg.min_views_init)) continue;

    Target target(next_id, num_joints, static_cast<int>(cams.size()), now);
    std::vector<JointObservation> obs;
    for (int k = 0; k < num_joints; ++k) {
      obs.clear();
      for (int idx : cluster) {
        const Detection& d = *items[static_cast<std::size_t>(idx)];
        if (static_cast<std::size_t>(k) >= d.joints.size()) continue;
        const auto& kp = d.joints[static_cast<std::size_t>(k)];
        if (!usable(kp, cfg)) continue;
        obs.push_back({d.camera, kp->x, d.timestamp, kp->confidence});
        target.joint(k).last_2d[static_cast<std::size_t>(d.camera)] =
            Observation2D{kp->x, kp->confidence, d.timestamp};
      }
      if (obs.size() < 2) continue;
      const TriangulationResult r = triangulate(obs, cams);
      if (!r.ok()) continue;
      double t = obs.front().t;
      for (const auto& o : obs) t = std::max(t, o.t);
      commit_joint(target.joint(k), r.X, t, cfg.velocity_window);
    }
    if (!target.has_any_3d() || duplicates_existing(target, existing, now, cfg)) continue;

    NewTarget nt{std::move(target), {}};
    for (int idx : cluster) nt.detection_ids.push_back(items[static_cast<std::size_t>(idx)]->id);
    consumed.insert(consumed.end(), nt.detection_ids.begin(), nt.detection_ids.end());
    created.push_back(std::move(nt));
    ++next_id;
  }
  for (std::int64_t id : consumed) pool.remove(id);
  return created;
}

Tracker::Tracker(CameraSet cams, TrackerConfig cfg, int num_joints, Execution exec)
    : cams_(std::move(cams)), cfg_(cfg), num_joints_(num_joints), exec_(exec),
      pool_(cams_.size()), last_frame_time_(cams_.size()) {
  cfg_.validate();
}

TrackOutput Tracker::step(const FrameBatch& input) {
  if (input.camera < 0 || static_cast<std::size_t>(input.camera) >= cams_.size()) {
    throw Error(ErrorCode::UnknownCamera, "camera index " + std::to_string(input.camera));
  }
  const auto c = static_cast<std::size_t>(input.camera);
  const double t = input.timestamp;
  if (last_frame_time_[c] && t < *last_frame_time_[c] - kClockEpsilon) {
    throw Error(ErrorCode::ChronologyViolation,
                "camera '" + cams_[c].id() + "' went back in time from " +
                    std::to_string(*last_frame_time_[c]) + " to " + std::to_string(t));
  }
  last_frame_time_[c] = std::max(t, last_frame_time_[c].value_or(t));
  ++stats_.steps;

  FrameBatch frame = input;
  for (Detection& d : frame.detections) {
    d.camera = input.camera;
    d.timestamp = t;
    if (d.id < 0) d.id = next_detection_id_++;
    else next_detection_id_ = std::max(next_detection_id_, d.id + 1);
  }

  TrackOutput out;
  out.timestamp = t;
  out.camera = input.camera;

  // Cross-view association against retained targets.
  const AffinityMatrix A = body_affinity_matrix(targets_, frame.detections, cams_[c], cfg_, exec_);
  const FilteredMatches fm = filter_matches(hungarian_max(A), A, cfg_.match_threshold);
  update_targets(frame, fm.accepted);
  for (const Match& m : fm.accepted) {
    out.matches.push_back({frame.detections[static_cast<std::size_t>(m.col)].id,
                           targets_[static_cast<std::size_t>(m.row)].id()});
  }

  std::vector<Detection> unmatched;
  for (int j : fm.unmatched_cols) unmatched.push_back(frame.detections[static_cast<std::size_t>(j)]);
  pool_.replace(input.camera, t, std::move(unmatched));
  pool_.expire(t, cfg_.retire_after);

  std::vector<NewTarget> created =
      initialize_targets(pool_, cams_, cfg_, num_joints_, next_target_id_, t, exec_, targets_);
  for (NewTarget& nt : created) {
    for (std::int64_t det : nt.detection_ids) out.matches.push_back({det, nt.target.id()});
    targets_.push_back(std::move(nt.target));
    ++stats_.targets_created;
  }

  out.retired = retire_targets(t);
  out.targets.reserve(targets_.size());
  for (const Target& target : targets_) out.targets.push_back(pose_of(target));
  return out;
}

void Tracker::update_targets(const FrameBatch& frame, const std::vector<Match>& accepted) {
  const auto c = static_cast<std::size_t>(frame.camera);
  const double t = frame.timestamp;

  struct Slot {
    std::size_t target;
    int joint;
  };
  std::vector<Slot> slots;
  std::vector<TriangulationJob> jobs;

  for (const Match& m : accepted) {
    Target& target = targets_[static_cast<std::size_t>(m.row)];
    const Detection& det = frame.detections[static_cast<std::size_t>(m.col)];
    target.set_last_matched(std::max(target.last_matched(), t));
    const int K = std::min(num_joints_, static_cast<int>(det.joints.size()));
    for (int k = 0; k < K; ++k) {
      const auto& kp = det.joints[static_cast<std::size_t>(k)];
      if (!usable(kp, cfg_)) continue;
      JointState& joint = target.joint(k);
      joint.last_2d[c] = Observation2D{kp->x, kp->confidence, t};

      TriangulationJob job;
      job.weighted = cfg_.weighted_triangulation;
      for (std::size_t ci = 0; ci < joint.last_2d.size(); ++ci) {
        const auto& o = joint.last_2d[ci];
        if (!o || t - o->t > cfg_.retire_after) continue;
        job.obs.push_back({static_cast<int>(ci), o->x, o->t, o->confidence});
      }
      if (job.obs.size() < 2) continue;
      slots.push_back({static_cast<std::size_t>(m.row), k});
      jobs.push_back(std::move(job));
    }
  }

  const std::vector<TriangulationResult> results = triangulate_batch(jobs, cams_, cfg_, exec_);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    double diff = 0.0;
    for (const auto& o : jobs[i].obs) diff += t - o.t;
    stats_.sum_mean_time_diff += diff / static_cast<double>(jobs[i].obs.size());
    ++stats_.triangulations;
    if (!results[i].ok()) continue;
    commit_joint(targets_[slots[i].target].joint(slots[i].joint), results[i].X, t,
                 cfg_.velocity_window);
  }
}

std::vector<std::int64_t> Tracker::retire_targets(double now) {
  std::vector<std::int64_t> retired;
  std::erase_if(targets_, [&](const Target& target) {
    if (now - target.last_matched() > cfg_.retire_after) {
      retired.push_back(target.id());
      return true;
    }
    return false;
  });
  stats_.targets_retired += static_cast<std::int64_t>(retired.size());
  return retired;
}

TargetPose Tracker::pose_of(const Target& target) const {
  TargetPose pose;
  pose.id = target.id();
  pose.joints.resize(static_cast<std::size_t>(num_joints_));
  pose.updated.resize(static_cast<std::size_t>(num_joints_));
  for (int k = 0; k < num_joints_; ++k) {
    const JointState& j = target.joint(k);
    if (!j.has_3d) continue;
    pose.joints[static_cast<std::size_t>(k)] = j.X;
    pose.updated[static_cast<std::size_t>(k)] = j.t3d;
  }
  return pose;
}

}  // namespace crossview
