#include "crossview/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace crossview {

TruthIndex::TruthIndex(const GroundTruth& truth) : truth_(&truth) {
  for (std::size_t i = 0; i < truth.frames.size(); ++i) {
    const TruthFrame& f = truth.frames[i];
    frames_.emplace(key(f.camera, f.timestamp), i);
    for (const DetectionTruth& d : f.detections) detections_.emplace(d.detection, std::make_pair(d.person, f.camera));
  }
}

std::int64_t TruthIndex::key(int camera, double timestamp) {
  return static_cast<std::int64_t>(std::llround(timestamp * 1e6)) * 4096 + camera;
}

const TruthFrame* TruthIndex::find(int camera, double timestamp) const {
  const auto it = frames_.find(key(camera, timestamp));
  return it == frames_.end() ? nullptr : &truth_->frames[it->second];
}

std::optional<std::pair<int, int>> TruthIndex::detection(std::int64_t id) const {
  const auto it = detections_.find(id);
  if (it == detections_.end()) return std::nullopt;
  return it->second;
}

std::vector<bool> pcp_bones(const TargetPose& estimate, const std::vector<Vec3>& truth, double alpha,
                            const std::vector<Bone>& bones) {
  std::vector<bool> out;
  out.reserve(bones.size());
  for (const Bone& bone : bones) {
    const auto a = static_cast<std::size_t>(bone.a);
    const auto b = static_cast<std::size_t>(bone.b);
    if (a >= estimate.joints.size() || b >= estimate.joints.size() || !estimate.joints[a] ||
        !estimate.joints[b]) {
      out.push_back(false);
      continue;
    }
    const double err = 0.5 * ((*estimate.joints[a] - truth[a]).norm() + (*estimate.joints[b] - truth[b]).norm());
    out.push_back(err <= alpha * (truth[a] - truth[b]).norm());
  }
  return out;
}

namespace {

double mean_joint_error(const TargetPose& est, const std::vector<Vec3>& truth) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < est.joints.size() && k < truth.size(); ++k) {
    if (!est.joints[k]) continue;
    sum += (*est.joints[k] - truth[k]).norm();
    ++n;
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::infinity();
}

}  // namespace

PcpReport pcp(std::span<const TrackOutput> estimates, const GroundTruth& truth, const PcpOptions& options,
              const std::vector<Bone>& bones) {
  PcpReport report;
  const TruthIndex index(truth);
  for (const TrackOutput& rec : estimates) {
    const TruthFrame* frame = index.find(rec.camera, rec.timestamp);
    if (!frame) continue;

    std::vector<const PersonTruth*> persons;
    for (const PersonTruth& p : frame->persons)
      if (p.observed_cameras >= options.min_observed_cameras) persons.push_back(&p);

    // Greedy pairing by mean joint error.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < rec.targets.size(); ++i)
      for (std::size_t j = 0; j < persons.size(); ++j) {
        const double e = mean_joint_error(rec.targets[i], persons[j]->joints);
        if (e <= options.match_distance) pairs.emplace_back(e, i, j);
      }
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> person_to_est(persons.size(), -1);
    std::vector<char> est_used(rec.targets.size(), 0);
    for (const auto& [e, i, j] : pairs) {
      if (est_used[i] || person_to_est[j] >= 0) continue;
      est_used[i] = 1;
      person_to_est[j] = static_cast<int>(i);
    }

    for (std::size_t j = 0; j < persons.size(); ++j) {
      const PersonTruth& person = *persons[j];
      std::vector<bool> ok(bones.size(), false);
      if (person_to_est[j] >= 0) {
        ok = pcp_bones(rec.targets[static_cast<std::size_t>(person_to_est[j])], person.joints,
                       options.alpha, bones);
      }
      for (std::size_t b = 0; b < bones.size(); ++b) {
        report.parts[bones[b].part].add(ok[b]);
        report.persons[person.id].add(ok[b]);
        report.person_parts[person.id][bones[b].part].add(ok[b]);
        report.overall.add(ok[b]);
      }
    }
  }
  return report;
}

std::unordered_map<std::int64_t, std::int64_t> collect_labels(std::span<const TrackOutput> outputs) {
  std::unordered_map<std::int64_t, std::int64_t> labels;
  for (const TrackOutput& rec : outputs)
    for (const DetectionLabel& m : rec.matches) labels[m.detection] = m.target;
  return labels;
}

AssociationReport association_accuracy(const std::unordered_map<std::int64_t, std::int64_t>& labels,
                                       const GroundTruth& truth) {
  // Majority person of every track id.
  std::map<std::int64_t, std::map<int, long>> votes;
  for (const TruthFrame& f : truth.frames)
    for (const DetectionTruth& d : f.detections) {
      const auto it = labels.find(d.detection);
      if (it != labels.end() && it->second >= 0) ++votes[it->second][d.person];
    }
  std::map<std::int64_t, int> majority;
  for (const auto& [track, counts] : votes) {
    int best = -1;
    long best_count = -1;
    for (const auto& [person, count] : counts)
      if (count > best_count) {
        best = person;
        best_count = count;
      }
    majority[track] = best;
  }

  AssociationReport report;
  for (const TruthFrame& f : truth.frames)
    for (const DetectionTruth& d : f.detections) {
      const auto it = labels.find(d.detection);
      const bool ok = it != labels.end() && it->second >= 0 && majority[it->second] == d.person;
      report.cameras[f.camera].add(ok);
      report.overall.add(ok);
    }
  return report;
}

double MotCounts::mota() const {
  return 100.0 * (1.0 - static_cast<double>(fp + fn + ids) / static_cast<double>(std::max(gt, 1L)));
}

double MotCounts::idf1() const {
  const long denom = estimates + gt;
  return denom > 0 ? 100.0 * 2.0 * static_cast<double>(idtp) / static_cast<double>(denom) : 100.0;
}

MotCounts mot_from_rows(std::span<const FrameRow> rows, double dist_threshold) {
  MotCounts counts;
  std::map<int, std::int64_t> last_match;  // truth id -> estimate id
  std::map<std::pair<std::int64_t, int>, long> co;  // (estimate, truth) -> matched frames

  for (const FrameRow& row : rows) {
    counts.gt += static_cast<long>(row.truth_ids.size());
    counts.estimates += static_cast<long>(row.estimate_ids.size());
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < row.estimate_ids.size(); ++i)
      for (std::size_t j = 0; j < row.truth_ids.size(); ++j)
        if (row.distance[i][j] <= dist_threshold) pairs.emplace_back(row.distance[i][j], i, j);
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> est_used(row.estimate_ids.size(), 0), truth_used(row.truth_ids.size(), 0);
    long matched = 0;
    for (const auto& [d, i, j] : pairs) {
      if (est_used[i] || truth_used[j]) continue;
      est_used[i] = truth_used[j] = 1;
      ++matched;
      const std::int64_t est = row.estimate_ids[i];
      const int gt = row.truth_ids[j];
      const auto it = last_match.find(gt);
      if (it != last_match.end() && it->second != est) ++counts.ids;
      last_match[gt] = est;
      ++co[{est, gt}];
    }
    counts.fp += static_cast<long>(row.estimate_ids.size()) - matched;
    counts.fn += static_cast<long>(row.truth_ids.size()) - matched;
  }

  // Greedy one-to-one identity mapping by co-occurrence count.
  std::vector<std::tuple<long, std::int64_t, int>> cands;
  for (const auto& [key, n] : co) cands.emplace_back(-n, key.first, key.second);
  std::sort(cands.begin(), cands.end());
  std::map<std::int64_t, char> est_taken;
  std::map<int, char> gt_taken;
  for (const auto& [neg, est, gt] : cands) {
    if (est_taken[est] || gt_taken[gt]) continue;
    est_taken[est] = gt_taken[gt] = 1;
    counts.idtp += -neg;
  }
  return counts;
}

namespace {

std::optional<Vec3> pose_root(const TargetPose& pose) {
  const auto l = static_cast<std::size_t>(joint::LHip);
  const auto r = static_cast<std::size_t>(joint::RHip);
  if (pose.joints.size() <= std::max(l, r) || !pose.joints[l] || !pose.joints[r]) return std::nullopt;
  return 0.5 * (*pose.joints[l] + *pose.joints[r]);
}

std::optional<Vec2> visible_pixel(const CameraView& cam, const Vec3& X) {
  const Projection p = project(cam, X);
  if (!p.ok() || !cam.in_image(p.pixel)) return std::nullopt;
  return p.pixel;
}

}  // namespace

MotReport mot_metrics(std::span<const TrackOutput> estimates, const GroundTruth& truth,
                      const CameraSet& cams, const MotOptions& options) {
  const TruthIndex index(truth);
  std::map<int, std::vector<FrameRow>> rows;
  for (const TrackOutput& rec : estimates) {
    const TruthFrame* frame = index.find(rec.camera, rec.timestamp);
    if (!frame || rec.camera < 0 || static_cast<std::size_t>(rec.camera) >= cams.size()) continue;
    const CameraView& cam = cams[static_cast<std::size_t>(rec.camera)];

    FrameRow row;
    std::vector<Vec2> est_px, gt_px;
    for (const TargetPose& pose : rec.targets) {
      const auto root = pose_root(pose);
      if (!root) continue;
      const auto px = visible_pixel(cam, *root);
      if (!px) continue;
      row.estimate_ids.push_back(pose.id);
      est_px.push_back(*px);
    }
    for (const PersonTruth& p : frame->persons) {
      if (p.observed_cameras < options.min_observed_cameras) continue;
      const Vec3 root = 0.5 * (p.joints[static_cast<std::size_t>(joint::LHip)] +
                               p.joints[static_cast<std::size_t>(joint::RHip)]);
      const auto px = visible_pixel(cam, root);
      if (!px) continue;
      row.truth_ids.push_back(p.id);
      gt_px.push_back(*px);
    }
    row.distance.assign(est_px.size(), std::vector<double>(gt_px.size()));
    for (std::size_t i = 0; i < est_px.size(); ++i)
      for (std::size_t j = 0; j < gt_px.size(); ++j) row.distance[i][j] = (est_px[i] - gt_px[j]).norm();
    rows[rec.camera].push_back(std::move(row));
  }

  MotReport report;
  for (const auto& [camera, camera_rows] : rows) {
    const MotCounts c = mot_from_rows(camera_rows, options.dist_threshold);
    report.cameras[camera] = c;
    report.overall.fp += c.fp;
    report.overall.fn += c.fn;
    report.overall.ids += c.ids;
    report.overall.gt += c.gt;
    report.overall.estimates += c.estimates;
    report.overall.idtp += c.idtp;
  }
  return report;
}

std::vector<FrameBatch> subsample_stream(std::span<const FrameBatch> stream, int num_cameras, int n) {
  std::vector<FrameBatch> out;
  if (n <= 1) return {stream.begin(), stream.end()};
  std::vector<long> seen(static_cast<std::size_t>(num_cameras), 0);
  for (const FrameBatch& f : stream) {
    const auto c = static_cast<std::size_t>(f.camera);
    const long offset = static_cast<long>(f.camera) * n / num_cameras;
    const long i = seen[c]++;
    if (i >= offset && (i - offset) % n == 0) out.push_back(f);
  }
  return out;
}

std::vector<TrackOutput> run_tracker(std::span<const FrameBatch> stream, const CameraSet& cams,
                                     const TrackerConfig& cfg, TrackerStats* stats, Execution exec) {
  Tracker tracker(cams, cfg, kNumJoints, exec);
  std::vector<TrackOutput> out;
  out.reserve(stream.size());
  for (const FrameBatch& f : stream) out.push_back(tracker.step(f));
  if (stats) *stats = tracker.stats();
  return out;
}

std::vector<SweepRow> framerate_sweep(std::span<const FrameBatch> stream, const CameraSet& cams,
                                      const GroundTruth& truth, std::span<const int> ns,
                                      const TrackerConfig& cfg, const PcpOptions& options) {
  std::vector<SweepRow> rows;
  for (int n : ns) {
    const std::vector<FrameBatch> sub = subsample_stream(stream, static_cast<int>(cams.size()), n);
    SweepRow row;
    row.n = n;
    for (bool weighted : {true, false}) {
      TrackerConfig c = cfg;
      c.weighted_triangulation = weighted;
      TrackerStats stats;
      const std::vector<TrackOutput> out = run_tracker(sub, cams, c, &stats);
      const double score = pcp(out, truth, options).overall.score();
      (weighted ? row.weighted_pcp : row.unweighted_pcp) = score;
      (weighted ? row.weighted_time_diff : row.unweighted_time_diff) = stats.mean_time_diff();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace crossview
