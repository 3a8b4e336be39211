#include <gtest/gtest.h>

#include <map>
#include <random>

#include "crossview/evaluation.hpp"
#include "crossview/simulator.hpp"

using namespace crossview;

namespace {

Scenario small_scene(std::uint64_t seed = 3) {
  ScenarioSpec spec;
  spec.people = 3;
  spec.duration = 2.0;
  spec.noise_px = 1.0;
  spec.seed = seed;
  return generate(spec);
}

// Truth replayed as tracker output: one target per scorable person, every
// detection labelled with its person.
std::vector<TrackOutput> oracle_outputs(const GroundTruth& truth, std::int64_t id_offset = 1) {
  std::vector<TrackOutput> out;
  for (const TruthFrame& f : truth.frames) {
    TrackOutput rec;
    rec.timestamp = f.timestamp;
    rec.camera = f.camera;
    for (const PersonTruth& p : f.persons) {
      if (p.observed_cameras < 2) continue;
      TargetPose pose;
      pose.id = p.id + id_offset;
      for (const Vec3& X : p.joints) {
        pose.joints.emplace_back(X);
        pose.updated.emplace_back(f.timestamp);
      }
      rec.targets.push_back(std::move(pose));
    }
    for (const DetectionTruth& d : f.detections) rec.matches.push_back({d.detection, d.person + id_offset});
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

TEST(Pcp, PerfectEstimatesScoreFull) {
  const Scenario sc = small_scene();
  const auto out = oracle_outputs(sc.truth);
  const PcpReport r = pcp(out, sc.truth);
  EXPECT_GT(r.overall.total, 0);
  EXPECT_DOUBLE_EQ(r.overall.score(), 100.0);
  for (BodyPart part : kBodyParts) EXPECT_DOUBLE_EQ(r.parts.at(part).score(), 100.0);
  EXPECT_EQ(r.persons.size(), 3u);
}

TEST(Pcp, NoEstimatesScoreZero) {
  const Scenario sc = small_scene();
  std::vector<TrackOutput> out = oracle_outputs(sc.truth);
  for (auto& rec : out) rec.targets.clear();
  const PcpReport r = pcp(out, sc.truth);
  EXPECT_GT(r.overall.total, 0);
  EXPECT_DOUBLE_EQ(r.overall.score(), 0.0);
}

TEST(Pcp, BoneThreshold) {
  const std::vector<Vec3> truth{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const std::vector<Bone> bones{{0, 1, BodyPart::Torso}};
  TargetPose est;
  est.joints = {Vec3(0, 0.25, 0), Vec3(1, -0.25, 0)};
  // Mean endpoint error 0.25 against a 1 m bone.
  EXPECT_FALSE(pcp_bones(est, truth, 0.2, bones)[0]);
  EXPECT_TRUE(pcp_bones(est, truth, 0.25, bones)[0]);
  EXPECT_TRUE(pcp_bones(est, truth, 0.5, bones)[0]);
  est.joints[1].reset();
  EXPECT_FALSE(pcp_bones(est, truth, 0.5, bones)[0]);
}

TEST(Pcp, DefaultBonesCoverSkeleton) {
  EXPECT_EQ(default_bones().size(), 11u);
  std::map<BodyPart, int> per_part;
  for (const Bone& b : default_bones()) ++per_part[b.part];
  EXPECT_EQ(per_part[BodyPart::Head], 1);
  EXPECT_EQ(per_part[BodyPart::Torso], 2);
  EXPECT_EQ(per_part[BodyPart::UpperArm], 2);
  EXPECT_EQ(per_part[BodyPart::LowerLeg], 2);
}

TEST(Association, PerfectAndUnlabelled) {
  const Scenario sc = small_scene();
  const auto out = oracle_outputs(sc.truth);
  auto labels = collect_labels(out);
  EXPECT_DOUBLE_EQ(association_accuracy(labels, sc.truth).overall.score(), 100.0);

  // Renaming track ids does not matter; only consistency does.
  const auto shifted = collect_labels(oracle_outputs(sc.truth, 40));
  EXPECT_DOUBLE_EQ(association_accuracy(shifted, sc.truth).overall.score(), 100.0);

  const long total = association_accuracy(labels, sc.truth).overall.total;
  const std::int64_t dropped = sc.truth.frames[0].detections[0].detection;
  labels.erase(dropped);
  const auto r = association_accuracy(labels, sc.truth);
  EXPECT_EQ(r.overall.correct, total - 1);
}

TEST(Association, MergedTrackLosesMinority) {
  const Scenario sc = small_scene();
  auto labels = collect_labels(oracle_outputs(sc.truth));
  // Everything labelled as one track: only the majority person counts.
  std::map<int, long> per_person;
  long total = 0;
  for (const auto& f : sc.truth.frames)
    for (const auto& d : f.detections) {
      labels[d.detection] = 7;
      ++per_person[d.person];
      ++total;
    }
  long best = 0;
  for (const auto& [p, n] : per_person) best = std::max(best, n);
  const auto r = association_accuracy(labels, sc.truth);
  EXPECT_EQ(r.overall.total, total);
  EXPECT_EQ(r.overall.correct, best);
}

TEST(CollectLabels, LatestWins) {
  std::vector<TrackOutput> out(2);
  out[0].matches = {{5, 1}, {6, 2}};
  out[1].matches = {{5, 3}};
  const auto labels = collect_labels(out);
  EXPECT_EQ(labels.at(5), 3);
  EXPECT_EQ(labels.at(6), 2);
}

TEST(Mot, PerfectTracking) {
  const Scenario sc = small_scene();
  const MotReport r = mot_metrics(oracle_outputs(sc.truth), sc.truth, sc.cameras);
  EXPECT_GT(r.overall.gt, 0);
  EXPECT_EQ(r.overall.fp, 0);
  EXPECT_EQ(r.overall.fn, 0);
  EXPECT_EQ(r.overall.ids, 0);
  EXPECT_DOUBLE_EQ(r.overall.mota(), 100.0);
  EXPECT_DOUBLE_EQ(r.overall.idf1(), 100.0);
}

TEST(Mot, EmptyEstimates) {
  const Scenario sc = small_scene();
  std::vector<TrackOutput> out = oracle_outputs(sc.truth);
  for (auto& rec : out) rec.targets.clear();
  const MotReport r = mot_metrics(out, sc.truth, sc.cameras);
  EXPECT_EQ(r.overall.fn, r.overall.gt);
  EXPECT_DOUBLE_EQ(r.overall.mota(), 0.0);
  EXPECT_DOUBLE_EQ(r.overall.idf1(), 0.0);
}

TEST(Mot, IdentitySwapCountsTwice) {
  std::vector<FrameRow> rows;
  for (int f = 0; f < 10; ++f) {
    FrameRow row;
    row.truth_ids = {0, 1};
    row.estimate_ids = f < 5 ? std::vector<std::int64_t>{10, 20} : std::vector<std::int64_t>{20, 10};
    row.distance = {{1.0, 300.0}, {300.0, 1.0}};
    rows.push_back(row);
  }
  const MotCounts c = mot_from_rows(rows, 50.0);
  EXPECT_EQ(c.ids, 2);
  EXPECT_EQ(c.fp, 0);
  EXPECT_EQ(c.fn, 0);
  EXPECT_DOUBLE_EQ(c.mota(), 90.0);
  // Best one-to-one identity mapping covers 5 of 10 frames per truth.
  EXPECT_EQ(c.idtp, 10);
  EXPECT_DOUBLE_EQ(c.idf1(), 50.0);
}

TEST(Mot, DistanceGate) {
  FrameRow row;
  row.truth_ids = {0};
  row.estimate_ids = {1};
  row.distance = {{50.5}};
  const MotCounts c = mot_from_rows(std::vector<FrameRow>{row}, 50.0);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.fn, 1);
}

TEST(Mot, CountsBalance) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_real_distribution<double> dist(0.0, 120.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FrameRow> rows;
    for (int f = 0; f < 20; ++f) {
      FrameRow row;
      for (int i = count(rng); i > 0; --i) row.estimate_ids.push_back(i);
      for (int j = count(rng); j > 0; --j) row.truth_ids.push_back(j);
      row.distance.assign(row.estimate_ids.size(), std::vector<double>(row.truth_ids.size()));
      for (auto& r : row.distance)
        for (auto& d : r) d = dist(rng);
      rows.push_back(row);
    }
    const MotCounts c = mot_from_rows(rows, 50.0);
    // Every match removes one estimate and one truth.
    EXPECT_EQ(c.fp - c.fn, c.estimates - c.gt);
    EXPECT_GE(c.fp, 0);
    EXPECT_GE(c.fn, 0);
    EXPECT_LE(c.idtp, std::min(c.estimates, c.gt));
  }
}

TEST(Subsample, KeepsEveryNthWithStaggeredOffsets) {
  const Scenario sc = small_scene();
  const int cams = static_cast<int>(sc.cameras.size());
  EXPECT_EQ(subsample_stream(sc.stream, cams, 1).size(), sc.stream.size());
  const int n = 4;
  const auto sub = subsample_stream(sc.stream, cams, n);
  std::map<int, std::vector<double>> kept, all;
  for (const auto& f : sc.stream) all[f.camera].push_back(f.timestamp);
  for (const auto& f : sub) kept[f.camera].push_back(f.timestamp);
  for (int c = 0; c < cams; ++c) {
    const auto& a = all[c];
    const std::size_t offset = static_cast<std::size_t>(c * n / cams);
    std::vector<double> expect;
    for (std::size_t i = offset; i < a.size(); i += n) expect.push_back(a[i]);
    EXPECT_EQ(kept[c], expect);
  }
}

TEST(Sweep, TimeDifferenceGrowsWithSubsampling) {
  ScenarioSpec spec;
  spec.people = 2;
  spec.duration = 4.0;
  spec.seed = 4;
  const Scenario sc = generate(spec);
  const std::vector<int> ns{1, 2, 4};
  const auto rows = framerate_sweep(sc.stream, sc.cameras, sc.truth, ns, TrackerConfig{});
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].n, ns[i]);
    EXPECT_GT(rows[i].weighted_pcp, 50.0);
    if (i > 0) {
      EXPECT_GT(rows[i].weighted_time_diff, rows[i - 1].weighted_time_diff);
      EXPECT_GT(rows[i].unweighted_time_diff, rows[i - 1].unweighted_time_diff);
    }
  }
  // At full rate the cameras are spaced by period / C.
  EXPECT_LT(rows[0].weighted_time_diff, 1.0 / 25.0);
}

TEST(TruthIndex, Lookup) {
  const Scenario sc = small_scene();
  const TruthIndex index(sc.truth);
  const TruthFrame& f = sc.truth.frames[5];
  EXPECT_EQ(index.find(f.camera, f.timestamp), &f);
  EXPECT_EQ(index.find(f.camera, f.timestamp + 0.5e-3), nullptr);
  const auto d = index.detection(f.detections[0].detection);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->first, f.detections[0].person);
  EXPECT_EQ(d->second, f.camera);
  EXPECT_FALSE(index.detection(-5));
}
