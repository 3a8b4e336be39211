#include <gtest/gtest.h>

#include <map>

#include "crossview/baseline.hpp"
#include "crossview/reconstruction.hpp"
#include "crossview/simulator.hpp"

using namespace crossview;

namespace {

ScenarioSpec walking(int people, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.people = people;
  spec.duration = 3.0;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(MotionModel, BoneLengthsConstant) {
  ScenarioSpec spec = walking(3, 1);
  spec.swing_amplitude = 0.8;
  const MotionModel m(spec);
  for (int p = 0; p < m.people(); ++p) {
    const auto ref = m.pose(p, 0.0);
    for (double t = 0.0; t < 3.0; t += 0.037) {
      const auto pose = m.pose(p, t);
      for (const Bone& b : default_bones()) {
        const double want = (ref[static_cast<std::size_t>(b.a)] - ref[static_cast<std::size_t>(b.b)]).norm();
        const double got = (pose[static_cast<std::size_t>(b.a)] - pose[static_cast<std::size_t>(b.b)]).norm();
        EXPECT_NEAR(got, want, 1e-9);
      }
    }
  }
}

TEST(MotionModel, WalkingSpeed) {
  ScenarioSpec spec = walking(1, 2);
  spec.motion = MotionKind::Crossing;
  spec.speed = 1.1;
  const MotionModel m(spec);
  auto root = [&](double t) {
    const auto p = m.pose(0, t);
    return Vec3(0.5 * (p[joint::LHip] + p[joint::RHip]));
  };
  // Away from the turnarounds the root moves at the nominal speed.
  EXPECT_NEAR((root(1.0) - root(0.5)).norm() / 0.5, 1.1, 1e-6);
}

TEST(MotionModel, StaticStaysPut) {
  ScenarioSpec spec = walking(2, 3);
  spec.motion = MotionKind::Static;
  const MotionModel m(spec);
  const auto a = m.pose(1, 0.2);
  const auto b = m.pose(1, 2.7);
  const Vec3 ra = 0.5 * (a[joint::LHip] + a[joint::RHip]);
  const Vec3 rb = 0.5 * (b[joint::LHip] + b[joint::RHip]);
  EXPECT_LT((ra - rb).norm(), 1e-12);
}

TEST(Simulator, DetectionsAreNoisyProjectionsOfTruth) {
  ScenarioSpec spec = walking(3, 4);
  spec.noise_px = 2.0;
  spec.dropout = 0.2;
  const Scenario sc = generate(spec);
  ASSERT_EQ(sc.stream.size(), sc.truth.frames.size());
  long checked = 0;
  for (std::size_t i = 0; i < sc.stream.size(); ++i) {
    const FrameBatch& f = sc.stream[i];
    const TruthFrame& tf = sc.truth.frames[i];
    ASSERT_EQ(f.detections.size(), tf.detections.size());
    EXPECT_EQ(f.timestamp, tf.timestamp);
    EXPECT_EQ(f.camera, tf.camera);
    const CameraView& cam = sc.cameras[static_cast<std::size_t>(f.camera)];
    for (std::size_t d = 0; d < f.detections.size(); ++d) {
      const Detection& det = f.detections[d];
      const DetectionTruth& dt = tf.detections[d];
      EXPECT_EQ(det.id, dt.detection);
      const auto& truth = tf.persons[static_cast<std::size_t>(dt.person)].joints;
      for (int k = 0; k < kNumJoints; ++k) {
        const auto& kp = det.joints[static_cast<std::size_t>(k)];
        ASSERT_EQ(kp.has_value(), dt.noise[static_cast<std::size_t>(k)].has_value());
        if (!kp) continue;
        const Vec2 expect = project(cam, truth[static_cast<std::size_t>(k)]).pixel + *dt.noise[static_cast<std::size_t>(k)];
        EXPECT_LT((kp->x - expect).norm(), 1e-9);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(Simulator, DropoutRate) {
  ScenarioSpec spec = walking(2, 5);
  spec.dropout = 0.3;
  const Scenario sc = generate(spec);
  long present = 0, total = 0;
  for (const auto& f : sc.stream)
    for (const auto& d : f.detections)
      for (const auto& kp : d.joints) {
        ++total;
        if (kp) ++present;
      }
  EXPECT_NEAR(static_cast<double>(present) / static_cast<double>(total), 0.7, 0.02);
}

TEST(Simulator, StreamIsChronological) {
  ScenarioSpec spec = walking(2, 6);
  spec.jitter = 0.004;
  spec.phase = PhaseMode::Random;
  const Scenario sc = generate(spec);
  std::map<int, double> last;
  for (std::size_t i = 0; i < sc.stream.size(); ++i) {
    const FrameBatch& f = sc.stream[i];
    if (i > 0) {
      const FrameBatch& p = sc.stream[i - 1];
      EXPECT_TRUE(p.timestamp < f.timestamp || (p.timestamp == f.timestamp && p.camera < f.camera));
    }
    if (last.count(f.camera)) EXPECT_GT(f.timestamp, last[f.camera]);
    last[f.camera] = f.timestamp;
    // Microsecond-rounded so text round trips are exact.
    EXPECT_EQ(f.timestamp, std::round(f.timestamp * 1e6) / 1e6);
  }
}

TEST(Simulator, StaggeredPhases) {
  ScenarioSpec spec = walking(1, 7);
  spec.rig.count = 4;
  spec.fps = 25.0;
  const Scenario sc = generate(spec);
  for (int c = 0; c < 4; ++c) {
    EXPECT_EQ(sc.stream[static_cast<std::size_t>(c)].camera, c);
    EXPECT_NEAR(sc.stream[static_cast<std::size_t>(c)].timestamp, 0.01 * c, 1e-9);
  }
}

TEST(Simulator, Deterministic) {
  ScenarioSpec spec = walking(3, 8);
  spec.noise_px = 1.0;
  spec.dropout = 0.1;
  spec.jitter = 0.002;
  const Scenario a = generate(spec);
  const Scenario b = generate(spec);
  ASSERT_EQ(a.stream.size(), b.stream.size());
  for (std::size_t i = 0; i < a.stream.size(); ++i) {
    ASSERT_EQ(a.stream[i].detections.size(), b.stream[i].detections.size());
    EXPECT_EQ(a.stream[i].timestamp, b.stream[i].timestamp);
    for (std::size_t d = 0; d < a.stream[i].detections.size(); ++d)
      for (int k = 0; k < kNumJoints; ++k) {
        const auto& x = a.stream[i].detections[d].joints[static_cast<std::size_t>(k)];
        const auto& y = b.stream[i].detections[d].joints[static_cast<std::size_t>(k)];
        ASSERT_EQ(x.has_value(), y.has_value());
        if (x) EXPECT_EQ(x->x, y->x);
      }
  }
  spec.seed = 9;
  const Scenario c = generate(spec);
  EXPECT_NE(c.stream[0].detections[0].joints[0]->x, a.stream[0].detections[0].joints[0]->x);
}

TEST(Simulator, CeilingGridCounts) {
  ScenarioSpec spec = walking(4, 10);
  spec.rig.kind = RigKind::CeilingGrid;
  spec.duration = 2.0;
  spec.fps = 25.0;
  const Scenario sc = generate(spec);
  ASSERT_EQ(sc.cameras.size(), 12u);
  EXPECT_EQ(sc.stream.size(), 12u * 50u);
  std::map<int, int> per_camera;
  for (const auto& f : sc.stream) ++per_camera[f.camera];
  for (const auto& [c, n] : per_camera) EXPECT_EQ(n, 50);
}

TEST(Simulator, PerCameraRates) {
  ScenarioSpec spec = walking(1, 11);
  spec.rig.count = 2;
  spec.camera_fps = {10.0, 20.0};
  spec.duration = 1.0;
  const Scenario sc = generate(spec);
  std::map<int, int> per_camera;
  for (const auto& f : sc.stream) ++per_camera[f.camera];
  EXPECT_EQ(per_camera[0], 10);
  EXPECT_EQ(per_camera[1], 20);
}

TEST(Simulator, ObservedCamerasGrow) {
  ScenarioSpec spec = walking(2, 12);
  spec.rig.count = 3;
  const Scenario sc = generate(spec);
  EXPECT_EQ(sc.truth.frames[0].persons[0].observed_cameras, 1);
  std::map<int, int> prev;
  for (const auto& tf : sc.truth.frames)
    for (const auto& p : tf.persons) {
      EXPECT_GE(p.observed_cameras, prev[p.id]);
      EXPECT_LE(p.observed_cameras, 3);
      prev[p.id] = p.observed_cameras;
    }
  EXPECT_EQ(prev[0], 3);
}

TEST(Simulator, NoiselessTriangulationRecoversTruth) {
  ScenarioSpec spec = walking(2, 13);
  spec.phase = PhaseMode::Synced;
  spec.rig.count = 3;
  const Scenario sc = generate(spec);
  // Synced frames of all cameras at t = 0 share the truth poses.
  for (int p = 0; p < 2; ++p) {
    for (int k = 0; k < kNumJoints; ++k) {
      std::vector<JointObservation> obs;
      for (std::size_t i = 0; i < 3; ++i) {
        const TruthFrame& tf = sc.truth.frames[i];
        for (std::size_t d = 0; d < tf.detections.size(); ++d) {
          if (tf.detections[d].person != p) continue;
          const auto& kp = sc.stream[i].detections[d].joints[static_cast<std::size_t>(k)];
          if (kp) obs.push_back({tf.camera, kp->x, tf.timestamp, 1.0});
        }
      }
      ASSERT_GE(obs.size(), 2u);
      const auto r = triangulate(obs, sc.cameras);
      ASSERT_TRUE(r.ok());
      EXPECT_LT((r.X - sc.truth.frames[0].persons[static_cast<std::size_t>(p)].joints[static_cast<std::size_t>(k)]).norm(), 1e-8);
    }
  }
}

TEST(Simulator, InvalidSpecRejected) {
  ScenarioSpec spec;
  spec.dropout = 1.0;
  EXPECT_THROW(generate(spec), Error);
  spec = ScenarioSpec{};
  spec.camera_fps = {25.0};
  try {
    spec.validate();
    FAIL() << "expected InvalidSpec";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
}

TEST(Baseline, SingleFrameRecoversPeople) {
  ScenarioSpec spec = walking(3, 14);
  spec.phase = PhaseMode::Synced;
  spec.rig.count = 4;
  const Scenario sc = generate(spec);
  std::vector<Detection> dets;
  for (std::size_t i = 0; i < 4; ++i)
    for (const auto& d : sc.stream[i].detections) dets.push_back(d);
  const auto poses = baseline_frame(dets, sc.cameras, TrackerConfig{});
  ASSERT_EQ(poses.size(), 3u);
  for (const auto& person : sc.truth.frames[0].persons) {
    double best = 1e9;
    for (const auto& pose : poses) {
      double worst = 0.0;
      for (int k = 0; k < kNumJoints; ++k)
        worst = std::max(worst, (*pose.joints[static_cast<std::size_t>(k)] - person.joints[static_cast<std::size_t>(k)]).norm());
      best = std::min(best, worst);
    }
    EXPECT_LT(best, 1e-8);
  }
}

TEST(Baseline, SingleCameraGivesNothing) {
  ScenarioSpec spec = walking(2, 15);
  const Scenario sc = generate(spec);
  EXPECT_TRUE(baseline_frame(sc.stream[0].detections, sc.cameras, TrackerConfig{}).empty());
  EXPECT_TRUE(baseline_frame({}, sc.cameras, TrackerConfig{}).empty());
}

TEST(Baseline, GroupsOneFramePerCamera) {
  ScenarioSpec spec = walking(2, 16);
  spec.rig.count = 3;
  spec.duration = 1.0;
  const Scenario sc = generate(spec);
  const auto out = baseline_stream(sc.stream, sc.cameras, TrackerConfig{});
  ASSERT_EQ(out.size(), 25u);
  // Stamped with the newest member of each group: the last staggered camera.
  for (std::size_t n = 0; n < out.size(); ++n) {
    EXPECT_EQ(out[n].camera, 2);
    EXPECT_EQ(out[n].targets.size(), 2u);
  }
}
