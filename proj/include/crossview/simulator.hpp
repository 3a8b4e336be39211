#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crossview/geometry.hpp"
#include "crossview/skeleton.hpp"
#include "crossview/types.hpp"

namespace crossview {

enum class MotionKind { Static, Waypoint, Crossing };
enum class RigKind { Ring, CeilingGrid };
enum class PhaseMode { Synced, Staggered, Random };

struct RigSpec {
  RigKind kind = RigKind::Ring;
  int count = 4;               // ring only; grid uses rows * cols
  double radius = 7.0;         // ring radius, m
  double height = 2.5;         // camera height, m
  int grid_rows = 3;
  int grid_cols = 4;
  double grid_spacing_x = 2.5;  // m
  double grid_spacing_y = 2.5;  // m
  double focal = 500.0;         // px
  ImageSize image{640, 480};
};

// Nominal adult proportions in meters; each person is scaled by a random
// factor in [1 - scale_jitter, 1 + scale_jitter].
struct BodyShape {
  double pelvis_height = 0.92;
  double torso = 0.52;  // pelvis to neck
  double head = 0.22;
  double shoulder_half_width = 0.18;
  double hip_half_width = 0.10;
  double upper_arm = 0.28;
  double lower_arm = 0.25;
  double thigh = 0.42;
  double shin = 0.40;
  double scale_jitter = 0.05;
};

struct ScenarioSpec {
  int people = 1;
  MotionKind motion = MotionKind::Waypoint;
  double speed = 0.7;             // root, m/s
  double swing_amplitude = 0.5;   // rad
  double swing_frequency = 0.9;   // Hz
  double area_x = 4.0;            // walking area extent, m
  double area_y = 4.0;
  double min_separation = 1.0;    // crossing lane spacing / cell margin, m
  BodyShape body;
  RigSpec rig;
  double fps = 25.0;              // per camera
  std::vector<double> camera_fps;  // optional per-camera override
  PhaseMode phase = PhaseMode::Staggered;
  double jitter = 0.0;            // s, timestamp noise std-dev
  double noise_px = 0.0;
  double dropout = 0.0;
  double confidence = 1.0;
  double duration = 10.0;         // s
  std::uint64_t seed = 1;

  // Throws InvalidSpec.
  void validate() const;
};

struct PersonTruth {
  int id = 0;
  std::vector<Vec3> joints;
  int observed_cameras = 0;  // distinct cameras that have detected the person so far
};

struct DetectionTruth {
  std::int64_t detection = -1;
  int person = -1;
  std::vector<std::optional<Vec2>> noise;  // in-memory only
};

struct TruthFrame {
  double timestamp = 0.0;
  int camera = -1;
  std::vector<PersonTruth> persons;
  std::vector<DetectionTruth> detections;
};

struct GroundTruth {
  std::vector<TruthFrame> frames;
};

struct Scenario {
  CameraSet cameras;
  std::vector<FrameBatch> stream;  // ordered by (timestamp, camera)
  GroundTruth truth;
};

Scenario generate(const ScenarioSpec& spec);

CameraSet make_rig(const RigSpec& rig, const Vec3& look_at);

// Camera looking from `center` at `target` with +y of the image pointing down.
CameraView look_at_camera(std::string id, const Vec3& center, const Vec3& target, double focal,
                          ImageSize image);

// Truth skeleton at time t for each person, independent of any stream.
class MotionModel {
 public:
  explicit MotionModel(const ScenarioSpec& spec);

  int people() const { return static_cast<int>(tracks_.size()); }
  std::vector<Vec3> pose(int person, double t) const;

 private:
  struct Track {
    std::vector<Vec3> root;  // sampled every kStep seconds
    std::vector<double> heading;
    double scale = 1.0;
    double phase = 0.0;
  };
  static constexpr double kStep = 0.005;

  ScenarioSpec spec_;
  std::vector<Track> tracks_;
};

}  // namespace crossview
