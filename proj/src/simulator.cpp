#include "crossview/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace crossview {

namespace {

constexpr double kTurnRate = 3.0;  // rad/s

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

double round_us(double t) { return std::round(t * 1e6) / 1e6; }

struct Cell {
  double x0, x1, y0, y1;
};

std::vector<Cell> person_cells(const ScenarioSpec& spec) {
  const int n = spec.people;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const double w = spec.area_x / cols;
  const double h = spec.area_y / rows;
  const double mx = std::min(spec.min_separation / 2.0, 0.45 * w);
  const double my = std::min(spec.min_separation / 2.0, 0.45 * h);
  std::vector<Cell> cells;
  for (int i = 0; i < n; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    const double x0 = -spec.area_x / 2.0 + c * w;
    const double y0 = -spec.area_y / 2.0 + r * h;
    cells.push_back({x0 + mx, x0 + w - mx, y0 + my, y0 + h - my});
  }
  return cells;
}

}  // namespace

void ScenarioSpec::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidSpec, what);
  };
  require(people >= 0, "people must be >= 0");
  require(fps > 0.0, "fps must be > 0");
  for (double r : camera_fps) require(r > 0.0, "camera_fps entries must be > 0");
  require(noise_px >= 0.0, "noise_px must be >= 0");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(jitter >= 0.0, "jitter must be >= 0");
  require(duration > 0.0, "duration must be > 0");
  require(speed >= 0.0, "speed must be >= 0");
  require(area_x > 0.0 && area_y > 0.0, "area must be positive");
  require(confidence >= 0.0 && confidence <= 1.0, "confidence must be in [0, 1]");
  require(rig.focal > 0.0 && rig.image.width > 0 && rig.image.height > 0, "bad intrinsics");
  if (rig.kind == RigKind::Ring) {
    require(rig.count >= 1, "rig.count must be >= 1");
    require(rig.radius > 0.0, "rig.radius must be > 0");
  } else {
    require(rig.grid_rows >= 1 && rig.grid_cols >= 1, "grid must be at least 1x1");
  }
  const int cams = rig.kind == RigKind::Ring ? rig.count : rig.grid_rows * rig.grid_cols;
  require(camera_fps.empty() || static_cast<int>(camera_fps.size()) == cams,
          "camera_fps must list one rate per camera");
}

CameraView look_at_camera(std::string id, const Vec3& center, const Vec3& target, double focal,
                          ImageSize image) {
  const Vec3 forward = (target - center).normalized();
  Vec3 up(0.0, 0.0, 1.0);
  if (std::abs(forward.dot(up)) > 0.999) up = Vec3(0.0, 1.0, 0.0);
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 down = forward.cross(right);
  Mat3 R;
  R.row(0) = right.transpose();
  R.row(1) = down.transpose();
  R.row(2) = forward.transpose();
  Mat3 K;
  K << focal, 0.0, image.width / 2.0, 0.0, focal, image.height / 2.0, 0.0, 0.0, 1.0;
  Mat34 Rt;
  Rt.leftCols<3>() = R;
  Rt.col(3) = -R * center;
  return CameraView::from_projection(std::move(id), K * Rt, image);
}

CameraSet make_rig(const RigSpec& rig, const Vec3& look_at) {
  std::vector<CameraView> cams;
  if (rig.kind == RigKind::Ring) {
    for (int c = 0; c < rig.count; ++c) {
      const double a = 2.0 * std::numbers::pi * c / rig.count;
      const Vec3 center(look_at.x() + rig.radius * std::cos(a), look_at.y() + rig.radius * std::sin(a),
                        rig.height);
      cams.push_back(look_at_camera("cam" + std::to_string(c), center, look_at, rig.focal, rig.image));
    }
  } else {
    int c = 0;
    for (int r = 0; r < rig.grid_rows; ++r) {
      for (int q = 0; q < rig.grid_cols; ++q, ++c) {
        const double x = (q - (rig.grid_cols - 1) / 2.0) * rig.grid_spacing_x;
        const double y = (r - (rig.grid_rows - 1) / 2.0) * rig.grid_spacing_y;
        const Vec3 center(look_at.x() + x, look_at.y() + y, rig.height);
        // Tilt toward the middle of the area so neighbouring views overlap.
        const Vec3 target(look_at.x() + 0.3 * x, look_at.y() + 0.3 * y, 0.0);
        cams.push_back(look_at_camera("cam" + std::to_string(c), center, target, rig.focal, rig.image));
      }
    }
  }
  return CameraSet(std::move(cams));
}

MotionModel::MotionModel(const ScenarioSpec& spec) : spec_(spec) {
  std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ULL + 17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<Cell> cells = person_cells(spec);
  const auto steps = static_cast<std::size_t>(std::ceil(spec.duration / kStep)) + 2;

  for (int p = 0; p < spec.people; ++p) {
    Track tr;
    tr.scale = 1.0 + spec.body.scale_jitter * (2.0 * unit(rng) - 1.0);
    tr.phase = 2.0 * std::numbers::pi * unit(rng);
    tr.root.reserve(steps);
    tr.heading.reserve(steps);
    const Cell& cell = cells[static_cast<std::size_t>(p)];
    const double z = spec.body.pelvis_height * tr.scale;

    if (spec.motion == MotionKind::Static) {
      const Vec3 pos((cell.x0 + cell.x1) / 2.0, (cell.y0 + cell.y1) / 2.0, z);
      const double h = 2.0 * std::numbers::pi * unit(rng);
      tr.root.assign(steps, pos);
      tr.heading.assign(steps, h);
    } else if (spec.motion == MotionKind::Waypoint) {
      auto sample = [&] {
        return Vec3(cell.x0 + unit(rng) * (cell.x1 - cell.x0), cell.y0 + unit(rng) * (cell.y1 - cell.y0), z);
      };
      Vec3 pos = sample();
      Vec3 goal = sample();
      double heading = std::atan2(goal.y() - pos.y(), goal.x() - pos.x());
      for (std::size_t i = 0; i < steps; ++i) {
        tr.root.push_back(pos);
        tr.heading.push_back(heading);
        Vec3 to_goal = goal - pos;
        double step = spec.speed * kStep;
        while (to_goal.norm() <= step) {
          pos = goal;
          step -= to_goal.norm();
          goal = sample();
          to_goal = goal - pos;
          if (to_goal.norm() < 1e-9) break;
        }
        if (to_goal.norm() > 1e-9) pos += to_goal.normalized() * step;
        const double want = std::atan2(to_goal.y(), to_goal.x());
        heading = wrap_angle(heading + std::clamp(wrap_angle(want - heading), -kTurnRate * kStep, kTurnRate * kStep));
      }
    } else {
      const double lane = (p - (spec.people - 1) / 2.0) * spec.min_separation;
      const double half = spec.area_x / 2.0;
      const double length = 2.0 * half;
      // Alternate lanes start on opposite sides so neighbours pass each other.
      const double offset = (p % 2 == 0) ? 0.0 : length;
      double heading = (p % 2 == 0) ? 0.0 : std::numbers::pi;
      for (std::size_t i = 0; i < steps; ++i) {
        const double s = std::fmod(spec.speed * kStep * static_cast<double>(i) + offset, 2.0 * length);
        const double x = s < length ? -half + s : half - (s - length);
        const double want = s < length ? 0.0 : std::numbers::pi;
        tr.root.emplace_back(x, lane, z);
        heading = wrap_angle(heading + std::clamp(wrap_angle(want - heading), -kTurnRate * kStep, kTurnRate * kStep));
        tr.heading.push_back(heading);
      }
    }
    tracks_.push_back(std::move(tr));
  }
}

std::vector<Vec3> MotionModel::pose(int person, double t) const {
  const Track& tr = tracks_[static_cast<std::size_t>(person)];
  const double u = std::clamp(t / kStep, 0.0, static_cast<double>(tr.root.size() - 1));
  const auto i0 = static_cast<std::size_t>(std::floor(u));
  const std::size_t i1 = std::min(i0 + 1, tr.root.size() - 1);
  const double f = u - static_cast<double>(i0);
  const Vec3 root = (1.0 - f) * tr.root[i0] + f * tr.root[i1];
  const double h = tr.heading[i0] + f * wrap_angle(tr.heading[i1] - tr.heading[i0]);

  const BodyShape& b = spec_.body;
  const double s = tr.scale;
  const Vec3 fwd(std::cos(h), std::sin(h), 0.0);
  const Vec3 left(-std::sin(h), std::cos(h), 0.0);
  const Vec3 up(0.0, 0.0, 1.0);
  auto limb = [&](double angle) -> Vec3 { return std::sin(angle) * fwd - std::cos(angle) * up; };
  const double swing = spec_.swing_amplitude *
                       std::sin(2.0 * std::numbers::pi * spec_.swing_frequency * t + tr.phase);

  std::vector<Vec3> J(kNumJoints);
  using namespace joint;
  J[Neck] = root + s * b.torso * up;
  J[Head] = J[Neck] + s * b.head * up;
  J[LShoulder] = J[Neck] + s * b.shoulder_half_width * left;
  J[RShoulder] = J[Neck] - s * b.shoulder_half_width * left;
  J[LHip] = root + s * b.hip_half_width * left;
  J[RHip] = root - s * b.hip_half_width * left;
  J[LElbow] = J[LShoulder] + s * b.upper_arm * limb(swing);
  J[RElbow] = J[RShoulder] + s * b.upper_arm * limb(-swing);
  J[LWrist] = J[LElbow] + s * b.lower_arm * limb(swing + 0.4);
  J[RWrist] = J[RElbow] + s * b.lower_arm * limb(-swing + 0.4);
  J[LKnee] = J[LHip] + s * b.thigh * limb(-swing);
  J[RKnee] = J[RHip] + s * b.thigh * limb(swing);
  J[LAnkle] = J[LKnee] + s * b.shin * limb(-swing - 0.15);
  J[RAnkle] = J[RKnee] + s * b.shin * limb(swing - 0.15);
  return J;
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  Scenario out;
  out.cameras = make_rig(spec.rig, Vec3(0.0, 0.0, 1.0));
  const MotionModel motion(spec);
  const int num_cams = static_cast<int>(out.cameras.size());

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct FrameSlot {
    double t;
    int camera;
  };
  std::vector<FrameSlot> slots;
  for (int c = 0; c < num_cams; ++c) {
    const double rate = spec.camera_fps.empty() ? spec.fps : spec.camera_fps[static_cast<std::size_t>(c)];
    const double period = 1.0 / rate;
    double phase = 0.0;
    if (spec.phase == PhaseMode::Staggered) phase = period * c / num_cams;
    if (spec.phase == PhaseMode::Random) phase = period * unit(rng);
    double prev = -1.0;
    for (long n = 0;; ++n) {
      double t = phase + static_cast<double>(n) * period;
      if (t >= spec.duration) break;
      if (spec.jitter > 0.0) t = std::max(t + spec.jitter * gauss(rng), prev + 1e-4);
      t = round_us(std::max(t, 0.0));
      if (t <= prev) t = round_us(prev + 1e-4);
      if (t >= spec.duration) break;
      slots.push_back({t, c});
      prev = t;
    }
  }
  std::stable_sort(slots.begin(), slots.end(), [](const FrameSlot& a, const FrameSlot& b) {
    return a.t < b.t || (a.t == b.t && a.camera < b.camera);
  });

  std::vector<std::set<int>> seen_by(static_cast<std::size_t>(spec.people));
  std::vector<int> order(static_cast<std::size_t>(spec.people));
  std::int64_t next_id = 0;
  out.stream.reserve(slots.size());
  out.truth.frames.reserve(slots.size());

  for (const FrameSlot& slot : slots) {
    const CameraView& cam = out.cameras[static_cast<std::size_t>(slot.camera)];
    FrameBatch frame;
    frame.camera = slot.camera;
    frame.timestamp = slot.t;
    TruthFrame tf;
    tf.timestamp = slot.t;
    tf.camera = slot.camera;

    std::vector<std::vector<Vec3>> poses;
    for (int p = 0; p < spec.people; ++p) poses.push_back(motion.pose(p, slot.t));

    for (int p = 0; p < spec.people; ++p) order[static_cast<std::size_t>(p)] = p;
    std::shuffle(order.begin(), order.end(), rng);

    for (int p : order) {
      Detection det;
      det.camera = slot.camera;
      det.timestamp = slot.t;
      det.joints.resize(kNumJoints);
      DetectionTruth dt;
      dt.person = p;
      dt.noise.resize(kNumJoints);
      int present = 0;
      for (int k = 0; k < kNumJoints; ++k) {
        const Projection proj = project(cam, poses[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)]);
        const Vec2 noise(spec.noise_px * gauss(rng), spec.noise_px * gauss(rng));
        const bool dropped = spec.dropout > 0.0 && unit(rng) < spec.dropout;
        if (!proj.ok() || !cam.in_image(proj.pixel) || dropped) continue;
        det.joints[static_cast<std::size_t>(k)] = Keypoint{proj.pixel + noise, spec.confidence};
        dt.noise[static_cast<std::size_t>(k)] = noise;
        ++present;
      }
      if (present == 0) continue;
      det.id = next_id++;
      dt.detection = det.id;
      if (present >= 3) seen_by[static_cast<std::size_t>(p)].insert(slot.camera);
      frame.detections.push_back(std::move(det));
      tf.detections.push_back(std::move(dt));
    }

    for (int p = 0; p < spec.people; ++p) {
      tf.persons.push_back({p, std::move(poses[static_cast<std::size_t>(p)]),
                            static_cast<int>(seen_by[static_cast<std::size_t>(p)].size())});
    }
    out.stream.push_back(std::move(frame));
    out.truth.frames.push_back(std::move(tf));
  }
  return out;
}

}  // namespace crossview
