#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace crossview {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat43 = Eigen::Matrix<double, 4, 3>;

// Score assigned to pairs that may never be associated.
inline constexpr double kForbidden = -std::numeric_limits<double>::infinity();

// Same-camera timestamps may regress by at most this much (seconds).
inline constexpr double kClockEpsilon = 1e-3;

enum class ErrorCode {
  DegenerateProjection,
  CoincidentCenters,
  RankDeficientP,
  ChronologyViolation,
  UnknownCamera,
  SameCamera,
  InsufficientViews,
  NearDegenerate,
  ParseError,
  InvalidSpec,
  InvalidConfig,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Keypoint {
  Vec2 x = Vec2::Zero();
  double confidence = 1.0;
};

// One person's 2D joints from one camera frame. Missing joints are nullopt.
struct Detection {
  std::int64_t id = -1;
  int camera = -1;
  double timestamp = 0.0;
  std::vector<std::optional<Keypoint>> joints;
};

struct FrameBatch {
  int camera = -1;
  double timestamp = 0.0;
  std::vector<Detection> detections;
};

}  // namespace crossview
