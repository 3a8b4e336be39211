#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "crossview/types.hpp"

namespace crossview {

struct ImageSize {
  int width = 0;
  int height = 0;
};

struct Ray3 {
  Vec3 origin;
  Vec3 direction;  // unit length
};

// Homogeneous image line a*x + b*y + c = 0 with a^2 + b^2 = 1.
struct Line2 {
  Vec3 coeffs;

  double distance(const Vec2& x) const {
    return std::abs(coeffs.x() * x.x() + coeffs.y() * x.y() + coeffs.z());
  }
};

// Calibrated pinhole camera. Immutable once built; the pseudo-inverse and
// center are derived from P at construction.
class CameraView {
 public:
  static CameraView from_projection(std::string id, const Mat34& P, ImageSize size);

  const std::string& id() const { return id_; }
  const Mat34& P() const { return P_; }
  const Mat43& P_plus() const { return P_plus_; }
  const Vec3& center() const { return center_; }
  ImageSize image_size() const { return size_; }

  // Signed depth convention: positive in front of the camera.
  double depth_sign() const { return depth_sign_; }

  bool in_image(const Vec2& x) const {
    return x.x() >= 0.0 && x.y() >= 0.0 && x.x() < size_.width && x.y() < size_.height;
  }

 private:
  std::string id_;
  Mat34 P_;
  Mat43 P_plus_;
  Vec3 center_;
  ImageSize size_;
  double depth_sign_ = 1.0;
};

enum class ProjectionStatus { Ok, Behind, Degenerate };

struct Projection {
  Vec2 pixel = Vec2::Zero();
  ProjectionStatus status = ProjectionStatus::Ok;

  bool ok() const { return status == ProjectionStatus::Ok; }
};

// Dehomogenized P * [X; 1]. Points behind the camera are still projected but
// flagged; points on the principal plane are flagged Degenerate.
Projection project(const CameraView& cam, const Vec3& X);

Ray3 back_project(const CameraView& cam, const Vec2& x);

double point_to_ray_distance(const Vec3& X, const Ray3& ray);

// l = F * [x; 1], normalized so distances are in pixels. nullopt when x is
// the epipole (both line normals vanish).
std::optional<Line2> epipolar_line(const Mat3& F, const Vec2& x);

// F with x2^T F x1 = 0, scaled to unit Frobenius norm.
Mat3 fundamental_from_projections(const CameraView& cam1, const CameraView& cam2);

// Camera rig with precomputed pairwise fundamental matrices.
class CameraSet {
 public:
  CameraSet() = default;
  explicit CameraSet(std::vector<CameraView> cameras);

  std::size_t size() const { return cameras_.size(); }
  bool empty() const { return cameras_.empty(); }
  const CameraView& operator[](std::size_t i) const { return cameras_[i]; }
  const std::vector<CameraView>& cameras() const { return cameras_; }

  // Throws UnknownCamera.
  int index_of(const std::string& id) const;
  std::optional<int> find(const std::string& id) const;

  // Maps points in camera `from` to epipolar lines in camera `to`.
  const Mat3& fundamental(int from, int to) const {
    return fundamentals_[static_cast<std::size_t>(from) * cameras_.size() + to];
  }

 private:
  std::vector<CameraView> cameras_;
  std::unordered_map<std::string, int> index_;
  std::vector<Mat3> fundamentals_;
};

}  // namespace crossview
