#include "crossview/geometry.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace crossview {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateProjection: return "DegenerateProjection";
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::RankDeficientP: return "RankDeficientP";
    case ErrorCode::ChronologyViolation: return "ChronologyViolation";
    case ErrorCode::UnknownCamera: return "UnknownCamera";
    case ErrorCode::SameCamera: return "SameCamera";
    case ErrorCode::InsufficientViews: return "InsufficientViews";
    case ErrorCode::NearDegenerate: return "NearDegenerate";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

CameraView CameraView::from_projection(std::string id, const Mat34& P, ImageSize size) {
  if (!P.allFinite()) {
    throw Error(ErrorCode::RankDeficientP, "camera '" + id + "': non-finite projection matrix");
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(P, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0 || s(2) <= 1e-12 * s(0)) {
    throw Error(ErrorCode::RankDeficientP, "camera '" + id + "': rank(P) < 3");
  }
  const Vec4 null = svd.matrixV().col(3);
  if (std::abs(null(3)) <= 1e-12 * null.norm()) {
    throw Error(ErrorCode::RankDeficientP, "camera '" + id + "': center at infinity");
  }

  CameraView cam;
  cam.id_ = std::move(id);
  cam.P_ = P;
  cam.size_ = size;
  cam.center_ = null.head<3>() / null(3);
  // P+ = P^T (P P^T)^-1
  const Mat3 PPt = P * P.transpose();
  cam.P_plus_ = P.transpose() * PPt.ldlt().solve(Mat3::Identity());
  const double det = P.leftCols<3>().determinant();
  cam.depth_sign_ = det < 0.0 ? -1.0 : 1.0;
  return cam;
}

Projection project(const CameraView& cam, const Vec3& X) {
  const Vec3 h = cam.P() * X.homogeneous();
  Projection out;
  if (std::abs(h.z()) <= 1e-9) {
    out.status = ProjectionStatus::Degenerate;
    return out;
  }
  out.pixel = h.hnormalized();
  if (cam.depth_sign() * h.z() < 0.0) out.status = ProjectionStatus::Behind;
  return out;
}

Ray3 back_project(const CameraView& cam, const Vec2& x) {
  // Line through P+ x~ and the center; direction is invariant to the scale
  // of the homogeneous point, so the w == 0 case needs no special handling.
  const Vec4 Xp = cam.P_plus() * x.homogeneous();
  Vec3 dir = Xp.head<3>() - Xp(3) * cam.center();
  dir.normalize();
  const double depth = (cam.P().leftCols<3>() * dir).z();
  if (cam.depth_sign() * depth < 0.0) dir = -dir;
  return Ray3{cam.center(), dir};
}

double point_to_ray_distance(const Vec3& X, const Ray3& ray) {
  const Vec3 v = X - ray.origin;
  return (v - v.dot(ray.direction) * ray.direction).norm();
}

std::optional<Line2> epipolar_line(const Mat3& F, const Vec2& x) {
  const Vec3 l = F * x.homogeneous();
  const double n = std::hypot(l.x(), l.y());
  if (n <= 1e-15 * (std::abs(l.z()) + 1.0)) return std::nullopt;
  return Line2{l / n};
}

namespace {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

}  // namespace

Mat3 fundamental_from_projections(const CameraView& cam1, const CameraView& cam2) {
  if ((cam1.center() - cam2.center()).norm() < 1e-9) {
    throw Error(ErrorCode::CoincidentCenters,
                "cameras '" + cam1.id() + "' and '" + cam2.id() + "' share a center");
  }
  const Vec3 epipole = cam2.P() * cam1.center().homogeneous();
  Mat3 F = skew(epipole) * cam2.P() * cam1.P_plus();
  return F / F.norm();
}

CameraSet::CameraSet(std::vector<CameraView> cameras) : cameras_(std::move(cameras)) {
  const std::size_t n = cameras_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, inserted] = index_.emplace(cameras_[i].id(), static_cast<int>(i));
    if (!inserted) {
      throw Error(ErrorCode::ParseError, "duplicate camera id '" + cameras_[i].id() + "'");
    }
  }
  fundamentals_.assign(n * n, Mat3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Mat3 F = fundamental_from_projections(cameras_[i], cameras_[j]);
      fundamentals_[i * n + j] = F;
      fundamentals_[j * n + i] = F.transpose();
    }
  }
}

int CameraSet::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownCamera, "unknown camera '" + id + "'");
  return it->second;
}

std::optional<int> CameraSet::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace crossview
