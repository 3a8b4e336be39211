#include "crossview/reconstruction.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace crossview {

namespace {

using Row4 = Eigen::Matrix<double, 1, 4>;

void dlt_rows(const CameraView& cam, const Vec2& x, Row4& r0, Row4& r1) {
  const Mat34& P = cam.P();
  r0 = x.x() * P.row(2) - P.row(0);
  r1 = x.y() * P.row(2) - P.row(1);
}

const CameraView& camera_at(const CameraSet& cams, int index) {
  if (index < 0 || static_cast<std::size_t>(index) >= cams.size()) {
    throw Error(ErrorCode::UnknownCamera, "camera index " + std::to_string(index));
  }
  return cams[static_cast<std::size_t>(index)];
}

bool distinct_centers(std::span<const JointObservation> obs, const CameraSet& cams) {
  const Vec3& c0 = cams[static_cast<std::size_t>(obs.front().camera)].center();
  for (const auto& o : obs)
    if ((cams[static_cast<std::size_t>(o.camera)].center() - c0).norm() >= 1e-9) return true;
  return false;
}

// Null vector of the accumulated normal matrix. Columns are equilibrated
// first so the eigenproblem is well conditioned in pixel/meter units.
TriangulationResult solve_normal(const Eigen::Matrix4d& CtC, std::span<const JointObservation> obs,
                                 const CameraSet& cams) {
  TriangulationResult out;
  out.n_views = static_cast<int>(obs.size());
  Eigen::Vector4d scale;
  for (int i = 0; i < 4; ++i) {
    const double d = CtC(i, i);
    scale(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
  }
  const Eigen::Matrix4d N = scale.asDiagonal() * CtC * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(N);
  Eigen::Vector4d Xh = scale.asDiagonal() * eig.eigenvectors().col(0);
  Xh.normalize();
  if (std::abs(Xh(3)) < 1e-12) {
    out.status = TriangulationStatus::NearDegenerate;
    return out;
  }
  out.X = Xh.head<3>() / Xh(3);
  double sum = 0.0;
  for (const auto& o : obs) {
    const Vec3 h = cams[static_cast<std::size_t>(o.camera)].P() * out.X.homogeneous();
    sum += (h.hnormalized() - o.x).norm();
  }
  out.residual = sum / static_cast<double>(obs.size());
  out.status = TriangulationStatus::Ok;
  return out;
}

bool precheck(std::span<const JointObservation> obs, const CameraSet& cams, TriangulationResult& out) {
  for (const auto& o : obs) camera_at(cams, o.camera);
  out.n_views = static_cast<int>(obs.size());
  if (obs.size() < 2 || !distinct_centers(obs, cams)) {
    out.status = TriangulationStatus::InsufficientViews;
    return false;
  }
  return true;
}

}  // namespace

CoefficientMatrix build_coefficients(std::span<const JointObservation> obs, const CameraSet& cams) {
  CoefficientMatrix C(static_cast<Eigen::Index>(2 * obs.size()), 4);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    Row4 r0, r1;
    dlt_rows(camera_at(cams, obs[i].camera), obs[i].x, r0, r1);
    C.row(static_cast<Eigen::Index>(2 * i)) = r0;
    C.row(static_cast<Eigen::Index>(2 * i + 1)) = r1;
  }
  return C;
}

double row_weight(double t_now, double t_i, double lambda_t, double row_norm) {
  return std::exp(-lambda_t * (t_now - t_i)) / row_norm;
}

TriangulationResult triangulate(std::span<const JointObservation> obs, const CameraSet& cams) {
  TriangulationResult out;
  if (!precheck(obs, cams, out)) return out;
  Eigen::Matrix4d CtC = Eigen::Matrix4d::Zero();
  for (const auto& o : obs) {
    Row4 r0, r1;
    dlt_rows(cams[static_cast<std::size_t>(o.camera)], o.x, r0, r1);
    CtC.noalias() += r0.transpose() * r0;
    CtC.noalias() += r1.transpose() * r1;
  }
  return solve_normal(CtC, obs, cams);
}

TriangulationResult triangulate_weighted(std::span<const JointObservation> obs,
                                         const CameraSet& cams, double lambda_t,
                                         bool use_confidence) {
  TriangulationResult out;
  if (!precheck(obs, cams, out)) return out;
  double t_now = obs.front().t;
  for (const auto& o : obs) t_now = std::max(t_now, o.t);

  Eigen::Matrix4d CtC = Eigen::Matrix4d::Zero();
  for (const auto& o : obs) {
    Row4 rows[2];
    dlt_rows(cams[static_cast<std::size_t>(o.camera)], o.x, rows[0], rows[1]);
    const double conf = use_confidence ? o.confidence : 1.0;
    for (Row4& r : rows) {
      const double norm = r.norm();
      if (norm <= 0.0) continue;
      const double w = conf * row_weight(t_now, o.t, lambda_t, norm);
      r *= w;
      CtC.noalias() += r.transpose() * r;
    }
  }
  return solve_normal(CtC, obs, cams);
}

}  // namespace crossview
