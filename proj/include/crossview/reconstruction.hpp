#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "crossview/geometry.hpp"
#include "crossview/types.hpp"

namespace crossview {

// One view of one joint: at most one entry per camera in a collection.
struct JointObservation {
  int camera;
  Vec2 x;
  double t;
  double confidence = 1.0;
};

using CoefficientMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4>;

// Two DLT rows per view: x * p3^T - p1^T and y * p3^T - p2^T.
// Throws UnknownCamera.
CoefficientMatrix build_coefficients(std::span<const JointObservation> obs, const CameraSet& cams);

enum class TriangulationStatus { Ok, InsufficientViews, NearDegenerate };

struct TriangulationResult {
  TriangulationStatus status = TriangulationStatus::InsufficientViews;
  Vec3 X = Vec3::Zero();
  double residual = 0.0;  // mean reprojection distance, px
  int n_views = 0;

  bool ok() const { return status == TriangulationStatus::Ok; }
};

// exp(-lambda_t * (t_now - t_i)) / row_norm
double row_weight(double t_now, double t_i, double lambda_t, double row_norm);

// Plain linear triangulation: null vector of C.
TriangulationResult triangulate(std::span<const JointObservation> obs, const CameraSet& cams);

// Time-weighted triangulation toward the newest observation time: each row
// is scaled by its time decay and divided by its own L2 norm. With
// use_confidence the decay is also multiplied by the joint confidence.
TriangulationResult triangulate_weighted(std::span<const JointObservation> obs,
                                         const CameraSet& cams, double lambda_t,
                                         bool use_confidence = false);

}  // namespace crossview
