#pragma once

namespace crossview {

// Hyper-parameters of the tracker. Defaults follow the Shelf settings:
// w2D = 0.4, w3D = 0.6, alpha2D = 60 px/s, alpha3D = 0.15 m, lambda_a = 5,
// lambda_t = 10.
struct TrackerConfig {
  double w2D = 0.4;
  double w3D = 0.6;
  double alpha2D = 60.0;      // px / s, velocity threshold of the 2D term
  double alpha3D = 0.15;      // m, ray distance threshold of the 3D term
  double alpha2D_epi = 30.0;  // px, epipolar distance threshold at initialization
  double lambda_a = 5.0;      // 1 / s, affinity time penalty
  double lambda_t = 10.0;     // 1 / s, triangulation time penalty
  double match_threshold = 0.0;
  double retire_after = 1.0;  // s
  int velocity_window = 10;
  double min_joint_confidence = 0.1;
  int min_views_init = 2;
  int min_shared_joints = 3;
  int max_exact_partition = 12;
  bool weighted_triangulation = true;
  bool confidence_weights = false;

  // Throws InvalidConfig.
  void validate() const;
};

}  // namespace crossview
