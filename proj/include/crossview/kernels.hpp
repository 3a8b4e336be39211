#pragma once

#include <span>
#include <vector>

#include "crossview/affinity.hpp"
#include "crossview/assignment.hpp"
#include "crossview/reconstruction.hpp"

namespace crossview {

// Data-parallel inner loops of a tracker step. Every kernel has a serial
// reference; the OpenMP versions must produce identical output.
enum class Execution { Serial, Parallel };

AffinityMatrix body_affinity_matrix_serial(std::span<const Target> targets,
                                           std::span<const Detection> detections,
                                           const CameraView& cam, const TrackerConfig& cfg);
AffinityMatrix body_affinity_matrix_omp(std::span<const Target> targets,
                                        std::span<const Detection> detections,
                                        const CameraView& cam, const TrackerConfig& cfg);
AffinityMatrix body_affinity_matrix(std::span<const Target> targets,
                                    std::span<const Detection> detections, const CameraView& cam,
                                    const TrackerConfig& cfg, Execution exec);

// Symmetric pairwise epipolar scores; same-camera pairs are kForbidden and
// the diagonal is 0.
Eigen::MatrixXd epipolar_affinity_matrix_serial(std::span<const Detection* const> items,
                                                const CameraSet& cams, const TrackerConfig& cfg);
Eigen::MatrixXd epipolar_affinity_matrix_omp(std::span<const Detection* const> items,
                                             const CameraSet& cams, const TrackerConfig& cfg);
Eigen::MatrixXd epipolar_affinity_matrix(std::span<const Detection* const> items,
                                         const CameraSet& cams, const TrackerConfig& cfg,
                                         Execution exec);

struct TriangulationJob {
  std::vector<JointObservation> obs;
  bool weighted = true;
};

std::vector<TriangulationResult> triangulate_batch_serial(std::span<const TriangulationJob> jobs,
                                                          const CameraSet& cams,
                                                          const TrackerConfig& cfg);
std::vector<TriangulationResult> triangulate_batch_omp(std::span<const TriangulationJob> jobs,
                                                       const CameraSet& cams,
                                                       const TrackerConfig& cfg);
std::vector<TriangulationResult> triangulate_batch(std::span<const TriangulationJob> jobs,
                                                   const CameraSet& cams, const TrackerConfig& cfg,
                                                   Execution exec);

}  // namespace crossview
