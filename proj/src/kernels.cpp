#include "crossview/kernels.hpp"

#include <exception>

#include <omp.h>

namespace crossview {

namespace {

// Below this many entries the fork/join overhead dominates.
constexpr long kParallelMinWork = 256;

TriangulationResult run_job(const TriangulationJob& job, const CameraSet& cams,
                            const TrackerConfig& cfg) {
  if (job.weighted) {
    return triangulate_weighted(job.obs, cams, cfg.lambda_t, cfg.confidence_weights);
  }
  return triangulate(job.obs, cams);
}

}  // namespace

AffinityMatrix body_affinity_matrix_serial(std::span<const Target> targets,
                                           std::span<const Detection> detections,
                                           const CameraView& cam, const TrackerConfig& cfg) {
  AffinityMatrix A(static_cast<Eigen::Index>(targets.size()),
                   static_cast<Eigen::Index>(detections.size()));
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = 0; j < detections.size(); ++j)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          body_affinity(targets[i], detections[j], cam, cfg);
  return A;
}

AffinityMatrix body_affinity_matrix_omp(std::span<const Target> targets,
                                        std::span<const Detection> detections,
                                        const CameraView& cam, const TrackerConfig& cfg) {
  const long n = static_cast<long>(targets.size());
  const long m = static_cast<long>(detections.size());
  AffinityMatrix A(n, m);
  std::exception_ptr error;
#pragma omp parallel for collapse(2) schedule(static) if (n * m * 8 >= kParallelMinWork)
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < m; ++j) {
      try {
        A(i, j) = body_affinity(targets[static_cast<std::size_t>(i)],
                                detections[static_cast<std::size_t>(j)], cam, cfg);
      } catch (...) {
#pragma omp critical(crossview_kernel_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return A;
}

AffinityMatrix body_affinity_matrix(std::span<const Target> targets,
                                    std::span<const Detection> detections, const CameraView& cam,
                                    const TrackerConfig& cfg, Execution exec) {
  return exec == Execution::Parallel ? body_affinity_matrix_omp(targets, detections, cam, cfg)
                                     : body_affinity_matrix_serial(targets, detections, cam, cfg);
}

Eigen::MatrixXd epipolar_affinity_matrix_serial(std::span<const Detection* const> items,
                                                const CameraSet& cams, const TrackerConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(items.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Detection& di = *items[static_cast<std::size_t>(i)];
      const Detection& dj = *items[static_cast<std::size_t>(j)];
      const double s = di.camera == dj.camera
                           ? kForbidden
                           : epipolar_affinity(di, dj, cams.fundamental(di.camera, dj.camera), cfg);
      a(i, j) = s;
      a(j, i) = s;
    }
  }
  return a;
}

Eigen::MatrixXd epipolar_affinity_matrix_omp(std::span<const Detection* const> items,
                                             const CameraSet& cams, const TrackerConfig& cfg) {
  const long n = static_cast<long>(items.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  // Full square iteration keeps the schedule balanced; each thread writes
  // only the upper-triangle entries of its own (i, j).
#pragma omp parallel for collapse(2) schedule(static) if (n * n * 4 >= kParallelMinWork)
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (j <= i) continue;
      const Detection& di = *items[static_cast<std::size_t>(i)];
      const Detection& dj = *items[static_cast<std::size_t>(j)];
      a(i, j) = di.camera == dj.camera
                    ? kForbidden
                    : epipolar_affinity(di, dj, cams.fundamental(di.camera, dj.camera), cfg);
    }
  }
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  return a;
}

Eigen::MatrixXd epipolar_affinity_matrix(std::span<const Detection* const> items,
                                         const CameraSet& cams, const TrackerConfig& cfg,
                                         Execution exec) {
  return exec == Execution::Parallel ? epipolar_affinity_matrix_omp(items, cams, cfg)
                                     : epipolar_affinity_matrix_serial(items, cams, cfg);
}

std::vector<TriangulationResult> triangulate_batch_serial(std::span<const TriangulationJob> jobs,
                                                          const CameraSet& cams,
                                                          const TrackerConfig& cfg) {
  std::vector<TriangulationResult> out(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = run_job(jobs[i], cams, cfg);
  return out;
}

std::vector<TriangulationResult> triangulate_batch_omp(std::span<const TriangulationJob> jobs,
                                                       const CameraSet& cams,
                                                       const TrackerConfig& cfg) {
  const long n = static_cast<long>(jobs.size());
  std::vector<TriangulationResult> out(jobs.size());
#pragma omp parallel for schedule(static) if (n * 16 >= kParallelMinWork)
  for (long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = run_job(jobs[static_cast<std::size_t>(i)], cams, cfg);
  return out;
}

std::vector<TriangulationResult> triangulate_batch(std::span<const TriangulationJob> jobs,
                                                   const CameraSet& cams, const TrackerConfig& cfg,
                                                   Execution exec) {
  return exec == Execution::Parallel ? triangulate_batch_omp(jobs, cams, cfg)
                                     : triangulate_batch_serial(jobs, cams, cfg);
}

}  // namespace crossview
