#pragma once

#include <span>
#include <vector>

#include "crossview/config.hpp"
#include "crossview/geometry.hpp"
#include "crossview/kernels.hpp"
#include "crossview/tracker.hpp"

namespace crossview {

// Stateless per-frame reconstruction: epipolar affinities over all camera
// pairs, cycle-consistent partitioning, and plain triangulation of every
// cluster with two or more detections. Poses carry the cluster index as id.
std::vector<TargetPose> baseline_frame(std::span<const Detection> detections, const CameraSet& cams,
                                       const TrackerConfig& cfg, int num_joints = kNumJoints,
                                       Execution exec = Execution::Serial);

// Groups the stream into global frames (the n-th frame of every camera) and
// runs baseline_frame on each. Output is stamped with the group's newest
// timestamp and the camera that delivered it.
std::vector<TrackOutput> baseline_stream(std::span<const FrameBatch> stream, const CameraSet& cams,
                                         const TrackerConfig& cfg, int num_joints = kNumJoints,
                                         Execution exec = Execution::Serial);

}  // namespace crossview
