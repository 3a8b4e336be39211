#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "crossview/config.hpp"
#include "crossview/geometry.hpp"
#include "crossview/simulator.hpp"
#include "crossview/tracker.hpp"

namespace crossview::io {

// All streams are line-delimited JSON objects. Timestamps are written as
// decimal strings with six fractional digits.
std::string format_timestamp(double t);

// Calibration: one {"id", "P" (12 numbers, row-major), "image_size"} per line.
CameraSet read_calibration(std::istream& in);
CameraSet load_calibration(const std::string& path);
void write_calibration(std::ostream& out, const CameraSet& cams);

std::string frame_to_line(const FrameBatch& frame, const CameraSet& cams);
// Throws ParseError (with `line_no` in the message) or UnknownCamera.
FrameBatch frame_from_line(const std::string& line, const CameraSet& cams, int num_joints,
                           long line_no = 0);
std::vector<FrameBatch> read_frames(std::istream& in, const CameraSet& cams, int num_joints);
void write_frames(std::ostream& out, const std::vector<FrameBatch>& frames, const CameraSet& cams);

std::string output_to_line(const TrackOutput& output, const CameraSet& cams);
TrackOutput output_from_line(const std::string& line, const CameraSet& cams, long line_no = 0);
std::vector<TrackOutput> read_outputs(std::istream& in, const CameraSet& cams);
void write_outputs(std::ostream& out, const std::vector<TrackOutput>& outputs, const CameraSet& cams);

std::string truth_to_line(const TruthFrame& frame, const CameraSet& cams);
TruthFrame truth_from_line(const std::string& line, const CameraSet& cams, long line_no = 0);
GroundTruth read_truth(std::istream& in, const CameraSet& cams);
void write_truth(std::ostream& out, const GroundTruth& truth, const CameraSet& cams);

// Flat key=value lines (with '#' comments) or a JSON object; keys are the
// TrackerConfig field names. When alpha2D is given without alpha2D_epi the
// latter follows as alpha2D * 0.5 s.
TrackerConfig parse_config(const std::string& text);
TrackerConfig load_config(const std::string& path);
std::string config_to_text(const TrackerConfig& cfg);

ScenarioSpec parse_scenario(const std::string& json_text);
ScenarioSpec load_scenario(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace crossview::io
