#include "crossview/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

#include <json.hpp>

namespace crossview::io {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(long line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError,
              (line_no > 0 ? "line " + std::to_string(line_no) + ": " : std::string()) + what);
}

json parse_json(const std::string& text, long line_no) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(line_no, std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& obj, const char* name, long line_no) {
  if (!obj.is_object()) parse_fail(line_no, "expected an object");
  const auto it = obj.find(name);
  if (it == obj.end()) parse_fail(line_no, std::string("missing field '") + name + "'");
  return *it;
}

double number(const json& v, const char* what, long line_no) {
  if (!v.is_number()) parse_fail(line_no, std::string("field '") + what + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) parse_fail(line_no, std::string("field '") + what + "' is not finite");
  return d;
}

double timestamp(const json& v, long line_no) {
  if (v.is_number()) return number(v, "timestamp", line_no);
  if (!v.is_string()) parse_fail(line_no, "timestamp must be a decimal string or number");
  const std::string s = v.get<std::string>();
  char* end = nullptr;
  const double t = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(t)) parse_fail(line_no, "bad timestamp '" + s + "'");
  return t;
}

int camera_index(const json& obj, const CameraSet& cams, long line_no) {
  const json& id = field(obj, "camera_id", line_no);
  if (!id.is_string()) parse_fail(line_no, "camera_id must be a string");
  const auto idx = cams.find(id.get<std::string>());
  if (!idx) {
    throw Error(ErrorCode::UnknownCamera,
                "line " + std::to_string(line_no) + ": unknown camera '" + id.get<std::string>() + "'");
  }
  return *idx;
}

std::int64_t integer(const json& v, const char* what, long line_no) {
  if (!v.is_number_integer()) parse_fail(line_no, std::string("field '") + what + "' must be an integer");
  return v.get<std::int64_t>();
}

json vec_json(const Vec3& X) { return json::array({X.x(), X.y(), X.z()}); }

Vec3 vec3_from(const json& v, long line_no) {
  if (!v.is_array() || v.size() != 3) parse_fail(line_no, "expected [x, y, z]");
  return {number(v[0], "x", line_no), number(v[1], "y", line_no), number(v[2], "z", line_no)};
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(line, line_no);
  }
}

}  // namespace

std::string format_timestamp(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", t);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CameraSet read_calibration(std::istream& in) {
  std::vector<CameraView> cams;
  for_each_line(in, [&](const std::string& line, long line_no) {
    const json obj = parse_json(line, line_no);
    const json& id = field(obj, "id", line_no);
    if (!id.is_string()) parse_fail(line_no, "id must be a string");
    const json& P = field(obj, "P", line_no);
    if (!P.is_array() || P.size() != 12) parse_fail(line_no, "P must hold 12 numbers");
    Mat34 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = number(P[static_cast<std::size_t>(4 * r + c)], "P", line_no);
    const json& size = field(obj, "image_size", line_no);
    if (!size.is_array() || size.size() != 2) parse_fail(line_no, "image_size must be [width, height]");
    const ImageSize image{static_cast<int>(integer(size[0], "image_size", line_no)),
                          static_cast<int>(integer(size[1], "image_size", line_no))};
    cams.push_back(CameraView::from_projection(id.get<std::string>(), m, image));
  });
  return CameraSet(std::move(cams));
}

CameraSet load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open calibration '" + path + "'");
  return read_calibration(in);
}

void write_calibration(std::ostream& out, const CameraSet& cams) {
  for (const CameraView& cam : cams.cameras()) {
    json P = json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) P.push_back(cam.P()(r, c));
    json obj;
    obj["id"] = cam.id();
    obj["P"] = std::move(P);
    obj["image_size"] = json::array({cam.image_size().width, cam.image_size().height});
    out << obj.dump() << '\n';
  }
}

std::string frame_to_line(const FrameBatch& frame, const CameraSet& cams) {
  json obj;
  obj["camera_id"] = cams[static_cast<std::size_t>(frame.camera)].id();
  obj["timestamp"] = format_timestamp(frame.timestamp);
  json dets = json::array();
  for (const Detection& d : frame.detections) {
    json dj;
    if (d.id >= 0) dj["id"] = d.id;
    json joints = json::array();
    for (const auto& kp : d.joints) {
      if (kp) joints.push_back(json::array({kp->x.x(), kp->x.y(), kp->confidence}));
      else joints.push_back(nullptr);
    }
    dj["joints"] = std::move(joints);
    dets.push_back(std::move(dj));
  }
  obj["detections"] = std::move(dets);
  return obj.dump();
}

FrameBatch frame_from_line(const std::string& line, const CameraSet& cams, int num_joints, long line_no) {
  const json obj = parse_json(line, line_no);
  FrameBatch frame;
  frame.camera = camera_index(obj, cams, line_no);
  frame.timestamp = timestamp(field(obj, "timestamp", line_no), line_no);
  const json& dets = field(obj, "detections", line_no);
  if (!dets.is_array()) parse_fail(line_no, "detections must be an array");
  for (const json& dj : dets) {
    Detection d;
    d.camera = frame.camera;
    d.timestamp = frame.timestamp;
    if (dj.is_object() && dj.contains("id")) d.id = integer(dj["id"], "id", line_no);
    const json& joints = field(dj, "joints", line_no);
    if (!joints.is_array()) parse_fail(line_no, "joints must be an array");
    if (num_joints > 0 && static_cast<int>(joints.size()) != num_joints) {
      parse_fail(line_no, "expected " + std::to_string(num_joints) + " joints, got " +
                              std::to_string(joints.size()));
    }
    for (const json& j : joints) {
      if (j.is_null()) {
        d.joints.emplace_back();
        continue;
      }
      if (!j.is_array() || j.size() != 3) parse_fail(line_no, "joint must be [x, y, confidence] or null");
      const double conf = number(j[2], "confidence", line_no);
      if (conf < 0.0 || conf > 1.0) parse_fail(line_no, "confidence must be in [0, 1]");
      d.joints.push_back(Keypoint{Vec2(number(j[0], "x", line_no), number(j[1], "y", line_no)), conf});
    }
    frame.detections.push_back(std::move(d));
  }
  return frame;
}

std::vector<FrameBatch> read_frames(std::istream& in, const CameraSet& cams, int num_joints) {
  std::vector<FrameBatch> frames;
  for_each_line(in, [&](const std::string& line, long line_no) {
    frames.push_back(frame_from_line(line, cams, num_joints, line_no));
  });
  return frames;
}

void write_frames(std::ostream& out, const std::vector<FrameBatch>& frames, const CameraSet& cams) {
  for (const FrameBatch& f : frames) out << frame_to_line(f, cams) << '\n';
}

std::string output_to_line(const TrackOutput& output, const CameraSet& cams) {
  json obj;
  obj["timestamp"] = format_timestamp(output.timestamp);
  obj["camera_id"] = output.camera >= 0 ? json(cams[static_cast<std::size_t>(output.camera)].id()) : json(nullptr);
  json targets = json::array();
  for (const TargetPose& p : output.targets) {
    json tj;
    tj["id"] = p.id;
    json joints = json::array();
    json updated = json::array();
    for (std::size_t k = 0; k < p.joints.size(); ++k) {
      joints.push_back(p.joints[k] ? vec_json(*p.joints[k]) : json(nullptr));
      const bool has_time = k < p.updated.size() && p.updated[k];
      updated.push_back(has_time ? json(format_timestamp(*p.updated[k])) : json(nullptr));
    }
    tj["joints"] = std::move(joints);
    tj["updated"] = std::move(updated);
    targets.push_back(std::move(tj));
  }
  obj["targets"] = std::move(targets);
  json matches = json::array();
  for (const DetectionLabel& m : output.matches) {
    json mj;
    mj["detection"] = m.detection;
    mj["target"] = m.target;
    matches.push_back(std::move(mj));
  }
  obj["matches"] = std::move(matches);
  obj["retired"] = output.retired;
  return obj.dump();
}

TrackOutput output_from_line(const std::string& line, const CameraSet& cams, long line_no) {
  const json obj = parse_json(line, line_no);
  TrackOutput out;
  out.timestamp = timestamp(field(obj, "timestamp", line_no), line_no);
  out.camera = field(obj, "camera_id", line_no).is_null() ? -1 : camera_index(obj, cams, line_no);
  const json& targets = field(obj, "targets", line_no);
  if (!targets.is_array()) parse_fail(line_no, "targets must be an array");
  for (const json& tj : targets) {
    TargetPose p;
    p.id = integer(field(tj, "id", line_no), "id", line_no);
    const json& joints = field(tj, "joints", line_no);
    if (!joints.is_array()) parse_fail(line_no, "joints must be an array");
    for (const json& j : joints) p.joints.push_back(j.is_null() ? std::nullopt : std::optional<Vec3>(vec3_from(j, line_no)));
    if (tj.contains("updated")) {
      for (const json& u : tj["updated"]) p.updated.push_back(u.is_null() ? std::nullopt : std::optional<double>(timestamp(u, line_no)));
    }
    p.updated.resize(p.joints.size());
    out.targets.push_back(std::move(p));
  }
  if (obj.contains("matches")) {
    for (const json& mj : obj["matches"]) {
      out.matches.push_back({integer(field(mj, "detection", line_no), "detection", line_no),
                             integer(field(mj, "target", line_no), "target", line_no)});
    }
  }
  if (obj.contains("retired")) {
    for (const json& r : obj["retired"]) out.retired.push_back(integer(r, "retired", line_no));
  }
  return out;
}

std::vector<TrackOutput> read_outputs(std::istream& in, const CameraSet& cams) {
  std::vector<TrackOutput> outputs;
  for_each_line(in, [&](const std::string& line, long line_no) {
    outputs.push_back(output_from_line(line, cams, line_no));
  });
  return outputs;
}

void write_outputs(std::ostream& out, const std::vector<TrackOutput>& outputs, const CameraSet& cams) {
  for (const TrackOutput& o : outputs) out << output_to_line(o, cams) << '\n';
}

std::string truth_to_line(const TruthFrame& frame, const CameraSet& cams) {
  json obj;
  obj["timestamp"] = format_timestamp(frame.timestamp);
  obj["camera_id"] = cams[static_cast<std::size_t>(frame.camera)].id();
  json persons = json::array();
  for (const PersonTruth& p : frame.persons) {
    json pj;
    pj["id"] = p.id;
    pj["observed_cameras"] = p.observed_cameras;
    json joints = json::array();
    for (const Vec3& X : p.joints) joints.push_back(vec_json(X));
    pj["joints"] = std::move(joints);
    persons.push_back(std::move(pj));
  }
  obj["persons"] = std::move(persons);
  json dets = json::array();
  for (const DetectionTruth& d : frame.detections) {
    json dj;
    dj["id"] = d.detection;
    dj["person"] = d.person;
    dets.push_back(std::move(dj));
  }
  obj["detections"] = std::move(dets);
  return obj.dump();
}

TruthFrame truth_from_line(const std::string& line, const CameraSet& cams, long line_no) {
  const json obj = parse_json(line, line_no);
  TruthFrame f;
  f.timestamp = timestamp(field(obj, "timestamp", line_no), line_no);
  f.camera = camera_index(obj, cams, line_no);
  for (const json& pj : field(obj, "persons", line_no)) {
    PersonTruth p;
    p.id = static_cast<int>(integer(field(pj, "id", line_no), "id", line_no));
    p.observed_cameras = static_cast<int>(integer(field(pj, "observed_cameras", line_no), "observed_cameras", line_no));
    for (const json& j : field(pj, "joints", line_no)) p.joints.push_back(vec3_from(j, line_no));
    f.persons.push_back(std::move(p));
  }
  for (const json& dj : field(obj, "detections", line_no)) {
    DetectionTruth d;
    d.detection = integer(field(dj, "id", line_no), "id", line_no);
    d.person = static_cast<int>(integer(field(dj, "person", line_no), "person", line_no));
    f.detections.push_back(std::move(d));
  }
  return f;
}

GroundTruth read_truth(std::istream& in, const CameraSet& cams) {
  GroundTruth truth;
  for_each_line(in, [&](const std::string& line, long line_no) {
    truth.frames.push_back(truth_from_line(line, cams, line_no));
  });
  return truth;
}

void write_truth(std::ostream& out, const GroundTruth& truth, const CameraSet& cams) {
  for (const TruthFrame& f : truth.frames) out << truth_to_line(f, cams) << '\n';
}

namespace {

using ConfigField = std::variant<double TrackerConfig::*, int TrackerConfig::*, bool TrackerConfig::*>;

const std::vector<std::pair<std::string, ConfigField>>& config_fields() {
  static const std::vector<std::pair<std::string, ConfigField>> fields = {
      {"w2D", &TrackerConfig::w2D},
      {"w3D", &TrackerConfig::w3D},
      {"alpha2D", &TrackerConfig::alpha2D},
      {"alpha3D", &TrackerConfig::alpha3D},
      {"alpha2D_epi", &TrackerConfig::alpha2D_epi},
      {"lambda_a", &TrackerConfig::lambda_a},
      {"lambda_t", &TrackerConfig::lambda_t},
      {"match_threshold", &TrackerConfig::match_threshold},
      {"retire_after", &TrackerConfig::retire_after},
      {"velocity_window", &TrackerConfig::velocity_window},
      {"min_joint_confidence", &TrackerConfig::min_joint_confidence},
      {"min_views_init", &TrackerConfig::min_views_init},
      {"min_shared_joints", &TrackerConfig::min_shared_joints},
      {"max_exact_partition", &TrackerConfig::max_exact_partition},
      {"weighted_triangulation", &TrackerConfig::weighted_triangulation},
      {"confidence_weights", &TrackerConfig::confidence_weights},
  };
  return fields;
}

void set_config_value(TrackerConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [name, member] : config_fields()) {
    if (name != key) continue;
    try {
      std::size_t used = 0;
      if (std::holds_alternative<double TrackerConfig::*>(member)) {
        cfg.*std::get<double TrackerConfig::*>(member) = std::stod(value, &used);
      } else if (std::holds_alternative<int TrackerConfig::*>(member)) {
        cfg.*std::get<int TrackerConfig::*>(member) = std::stoi(value, &used);
      } else {
        if (value == "true" || value == "1") cfg.*std::get<bool TrackerConfig::*>(member) = true;
        else if (value == "false" || value == "0") cfg.*std::get<bool TrackerConfig::*>(member) = false;
        else throw std::invalid_argument(value);
        used = value.size();
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidConfig, "bad value '" + value + "' for key '" + key + "'");
    }
    return;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

TrackerConfig parse_config(const std::string& text) {
  TrackerConfig cfg;
  std::map<std::string, std::string> values;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    const json obj = parse_json(body, 0);
    for (const auto& [key, v] : obj.items()) {
      if (v.is_boolean()) values[key] = v.get<bool>() ? "true" : "false";
      else if (v.is_number_integer()) values[key] = std::to_string(v.get<long long>());
      else if (v.is_number()) values[key] = json(v).dump();
      else throw Error(ErrorCode::InvalidConfig, "key '" + key + "' must be a number or boolean");
    }
  } else {
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key=value");
      }
      values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
  }
  for (const auto& [key, value] : values) set_config_value(cfg, key, value);
  if (values.count("alpha2D") && !values.count("alpha2D_epi")) cfg.alpha2D_epi = cfg.alpha2D * 0.5;
  cfg.validate();
  return cfg;
}

TrackerConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string config_to_text(const TrackerConfig& cfg) {
  std::ostringstream out;
  for (const auto& [name, member] : config_fields()) {
    out << name << '=';
    if (std::holds_alternative<double TrackerConfig::*>(member)) {
      out << json(cfg.*std::get<double TrackerConfig::*>(member)).dump();
    } else if (std::holds_alternative<int TrackerConfig::*>(member)) {
      out << cfg.*std::get<int TrackerConfig::*>(member);
    } else {
      out << (cfg.*std::get<bool TrackerConfig::*>(member) ? "true" : "false");
    }
    out << '\n';
  }
  return out.str();
}

namespace {

template <typename T>
void take(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidSpec, std::string("bad value for '") + key + "'");
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, v] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::InvalidSpec, std::string("unknown key '") + key + "' in " + where);
  }
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& json_text) {
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error(ErrorCode::InvalidSpec, "scenario must be a JSON object");
  check_keys(obj,
             {"people", "motion", "speed", "swing_amplitude", "swing_frequency", "area_x", "area_y",
              "min_separation", "body", "rig", "fps", "camera_fps", "phase", "jitter", "noise_px",
              "dropout", "confidence", "duration", "seed"},
             "scenario");
  ScenarioSpec s;
  take(obj, "people", s.people);
  if (obj.contains("motion")) {
    const std::string m = obj["motion"].get<std::string>();
    if (m == "static") s.motion = MotionKind::Static;
    else if (m == "waypoint") s.motion = MotionKind::Waypoint;
    else if (m == "crossing") s.motion = MotionKind::Crossing;
    else throw Error(ErrorCode::InvalidSpec, "motion must be static, waypoint or crossing");
  }
  take(obj, "speed", s.speed);
  take(obj, "swing_amplitude", s.swing_amplitude);
  take(obj, "swing_frequency", s.swing_frequency);
  take(obj, "area_x", s.area_x);
  take(obj, "area_y", s.area_y);
  take(obj, "min_separation", s.min_separation);
  take(obj, "fps", s.fps);
  take(obj, "camera_fps", s.camera_fps);
  if (obj.contains("phase")) {
    const std::string p = obj["phase"].get<std::string>();
    if (p == "synced") s.phase = PhaseMode::Synced;
    else if (p == "staggered") s.phase = PhaseMode::Staggered;
    else if (p == "random") s.phase = PhaseMode::Random;
    else throw Error(ErrorCode::InvalidSpec, "phase must be synced, staggered or random");
  }
  take(obj, "jitter", s.jitter);
  take(obj, "noise_px", s.noise_px);
  take(obj, "dropout", s.dropout);
  take(obj, "confidence", s.confidence);
  take(obj, "duration", s.duration);
  take(obj, "seed", s.seed);
  if (obj.contains("rig")) {
    const json& r = obj["rig"];
    check_keys(r, {"kind", "count", "radius", "height", "grid_rows", "grid_cols", "grid_spacing_x",
                   "grid_spacing_y", "focal", "image_size"},
               "rig");
    if (r.contains("kind")) {
      const std::string k = r["kind"].get<std::string>();
      if (k == "ring") s.rig.kind = RigKind::Ring;
      else if (k == "grid") s.rig.kind = RigKind::CeilingGrid;
      else throw Error(ErrorCode::InvalidSpec, "rig.kind must be ring or grid");
    }
    take(r, "count", s.rig.count);
    take(r, "radius", s.rig.radius);
    take(r, "height", s.rig.height);
    take(r, "grid_rows", s.rig.grid_rows);
    take(r, "grid_cols", s.rig.grid_cols);
    take(r, "grid_spacing_x", s.rig.grid_spacing_x);
    take(r, "grid_spacing_y", s.rig.grid_spacing_y);
    take(r, "focal", s.rig.focal);
    if (r.contains("image_size")) {
      const auto sz = r["image_size"].get<std::vector<int>>();
      if (sz.size() != 2) throw Error(ErrorCode::InvalidSpec, "rig.image_size must be [width, height]");
      s.rig.image = {sz[0], sz[1]};
    }
  }
  if (obj.contains("body")) {
    const json& b = obj["body"];
    check_keys(b, {"pelvis_height", "torso", "head", "shoulder_half_width", "hip_half_width", "upper_arm",
                   "lower_arm", "thigh", "shin", "scale_jitter"},
               "body");
    take(b, "pelvis_height", s.body.pelvis_height);
    take(b, "torso", s.body.torso);
    take(b, "head", s.body.head);
    take(b, "shoulder_half_width", s.body.shoulder_half_width);
    take(b, "hip_half_width", s.body.hip_half_width);
    take(b, "upper_arm", s.body.upper_arm);
    take(b, "lower_arm", s.body.lower_arm);
    take(b, "thigh", s.body.thigh);
    take(b, "shin", s.body.shin);
    take(b, "scale_jitter", s.body.scale_jitter);
  }
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

}  // namespace crossview::io
