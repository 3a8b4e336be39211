#include "crossview/skeleton.hpp"

namespace crossview {

std::string_view to_string(BodyPart part) {
  switch (part) {
    case BodyPart::Head: return "head";
    case BodyPart::Torso: return "torso";
    case BodyPart::UpperArm: return "upper_arm";
    case BodyPart::LowerArm: return "lower_arm";
    case BodyPart::UpperLeg: return "upper_leg";
    case BodyPart::LowerLeg: return "lower_leg";
  }
  return "unknown";
}

std::string_view joint_name(int k) {
  static constexpr std::array<std::string_view, kNumJoints> names = {
      "head",    "neck",    "l_shoulder", "r_shoulder", "l_elbow", "r_elbow",  "l_wrist",
      "r_wrist", "l_hip",   "r_hip",      "l_knee",     "r_knee",  "l_ankle",  "r_ankle"};
  if (k < 0 || k >= kNumJoints) return "unknown";
  return names[static_cast<std::size_t>(k)];
}

const std::vector<Bone>& default_bones() {
  using namespace joint;
  static const std::vector<Bone> bones = {
      {Head, Neck, BodyPart::Head},
      {LShoulder, LHip, BodyPart::Torso},
      {RShoulder, RHip, BodyPart::Torso},
      {LShoulder, LElbow, BodyPart::UpperArm},
      {RShoulder, RElbow, BodyPart::UpperArm},
      {LElbow, LWrist, BodyPart::LowerArm},
      {RElbow, RWrist, BodyPart::LowerArm},
      {LHip, LKnee, BodyPart::UpperLeg},
      {RHip, RKnee, BodyPart::UpperLeg},
      {LKnee, LAnkle, BodyPart::LowerLeg},
      {RKnee, RAnkle, BodyPart::LowerLeg},
  };
  return bones;
}

}  // namespace crossview
