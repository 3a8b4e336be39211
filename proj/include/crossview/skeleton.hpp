#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace crossview {

enum class BodyPart { Head, Torso, UpperArm, LowerArm, UpperLeg, LowerLeg };

inline constexpr std::array<BodyPart, 6> kBodyParts = {
    BodyPart::Head,     BodyPart::Torso,    BodyPart::UpperArm,
    BodyPart::LowerArm, BodyPart::UpperLeg, BodyPart::LowerLeg};

std::string_view to_string(BodyPart part);

struct Bone {
  int a;
  int b;
  BodyPart part;
};

// 14-joint skeleton in the Campus/Shelf style.
namespace joint {
inline constexpr int Head = 0;
inline constexpr int Neck = 1;
inline constexpr int LShoulder = 2;
inline constexpr int RShoulder = 3;
inline constexpr int LElbow = 4;
inline constexpr int RElbow = 5;
inline constexpr int LWrist = 6;
inline constexpr int RWrist = 7;
inline constexpr int LHip = 8;
inline constexpr int RHip = 9;
inline constexpr int LKnee = 10;
inline constexpr int RKnee = 11;
inline constexpr int LAnkle = 12;
inline constexpr int RAnkle = 13;
}  // namespace joint

inline constexpr int kNumJoints = 14;

std::string_view joint_name(int k);

const std::vector<Bone>& default_bones();

}  // namespace crossview
