#pragma once

// Pose transfer from a unified skeleton to the source and target rigs, and
// linear blend skinning of character meshes.

#include <map>
#include <vector>

#include "rigmixer/skeleton.hpp"
#include "rigmixer/unify.hpp"

namespace rigmixer {

// Local joint angles in degrees, intrinsic XYZ order.
struct JointAngles {
    Vec3 euler_deg = Vec3::Zero();
};

// Unified-bone id -> joint angles; absent bones are at rest.
using Pose = std::map<int, JointAngles>;

// Bone id -> local rotation; absent bones are at rest (exact identity).
struct SkeletonPose {
    std::map<int, Mat3> rotations;
};

struct AnimationFrame {
    Pose pose;
    double t = 0.0;
};

struct AnimationClip {
    std::vector<AnimationFrame> frames;
};

// Intrinsic XYZ rotation, degrees: Rx * Ry * Rz.
Mat3 euler_xyz_deg(const Vec3& angles_deg);

// Distributes the unified pose to both rigs: constrained bones copy the
// rotation to both sides, loose groups copy per segment and give the split
// side the componentwise mean of the group's Euler angles, virtual bones
// drive only their referenced side.
std::pair<SkeletonPose, SkeletonPose> transfer_pose(const UnifiedSkeleton& uni, const Pose& pose);

// Linear blend skinning. World transforms compose root to leaf from local
// rotations about bone heads; unposed chains stay exactly identity, so the
// rest pose reproduces the input mesh bit for bit.
Mesh apply_skinning(const Character& character, const SkeletonPose& pose);

// The skeleton with posed heads and frames (lengths, boxes, hierarchy kept).
Skeleton pose_skeleton(const Skeleton& skeleton, const SkeletonPose& pose);

// World-space delta transform per bone (posed position of a rest-space
// point x is rotation * x + translation). Trivial entries are skipped by
// the skinning loop.
struct BoneDelta {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    bool trivial = true;

    Vec3 apply(const Vec3& x) const { return trivial ? x : Vec3(rotation * x + translation); }
};

std::vector<BoneDelta> pose_deltas(const Skeleton& skeleton, const SkeletonPose& pose);

} // namespace rigmixer
