#pragma once

// Unified skeleton construction: constrained / loose / virtual bones built
// from correspondence pairs at an interpolation step t. Topology (ids,
// kinds, parents) depends only on the pairs, never on t.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rigmixer/correspondence.hpp"
#include "rigmixer/skeleton.hpp"

namespace rigmixer {

enum class UnifiedKind { Constrained, Loose, Virtual };

struct UnifiedBone {
    int id = -1;
    std::string name;
    UnifiedKind kind = UnifiedKind::Constrained;
    std::optional<int> source_ref; // referenced source bone id
    std::optional<int> target_ref;
    double t = 0.0;
    Vec3 head = Vec3::Zero();
    double length = 0.0; // virtual bones may reach 0 at an endpoint
    LocalFrame frame;
    BoundingBox box;
    int parent = -1;
    int pair_index = -1; // provenance pair; loose bones of one group share it
    // Portion of the split (one-side) bone owned by a loose bone, as
    // cumulative length fractions [lo, hi].
    std::optional<std::pair<double, double>> split_range;

    Vec3 tail() const { return head + length * frame.y_axis(); }
};

struct UnifiedSkeleton {
    std::vector<UnifiedBone> bones;
    int root = -1;
    double t = 0.0;
    std::vector<CorrespondencePair> provenance;

    const UnifiedBone& bone(int id) const { return bones.at(static_cast<size_t>(id)); }
    int size() const { return static_cast<int>(bones.size()); }
};

// Corner-paired linear interpolation; for axis-aligned boxes this is a lerp
// of centers and half extents.
BoundingBox lerp_box(const BoundingBox& a, const BoundingBox& b, double t);

// Quaternion slerp of the rotations (shortest path) with lerped origins.
LocalFrame slerp_frame(const LocalFrame& a, const LocalFrame& b, double t);

// One segment of a proportionally split bone. The box stays expressed in
// the original bone's local coordinates; y_offset is the segment head's
// distance from the original head along the bone axis.
struct SplitSegment {
    Vec3 head = Vec3::Zero();
    double length = 0.0;
    BoundingBox box;
    double y_offset = 0.0;
    std::pair<double, double> fraction_range{0.0, 1.0};
};

// Partitions `one_side` along its y axis into consecutive segments with
// lengths proportional to `many_lengths`; its part box is split along y at
// the same fractions (x, z extents unchanged). Segments tile the original.
std::vector<SplitSegment> split_bone(const Bone& one_side, std::span<const double> many_lengths);

// Re-expresses a point between two characters' root-aligned boxes: offset
// from the from-box center, divided per axis by its extents, rebuilt in the
// to-box. Boxes are given in each root bone's local coordinates.
Vec3 map_point_between_character_boxes(const Vec3& p,
                                       const BoundingBox& from_box, const LocalFrame& from_frame,
                                       const BoundingBox& to_box, const LocalFrame& to_frame);

// Character-level bounding box: axis-aligned in the root bone's frame and
// centered on the root head (half extents reach the farthest vertex).
BoundingBox character_box(const Mesh& mesh, const Skeleton& skeleton);

// Builds the unified skeleton at step t. The character boxes (root-local)
// drive the endpoint mapping of virtual bones.
UnifiedSkeleton build_unified_skeleton(const Skeleton& src, const Skeleton& tgt,
                                       const std::vector<CorrespondencePair>& pairs, double t,
                                       const BoundingBox& src_char_box,
                                       const BoundingBox& tgt_char_box);

UnifiedSkeleton build_unified_skeleton(const Character& src, const Character& tgt,
                                       const std::vector<CorrespondencePair>& pairs, double t);

} // namespace rigmixer
