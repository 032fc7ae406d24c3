#pragma once

// Core rig data model: bones with damped-track local frames, tree skeletons,
// triangle meshes, skinning weights, and the derived per-part quantities
// (segmentation, tightest local bounding boxes, root-relative octants).

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rigmixer/errors.hpp"
#include "rigmixer/types.hpp"

namespace rigmixer {

// Orthonormal bone frame. Columns of `rotation` are the bone local x, y, z
// axes in world space; y runs head to tail. `origin` is the bone head.
struct LocalFrame {
    Mat3 rotation = Mat3::Identity();
    Vec3 origin = Vec3::Zero();

    Vec3 to_local(const Vec3& p) const { return rotation.transpose() * (p - origin); }
    Vec3 to_world(const Vec3& p) const { return rotation * p + origin; }
    Vec3 rotate_to_local(const Vec3& v) const { return rotation.transpose() * v; }
    Vec3 y_axis() const { return rotation.col(1); }
};

// Axis-aligned box in some bone's local coordinates. A degenerate box
// (all half_extents zero) is the paper's empty box used by virtual bones.
struct BoundingBox {
    Vec3 center = Vec3::Zero();
    Vec3 half_extents = Vec3::Zero();

    Vec3 min() const { return center - half_extents; }
    Vec3 max() const { return center + half_extents; }
    bool degenerate(double eps = 0.0) const { return (half_extents.array() <= eps).any(); }
};

struct Bone {
    int id = -1;
    std::string name;
    int parent = -1; // -1 = root
    Vec3 head = Vec3::Zero();
    double length = 0.0;
    LocalFrame frame;
    BoundingBox part_box; // tightest box of the bone's surface part, local coords
    int hierarchy_level = 0;

    Vec3 tail() const { return head + length * frame.y_axis(); }
};

struct Skeleton {
    std::vector<Bone> bones; // indexed by bone id
    int root = -1;
    std::vector<std::vector<int>> children; // per bone, sorted by id

    const Bone& bone(int id) const { return bones.at(static_cast<size_t>(id)); }
    Bone& bone(int id) { return bones.at(static_cast<size_t>(id)); }
    int size() const { return static_cast<int>(bones.size()); }
    bool is_leaf(int id) const { return children[static_cast<size_t>(id)].empty(); }
    const LocalFrame& root_frame() const { return bone(root).frame; }
};

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

// Sparse per-vertex weights, sorted by bone id.
using VertexWeights = std::vector<std::pair<int, double>>;

struct Character {
    Mesh mesh;
    Skeleton skeleton;
    std::vector<VertexWeights> weights; // one entry per vertex
};

// Minimal rig description used to build a Skeleton; frames, lengths and
// hierarchy levels are derived.
struct BoneSpec {
    std::string name;
    int parent = -1;
    Vec3 head = Vec3::Zero();
    Vec3 tail = Vec3::Zero();
};

// Damped-track frame: the canonical world frame rotated by the minimal
// (shortest-arc) rotation taking +Y to the bone direction. The antipodal
// bone (direction = -Y) resolves to a 180 degree turn about +X.
// Throws DegenerateBone when |tail - head| <= 1e-9.
LocalFrame compute_local_frame(const Vec3& head, const Vec3& tail);

// Builds the skeleton tree: validates single root / acyclic parents /
// nonzero bone lengths, computes frames and hierarchy levels.
Skeleton build_skeleton(const std::vector<BoneSpec>& specs);

// Root-relative octant of a point, bit-encoded as
// (x>=0)*1 + (y>=0)*2 + (z>=0)*4 in root-local coordinates.
int octant(const Vec3& point, const LocalFrame& root_frame);

// Per-vertex bone assignment by argmax skinning weight; ties break to the
// lowest bone id. Throws EmptyWeights naming the offending vertex.
std::vector<int> segment_mesh(const Character& character);

// Tightest box containing the given world-space vertices, measured in the
// frame's local coordinates. Throws EmptyPart for an empty list.
BoundingBox part_bounding_box(std::span<const Vec3> part_vertices, const LocalFrame& frame);

// Segments the character and fills every bone's part_box. Bones with no
// assigned vertices keep a degenerate box at the local origin.
void compute_part_boxes(Character& character);

// Triangles of each bone's surface patch: every triangle goes to the part
// owning most of its vertices (ties to the lowest owning bone id), so the
// patches partition the surface.
std::vector<std::vector<std::array<int, 3>>>
split_part_triangles(const Mesh& mesh, const std::vector<int>& vertex_bone, int bone_count);

} // namespace rigmixer
