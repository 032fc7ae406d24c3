#pragma once

// Procedural test characters: watertight polycube bodies with bones inside
// and distance-based skinning weights, plus assorted small rigs and meshes.

#include <cstdint>
#include <set>

#include "rigmixer/skeleton.hpp"

namespace rigmixer::fixtures {

// Polycube sketch on an integer lattice. extract_mesh() emits the boundary
// quads (as triangles) with shared vertices: watertight, no interior faces.
class VoxelSketch {
public:
    explicit VoxelSketch(double cell = 0.1) : cell_(cell) {}

    // Half-open cell ranges [x0,x1) x [y0,y1) x [z0,z1).
    void add_box(int x0, int y0, int z0, int x1, int y1, int z1);
    Mesh extract_mesh() const;
    double cell() const { return cell_; }

private:
    double cell_;
    std::set<std::array<int, 3>> cells_;
};

enum class Weighting { Rigid, Blended };

// Restricts a body region (world-space box) to a subset of bones, the way
// an artist scopes limb weights. A vertex uses the first region containing
// it; uncovered vertices may use any bone.
struct WeightRegion {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();
    std::vector<int> bones;
};

// Assigns weights by distance to bone segments (within the vertex's region
// when regions are given): Rigid gives the nearest bone weight 1; Blended
// splits between the two nearest bones inside `blend_band` (weights always
// sum to exactly 1).
Character assemble_character(const Mesh& mesh, const std::vector<BoneSpec>& bones,
                             Weighting weighting, double blend_band = 0.0,
                             const std::vector<WeightRegion>& regions = {});

// Blocky characters (10-12 bones). Raw coordinates; normalize_pair scales
// a pair jointly like the loader does.
Character biped(Weighting weighting = Weighting::Rigid);
Character biped_stocky(Weighting weighting = Weighting::Rigid);
Character quadruped(Weighting weighting = Weighting::Rigid);
Character biped_tailed(Weighting weighting = Weighting::Rigid);

// Straight two-bone tube along +x; the simplest posable fixture.
Character two_bone_arm(Weighting weighting, double blend_band = 0.15);

// Head-grouping pair: same torso and arms; the source head is one long
// bone, the target head is a four-bone chain placed in the mirrored
// root-octant so the initial match sends all head bones to void.
Character grouping_source();
Character grouping_target();

// Joint normalization: union box of both characters gets max extent 1,
// centered at the origin (same convention as load_character_pair).
void normalize_pair(Character& a, Character& b);

// Random connected tree skeleton, 2..max_bones bones, varied branching.
Skeleton random_skeleton(uint32_t seed, int max_bones = 20);

Mesh uv_sphere(const Vec3& center, double radius, int stacks = 24, int slices = 48);
Mesh box_mesh(const Vec3& center, const Vec3& half_extents);

} // namespace rigmixer::fixtures
