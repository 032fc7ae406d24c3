#pragma once

// Per-part signed distance fields: parity voxelization with hole closing,
// exact Euclidean distance transform, trilinear sampling with conservative
// outward extrapolation, box-space point mapping, min-union, and zero-set
// surface extraction.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "rigmixer/parallel.hpp"
#include "rigmixer/skeleton.hpp"

namespace rigmixer {

struct VoxelGrid {
    std::array<int, 3> dims{0, 0, 0};
    Vec3 origin = Vec3::Zero(); // center of voxel (0,0,0), bone-local coords
    double spacing = 0.0;       // isotropic
    std::vector<uint8_t> occupancy;

    size_t index(int i, int j, int k) const {
        return (static_cast<size_t>(k) * dims[1] + j) * dims[0] + i; // x fastest
    }
    size_t cell_count() const {
        return static_cast<size_t>(dims[0]) * dims[1] * dims[2];
    }
    Vec3 center(int i, int j, int k) const {
        return origin + spacing * Vec3(i, j, k);
    }
};

enum class GridCoverage { Mixed, AllEmpty, AllOccupied };

struct SdfGrid {
    std::array<int, 3> dims{0, 0, 0};
    Vec3 origin = Vec3::Zero();
    double spacing = 0.0;
    std::vector<double> values; // negative inside, x fastest
    GridCoverage coverage = GridCoverage::Mixed;

    size_t index(int i, int j, int k) const {
        return (static_cast<size_t>(k) * dims[1] + j) * dims[0] + i;
    }
};

// Rasterizes a surface patch into the box (inflated 10% per axis, isotropic
// spacing, `resolution` cells along the longest axis). Occupancy is parity
// ray casting along +x of voxel centers, with half-spacing ray jitter for
// degenerate hits. Boundary loops of open patches are capped with centroid
// fans first.
VoxelGrid voxelize_part(const Mesh& part, const BoundingBox& box, const LocalFrame& frame,
                        int resolution, Exec exec = Exec::Parallel);

// Exact Euclidean signed distances to the occupancy boundary: positive
// outside, negative inside, scene units. Uniform grids get the +/- sentinel
// and a coverage flag.
SdfGrid signed_distance_transform(const VoxelGrid& vox, Exec exec = Exec::Parallel);

// Trilinear inside the node box; outside, the clamped boundary value plus
// the Euclidean distance to the node box.
double sample_sdf(const SdfGrid& grid, const Vec3& p);

// Offset from the from-box center scaled per axis by the extent ratios,
// re-centered on the to-box; applies to points outside the box as well.
// Throws DegenerateBox when the from-box has a zero extent.
Vec3 bbox_map(const Vec3& p, const BoundingBox& from_box, const BoundingBox& to_box);

// Pointwise minimum: the distance-field analogue of set union.
double union_sdf(std::span<const double> values);

// Zero level set of `sampler` over a regular grid spanning `region`
// (`resolution` cells along the longest axis). Cells are decomposed into
// six tetrahedra with consistent face diagonals, so the output is
// crack-free; vertices on shared edges are welded and triangles face
// outward (toward increasing field values).
Mesh extract_surface(const std::function<double(const Vec3&)>& sampler, const Aabb& region,
                     int resolution, Exec exec = Exec::Parallel);

// Closes every boundary loop of the patch with a triangle fan to the loop
// centroid, in place. Throws UnclosablePart if boundary edges cannot be
// chained into loops. Exposed for tests.
void close_patch_holes(Mesh& part);

} // namespace rigmixer
