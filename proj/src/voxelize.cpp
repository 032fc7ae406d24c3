#include "rigmixer/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace rigmixer {

void close_patch_holes(Mesh& part) {
    // Directed boundary edges: a directed edge whose reverse never occurs.
    std::map<std::pair<int, int>, int> directed;
    for (const auto& tri : part.triangles) {
        for (int e = 0; e < 3; ++e) {
            const int u = tri[static_cast<size_t>(e)];
            const int v = tri[static_cast<size_t>((e + 1) % 3)];
            directed[{u, v}] += 1;
        }
    }
    std::map<int, std::vector<int>> outgoing; // boundary edges by start vertex
    for (const auto& [edge, count] : directed) {
        (void)count;
        if (directed.find({edge.second, edge.first}) == directed.end()) {
            outgoing[edge.first].push_back(edge.second);
        }
    }
    if (outgoing.empty()) return; // already closed

    for (auto& [v, ends] : outgoing) {
        (void)v;
        std::sort(ends.begin(), ends.end());
    }

    std::map<std::pair<int, int>, bool> used;
    while (true) {
        // Deterministic loop start: smallest unused boundary edge.
        std::pair<int, int> start{-1, -1};
        for (const auto& [u, ends] : outgoing) {
            for (int v : ends) {
                if (!used[{u, v}]) {
                    start = {u, v};
                    break;
                }
            }
            if (start.first >= 0) break;
        }
        if (start.first < 0) break;

        std::vector<int> loop{start.first};
        std::pair<int, int> cur = start;
        while (true) {
            used[cur] = true;
            loop.push_back(cur.second);
            if (cur.second == start.first) break;
            const auto it = outgoing.find(cur.second);
            int next = -1;
            if (it != outgoing.end()) {
                for (int cand : it->second) {
                    if (!used[{cur.second, cand}]) {
                        next = cand;
                        break;
                    }
                }
            }
            if (next < 0) {
                throw UnclosablePart("boundary edges do not close into a loop");
            }
            cur = {cur.second, next};
        }
        // loop holds v0 ... vk v0; fan to the centroid.
        loop.pop_back();
        if (loop.size() < 3) continue; // degenerate slit, nothing to cap
        Vec3 centroid = Vec3::Zero();
        for (int v : loop) centroid += part.vertices[static_cast<size_t>(v)];
        centroid /= static_cast<double>(loop.size());
        const int c = static_cast<int>(part.vertices.size());
        part.vertices.push_back(centroid);
        for (size_t i = 0; i < loop.size(); ++i) {
            const int u = loop[i];
            const int v = loop[(i + 1) % loop.size()];
            part.triangles.push_back({c, v, u});
        }
    }
}

namespace {

struct LocalTri {
    // yz-projected data for +x parity rays
    Vec3 a, b, c;
    double ymin, ymax, zmin, zmax;
};

// Crossing of the +x ray through (y, z) with one triangle.
// Returns: 0 = miss, 1 = hit (x written), -1 = unreliable (graze/edge).
int ray_hit(const LocalTri& t, double y, double z, double eps, double& x) {
    const double b1y = t.b.y() - t.a.y(), b1z = t.b.z() - t.a.z();
    const double b2y = t.c.y() - t.a.y(), b2z = t.c.z() - t.a.z();
    const double det = b1y * b2z - b1z * b2y; // projected area * 2
    const double py = y - t.a.y(), pz = z - t.a.z();
    const double scale = std::max({std::fabs(b1y), std::fabs(b1z), std::fabs(b2y), std::fabs(b2z), 1e-30});
    if (std::fabs(det) <= eps * scale * scale) {
        // Edge-on triangle: a hit inside its yz bounds is a graze.
        if (y >= t.ymin - eps && y <= t.ymax + eps && z >= t.zmin - eps && z <= t.zmax + eps) {
            return -1;
        }
        return 0;
    }
    const double inv = 1.0 / det;
    const double u = (py * b2z - pz * b2y) * inv;
    const double v = (b1y * pz - b1z * py) * inv;
    const double w = 1.0 - u - v;
    const double margin = eps; // barycentric margin marks near-edge hits
    if (u < -margin || v < -margin || w < -margin) return 0;
    if (u < margin || v < margin || w < margin) return -1;
    x = t.a.x() + u * (t.b.x() - t.a.x()) + v * (t.c.x() - t.a.x());
    return 1;
}

} // namespace

VoxelGrid voxelize_part(const Mesh& part, const BoundingBox& box, const LocalFrame& frame,
                        int resolution, Exec exec) {
    if (part.triangles.empty()) {
        throw EmptyPart("part mesh has no triangles");
    }
    if ((box.half_extents.array() <= 0.0).all()) {
        throw EmptyPart("part box has no positive axis");
    }

    Mesh closed = part;
    close_patch_holes(closed);

    // Grid over the box inflated 10% per axis; the longest axis gets
    // `resolution` cells and spacing is isotropic. Voxel centers span the
    // inflated box inclusively (cells + 1 centers per axis), which keeps
    // the count symmetric about the box center.
    const Vec3 inflated = 2.0 * box.half_extents * 1.1;
    const double spacing = inflated.maxCoeff() / resolution;

    VoxelGrid grid;
    grid.spacing = spacing;
    for (int a = 0; a < 3; ++a) {
        grid.dims[static_cast<size_t>(a)] =
            std::max(2, static_cast<int>(std::ceil(inflated[a] / spacing - 1e-12)) + 1);
    }
    grid.origin = box.center - 0.5 * spacing * Vec3(grid.dims[0] - 1, grid.dims[1] - 1, grid.dims[2] - 1);
    grid.occupancy.assign(grid.cell_count(), 0);

    // Triangles in bone-local coordinates, binned by yz bounds so each ray
    // only tests nearby triangles.
    std::vector<LocalTri> tris;
    tris.reserve(closed.triangles.size());
    std::vector<Vec3> local(closed.vertices.size());
    for (size_t i = 0; i < closed.vertices.size(); ++i) {
        local[i] = frame.to_local(closed.vertices[i]);
    }
    for (const auto& t : closed.triangles) {
        LocalTri lt;
        lt.a = local[static_cast<size_t>(t[0])];
        lt.b = local[static_cast<size_t>(t[1])];
        lt.c = local[static_cast<size_t>(t[2])];
        lt.ymin = std::min({lt.a.y(), lt.b.y(), lt.c.y()});
        lt.ymax = std::max({lt.a.y(), lt.b.y(), lt.c.y()});
        lt.zmin = std::min({lt.a.z(), lt.b.z(), lt.c.z()});
        lt.zmax = std::max({lt.a.z(), lt.b.z(), lt.c.z()});
        tris.push_back(lt);
    }

    const int ny = grid.dims[1], nz = grid.dims[2], nx = grid.dims[0];
    std::vector<std::vector<int>> bins(static_cast<size_t>(ny) * nz);
    const double pad = spacing; // jitter can move a ray by half a cell
    for (size_t ti = 0; ti < tris.size(); ++ti) {
        const LocalTri& t = tris[ti];
        const int j0 = std::clamp(static_cast<int>(std::floor((t.ymin - pad - grid.origin.y()) / spacing)), 0, ny - 1);
        const int j1 = std::clamp(static_cast<int>(std::ceil((t.ymax + pad - grid.origin.y()) / spacing)), 0, ny - 1);
        const int k0 = std::clamp(static_cast<int>(std::floor((t.zmin - pad - grid.origin.z()) / spacing)), 0, nz - 1);
        const int k1 = std::clamp(static_cast<int>(std::ceil((t.zmax + pad - grid.origin.z()) / spacing)), 0, nz - 1);
        for (int k = k0; k <= k1; ++k) {
            for (int j = j0; j <= j1; ++j) {
                bins[static_cast<size_t>(k) * ny + j].push_back(static_cast<int>(ti));
            }
        }
    }

    // Deterministic jitter offsets, scaled by half a spacing.
    static constexpr double kJitter[][2] = {
        {0.0, 0.0}, {0.31, 0.17}, {-0.23, 0.41}, {0.47, -0.29},
        {-0.37, -0.43}, {0.11, 0.49}, {-0.47, 0.07}, {0.29, -0.13},
    };
    const double eps = 1e-9;

    const long long rays = static_cast<long long>(ny) * nz;
#pragma omp parallel for schedule(dynamic, 8) if (exec == Exec::Parallel)
    for (long long ray = 0; ray < rays; ++ray) {
        const int k = static_cast<int>(ray / ny);
        const int j = static_cast<int>(ray % ny);
        const auto& bin = bins[static_cast<size_t>(ray)];
        if (bin.empty()) continue;

        std::vector<double> xs;
        constexpr size_t kAttempts = sizeof(kJitter) / sizeof(kJitter[0]);
        for (size_t attempt = 0; attempt < kAttempts; ++attempt) {
            xs.clear();
            const bool last = attempt + 1 == kAttempts;
            const double y = grid.origin.y() + j * grid.spacing + kJitter[attempt][0] * 0.5 * grid.spacing;
            const double z = grid.origin.z() + k * grid.spacing + kJitter[attempt][1] * 0.5 * grid.spacing;
            bool ok = true;
            for (int ti : bin) {
                double x = 0.0;
                const int r = ray_hit(tris[static_cast<size_t>(ti)], y, z, eps, x);
                if (r < 0) {
                    if (!last) { // retry with the next jitter
                        ok = false;
                        break;
                    }
                    continue; // final attempt: count a graze as a miss
                }
                if (r > 0) xs.push_back(x);
            }
            if (ok) break;
        }
        if (xs.empty()) continue;
        std::sort(xs.begin(), xs.end());

        // Walk voxel centers and crossings together; odd parity = inside.
        size_t c = 0;
        bool inside = false;
        for (int i = 0; i < nx; ++i) {
            const double x = grid.origin.x() + i * grid.spacing;
            while (c < xs.size() && xs[c] < x) {
                inside = !inside;
                ++c;
            }
            if (inside) grid.occupancy[grid.index(i, j, k)] = 1;
        }
    }
    return grid;
}

} // namespace rigmixer
