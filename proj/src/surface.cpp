#include "rigmixer/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace rigmixer {

namespace {

// Kuhn subdivision: six tetrahedra sharing the 0-7 cube diagonal. Induced
// face diagonals match between neighboring cells, so extraction is
// crack-free. Corner ids are bit-encoded (x=1, y=2, z=4).
constexpr int kTets[6][4] = {
    {0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7},
    {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7},
};

struct CutVertex {
    uint64_t key = 0; // node-pair id, weldable across cells
    Vec3 pos = Vec3::Zero();
};

struct RawTri {
    std::array<CutVertex, 3> v;
};

CutVertex cut(uint64_t ga, uint64_t gb, Vec3 pa, Vec3 pb, double va, double vb,
              uint64_t node_count) {
    if (ga > gb) { // canonical edge direction keeps the cut bit-identical
        std::swap(ga, gb);
        std::swap(va, vb);
        std::swap(pa, pb);
    }
    const double t = va / (va - vb);
    CutVertex out;
    out.key = ga * node_count + gb;
    out.pos = pa + t * (pb - pa);
    return out;
}

} // namespace

Mesh extract_surface(const std::function<double(const Vec3&)>& sampler, const Aabb& region,
                     int resolution, Exec exec) {
    if (!region.valid() || region.extents().maxCoeff() <= 0.0) {
        throw ValidationError("extraction region has no volume");
    }
    const Vec3 ext = region.extents();
    const double spacing = ext.maxCoeff() / resolution;
    int cells[3];
    for (int a = 0; a < 3; ++a) {
        cells[a] = std::max(1, static_cast<int>(std::ceil(ext[a] / spacing - 1e-12)));
    }
    const int nx = cells[0] + 1, ny = cells[1] + 1, nz = cells[2] + 1;
    const uint64_t node_count = static_cast<uint64_t>(nx) * ny * nz;

    auto node_pos = [&](int i, int j, int k) { return Vec3(region.min + spacing * Vec3(i, j, k)); };
    auto node_id = [&](int i, int j, int k) {
        return (static_cast<uint64_t>(k) * ny + j) * nx + i;
    };

    std::vector<double> values(node_count);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::Parallel)
    for (long long k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                values[node_id(i, j, static_cast<int>(k))] = sampler(node_pos(i, j, static_cast<int>(k)));
            }
        }
    }

    double vmin = values[0], vmax = values[0];
    for (double v : values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmin >= 0.0 || vmax < 0.0) {
        throw NoSurface("field has no sign change over the region");
    }

    // Per-slab buffers keep the parallel sweep deterministic: slabs are
    // concatenated in order afterwards.
    std::vector<std::vector<RawTri>> slabs(static_cast<size_t>(cells[2]));
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::Parallel)
    for (long long kz = 0; kz < cells[2]; ++kz) {
        auto& out = slabs[static_cast<size_t>(kz)];
        for (int jy = 0; jy < cells[1]; ++jy) {
            for (int ix = 0; ix < cells[0]; ++ix) {
                uint64_t gid[8];
                Vec3 pos[8];
                double val[8];
                for (int c = 0; c < 8; ++c) {
                    const int i = ix + (c & 1);
                    const int j = jy + ((c >> 1) & 1);
                    const int k = static_cast<int>(kz) + ((c >> 2) & 1);
                    gid[c] = node_id(i, j, k);
                    pos[c] = node_pos(i, j, k);
                    val[c] = values[gid[c]];
                }
                for (const auto& tet : kTets) {
                    int inside[4], outside[4];
                    int ni = 0, no = 0;
                    for (int c = 0; c < 4; ++c) {
                        if (val[tet[c]] < 0.0) {
                            inside[ni++] = tet[c];
                        } else {
                            outside[no++] = tet[c];
                        }
                    }
                    if (ni == 0 || ni == 4) continue;

                    Vec3 cin = Vec3::Zero(), cout = Vec3::Zero();
                    for (int c = 0; c < ni; ++c) cin += pos[inside[c]];
                    for (int c = 0; c < no; ++c) cout += pos[outside[c]];
                    const Vec3 ref = cout / no - cin / ni; // points outward

                    auto emit = [&](CutVertex a, CutVertex b, CutVertex c) {
                        const Vec3 n = (b.pos - a.pos).cross(c.pos - a.pos);
                        RawTri tri;
                        if (n.dot(ref) >= 0.0) {
                            tri.v = {a, b, c};
                        } else {
                            tri.v = {a, c, b};
                        }
                        out.push_back(tri);
                    };
                    auto cv = [&](int a, int b) {
                        return cut(gid[a], gid[b], pos[a], pos[b], val[a], val[b], node_count);
                    };

                    if (ni == 1) {
                        emit(cv(inside[0], outside[0]), cv(inside[0], outside[1]),
                             cv(inside[0], outside[2]));
                    } else if (ni == 3) {
                        emit(cv(inside[0], outside[0]), cv(inside[1], outside[0]),
                             cv(inside[2], outside[0]));
                    } else { // 2-2: quad around the cut, split into two triangles
                        const CutVertex q0 = cv(inside[0], outside[0]);
                        const CutVertex q1 = cv(inside[1], outside[0]);
                        const CutVertex q2 = cv(inside[1], outside[1]);
                        const CutVertex q3 = cv(inside[0], outside[1]);
                        emit(q0, q1, q2);
                        emit(q0, q2, q3);
                    }
                }
            }
        }
    }

    Mesh mesh;
    std::unordered_map<uint64_t, int> weld;
    for (const auto& slab : slabs) {
        for (const RawTri& tri : slab) {
            std::array<int, 3> ids{};
            for (int c = 0; c < 3; ++c) {
                const auto [it, inserted] = weld.emplace(tri.v[static_cast<size_t>(c)].key,
                                                         static_cast<int>(mesh.vertices.size()));
                if (inserted) mesh.vertices.push_back(tri.v[static_cast<size_t>(c)].pos);
                ids[static_cast<size_t>(c)] = it->second;
            }
            if (ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2]) continue;
            mesh.triangles.push_back(ids);
        }
    }
    return mesh;
}

} // namespace rigmixer
