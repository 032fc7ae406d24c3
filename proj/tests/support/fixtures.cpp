#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace rigmixer::fixtures {

void VoxelSketch::add_box(int x0, int y0, int z0, int x1, int y1, int z1) {
    for (int x = x0; x < x1; ++x) {
        for (int y = y0; y < y1; ++y) {
            for (int z = z0; z < z1; ++z) {
                cells_.insert({x, y, z});
            }
        }
    }
}

Mesh VoxelSketch::extract_mesh() const {
    Mesh mesh;
    std::map<std::array<int, 3>, int> corner_ids;
    auto corner = [&](int x, int y, int z) {
        const auto [it, inserted] = corner_ids.insert({{x, y, z}, static_cast<int>(mesh.vertices.size())});
        if (inserted) mesh.vertices.push_back(cell_ * Vec3(x, y, z));
        return it->second;
    };
    // Quad with outward normal along +axis when positive_side, emitted as
    // two triangles. Corners are ordered counterclockwise seen from outside.
    auto quad = [&](int a, int b, int c, int d) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
    };

    for (const auto& cell : cells_) {
        const int x = cell[0], y = cell[1], z = cell[2];
        if (cells_.count({x + 1, y, z}) == 0) {
            quad(corner(x + 1, y, z), corner(x + 1, y + 1, z), corner(x + 1, y + 1, z + 1),
                 corner(x + 1, y, z + 1));
        }
        if (cells_.count({x - 1, y, z}) == 0) {
            quad(corner(x, y, z), corner(x, y, z + 1), corner(x, y + 1, z + 1), corner(x, y + 1, z));
        }
        if (cells_.count({x, y + 1, z}) == 0) {
            quad(corner(x, y + 1, z), corner(x, y + 1, z + 1), corner(x + 1, y + 1, z + 1),
                 corner(x + 1, y + 1, z));
        }
        if (cells_.count({x, y - 1, z}) == 0) {
            quad(corner(x, y, z), corner(x + 1, y, z), corner(x + 1, y, z + 1), corner(x, y, z + 1));
        }
        if (cells_.count({x, y, z + 1}) == 0) {
            quad(corner(x, y, z + 1), corner(x + 1, y, z + 1), corner(x + 1, y + 1, z + 1),
                 corner(x, y + 1, z + 1));
        }
        if (cells_.count({x, y, z - 1}) == 0) {
            quad(corner(x, y, z), corner(x, y + 1, z), corner(x + 1, y + 1, z), corner(x + 1, y, z));
        }
    }
    return mesh;
}

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 d = b - a;
    const double len2 = d.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * d)).norm();
}

} // namespace

Character assemble_character(const Mesh& mesh, const std::vector<BoneSpec>& bones,
                             Weighting weighting, double blend_band,
                             const std::vector<WeightRegion>& regions) {
    Character c;
    c.mesh = mesh;
    c.skeleton = build_skeleton(bones);
    c.weights.resize(mesh.vertices.size());
    std::vector<int> all_bones;
    for (size_t b = 0; b < bones.size(); ++b) all_bones.push_back(static_cast<int>(b));

    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        const Vec3& p = mesh.vertices[v];
        const std::vector<int>* candidates = &all_bones;
        for (const WeightRegion& r : regions) {
            if ((p.array() >= r.lo.array() - 1e-9).all() && (p.array() <= r.hi.array() + 1e-9).all()) {
                candidates = &r.bones;
                break;
            }
        }
        int best = candidates->front(), second = -1;
        double d_best = std::numeric_limits<double>::max(), d_second = d_best;
        for (int b : *candidates) {
            const double d = point_segment_distance(mesh.vertices[v], bones[static_cast<size_t>(b)].head,
                                                    bones[static_cast<size_t>(b)].tail);
            if (d < d_best) {
                second = best;
                d_second = d_best;
                best = b;
                d_best = d;
            } else if (d < d_second) {
                second = b;
                d_second = d;
            }
        }
        if (weighting == Weighting::Blended && second >= 0 && d_second - d_best < blend_band) {
            const double u = (d_second - d_best) / blend_band; // 0 = tie, 1 = band edge
            const double w_best = 0.5 + 0.5 * u;
            const int lo = std::min(best, second);
            const int hi = std::max(best, second);
            const double w_lo = lo == best ? w_best : 1.0 - w_best;
            c.weights[v] = {{lo, w_lo}, {hi, 1.0 - w_lo}};
        } else {
            c.weights[v] = {{best, 1.0}};
        }
    }
    compute_part_boxes(c);
    return c;
}


namespace {

WeightRegion region(double h, int x0, int y0, int z0, int x1, int y1, int z1,
                    std::vector<int> bones) {
    return WeightRegion{h * Vec3(x0, y0, z0), h * Vec3(x1, y1, z1), std::move(bones)};
}

} // namespace

// Limb boxes attach strictly inside their parent's wall so segmentation
// boundaries stay simple near-planar loops (clean centroid-fan caps).
Character biped(Weighting weighting) {
    VoxelSketch sketch;
    sketch.add_box(-3, 6, -2, 3, 12, 2);  // torso
    sketch.add_box(-1, 12, -1, 1, 15, 1); // head
    sketch.add_box(3, 9, -1, 8, 11, 1);   // left arm
    sketch.add_box(-8, 9, -1, -3, 11, 1);
    sketch.add_box(1, 0, -1, 2, 6, 1); // left leg
    sketch.add_box(-2, 0, -1, -1, 6, 1);
    const double h = sketch.cell();
    std::vector<BoneSpec> bones{
        {"spine", -1, h * Vec3(0, 7, 0), h * Vec3(0, 12, 0)},
        {"head", 0, h * Vec3(0, 12, 0), h * Vec3(0, 15, 0)},
        {"arm_l_upper", 0, h * Vec3(3, 10, 0), h * Vec3(5.5, 10, 0)},
        {"arm_l_lower", 2, h * Vec3(5.5, 10, 0), h * Vec3(8, 10, 0)},
        {"arm_r_upper", 0, h * Vec3(-3, 10, 0), h * Vec3(-5.5, 10, 0)},
        {"arm_r_lower", 4, h * Vec3(-5.5, 10, 0), h * Vec3(-8, 10, 0)},
        {"leg_l_upper", 0, h * Vec3(1.5, 6, 0), h * Vec3(1.5, 3, 0)},
        {"leg_l_lower", 6, h * Vec3(1.5, 3, 0), h * Vec3(1.5, 0.2, 0)},
        {"leg_r_upper", 0, h * Vec3(-1.5, 6, 0), h * Vec3(-1.5, 3, 0)},
        {"leg_r_lower", 8, h * Vec3(-1.5, 3, 0), h * Vec3(-1.5, 0.2, 0)},
    };
    const std::vector<WeightRegion> regions{
        region(h, -1, 12, -1, 1, 15, 1, {1}),
        region(h, 3, 9, -1, 8, 11, 1, {2, 3}),
        region(h, -8, 9, -1, -3, 11, 1, {4, 5}),
        region(h, 1, 0, -1, 2, 6, 1, {6, 7}),
        region(h, -2, 0, -1, -1, 6, 1, {8, 9}),
        region(h, -3, 6, -2, 3, 12, 2, {0}),
    };
    return assemble_character(sketch.extract_mesh(), bones, weighting, 0.08, regions);
}

Character biped_stocky(Weighting weighting) {
    VoxelSketch sketch;
    sketch.add_box(-4, 5, -2, 4, 10, 2);
    sketch.add_box(-2, 10, -1, 2, 13, 1);
    sketch.add_box(4, 7, -1, 9, 9, 1);
    sketch.add_box(-9, 7, -1, -4, 9, 1);
    sketch.add_box(1, 0, -1, 3, 5, 1);
    sketch.add_box(-3, 0, -1, -1, 5, 1);
    const double h = sketch.cell();
    std::vector<BoneSpec> bones{
        {"spine", -1, h * Vec3(0, 6, 0), h * Vec3(0, 10, 0)},
        {"head", 0, h * Vec3(0, 10, 0), h * Vec3(0, 13, 0)},
        {"arm_l_upper", 0, h * Vec3(4, 8, 0), h * Vec3(6.5, 8, 0)},
        {"arm_l_lower", 2, h * Vec3(6.5, 8, 0), h * Vec3(9, 8, 0)},
        {"arm_r_upper", 0, h * Vec3(-4, 8, 0), h * Vec3(-6.5, 8, 0)},
        {"arm_r_lower", 4, h * Vec3(-6.5, 8, 0), h * Vec3(-9, 8, 0)},
        {"leg_l_upper", 0, h * Vec3(2, 5, 0), h * Vec3(2, 2.5, 0)},
        {"leg_l_lower", 6, h * Vec3(2, 2.5, 0), h * Vec3(2, 0.2, 0)},
        {"leg_r_upper", 0, h * Vec3(-2, 5, 0), h * Vec3(-2, 2.5, 0)},
        {"leg_r_lower", 8, h * Vec3(-2, 2.5, 0), h * Vec3(-2, 0.2, 0)},
    };
    const std::vector<WeightRegion> regions{
        region(h, -2, 10, -1, 2, 13, 1, {1}),
        region(h, 4, 7, -1, 9, 9, 1, {2, 3}),
        region(h, -9, 7, -1, -4, 9, 1, {4, 5}),
        region(h, 1, 0, -1, 3, 5, 1, {6, 7}),
        region(h, -3, 0, -1, -1, 5, 1, {8, 9}),
        region(h, -4, 5, -2, 4, 10, 2, {0}),
    };
    return assemble_character(sketch.extract_mesh(), bones, weighting, 0.08, regions);
}

Character quadruped(Weighting weighting) {
    VoxelSketch sketch;
    sketch.add_box(-5, 3, -3, 5, 8, 3); // body
    sketch.add_box(5, 4, -1, 8, 7, 1);  // neck, strictly inside the front wall
    sketch.add_box(8, 3, -2, 11, 9, 2); // head block
    sketch.add_box(2, 0, 1, 4, 3, 2);   // legs, strictly inside the belly
    sketch.add_box(2, 0, -2, 4, 3, -1);
    sketch.add_box(-4, 0, 1, -2, 3, 2);
    sketch.add_box(-4, 0, -2, -2, 3, -1);
    const double c = sketch.cell();
    std::vector<BoneSpec> bones{
        {"spine", -1, c * Vec3(-4, 5.5, 0), c * Vec3(4, 5.5, 0)},
        {"neck", 0, c * Vec3(4, 5.5, 0), c * Vec3(7, 5.5, 0)},
        {"head", 1, c * Vec3(7, 5.5, 0), c * Vec3(10.5, 6, 0)},
        {"leg_fl_upper", 0, c * Vec3(3, 3, 1.5), c * Vec3(3, 1.5, 1.5)},
        {"leg_fl_lower", 3, c * Vec3(3, 1.5, 1.5), c * Vec3(3, 0.2, 1.5)},
        {"leg_fr_upper", 0, c * Vec3(3, 3, -1.5), c * Vec3(3, 1.5, -1.5)},
        {"leg_fr_lower", 5, c * Vec3(3, 1.5, -1.5), c * Vec3(3, 0.2, -1.5)},
        {"leg_bl_upper", 0, c * Vec3(-3, 3, 1.5), c * Vec3(-3, 1.5, 1.5)},
        {"leg_bl_lower", 7, c * Vec3(-3, 1.5, 1.5), c * Vec3(-3, 0.2, 1.5)},
        {"leg_br_upper", 0, c * Vec3(-3, 3, -1.5), c * Vec3(-3, 1.5, -1.5)},
        {"leg_br_lower", 9, c * Vec3(-3, 1.5, -1.5), c * Vec3(-3, 0.2, -1.5)},
    };
    const std::vector<WeightRegion> regions{
        region(c, 5, 4, -1, 8, 7, 1, {1}),
        region(c, 8, 3, -2, 11, 9, 2, {2}),
        region(c, 2, 0, 1, 4, 3, 2, {3, 4}),
        region(c, 2, 0, -2, 4, 3, -1, {5, 6}),
        region(c, -4, 0, 1, -2, 3, 2, {7, 8}),
        region(c, -4, 0, -2, -2, 3, -1, {9, 10}),
        region(c, -5, 3, -3, 5, 8, 3, {0}),
    };
    return assemble_character(sketch.extract_mesh(), bones, weighting, 0.08, regions);
}

Character biped_tailed(Weighting weighting) {
    VoxelSketch sketch;
    sketch.add_box(-3, 6, -2, 3, 12, 2);
    sketch.add_box(-1, 12, -1, 1, 15, 1);
    sketch.add_box(3, 9, -1, 8, 11, 1);
    sketch.add_box(-8, 9, -1, -3, 11, 1);
    sketch.add_box(1, 0, -1, 2, 6, 1);
    sketch.add_box(-2, 0, -1, -1, 6, 1);
    sketch.add_box(-1, 7, -6, 1, 9, -2); // tail off the back wall
    const double h = sketch.cell();
    std::vector<BoneSpec> bones{
        {"spine", -1, h * Vec3(0, 7, 0), h * Vec3(0, 12, 0)},
        {"head", 0, h * Vec3(0, 12, 0), h * Vec3(0, 15, 0)},
        {"arm_l_upper", 0, h * Vec3(3, 10, 0), h * Vec3(5.5, 10, 0)},
        {"arm_l_lower", 2, h * Vec3(5.5, 10, 0), h * Vec3(8, 10, 0)},
        {"arm_r_upper", 0, h * Vec3(-3, 10, 0), h * Vec3(-5.5, 10, 0)},
        {"arm_r_lower", 4, h * Vec3(-5.5, 10, 0), h * Vec3(-8, 10, 0)},
        {"leg_l_upper", 0, h * Vec3(1.5, 6, 0), h * Vec3(1.5, 3, 0)},
        {"leg_l_lower", 6, h * Vec3(1.5, 3, 0), h * Vec3(1.5, 0.2, 0)},
        {"leg_r_upper", 0, h * Vec3(-1.5, 6, 0), h * Vec3(-1.5, 3, 0)},
        {"leg_r_lower", 8, h * Vec3(-1.5, 3, 0), h * Vec3(-1.5, 0.2, 0)},
        {"tail_0", 0, h * Vec3(0, 8, -2), h * Vec3(0, 8, -3.4)},
        {"tail_1", 10, h * Vec3(0, 8, -3.4), h * Vec3(0, 8, -4.8)},
        {"tail_2", 11, h * Vec3(0, 8, -4.8), h * Vec3(0, 8, -6)},
    };
    const std::vector<WeightRegion> regions{
        region(h, -1, 12, -1, 1, 15, 1, {1}),
        region(h, 3, 9, -1, 8, 11, 1, {2, 3}),
        region(h, -8, 9, -1, -3, 11, 1, {4, 5}),
        region(h, 1, 0, -1, 2, 6, 1, {6, 7}),
        region(h, -2, 0, -1, -1, 6, 1, {8, 9}),
        region(h, -1, 7, -6, 1, 9, -2, {10, 11, 12}),
        region(h, -3, 6, -2, 3, 12, 2, {0}),
    };
    return assemble_character(sketch.extract_mesh(), bones, weighting, 0.08, regions);
}

Character two_bone_arm(Weighting weighting, double blend_band) {
    VoxelSketch sketch;
    sketch.add_box(0, -1, -1, 8, 1, 1);
    const double h = sketch.cell();
    std::vector<BoneSpec> bones{
        {"upper", -1, h * Vec3(0, 0, 0), h * Vec3(4, 0, 0)},
        {"lower", 0, h * Vec3(4, 0, 0), h * Vec3(8, 0, 0)},
    };
    return assemble_character(sketch.extract_mesh(), bones, weighting, blend_band);
}

namespace {

void grouping_body(VoxelSketch& sketch) {
    sketch.add_box(-2, 0, -1, 2, 8, 1); // torso
    sketch.add_box(2, 5, -1, 4, 7, 0);  // short left arm, z < 0
    sketch.add_box(-4, 5, -1, -2, 7, 0);
    sketch.add_box(-1, 8, -1, 1, 16, 1); // head column
}

std::vector<BoneSpec> grouping_body_bones(double h) {
    return {
        {"root", -1, h * Vec3(0, 0, 0), h * Vec3(0, 8, 0)},
        {"arm_l", 0, h * Vec3(2, 6, -0.5), h * Vec3(4, 6, -0.5)},
        {"arm_r", 0, h * Vec3(-2, 6, -0.5), h * Vec3(-4, 6, -0.5)},
    };
}

} // namespace

Character grouping_source() {
    VoxelSketch sketch;
    grouping_body(sketch);
    const double h = sketch.cell();
    std::vector<BoneSpec> bones = grouping_body_bones(h);
    // One long head bone, head nudged to the +z root octant.
    bones.push_back({"head", 0, h * Vec3(0, 8, 0.5), h * Vec3(0, 16, 0.5)});
    const std::vector<WeightRegion> regions{
        region(h, 2, 5, -1, 4, 7, 0, {1}),
        region(h, -4, 5, -1, -2, 7, 0, {2}),
        region(h, -1, 8, -1, 1, 16, 1, {3}),
        region(h, -2, 0, -1, 2, 8, 1, {0}),
    };
    return assemble_character(sketch.extract_mesh(), bones, Weighting::Rigid, 0.0, regions);
}

Character grouping_target() {
    VoxelSketch sketch;
    grouping_body(sketch);
    const double h = sketch.cell();
    std::vector<BoneSpec> bones = grouping_body_bones(h);
    // Four chained head bones in the mirrored (-z) root octant.
    bones.push_back({"head_0", 0, h * Vec3(0, 8, -0.5), h * Vec3(0, 10, -0.5)});
    bones.push_back({"head_1", 3, h * Vec3(0, 10, -0.5), h * Vec3(0, 12, -0.5)});
    bones.push_back({"head_2", 4, h * Vec3(0, 12, -0.5), h * Vec3(0, 14, -0.5)});
    bones.push_back({"head_3", 5, h * Vec3(0, 14, -0.5), h * Vec3(0, 16, -0.5)});
    const std::vector<WeightRegion> regions{
        region(h, 2, 5, -1, 4, 7, 0, {1}),
        region(h, -4, 5, -1, -2, 7, 0, {2}),
        region(h, -1, 8, -1, 1, 16, 1, {3, 4, 5, 6}),
        region(h, -2, 0, -1, 2, 8, 1, {0}),
    };
    return assemble_character(sketch.extract_mesh(), bones, Weighting::Rigid, 0.0, regions);
}

void normalize_pair(Character& a, Character& b) {
    Aabb box;
    for (const Vec3& v : a.mesh.vertices) box.expand(v);
    for (const Vec3& v : b.mesh.vertices) box.expand(v);
    for (const Bone& bone : a.skeleton.bones) {
        box.expand(bone.head);
        box.expand(bone.tail());
    }
    for (const Bone& bone : b.skeleton.bones) {
        box.expand(bone.head);
        box.expand(bone.tail());
    }
    const Vec3 center = box.center();
    const double scale = 1.0 / box.extents().maxCoeff();

    auto apply = [&](Character& c) {
        std::vector<BoneSpec> specs;
        for (const Bone& bone : c.skeleton.bones) {
            specs.push_back({bone.name, bone.parent, (bone.head - center) * scale,
                             (bone.tail() - center) * scale});
        }
        for (Vec3& v : c.mesh.vertices) v = (v - center) * scale;
        c.skeleton = build_skeleton(specs);
        compute_part_boxes(c);
    };
    apply(a);
    apply(b);
}

Skeleton random_skeleton(uint32_t seed, int max_bones) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> count_dist(2, max_bones);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> len_dist(0.05, 0.3);

    const int n = count_dist(rng);
    std::vector<BoneSpec> specs;
    auto random_dir = [&] {
        Vec3 d;
        do {
            d = Vec3(unit(rng), unit(rng), unit(rng));
        } while (d.norm() < 1e-3);
        return Vec3(d.normalized());
    };
    const Vec3 root_head(0.2 * unit(rng), 0.2 * unit(rng), 0.2 * unit(rng));
    specs.push_back({"b0", -1, root_head, root_head + len_dist(rng) * random_dir()});
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent_dist(0, i - 1);
        const int parent = parent_dist(rng);
        const Vec3 head = specs[static_cast<size_t>(parent)].tail;
        specs.push_back({"b" + std::to_string(i), parent, head, head + len_dist(rng) * random_dir()});
    }
    return build_skeleton(specs);
}

Mesh uv_sphere(const Vec3& center, double radius, int stacks, int slices) {
    Mesh mesh;
    mesh.vertices.push_back(center + Vec3(0, radius, 0)); // north pole
    for (int s = 1; s < stacks; ++s) {
        const double phi = M_PI * s / stacks;
        for (int l = 0; l < slices; ++l) {
            const double theta = 2.0 * M_PI * l / slices;
            mesh.vertices.push_back(center + radius * Vec3(std::sin(phi) * std::cos(theta),
                                                           std::cos(phi),
                                                           std::sin(phi) * std::sin(theta)));
        }
    }
    mesh.vertices.push_back(center + Vec3(0, -radius, 0)); // south pole
    const int south = static_cast<int>(mesh.vertices.size()) - 1;
    auto ring = [&](int s, int l) { return 1 + (s - 1) * slices + (l % slices); };
    for (int l = 0; l < slices; ++l) {
        mesh.triangles.push_back({0, ring(1, l + 1), ring(1, l)});
    }
    for (int s = 1; s + 1 < stacks; ++s) {
        for (int l = 0; l < slices; ++l) {
            const int a = ring(s, l), b = ring(s, l + 1), c = ring(s + 1, l), d = ring(s + 1, l + 1);
            mesh.triangles.push_back({a, b, d});
            mesh.triangles.push_back({a, d, c});
        }
    }
    for (int l = 0; l < slices; ++l) {
        mesh.triangles.push_back({south, ring(stacks - 1, l), ring(stacks - 1, l + 1)});
    }
    return mesh;
}

Mesh box_mesh(const Vec3& center, const Vec3& half_extents) {
    Mesh mesh;
    for (int c = 0; c < 8; ++c) {
        mesh.vertices.push_back(center + Vec3((c & 1) ? half_extents.x() : -half_extents.x(),
                                              (c & 2) ? half_extents.y() : -half_extents.y(),
                                              (c & 4) ? half_extents.z() : -half_extents.z()));
    }
    const int quads[6][4] = {
        {1, 3, 7, 5}, {0, 4, 6, 2}, // +x, -x
        {2, 6, 7, 3}, {0, 1, 5, 4}, // +y, -y
        {4, 5, 7, 6}, {0, 2, 3, 1}, // +z, -z
    };
    for (const auto& q : quads) {
        mesh.triangles.push_back({q[0], q[1], q[2]});
        mesh.triangles.push_back({q[0], q[2], q[3]});
    }
    return mesh;
}

} // namespace rigmixer::fixtures
