// Acceptance suite: runs every acceptance criterion at its pinned tolerance
// and prints one PASS/FAIL line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "rigmixer/field.hpp"
#include "rigmixer/io.hpp"
#include "rigmixer/pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/reference.hpp"

using namespace rigmixer;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-24s %s\n", pass ? "PASS" : "FAIL", number, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<CorrespondencePair> matched_pairs(const Character& src, const Character& tgt) {
    return post_process(hierarchical_match(src.skeleton, tgt.skeleton, AlphaParams{}).pairs,
                        src.skeleton, tgt.skeleton);
}

// 1. Self-correspondence: identity pairs at zero cost for 10 synthetic
// skeletons, under one second total.
void criterion_1() {
    const auto start = Clock::now();
    bool pass = true;
    std::string detail;
    for (uint32_t seed = 200; seed < 210; ++seed) {
        const Skeleton s = fixtures::random_skeleton(seed);
        const MatchResult r = hierarchical_match(s, s, AlphaParams{});
        bool ok = r.total_cost == 0.0 && static_cast<int>(r.pairs.size()) == s.size();
        for (const auto& p : r.pairs) {
            ok = ok && p.kind == PairKind::OneToOne && p.source_bones == p.target_bones;
        }
        if (!ok) {
            pass = false;
            detail = "seed " + std::to_string(seed) + ": cost " + std::to_string(r.total_cost);
            break;
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 1.0) {
        pass = false;
        detail += " too slow";
    }
    if (pass) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "10 skeletons, identity at cost 0, %.3f s", elapsed);
        detail = buf;
    }
    report(1, "self-correspondence", pass, detail);
}

// 2. Grouping fixture: exactly one one-to-many pair covering the 4-bone
// head chain against the single head bone.
void criterion_2() {
    Character src = fixtures::grouping_source();
    Character tgt = fixtures::grouping_target();
    fixtures::normalize_pair(src, tgt);
    const auto pairs = matched_pairs(src, tgt);

    int many = 0;
    bool structure_ok = true;
    for (const auto& p : pairs) {
        if (p.kind == PairKind::OneToManyTarget) {
            ++many;
            structure_ok = structure_ok && p.source_bones.size() == 1 &&
                           src.skeleton.bone(p.source_bones[0]).name == "head" &&
                           p.target_bones.size() == 4;
            for (size_t i = 0; structure_ok && i < p.target_bones.size(); ++i) {
                structure_ok = tgt.skeleton.bone(p.target_bones[i]).name ==
                               "head_" + std::to_string(i);
            }
        } else if (p.kind != PairKind::OneToOne) {
            structure_ok = false;
        }
    }
    try {
        validate_pairs(pairs, src.skeleton, tgt.skeleton);
    } catch (const Error&) {
        structure_ok = false;
    }
    const bool pass = many == 1 && structure_ok;
    report(2, "grouping fixture", pass,
           pass ? "one-to-many pair (head) vs (head_0..head_3), rest one-to-one"
                : "unexpected pair structure (" + std::to_string(many) + " one-to-many)");
}

// 3. Hungarian oracle: 200 random matrices up to 6x6 with random void
// costs; totals equal exhaustive search exactly, under five seconds.
void criterion_3() {
    const auto start = Clock::now();
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    bool pass = true;
    std::string detail;
    for (int it = 0; it < 200 && pass; ++it) {
        CostMatrix m;
        m.rows = dim(rng);
        m.cols = dim(rng);
        m.entries.resize(static_cast<size_t>(m.rows) * m.cols);
        for (double& e : m.entries) e = u(rng);
        for (int r = 0; r < m.rows; ++r) m.void_row_cost.push_back(u(rng));
        for (int c = 0; c < m.cols; ++c) m.void_col_cost.push_back(u(rng));
        const Assignment a = hungarian(m);
        const double brute = reference::brute_force_assignment(m);
        if (a.total != brute) {
            pass = false;
            detail = "matrix " + std::to_string(it) + ": " + std::to_string(a.total) +
                     " != " + std::to_string(brute);
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 5.0) pass = false;
    if (pass) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "200 matrices exact, %.3f s", elapsed);
        detail = buf;
    }
    report(3, "hungarian oracle", pass, detail);
}

// 4. Distance-transform oracle: 50 random grids up to 16^3 equal the
// brute-force nearest-opposite-voxel scan exactly, under ten seconds.
void criterion_4() {
    const auto start = Clock::now();
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> dim(2, 16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool pass = true;
    std::string detail;
    for (int it = 0; it < 50 && pass; ++it) {
        VoxelGrid g;
        g.dims = {dim(rng), dim(rng), dim(rng)};
        g.spacing = 0.01 + u(rng);
        g.occupancy.resize(g.cell_count());
        const double fill = 0.05 + 0.9 * u(rng);
        for (auto& o : g.occupancy) o = u(rng) < fill ? 1 : 0;
        const SdfGrid sdf = signed_distance_transform(g);
        const std::vector<double> brute = reference::brute_force_signed_distances(g);
        for (size_t i = 0; i < brute.size() && pass; ++i) {
            if (sdf.values[i] != brute[i]) {
                pass = false;
                detail = "grid " + std::to_string(it) + " cell " + std::to_string(i);
            }
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 10.0) pass = false;
    if (pass) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "50 grids exact, %.3f s", elapsed);
        detail = buf;
    }
    report(4, "distance-transform oracle", pass, detail);
}

// 5. Endpoint fidelity at resolution 128: the t=0 surface stays within two
// extraction-grid spacings of the source mesh (mean symmetric distance),
// mirrored at t=1 against the target, under three minutes per pair.
void criterion_5() {
    struct PairCase {
        const char* name;
        Character src, tgt;
    };
    std::vector<PairCase> cases;
    cases.push_back({"biped/stocky", fixtures::biped(), fixtures::biped_stocky()});
    cases.push_back({"biped/quadruped", fixtures::biped(), fixtures::quadruped()});
    cases.push_back({"tailed/quadruped", fixtures::biped_tailed(), fixtures::quadruped()});

    const int resolution = 128;
    bool pass = true;
    std::string detail;
    for (auto& pc : cases) {
        const auto start = Clock::now();
        fixtures::normalize_pair(pc.src, pc.tgt);
        const auto pairs = matched_pairs(pc.src, pc.tgt);
        InterpolationField::Config fc;
        fc.resolution = resolution;

        double worst = 0.0;
        for (double t : {0.0, 1.0}) {
            const InterpolationField field(pc.src, pc.tgt, pairs, Pose{}, t, fc);
            const Mesh surface = field.extract(resolution);
            const double spacing = field.region().extents().maxCoeff() / resolution;
            const Mesh& expect = t == 0.0 ? pc.src.mesh : pc.tgt.mesh;
            const double dist = reference::mean_symmetric_distance(surface, expect);
            worst = std::max(worst, dist / spacing);
            if (dist >= 2.0 * spacing) {
                pass = false;
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%s t=%.0f: %.4f >= 2 spacings (%.4f)",
                              pc.name, t, dist, 2.0 * spacing);
                detail = buf;
            }
        }
        const double elapsed = seconds_since(start);
        if (elapsed >= 180.0) {
            pass = false;
            detail += std::string(" ") + pc.name + " too slow";
        }
        if (pass) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s%s worst %.2f spacings in %.1f s", detail.c_str(),
                          pc.name, worst, elapsed);
            detail = buf;
        }
    }
    report(5, "endpoint fidelity", pass, detail);
}

// 6. Topology invariance: identical ids, kinds and parents at five t values
// for every fixture pair.
void criterion_6() {
    struct PairCase {
        Character src, tgt;
    };
    std::vector<PairCase> cases;
    cases.push_back({fixtures::biped(), fixtures::biped_stocky()});
    cases.push_back({fixtures::biped(), fixtures::quadruped()});
    cases.push_back({fixtures::biped_tailed(), fixtures::quadruped()});
    cases.push_back({fixtures::grouping_source(), fixtures::grouping_target()});

    bool pass = true;
    for (auto& pc : cases) {
        fixtures::normalize_pair(pc.src, pc.tgt);
        const auto pairs = matched_pairs(pc.src, pc.tgt);
        const UnifiedSkeleton base = build_unified_skeleton(pc.src, pc.tgt, pairs, 0.0);
        for (double t : {0.25, 0.5, 0.75, 1.0}) {
            const UnifiedSkeleton uni = build_unified_skeleton(pc.src, pc.tgt, pairs, t);
            pass = pass && uni.size() == base.size() && uni.root == base.root;
            for (int i = 0; pass && i < uni.size(); ++i) {
                pass = uni.bone(i).kind == base.bone(i).kind &&
                       uni.bone(i).parent == base.bone(i).parent &&
                       uni.bone(i).source_ref == base.bone(i).source_ref &&
                       uni.bone(i).target_ref == base.bone(i).target_ref;
            }
        }
    }
    report(6, "topology invariance", pass,
           pass ? "4 pairs, t in {0, .25, .5, .75, 1}, exact" : "topology changed with t");
}

// 7. Pose-transfer contract: identity pose reproduces both meshes bit for
// bit on a constrained-only pair; a 45-degree elbow moves only vertices
// weighted to the rotated subtree.
void criterion_7() {
    Character src = fixtures::biped();
    Character tgt = fixtures::biped_stocky();
    fixtures::normalize_pair(src, tgt);
    const auto pairs = matched_pairs(src, tgt);

    bool constrained_only = true;
    for (const auto& p : pairs) constrained_only = constrained_only && p.kind == PairKind::OneToOne;

    const UnifiedSkeleton uni = build_unified_skeleton(src, tgt, pairs, 0.5);
    const auto [rest_src, rest_tgt] = transfer_pose(uni, Pose{});
    const Mesh src_rest = apply_skinning(src, rest_src);
    const Mesh tgt_rest = apply_skinning(tgt, rest_tgt);
    bool rest_exact = src_rest.vertices.size() == src.mesh.vertices.size() &&
                      tgt_rest.vertices.size() == tgt.mesh.vertices.size();
    for (size_t i = 0; rest_exact && i < src_rest.vertices.size(); ++i) {
        rest_exact = src_rest.vertices[i] == src.mesh.vertices[i];
    }
    for (size_t i = 0; rest_exact && i < tgt_rest.vertices.size(); ++i) {
        rest_exact = tgt_rest.vertices[i] == tgt.mesh.vertices[i];
    }

    // 45 degree elbow on the left lower arm.
    int elbow = -1;
    for (const UnifiedBone& k : uni.bones) {
        if (src.skeleton.bone(*k.source_ref).name == "arm_l_lower") elbow = k.id;
    }
    Pose pose;
    pose[elbow] = JointAngles{Vec3(0, 0, 45)};
    const auto [posed_src, posed_tgt] = transfer_pose(uni, pose);
    const Mesh bent = apply_skinning(src, posed_src);

    // The rotated subtree is just the lower arm bone.
    const int moved_bone = *uni.bone(elbow).source_ref;
    bool isolation = true;
    int moved_count = 0;
    for (size_t v = 0; v < bent.vertices.size(); ++v) {
        double weight_in_subtree = 0.0;
        for (const auto& [bone, w] : src.weights[v]) {
            if (bone == moved_bone) weight_in_subtree += w;
        }
        const double displacement = (bent.vertices[v] - src.mesh.vertices[v]).norm();
        if (weight_in_subtree == 0.0) {
            isolation = isolation && displacement < 1e-9;
        } else if (displacement > 1e-9) {
            ++moved_count;
        }
    }

    const bool pass = constrained_only && rest_exact && isolation && moved_count > 0;
    std::string detail;
    if (pass) {
        detail = "rest bit-exact; " + std::to_string(moved_count) + " subtree vertices moved";
    } else {
        detail = std::string(constrained_only ? "" : "pair not constrained-only; ") +
                 (rest_exact ? "" : "rest not bit-exact; ") +
                 (isolation ? "" : "unweighted vertices moved");
    }
    report(7, "pose-transfer contract", pass, detail);
}

// 8. bbox-map bijectivity on 10,000 probes within 1e-9, and exact lerp_box
// endpoints.
void criterion_8() {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> ext(0.05, 4.0);
    bool pass = true;
    double worst = 0.0;
    for (int it = 0; it < 10000; ++it) {
        BoundingBox from, to;
        from.center = Vec3(u(rng), u(rng), u(rng));
        from.half_extents = Vec3(ext(rng), ext(rng), ext(rng));
        to.center = Vec3(u(rng), u(rng), u(rng));
        to.half_extents = Vec3(ext(rng), ext(rng), ext(rng));
        const Vec3 p(u(rng), u(rng), u(rng));
        const double err = (bbox_map(bbox_map(p, from, to), to, from) - p).norm();
        worst = std::max(worst, err);
        pass = pass && err < 1e-9;
    }

    std::mt19937 rng2(100);
    for (int it = 0; it < 100; ++it) {
        BoundingBox a, b;
        a.center = Vec3(u(rng2), u(rng2), u(rng2));
        a.half_extents = Vec3(ext(rng2), ext(rng2), ext(rng2));
        b.center = Vec3(u(rng2), u(rng2), u(rng2));
        b.half_extents = Vec3(ext(rng2), ext(rng2), ext(rng2));
        const BoundingBox at0 = lerp_box(a, b, 0.0);
        const BoundingBox at1 = lerp_box(a, b, 1.0);
        pass = pass && at0.center == a.center && at0.half_extents == a.half_extents &&
               at1.center == b.center && at1.half_extents == b.half_extents;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "10000 probes, worst round trip %.2e; endpoints exact", worst);
    report(8, "bbox-map bijectivity", pass, buf);
}

// 9. Advection consistency: identical values at rest on a 32^3 probe grid,
// and mean |dSDF| under two part-grid spacings at a 30 degree single-joint
// pose.
void criterion_9() {
    Character src = fixtures::two_bone_arm(fixtures::Weighting::Blended);
    Character tgt = fixtures::two_bone_arm(fixtures::Weighting::Blended);
    fixtures::normalize_pair(src, tgt);
    const auto pairs = matched_pairs(src, tgt);
    const int resolution = 64;

    auto probe = [](const Aabb& region, auto&& f) {
        const Vec3 ext = region.extents();
        for (int k = 0; k < 32; ++k) {
            for (int j = 0; j < 32; ++j) {
                for (int i = 0; i < 32; ++i) {
                    f(Vec3(region.min + ext.cwiseProduct(Vec3(i + 0.5, j + 0.5, k + 0.5)) / 32.0));
                }
            }
        }
    };

    InterpolationField::Config vox_cfg;
    vox_cfg.resolution = resolution;
    vox_cfg.mode = QueryMode::Voxelize;
    InterpolationField::Config adv_cfg = vox_cfg;
    adv_cfg.mode = QueryMode::Advect;

    // Rest pose: bit-identical in both modes.
    const InterpolationField rest_vox(src, tgt, pairs, Pose{}, 0.5, vox_cfg);
    const InterpolationField rest_adv(src, tgt, pairs, Pose{}, 0.5, adv_cfg);
    bool rest_identical = true;
    probe(rest_vox.region(), [&](const Vec3& p) {
        rest_identical = rest_identical && rest_vox.value(p) == rest_adv.value(p);
    });

    // 30 degree single-joint pose.
    const UnifiedSkeleton topo = build_unified_skeleton(src, tgt, pairs, 0.5);
    int elbow = -1;
    for (const UnifiedBone& k : topo.bones) {
        if (k.parent >= 0) elbow = k.id;
    }
    Pose pose;
    pose[elbow] = JointAngles{Vec3(0, 0, 30)};
    const InterpolationField posed_vox(src, tgt, pairs, pose, 0.5, vox_cfg);
    const InterpolationField posed_adv(src, tgt, pairs, pose, 0.5, adv_cfg);

    double max_spacing = 0.0;
    const PartGrids rest_grids = build_part_sdfs(src, src.skeleton, src.mesh, resolution);
    for (const auto& [bone, grid] : rest_grids) max_spacing = std::max(max_spacing, grid.spacing);

    double sum = 0.0;
    int count = 0;
    probe(posed_vox.region(), [&](const Vec3& p) {
        sum += std::fabs(posed_vox.value(p) - posed_adv.value(p));
        ++count;
    });
    const double mean = sum / count;
    const bool pass = rest_identical && mean < 2.0 * max_spacing;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "rest %s; posed mean |dSDF| %.5f vs limit %.5f",
                  rest_identical ? "identical" : "DIFFERS", mean, 2.0 * max_spacing);
    report(9, "advection consistency", pass, buf);
}

// 10. Alpha predictor values from the fitted constants, exact to 1e-12.
void criterion_10() {
    const AlphaParams params;
    const bool pass = std::fabs(compute_alpha(5, 5, params) - 1.25) < 1e-12 &&
                      std::fabs(compute_alpha(20, 10, params) - 2.5) < 1e-12 &&
                      std::fabs(compute_alpha(20, 20, params) - 0.5) < 1e-12;
    report(10, "alpha predictor values", pass,
           pass ? "alpha(5,5)=1.25 alpha(20,10)=2.5 alpha(20,20)=0.5" : "value mismatch");
}

} // namespace

int main() {
    configure_threads_from_env();
    std::printf("rigmixer acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
