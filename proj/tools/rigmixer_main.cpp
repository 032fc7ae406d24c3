// rigmixer CLI: skeleton correspondence, unified skeletons, and rig-aware
// SDF interpolation between two rigged characters.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rigmixer/field.hpp"
#include "rigmixer/io.hpp"
#include "rigmixer/parallel.hpp"
#include "rigmixer/pipeline.hpp"

namespace {

using namespace rigmixer;

QueryMode parse_mode(const std::string& s) {
    if (s == "voxelize") return QueryMode::Voxelize;
    if (s == "advect") return QueryMode::Advect;
    throw StagedError("interpolate", "unknown mode '" + s + "' (expected voxelize or advect)");
}

std::vector<CorrespondencePair> compute_pairs(const Character& src, const Character& tgt,
                                              const AlphaParams& alpha) {
    const MatchResult match = hierarchical_match(src.skeleton, tgt.skeleton, alpha);
    return post_process(match.pairs, src.skeleton, tgt.skeleton);
}

int run(int argc, char** argv) {
    CLI::App app{"rig-aware interpolation of rigged 3D characters"};
    app.require_subcommand(1);
    configure_threads_from_env();

    // correspond
    auto* correspond = app.add_subcommand("correspond", "compute skeleton correspondence pairs");
    std::string c_src, c_tgt, c_out;
    AlphaParams alpha;
    correspond->add_option("src", c_src, "source character JSON")->required();
    correspond->add_option("tgt", c_tgt, "target character JSON")->required();
    correspond->add_option("--alpha-c1", alpha.c1, "void predictor c1");
    correspond->add_option("--alpha-c2", alpha.c2, "void predictor c2");
    correspond->add_option("--alpha-c3", alpha.c3, "void predictor c3");
    correspond->add_option("-o,--output", c_out, "pairs JSON output")->required();

    // unify
    auto* unify = app.add_subcommand("unify", "build a unified skeleton at step t");
    std::string u_src, u_tgt, u_pairs, u_out;
    double u_t = 0.5;
    unify->add_option("src", u_src)->required();
    unify->add_option("tgt", u_tgt)->required();
    unify->add_option("--pairs", u_pairs, "correspondence pairs JSON")->required();
    unify->add_option("--t", u_t, "interpolation step in [0, 1]")->required();
    unify->add_option("-o,--output", u_out, "unified skeleton JSON output")->required();

    // interpolate
    auto* interp = app.add_subcommand("interpolate", "extract one interpolated surface");
    std::string i_src, i_tgt, i_pairs, i_pose, i_mode = "voxelize", i_out;
    double i_t = 0.5;
    int i_res = 128;
    interp->add_option("src", i_src)->required();
    interp->add_option("tgt", i_tgt)->required();
    interp->add_option("--pairs", i_pairs)->required();
    interp->add_option("--t", i_t)->required();
    interp->add_option("--pose", i_pose, "pose JSON (unified bone angles)");
    interp->add_option("--mode", i_mode, "voxelize|advect");
    interp->add_option("--resolution", i_res, "grid resolution (longest axis)");
    interp->add_option("-o,--output", i_out, "OBJ output")->required();

    // animate
    auto* animate = app.add_subcommand("animate", "render an interpolation-during-animation clip");
    std::string a_src, a_tgt, a_pairs, a_clip, a_out, a_mode = "voxelize";
    int a_res = 128;
    animate->add_option("src", a_src)->required();
    animate->add_option("tgt", a_tgt)->required();
    animate->add_option("--pairs", a_pairs)->required();
    animate->add_option("--clip", a_clip, "animation clip JSON")->required();
    animate->add_option("--mode", a_mode, "voxelize|advect");
    animate->add_option("--resolution", a_res, "grid resolution (longest axis)");
    animate->add_option("-o,--output", a_out, "output directory")->required();

    // segment
    auto* segment = app.add_subcommand("segment", "export per-vertex bone assignment");
    std::string s_char, s_out;
    segment->add_option("character", s_char)->required();
    segment->add_option("-o,--output", s_out, "parts JSON output")->required();

    CLI11_PARSE(app, argc, argv);

    if (correspond->parsed()) {
        const auto [src, tgt] = load_character_pair(c_src, c_tgt);
        const auto pairs = compute_pairs(src, tgt, alpha);
        save_pairs(pairs, src.skeleton, tgt.skeleton, c_out);
        return 0;
    }
    if (unify->parsed()) {
        if (u_t < 0.0 || u_t > 1.0) throw StagedError("unify", "t must lie in [0, 1]");
        const auto [src, tgt] = load_character_pair(u_src, u_tgt);
        const auto pairs = load_pairs(u_pairs, src.skeleton, tgt.skeleton);
        const UnifiedSkeleton uni = build_unified_skeleton(src, tgt, pairs, u_t);
        save_unified(uni, src.skeleton, tgt.skeleton, u_out);
        return 0;
    }
    if (interp->parsed()) {
        if (i_t < 0.0 || i_t > 1.0) throw StagedError("interpolate", "t must lie in [0, 1]");
        if (i_res < 8) throw StagedError("interpolate", "resolution must be at least 8");
        const auto [src, tgt] = load_character_pair(i_src, i_tgt);
        const auto pairs = load_pairs(i_pairs, src.skeleton, tgt.skeleton);
        Pose pose;
        if (!i_pose.empty()) {
            const UnifiedSkeleton topo = build_unified_skeleton(src, tgt, pairs, i_t);
            pose = load_pose(i_pose, topo);
        }
        InterpolationField::Config fc;
        fc.resolution = i_res;
        fc.mode = parse_mode(i_mode);
        const InterpolationField field(src, tgt, pairs, pose, i_t, fc);
        save_obj(field.extract(i_res), i_out);
        return 0;
    }
    if (animate->parsed()) {
        PipelineConfig config;
        config.resolution = a_res;
        config.mode = parse_mode(a_mode);
        config.pairs_path = a_pairs;
        config.clip_path = a_clip;
        config.output_dir = a_out;
        run_pipeline(a_src, a_tgt, config);
        return 0;
    }
    if (segment->parsed()) {
        const Character character = load_character(s_char);
        std::ofstream out(s_out);
        if (!out) throw ParseError(s_out + ": cannot open for writing");
        out << segmentation_to_json(character);
        return 0;
    }
    return 1;
}

const char* stage_of(const std::exception& e, const char* fallback) {
    if (const auto* staged = dynamic_cast<const StagedError*>(&e)) {
        (void)staged;
        return ""; // message already carries the tag
    }
    return fallback;
}

} // namespace

int main(int argc, char** argv) {
    // Stage tag for errors that escape before the pipeline tags them: the
    // first stage the active subcommand runs.
    const char* fallback = "correspond";
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "unify") fallback = "unify";
        if (a == "interpolate" || a == "animate") fallback = "interpolate";
        if (a == "correspond" || a == "segment") fallback = "correspond";
    }
    try {
        return run(argc, argv);
    } catch (const rigmixer::Error& e) {
        const char* tag = stage_of(e, fallback);
        if (tag[0] != '\0') {
            std::fprintf(stderr, "error [%s] %s\n", tag, e.what());
        } else {
            std::fprintf(stderr, "error %s\n", e.what());
        }
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error [%s] %s\n", fallback, e.what());
        return 1;
    }
}
