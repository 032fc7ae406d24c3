#include "rigmixer/pipeline.hpp"

#include <cstdio>
#include <filesystem>

#include "rigmixer/io.hpp"

namespace rigmixer {

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const StagedError&) {
        throw;
    } catch (const Error& e) {
        throw StagedError(name, e.what());
    }
}

std::string frame_name(size_t i, const char* suffix) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "frame_%04zu%s", i, suffix);
    return buf;
}

} // namespace

PipelineResult run_pipeline(const std::string& src_path, const std::string& tgt_path,
                            const PipelineConfig& config) {
    if (config.resolution < 8) {
        throw StagedError("interpolate", "resolution must be at least 8");
    }
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    const fs::path out_dir(config.output_dir);

    PipelineResult result;
    const auto [src, tgt] = stage("correspond", [&] {
        return load_character_pair(src_path, tgt_path);
    });

    result.pairs = stage("correspond", [&] {
        if (!config.pairs_path.empty()) {
            // Override files replace computed pairs wholesale.
            return load_pairs(config.pairs_path, src.skeleton, tgt.skeleton);
        }
        const MatchResult match = hierarchical_match(src.skeleton, tgt.skeleton, config.alpha);
        return post_process(match.pairs, src.skeleton, tgt.skeleton);
    });

    const std::string pairs_path = (out_dir / "correspondence.json").string();
    save_pairs(result.pairs, src.skeleton, tgt.skeleton, pairs_path);
    result.written.push_back(pairs_path);

    // Frame list: the clip supplies (pose, t) pairs, otherwise the schedule
    // renders rest poses.
    AnimationClip clip;
    if (!config.clip_path.empty()) {
        const UnifiedSkeleton topo = stage("unify", [&] {
            return build_unified_skeleton(src, tgt, result.pairs, 0.5);
        });
        clip = stage("pose", [&] { return load_clip(config.clip_path, topo); });
    } else {
        for (double t : config.t_schedule) {
            if (t < 0.0 || t > 1.0) {
                throw StagedError("unify", "t values must lie in [0, 1]");
            }
            clip.frames.push_back(AnimationFrame{{}, t});
        }
    }

    // Rest-pose grids are shared across frames in advect mode.
    PartGrids rest_src, rest_tgt;
    if (config.mode == QueryMode::Advect) {
        stage("interpolate", [&] {
            rest_src = build_part_sdfs(src, src.skeleton, src.mesh, config.resolution, config.exec);
            rest_tgt = build_part_sdfs(tgt, tgt.skeleton, tgt.mesh, config.resolution, config.exec);
            return 0;
        });
    }

    for (size_t fi = 0; fi < clip.frames.size(); ++fi) {
        const AnimationFrame& frame = clip.frames[fi];
        InterpolationField::Config fc;
        fc.resolution = config.resolution;
        fc.mode = config.mode;
        fc.exec = config.exec;
        if (config.mode == QueryMode::Advect) {
            fc.rest_src_grids = &rest_src;
            fc.rest_tgt_grids = &rest_tgt;
        }
        const InterpolationField field = stage("interpolate", [&] {
            return InterpolationField(src, tgt, result.pairs, frame.pose, frame.t, fc);
        });

        const std::string skel_path = (out_dir / frame_name(fi, "_skeleton.json")).string();
        stage("unify", [&] {
            save_unified(field.unified(), src.skeleton, tgt.skeleton, skel_path);
            return 0;
        });
        result.written.push_back(skel_path);

        const Mesh surface = stage("extract", [&] {
            return field.extract(config.resolution, config.exec);
        });
        const std::string obj_path = (out_dir / frame_name(fi, ".obj")).string();
        save_obj(surface, obj_path);
        result.written.push_back(obj_path);
    }
    return result;
}

} // namespace rigmixer
