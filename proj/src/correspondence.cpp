#include "rigmixer/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace rigmixer {

double compute_alpha(int n_source, int n_target, const AlphaParams& params) {
    const double raw = params.c1 * std::min(n_source, n_target) +
                       params.c2 * std::abs(n_source - n_target) + params.c3;
    return std::max(0.0, raw);
}

double leaf_leaf_cost(const Bone& s, const Bone& d,
                      const LocalFrame& src_root_frame, const LocalFrame& tgt_root_frame) {
    double cost = std::fabs(s.length - d.length);
    cost += (s.head - d.head).norm();
    cost += std::abs(s.hierarchy_level - d.hierarchy_level);
    if (octant(s.head, src_root_frame) != octant(d.head, tgt_root_frame)) {
        cost += 1.0;
    }
    return cost;
}

double leaf_void_cost(const Bone& bone, double alpha) {
    return alpha * bone.length;
}

double branch_direction_cost(const Bone& s, const Bone& d,
                             const Vec3& src_root_head, const Vec3& tgt_root_head) {
    const Vec3 ws = src_root_head - s.head;
    const Vec3 wd = tgt_root_head - d.head;
    const double ns = ws.norm();
    const double nd = wd.norm();
    if (ns <= 1e-12 || nd <= 1e-12) {
        return 0.0; // a root-coincident head has no defined direction
    }
    if (ws == wd) return 0.0; // keep self-correspondence exactly free
    const double cosine = std::clamp(ws.dot(wd) / (ns * nd), -1.0, 1.0);
    return 1.0 - cosine;
}

namespace {

// Recursive matcher over the two bone trees. Memoizes pair costs and the
// children assignments so extraction replays the same optimal decisions.
class TreeMatcher {
public:
    TreeMatcher(const Skeleton& src, const Skeleton& tgt, const AlphaParams& params)
        : src_(src), tgt_(tgt) {
        alpha_ = compute_alpha(src.size(), tgt.size(), params);
        void_src_ = subtree_void_costs(src_);
        void_tgt_ = subtree_void_costs(tgt_);
    }

    MatchResult run() {
        MatchResult result;
        result.total_cost = match_cost(src_.root, tgt_.root);
        emit_match(src_.root, tgt_.root, result.pairs);
        return result;
    }

    double subtree_void_src(int s) const { return void_src_[static_cast<size_t>(s)]; }
    double subtree_void_tgt(int d) const { return void_tgt_[static_cast<size_t>(d)]; }

private:
    std::vector<double> subtree_void_costs(const Skeleton& skel) const {
        // alpha * total bone length of the subtree; children are computed
        // before parents by walking ids in reverse BFS order.
        std::vector<double> cost(skel.bones.size(), 0.0);
        std::vector<int> order;
        order.push_back(skel.root);
        for (size_t i = 0; i < order.size(); ++i) {
            for (int c : skel.children[static_cast<size_t>(order[i])]) order.push_back(c);
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            double total = alpha_ * skel.bone(*it).length;
            for (int c : skel.children[static_cast<size_t>(*it)]) {
                total += cost[static_cast<size_t>(c)];
            }
            cost[static_cast<size_t>(*it)] = total;
        }
        return cost;
    }

    size_t key(int s, int d) const {
        return static_cast<size_t>(s) * static_cast<size_t>(tgt_.size()) + static_cast<size_t>(d);
    }

    double match_cost(int s, int d) {
        const auto it = cost_memo_.find(key(s, d));
        if (it != cost_memo_.end()) return it->second;

        double cost = leaf_leaf_cost(src_.bone(s), tgt_.bone(d),
                                     src_.root_frame(), tgt_.root_frame());
        const bool s_branch = !src_.is_leaf(s);
        const bool d_branch = !tgt_.is_leaf(d);
        if (s_branch && d_branch) {
            cost += branch_direction_cost(src_.bone(s), tgt_.bone(d),
                                          src_.bone(src_.root).head, tgt_.bone(tgt_.root).head);
            cost += child_assignment(s, d).total;
        } else if (s_branch) {
            for (int c : src_.children[static_cast<size_t>(s)]) cost += void_src_[static_cast<size_t>(c)];
        } else if (d_branch) {
            for (int c : tgt_.children[static_cast<size_t>(d)]) cost += void_tgt_[static_cast<size_t>(c)];
        }
        cost_memo_.emplace(key(s, d), cost);
        return cost;
    }

    const Assignment& child_assignment(int s, int d) {
        const auto it = assign_memo_.find(key(s, d));
        if (it != assign_memo_.end()) return it->second;

        const auto& cs = src_.children[static_cast<size_t>(s)];
        const auto& cd = tgt_.children[static_cast<size_t>(d)];
        CostMatrix m;
        m.rows = static_cast<int>(cs.size());
        m.cols = static_cast<int>(cd.size());
        m.entries.resize(static_cast<size_t>(m.rows) * m.cols);
        for (int i = 0; i < m.rows; ++i) {
            for (int j = 0; j < m.cols; ++j) {
                m.at(i, j) = match_cost(cs[static_cast<size_t>(i)], cd[static_cast<size_t>(j)]);
            }
        }
        for (int i = 0; i < m.rows; ++i) m.void_row_cost.push_back(void_src_[static_cast<size_t>(cs[static_cast<size_t>(i)])]);
        for (int j = 0; j < m.cols; ++j) m.void_col_cost.push_back(void_tgt_[static_cast<size_t>(cd[static_cast<size_t>(j)])]);
        return assign_memo_.emplace(key(s, d), hungarian(m)).first->second;
    }

    void emit_void_subtree(const Skeleton& skel, int bone, bool source_side,
                           std::vector<CorrespondencePair>& out) const {
        CorrespondencePair p;
        p.kind = source_side ? PairKind::OneToVoidSource : PairKind::OneToVoidTarget;
        (source_side ? p.source_bones : p.target_bones).push_back(bone);
        out.push_back(std::move(p));
        for (int c : skel.children[static_cast<size_t>(bone)]) {
            emit_void_subtree(skel, c, source_side, out);
        }
    }

    void emit_match(int s, int d, std::vector<CorrespondencePair>& out) {
        CorrespondencePair p;
        p.kind = PairKind::OneToOne;
        p.source_bones = {s};
        p.target_bones = {d};
        out.push_back(std::move(p));

        const bool s_branch = !src_.is_leaf(s);
        const bool d_branch = !tgt_.is_leaf(d);
        const auto& cs = src_.children[static_cast<size_t>(s)];
        const auto& cd = tgt_.children[static_cast<size_t>(d)];
        if (s_branch && d_branch) {
            const Assignment& a = child_assignment(s, d);
            for (size_t i = 0; i < cs.size(); ++i) {
                const int j = a.row_to_col[i];
                if (j >= 0) {
                    emit_match(cs[i], cd[static_cast<size_t>(j)], out);
                } else {
                    emit_void_subtree(src_, cs[i], true, out);
                }
            }
            for (size_t j = 0; j < cd.size(); ++j) {
                if (a.col_to_row[j] < 0) emit_void_subtree(tgt_, cd[j], false, out);
            }
        } else if (s_branch) {
            for (int c : cs) emit_void_subtree(src_, c, true, out);
        } else if (d_branch) {
            for (int c : cd) emit_void_subtree(tgt_, c, false, out);
        }
    }

    const Skeleton& src_;
    const Skeleton& tgt_;
    double alpha_ = 0.0;
    std::vector<double> void_src_, void_tgt_;
    std::unordered_map<size_t, double> cost_memo_;
    std::unordered_map<size_t, Assignment> assign_memo_;
};

} // namespace

MatchResult hierarchical_match(const Skeleton& src, const Skeleton& tgt,
                               const AlphaParams& params) {
    TreeMatcher matcher(src, tgt, params);
    return matcher.run();
}

namespace {

// Maximal runs of void bones starting at children of `anchor`, following
// single-child links while the child is still an ungrouped void bone.
std::vector<std::vector<int>> void_chains(const Skeleton& skel, int anchor,
                                          const std::vector<char>& is_void,
                                          const std::vector<char>& consumed) {
    std::vector<std::vector<int>> chains;
    for (int c : skel.children[static_cast<size_t>(anchor)]) {
        if (!is_void[static_cast<size_t>(c)] || consumed[static_cast<size_t>(c)]) continue;
        std::vector<int> chain{c};
        int cur = c;
        while (skel.children[static_cast<size_t>(cur)].size() == 1) {
            const int next = skel.children[static_cast<size_t>(cur)][0];
            if (!is_void[static_cast<size_t>(next)] || consumed[static_cast<size_t>(next)]) break;
            chain.push_back(next);
            cur = next;
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

CorrespondencePair make_pair_for_chains(std::vector<int> src_chain, std::vector<int> tgt_chain) {
    CorrespondencePair p;
    if (src_chain.size() == 1 && tgt_chain.size() == 1) {
        p.kind = PairKind::OneToOne;
    } else if (src_chain.size() > 1) {
        p.kind = PairKind::OneToManySource;
    } else {
        p.kind = PairKind::OneToManyTarget;
    }
    p.source_bones = std::move(src_chain);
    p.target_bones = std::move(tgt_chain);
    return p;
}

} // namespace

std::vector<CorrespondencePair> post_process(const std::vector<CorrespondencePair>& pairs,
                                             const Skeleton& src, const Skeleton& tgt) {
    std::vector<char> src_void(src.bones.size(), 0), tgt_void(tgt.bones.size(), 0);
    for (const auto& p : pairs) {
        if (p.kind == PairKind::OneToVoidSource) src_void[static_cast<size_t>(p.source_bones[0])] = 1;
        if (p.kind == PairKind::OneToVoidTarget) tgt_void[static_cast<size_t>(p.target_bones[0])] = 1;
    }
    std::vector<char> src_consumed(src.bones.size(), 0), tgt_consumed(tgt.bones.size(), 0);

    // New pairs produced under each 1-to-1 anchor, keyed by its index in the
    // input stream so they can be spliced in next to it.
    std::vector<std::vector<CorrespondencePair>> emitted(pairs.size());

    for (size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto& anchor = pairs[pi];
        if (anchor.kind != PairKind::OneToOne) continue;
        auto src_chains = void_chains(src, anchor.source_bones[0], src_void, src_consumed);
        auto tgt_chains = void_chains(tgt, anchor.target_bones[0], tgt_void, tgt_consumed);
        if (src_chains.empty() || tgt_chains.empty()) continue;

        CostMatrix m;
        m.rows = static_cast<int>(src_chains.size());
        m.cols = static_cast<int>(tgt_chains.size());
        m.entries.resize(static_cast<size_t>(m.rows) * m.cols);
        for (int i = 0; i < m.rows; ++i) {
            for (int j = 0; j < m.cols; ++j) {
                m.at(i, j) = branch_direction_cost(src.bone(src_chains[static_cast<size_t>(i)].front()),
                                                   tgt.bone(tgt_chains[static_cast<size_t>(j)].front()),
                                                   src.bone(src.root).head, tgt.bone(tgt.root).head);
            }
        }
        // Direction costs top out at 2; a large void price forces the
        // maximum number of chain matches.
        m.void_row_cost.assign(static_cast<size_t>(m.rows), 1e6);
        m.void_col_cost.assign(static_cast<size_t>(m.cols), 1e6);
        const Assignment a = hungarian(m);

        for (int i = 0; i < m.rows; ++i) {
            const int j = a.row_to_col[static_cast<size_t>(i)];
            if (j < 0) continue;
            std::vector<int> sc = src_chains[static_cast<size_t>(i)];
            std::vector<int> tc = tgt_chains[static_cast<size_t>(j)];
            for (int b : sc) src_consumed[static_cast<size_t>(b)] = 1;
            for (int b : tc) tgt_consumed[static_cast<size_t>(b)] = 1;

            if (sc.size() > 1 && tc.size() > 1) {
                // Emit 1-to-1 prefixes until one chain has a single bone left.
                const size_t prefix = std::min(sc.size(), tc.size()) - 1;
                for (size_t k = 0; k < prefix; ++k) {
                    CorrespondencePair p;
                    p.kind = PairKind::OneToOne;
                    p.source_bones = {sc[k]};
                    p.target_bones = {tc[k]};
                    emitted[pi].push_back(std::move(p));
                }
                sc.erase(sc.begin(), sc.begin() + static_cast<long>(prefix));
                tc.erase(tc.begin(), tc.begin() + static_cast<long>(prefix));
            }
            emitted[pi].push_back(make_pair_for_chains(std::move(sc), std::move(tc)));
        }
    }

    std::vector<CorrespondencePair> out;
    out.reserve(pairs.size());
    for (size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto& p = pairs[pi];
        if (p.kind == PairKind::OneToVoidSource && src_consumed[static_cast<size_t>(p.source_bones[0])]) continue;
        if (p.kind == PairKind::OneToVoidTarget && tgt_consumed[static_cast<size_t>(p.target_bones[0])]) continue;
        out.push_back(p);
        for (auto& np : emitted[pi]) out.push_back(std::move(np));
    }
    return out;
}

void validate_pairs(const std::vector<CorrespondencePair>& pairs,
                    const Skeleton& src, const Skeleton& tgt) {
    std::vector<int> src_seen(src.bones.size(), 0), tgt_seen(tgt.bones.size(), 0);
    auto note = [](std::vector<int>& seen, const std::vector<int>& bones, int limit,
                   const char* side) {
        for (int b : bones) {
            if (b < 0 || b >= limit) {
                throw ValidationError(std::string(side) + " bone id out of range in pair");
            }
            seen[static_cast<size_t>(b)] += 1;
        }
    };
    auto check_chain = [](const Skeleton& skel, const std::vector<int>& bones, const char* side) {
        for (size_t i = 1; i < bones.size(); ++i) {
            if (skel.bone(bones[i]).parent != bones[i - 1]) {
                throw ValidationError(std::string("many-side ") + side +
                                      " bones do not form a parent-to-child chain");
            }
        }
    };

    for (const auto& p : pairs) {
        const size_t ns = p.source_bones.size();
        const size_t nt = p.target_bones.size();
        switch (p.kind) {
        case PairKind::OneToOne:
            if (ns != 1 || nt != 1) throw ValidationError("one_to_one pair must have one bone per side");
            break;
        case PairKind::OneToVoidSource:
            if (ns != 1 || nt != 0) throw ValidationError("one_to_void_source pair must have one source bone only");
            break;
        case PairKind::OneToVoidTarget:
            if (ns != 0 || nt != 1) throw ValidationError("one_to_void_target pair must have one target bone only");
            break;
        case PairKind::OneToManySource:
            if (ns < 2 || nt != 1) throw ValidationError("one_to_many_source pair must have >=2 source bones and one target bone");
            check_chain(src, p.source_bones, "source");
            break;
        case PairKind::OneToManyTarget:
            if (ns != 1 || nt < 2) throw ValidationError("one_to_many_target pair must have one source bone and >=2 target bones");
            check_chain(tgt, p.target_bones, "target");
            break;
        }
        note(src_seen, p.source_bones, src.size(), "source");
        note(tgt_seen, p.target_bones, tgt.size(), "target");
    }
    for (int b = 0; b < src.size(); ++b) {
        if (src_seen[static_cast<size_t>(b)] != 1) {
            throw ValidationError("source bone '" + src.bone(b).name + "' covered " +
                                  std::to_string(src_seen[static_cast<size_t>(b)]) + " times");
        }
    }
    for (int b = 0; b < tgt.size(); ++b) {
        if (tgt_seen[static_cast<size_t>(b)] != 1) {
            throw ValidationError("target bone '" + tgt.bone(b).name + "' covered " +
                                  std::to_string(tgt_seen[static_cast<size_t>(b)]) + " times");
        }
    }
}

} // namespace rigmixer
