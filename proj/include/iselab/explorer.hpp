#pragma once

#include <ostream>

#include "connect.hpp"

namespace iselab {

// Exploration path on the dual lattice, + spins on the left of travel.
struct ExplorationPath {
    int u = -1, v = -1;          // dual boundary vertex ids
    std::vector<int> vertices;   // gamma_0 = u ... gamma_n = v
};

namespace detail {

// spin constraint of one oriented dual step: + or outside on the left,
// - or outside on the right
inline bool step_spin_ok(const LatticeDomain& dom, const SpinConfiguration& cfg, int f, int d) {
    Vec2i l = crossed_left(dom.faces[f], d), r = crossed_right(dom.faces[f], d);
    auto it = dom.vindex.find(l);
    if (it != dom.vindex.end() && cfg.s[it->second] != 1) return false;
    it = dom.vindex.find(r);
    if (it != dom.vindex.end() && cfg.s[it->second] != -1) return false;
    return true;
}

}  // namespace detail

// Start data at mark a: the dual vertex counterclockwise of the boundary edge
// at a_delta, entered synthetically in the walk direction. With this frame the
// first inward candidate is the dual edge through a_delta's boundary edge.
inline std::pair<int, int> explorer_start(const RectangleMarking& m) {
    const auto& st = m.dom->boundary[m.split_step[RectangleMarking::AB]];
    return {m.dom->findex.at(st.dual_from), st.dir};
}

namespace detail {

// The path may not reuse a dual edge and may not cross itself transversally,
// but it may touch a dual vertex twice: two passages through one face are
// compatible exactly when both are turns on complementary corner pairs. A
// straight passage (E-W or N-S chord) blocks any second passage.
inline bool straight_mask(uint8_t m) { return m == ((1u << East) | (1u << West)) ||
                                              m == ((1u << North) | (1u << South)); }

}  // namespace detail

// Leftmost (counterclockwisemost admissible turn) or rightmost free explorer.
// A step is admissible when the path can still be completed into a full
// exploration, so a purely greedy walk is not enough: a locally spin-valid
// step can enter a pocket with no spin-valid exit. Backtracking DFS in
// candidate order yields exactly the lexicographically extreme completable
// path; a reachability BFS over (face, entry side) states prunes branch
// points (it over-approximates completability, so it never prunes a good
// branch).
inline ExplorationPath explore(const LatticeDomain& dom, const SpinConfiguration& cfg, int u,
                               int v, bool leftmost, int start_dir) {
    if (u == v) throw Error("BadEndpoints", "exploration endpoints coincide");
    if (dom.face_first_in_dir[v] < 0)
        throw Error("NotBoundary", "target vertex is not on the dual boundary");

    std::vector<uint8_t> edge_used(dom.n_faces(), 0);

    // can the current passage transit face w, entered moving in direction d?
    auto can_enter = [&](int f, int d) {
        int w = dom.dual_nbr[f][d];
        if (w < 0) return false;
        if ((edge_used[f] >> d) & 1) return false;
        if (!detail::step_spin_ok(dom, cfg, f, d)) return false;
        if (w != v && detail::straight_mask(edge_used[w])) return false;
        return true;
    };

    auto mark = [&](int f, int d) {
        edge_used[f] |= uint8_t(1u << d);
        edge_used[dom.dual_nbr[f][d]] |= uint8_t(1u << reverse(d));
    };
    auto unmark = [&](int f, int d) {
        edge_used[f] &= uint8_t(~(1u << d));
        edge_used[dom.dual_nbr[f][d]] &= uint8_t(~(1u << reverse(d)));
    };

    std::vector<uint8_t> seen(dom.n_faces() * 4, 0);
    std::vector<int> queue;
    auto reachable = [&](int f0, int in0) {
        std::fill(seen.begin(), seen.end(), 0);
        queue.clear();
        seen[f0 * 4 + in0] = 1;
        queue.push_back(f0 * 4 + in0);
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int f = queue[qi] / 4, in = queue[qi] % 4;
            if (detail::straight_mask(edge_used[f])) continue;  // cannot transit
            for (int e = 0; e < 4; ++e) {
                if (e == in) continue;
                if (!can_enter(f, e)) continue;
                int w = dom.dual_nbr[f][e];
                if (w == v) return true;
                int st = w * 4 + reverse(e);
                if (!seen[st]) { seen[st] = 1; queue.push_back(st); }
            }
        }
        return false;
    };

    struct Frame {
        int face, from_dir;  // step taken into this face (from_dir < 0 at u)
        int cands[4], nc = 0, idx = 0;
    };
    auto make_frame = [&](int face, int dir_in, bool start) {
        Frame fr;
        fr.face = face;
        fr.from_dir = start ? -1 : dir_in;
        int order[4] = {leftmost ? turn_left(dir_in) : turn_right(dir_in), dir_in,
                        leftmost ? turn_right(dir_in) : turn_left(dir_in), reverse(dir_in)};
        int nd = start ? 4 : 3;  // a U-turn reuses the entry edge, except at the start
        for (int k = 0; k < nd; ++k)
            if (can_enter(face, order[k])) fr.cands[fr.nc++] = order[k];
        return fr;
    };

    std::vector<Frame> stack;
    stack.push_back(make_frame(u, start_dir, true));
    while (!stack.empty()) {
        Frame& fr = stack.back();
        if (fr.idx == fr.nc) {
            if (fr.from_dir >= 0) {
                int prev = stack[stack.size() - 2].face;
                unmark(prev, fr.from_dir);
            }
            stack.pop_back();
            continue;
        }
        int d = fr.cands[fr.idx++];
        if (!can_enter(fr.face, d)) continue;  // edges may have been claimed since
        int w = dom.dual_nbr[fr.face][d];
        if (w == v) {
            ExplorationPath path;
            path.u = u;
            path.v = v;
            for (const Frame& f : stack) path.vertices.push_back(f.face);
            path.vertices.push_back(v);
            return path;
        }
        if (fr.nc > 1 && !reachable(w, reverse(d))) continue;
        mark(fr.face, d);
        stack.push_back(make_frame(w, d, false));
    }
    throw Error("Stuck", "no exploration path exists");
}

inline ExplorationPath leftmost_explorer(const RectangleMarking& m, const SpinConfiguration& cfg,
                                         int v) {
    auto [u, d] = explorer_start(m);
    return explore(*m.dom, cfg, u, v, true, d);
}
inline ExplorationPath rightmost_explorer(const RectangleMarking& m, const SpinConfiguration& cfg,
                                          int v) {
    auto [u, d] = explorer_start(m);
    return explore(*m.dom, cfg, u, v, false, d);
}

// Full validity check, written against the four defining bullets: endpoints,
// dual adjacency, spin constraints, no dual edge reused, no transversal
// self-crossing (a twice-visited face must carry two complementary turns),
// and the target is reached exactly once, at the end. Reachability of v
// after every prefix follows from the existence of the path's own suffix.
inline bool is_valid_exploration(const LatticeDomain& dom, const SpinConfiguration& cfg,
                                 const ExplorationPath& path) {
    const auto& g = path.vertices;
    if (g.empty() || g.front() != path.u || g.back() != path.v) return false;
    std::vector<uint8_t> edge_used(dom.n_faces(), 0);
    for (size_t j = 0; j + 1 < g.size(); ++j) {
        if (g[j] == path.v) return false;  // early arrival at the target
        int d = -1;
        for (int k = 0; k < 4; ++k)
            if (dom.dual_nbr[g[j]][k] == g[j + 1]) d = k;
        if (d < 0) return false;
        if ((edge_used[g[j]] >> d) & 1) return false;         // dual edge reused
        if (!detail::step_spin_ok(dom, cfg, g[j], d)) return false;
        // a second passage may not cross the first: forbidden when the face
        // already carries a straight chord (the entry edge of the current
        // passage was marked on the previous step, so strip it first)
        uint8_t prior = edge_used[g[j]];
        if (j > 0) {
            int entry = -1;
            for (int k = 0; k < 4; ++k)
                if (dom.dual_nbr[g[j]][k] == g[j - 1]) entry = k;
            prior &= uint8_t(~(1u << entry));
        }
        if (detail::straight_mask(prior)) return false;
        edge_used[g[j]] |= uint8_t(1u << d);
        edge_used[g[j + 1]] |= uint8_t(1u << reverse(d));
    }
    return true;
}

enum class Hit { CDFirst, BCFirst };

// Which of the primal arcs [cd], [bc] the exploration hits first.
//
// The side vertices of consecutive steps stay connected as long as the side
// does not leave the domain: straight steps move the side vertex by one
// lattice edge, a turn toward a side keeps that side's vertex fixed, and a
// forced turn away bridges the diagonal jump through the face corner that
// blocked the preferred turn. For the explorer's hugged side (left for the
// leftmost, right for the rightmost) the bridge corner carries the side's
// spin, so the chain is 4-connected there; the opposite side is
// star-connected. A maximal chain of + left-side vertices that touches both
// [ab] and [cd] is itself a crossing and certifies the hit of [cd]; a chain
// of - right-side vertices touching [bc] and [da] realizes the dual event
// and certifies [bc]. The first certificate decides. A path that reaches v
// with no certificate never closed off [cd] and reads [bc]. Arc membership
// is reflex-pivot-inclusive except for the rightmost explorer's 4-connected
// minus chains, mirroring the crossing conventions of connect.hpp; the
// chain hugging the start is seeded with a_delta's arcs (the first step
// leaves a_delta's cluster on the side of its spin). Locked, together with
// the explorer<->crossing pairing, by the exhaustive identity suite.
class HitClassifier {
public:
    explicit HitClassifier(const RectangleMarking& m) : dom_(m.dom), a_(m.marked_vertex[0]) {
        for (int p = 0; p < 2; ++p)
            for (int a = 0; a < 4; ++a) {
                arc_[p][a].assign(dom_->n_verts(), 0);
                for (int w : m.arc_vertices_closed(RectangleMarking::Arc(a), p == 1))
                    arc_[p][a][w] = 1;
            }
    }

    Hit operator()(const ExplorationPath& path, const SpinConfiguration& cfg,
                   bool leftmost) const {
        const auto& ab = arc_[1][RectangleMarking::AB];
        const auto& cd = arc_[1][RectangleMarking::CD];
        const auto& bc = arc_[leftmost ? 1 : 0][RectangleMarking::BC];
        const auto& da = arc_[leftmost ? 1 : 0][RectangleMarking::DA];
        bool lab = false, lcd = false, rbc = false, rda = false;
        if (cfg.s[a_] > 0) { lab = ab[a_]; lcd = cd[a_]; }
        else { rbc = bc[a_]; rda = da[a_]; }
        const auto& g = path.vertices;
        for (size_t j = 0; j + 1 < g.size(); ++j) {
            int d = -1;
            for (int k = 0; k < 4; ++k)
                if (dom_->dual_nbr[g[j]][k] == g[j + 1]) d = k;
            auto il = dom_->vindex.find(crossed_left(dom_->faces[g[j]], d));
            auto ir = dom_->vindex.find(crossed_right(dom_->faces[g[j]], d));
            if (il == dom_->vindex.end()) lab = lcd = false;
            else {
                lab = lab || ab[il->second];
                lcd = lcd || cd[il->second];
                if (lab && lcd) return Hit::CDFirst;
            }
            if (ir == dom_->vindex.end()) rbc = rda = false;
            else {
                rbc = rbc || bc[ir->second];
                rda = rda || da[ir->second];
                if (rbc && rda) return Hit::BCFirst;
            }
        }
        return Hit::BCFirst;
    }

private:
    const LatticeDomain* dom_;
    int a_;
    std::vector<uint8_t> arc_[2][4];  // [pivot-inclusive][Arc]
};

inline Hit hit_classification(const ExplorationPath& path, const RectangleMarking& m,
                              const SpinConfiguration& cfg, bool leftmost) {
    return HitClassifier(m)(path, cfg, leftmost);
}

// Boundary arcs of the slit domain Gamma_n (component of v in the primal
// graph after cutting the edges crossed by gamma[0,n]).
struct SlitState {
    std::vector<int> c_plus, c_minus, c_free;  // primal vertex ids
    int L = -1, R = -1;                        // extremal dual boundary contacts
};

inline SlitState slit_state(const LatticeDomain& dom, const ExplorationPath& path, int n,
                            int target_vertex) {
    const auto& g = path.vertices;
    n = std::min<int>(n, int(g.size()) - 1);

    // cut edges crossed by the path prefix
    std::unordered_set<std::uint64_t> cut;
    auto ekey = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return (std::uint64_t(a) << 32) | std::uint64_t(b);
    };
    std::vector<int> left_of, right_of;
    for (int j = 0; j < n; ++j) {
        int d = -1;
        for (int k = 0; k < 4; ++k)
            if (dom.dual_nbr[g[j]][k] == g[j + 1]) d = k;
        Vec2i l = crossed_left(dom.faces[g[j]], d), r = crossed_right(dom.faces[g[j]], d);
        auto il = dom.vindex.find(l), ir = dom.vindex.find(r);
        if (il != dom.vindex.end() && ir != dom.vindex.end())
            cut.insert(ekey(il->second, ir->second));
        if (il != dom.vindex.end()) left_of.push_back(il->second);
        if (ir != dom.vindex.end()) right_of.push_back(ir->second);
    }

    // component of the target in the cut graph
    std::vector<uint8_t> comp(dom.n_verts(), 0);
    std::vector<int> queue{target_vertex};
    comp[target_vertex] = 1;
    for (size_t qi = 0; qi < queue.size(); ++qi)
        for (int d = 0; d < 4; ++d) {
            int w = dom.nbr4[queue[qi]][d];
            if (w < 0 || comp[w] || cut.count(ekey(queue[qi], w))) continue;
            comp[w] = 1;
            queue.push_back(w);
        }

    SlitState st;
    std::vector<uint8_t> side(dom.n_verts(), 0);  // 1 = left of gamma, 2 = right
    for (int w : left_of)
        if (comp[w] && !side[w]) { side[w] = 1; st.c_plus.push_back(w); }
    for (int w : right_of)
        if (comp[w] && !side[w]) { side[w] = 2; st.c_minus.push_back(w); }
    for (int w : dom.bvert_ids)
        if (comp[w] && !side[w]) st.c_free.push_back(w);

    // extremal boundary contacts along the dual boundary cycle, unwrapped
    int nb = dom.n_boundary();
    auto pos = [&](int f) {
        for (int i = 0; i < nb; ++i)
            if (dom.step_dual_to[i] == f) return i;
        return -1;
    };
    int pu = pos(path.u);
    long o_prev = 0, omin = 0, omax = 0;
    int fl = path.u, fr = path.u;
    for (int j = 0; j <= n; ++j) {
        if (!dom.is_dual_boundary(g[j])) continue;
        int p = pos(g[j]);
        long o = (p - pu) % nb;
        // pick the representative closest to the previous contact
        while (o - o_prev > nb / 2) o -= nb;
        while (o_prev - o > nb / 2) o += nb;
        o_prev = o;
        if (o < omin) { omin = o; fl = g[j]; }
        if (o > omax) { omax = o; fr = g[j]; }
    }
    st.L = fl;
    st.R = fr;
    return st;
}

// Dual edges (oriented, as ordered face pairs) traversed by both paths in the
// same direction; forced for every exploration between the endpoints.
inline std::vector<std::pair<int, int>> shared_no_return_edges(const ExplorationPath& left,
                                                               const ExplorationPath& right) {
    std::unordered_set<std::uint64_t> a;
    for (size_t j = 0; j + 1 < left.vertices.size(); ++j)
        a.insert((std::uint64_t(left.vertices[j]) << 32) | std::uint64_t(left.vertices[j + 1]));
    std::vector<std::pair<int, int>> out;
    for (size_t j = 0; j + 1 < right.vertices.size(); ++j)
        if (a.count((std::uint64_t(right.vertices[j]) << 32) | std::uint64_t(right.vertices[j + 1])))
            out.emplace_back(right.vertices[j], right.vertices[j + 1]);
    return out;
}

// Largest gap between consecutive shared edges along the leftmost path,
// measured as the bounding-box diagonal of the intervening trace, in units of
// the domain diameter.
inline double max_hair_gap(const LatticeDomain& dom, const ExplorationPath& left,
                           const ExplorationPath& right) {
    std::unordered_set<std::uint64_t> shared;
    for (auto [a, b] : shared_no_return_edges(left, right))
        shared.insert((std::uint64_t(a) << 32) | std::uint64_t(b));

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& f : dom.faces) {
        xmin = std::min(xmin, double(f.x)); xmax = std::max(xmax, double(f.x));
        ymin = std::min(ymin, double(f.y)); ymax = std::max(ymax, double(f.y));
    }
    double diam = std::hypot(xmax - xmin, ymax - ymin);
    if (diam == 0) return 0;

    double worst = 0;
    double sxmin = 1e300, sxmax = -1e300, symin = 1e300, symax = -1e300;
    auto feed = [&](int f) {
        sxmin = std::min(sxmin, double(dom.faces[f].x));
        sxmax = std::max(sxmax, double(dom.faces[f].x));
        symin = std::min(symin, double(dom.faces[f].y));
        symax = std::max(symax, double(dom.faces[f].y));
    };
    feed(left.vertices[0]);
    for (size_t j = 0; j + 1 < left.vertices.size(); ++j) {
        feed(left.vertices[j + 1]);
        bool on_shared =
            shared.count((std::uint64_t(left.vertices[j]) << 32) | std::uint64_t(left.vertices[j + 1]));
        if (on_shared) {
            worst = std::max(worst, std::hypot(sxmax - sxmin, symax - symin));
            sxmin = symin = 1e300;
            sxmax = symax = -1e300;
            feed(left.vertices[j + 1]);
        }
    }
    worst = std::max(worst, std::hypot(std::max(sxmax - sxmin, 0.0), std::max(symax - symin, 0.0)));
    return worst / diam;
}

// Finite-anchor discrete arc ensemble: both canonical explorations for every
// ordered anchor pair.
struct ArcEnsembleEntry {
    int u, v;
    ExplorationPath leftmost, rightmost;
};

inline std::vector<ArcEnsembleEntry> discrete_arc_ensemble(const LatticeDomain& dom,
                                                           const SpinConfiguration& cfg,
                                                           const std::vector<int>& anchors) {
    if (anchors.size() < 2) throw Error("BadEndpoints", "need at least two anchors");
    std::vector<ArcEnsembleEntry> out;
    for (int u : anchors)
        for (int v : anchors) {
            if (u == v) continue;
            int d = dom.face_first_out_dir[u];
            if (d < 0) throw Error("NotBoundary", "anchor is not on the dual boundary");
            out.push_back({u, v, explore(dom, cfg, u, v, true, d),
                           explore(dom, cfg, u, v, false, d)});
        }
    return out;
}

inline void write_path_tsv(std::ostream& os, const LatticeDomain& dom,
                           const ExplorationPath& path) {
    os << "step\tx\ty\n";
    for (size_t j = 0; j < path.vertices.size(); ++j)
        os << j << '\t' << dom.fx(path.vertices[j]) << '\t' << dom.fy(path.vertices[j]) << '\n';
}

}  // namespace iselab
