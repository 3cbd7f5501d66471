#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "geometry.hpp"

namespace iselab {

// Directions on the lattice and on the dual lattice.
enum Dir : int { East = 0, North = 1, West = 2, South = 3 };
inline constexpr int DX[4] = {1, 0, -1, 0};
inline constexpr int DY[4] = {0, 1, 0, -1};
inline int turn_left(int d) { return (d + 1) & 3; }
inline int turn_right(int d) { return (d + 3) & 3; }
inline int reverse(int d) { return (d + 2) & 3; }

// A dual move from face f in direction d crosses one primal edge; these give
// its endpoints to the left and to the right of the oriented move (y up).
// Faces are identified by their lower-left lattice corner.
inline Vec2i crossed_left(Vec2i f, int d) {
    switch (d) {
        case East: return {f.x + 1, f.y + 1};
        case North: return {f.x, f.y + 1};
        case West: return {f.x, f.y};
        default: return {f.x + 1, f.y};
    }
}
inline Vec2i crossed_right(Vec2i f, int d) {
    switch (d) {
        case East: return {f.x + 1, f.y};
        case North: return {f.x + 1, f.y + 1};
        case West: return {f.x, f.y + 1};
        default: return {f.x, f.y};
    }
}

// One step of the clockwise boundary walk: a boundary primal edge
// (inside vertex, outside point) together with the dual edge crossing it.
struct BoundaryStep {
    int inside = -1;      // vertex id
    Vec2i outside{};      // lattice point, not in the domain
    Vec2i dual_from{}, dual_to{};
    int dir = 0;          // direction of the dual move, inside on its right
};

// Discretization of a polygonal Jordan domain at mesh delta: the connected
// component of the interior lattice points containing the marked point,
// with its clockwise boundary cycle and the dual graph.
class LatticeDomain {
public:
    Rat delta;
    double delta_d = 0;
    Polygon polygon;
    RatPt interior{};

    std::vector<Vec2i> verts;
    std::unordered_map<Vec2i, int, Vec2iHash> vindex;
    std::vector<std::array<int, 4>> nbr4;   // vertex id or -1
    std::vector<std::array<int, 8>> nbr8;
    int n_edges = 0;                        // interior primal edges

    std::vector<Vec2i> faces;               // dual vertices
    std::unordered_map<Vec2i, int, Vec2iHash> findex;
    std::vector<std::array<int, 4>> dual_nbr;  // face id or -1

    std::vector<BoundaryStep> boundary;     // clockwise cycle
    std::vector<int> bvert_ids;             // distinct boundary vertices, first-occurrence order
    std::vector<int> bvert_first_step;      // first walk index of each boundary vertex
    std::unordered_map<int, int> vert_to_bvert;      // vertex id -> index in bvert_ids
    std::vector<int> step_dual_to;          // face id of boundary[i].dual_to
    std::vector<int> step_pivot;            // reflex-corner vertex passed after step i, or -1
    std::vector<int> face_first_in_dir;     // per face: walk arrival dir, -1 if not on dual boundary
    std::vector<int> face_first_out_dir;    // per face: walk departure dir, -1 if not on dual boundary

    int n_verts() const { return int(verts.size()); }
    int n_faces() const { return int(faces.size()); }
    int n_boundary() const { return int(boundary.size()); }

    bool has_vertex(Vec2i p) const { return vindex.count(p) != 0; }

    double px(int v) const { return verts[v].x * delta_d; }
    double py(int v) const { return verts[v].y * delta_d; }
    double fx(int f) const { return (faces[f].x + 0.5) * delta_d; }
    double fy(int f) const { return (faces[f].y + 0.5) * delta_d; }

    bool dual_edge_exists(int f, int d) const {
        Vec2i a = crossed_left(faces[f], d), b = crossed_right(faces[f], d);
        return has_vertex(a) || has_vertex(b);
    }

    bool is_dual_boundary(int f) const { return face_first_in_dir[f] >= 0; }
};

inline LatticeDomain discretize(const Polygon& poly, const Rat& delta, const RatPt& interior) {
    if (poly.locate(interior) != Polygon::Where::Inside)
        throw Error("NotInside", "interior point is not strictly inside the polygon");

    LatticeDomain dom;
    dom.delta = delta;
    dom.delta_d = to_double(delta);
    dom.polygon = poly;
    dom.interior = interior;

    std::unordered_map<Vec2i, int8_t, Vec2iHash> inside_cache;
    auto inside = [&](Vec2i p) -> bool {
        auto it = inside_cache.find(p);
        if (it != inside_cache.end()) return it->second != 0;
        bool in = poly.contains({p.x * delta, p.y * delta});
        inside_cache.emplace(p, in ? 1 : 0);
        return in;
    };

    // bounding box in lattice units
    Rat xmin = poly.pts[0].x, xmax = xmin, ymin = poly.pts[0].y, ymax = ymin;
    for (const auto& p : poly.pts) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    int ix0 = int(std::floor(to_double(xmin / delta))) - 1;
    int ix1 = int(std::ceil(to_double(xmax / delta))) + 1;
    int iy0 = int(std::floor(to_double(ymin / delta))) - 1;
    int iy1 = int(std::ceil(to_double(ymax / delta))) + 1;

    // seed: inside lattice point nearest to the marked interior point
    double cx = to_double(interior.x / delta), cy = to_double(interior.y / delta);
    std::optional<Vec2i> seed;
    int max_r = std::max(ix1 - ix0, iy1 - iy0) + 2;
    for (int r = 0; r <= max_r && !seed; ++r) {
        double best = 0;
        for (int x = int(std::floor(cx)) - r; x <= int(std::ceil(cx)) + r; ++x)
            for (int y = int(std::floor(cy)) - r; y <= int(std::ceil(cy)) + r; ++y) {
                Vec2i p{x, y};
                if (!inside(p)) continue;
                double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                if (!seed || d2 < best || (d2 == best && p < *seed)) { seed = p; best = d2; }
            }
    }
    if (!seed) throw Error("EmptyDomain", "no lattice point inside the domain");

    // flood fill the component (4-adjacency)
    std::unordered_set<Vec2i, Vec2iHash> comp;
    std::vector<Vec2i> stack{*seed};
    comp.insert(*seed);
    while (!stack.empty()) {
        Vec2i p = stack.back();
        stack.pop_back();
        for (int d = 0; d < 4; ++d) {
            Vec2i q{p.x + DX[d], p.y + DY[d]};
            if (q.x < ix0 || q.x > ix1 || q.y < iy0 || q.y > iy1) continue;
            if (comp.count(q) || !inside(q)) continue;
            comp.insert(q);
            stack.push_back(q);
        }
    }

    dom.verts.assign(comp.begin(), comp.end());
    std::sort(dom.verts.begin(), dom.verts.end());
    for (int i = 0; i < int(dom.verts.size()); ++i) dom.vindex[dom.verts[i]] = i;

    const int n = dom.n_verts();
    dom.nbr4.assign(n, {-1, -1, -1, -1});
    dom.nbr8.assign(n, {-1, -1, -1, -1, -1, -1, -1, -1});
    static constexpr int DX8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int DY8[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < 4; ++d) {
            auto it = dom.vindex.find({dom.verts[i].x + DX[d], dom.verts[i].y + DY[d]});
            if (it != dom.vindex.end()) {
                dom.nbr4[i][d] = it->second;
                if (d < 2) ++dom.n_edges;
            }
        }
        for (int d = 0; d < 8; ++d) {
            auto it = dom.vindex.find({dom.verts[i].x + DX8[d], dom.verts[i].y + DY8[d]});
            if (it != dom.vindex.end()) dom.nbr8[i][d] = it->second;
        }
    }

    // dual vertices: faces with at least one corner in the domain
    {
        std::unordered_set<Vec2i, Vec2iHash> fset;
        for (const auto& v : dom.verts)
            for (int dx = -1; dx <= 0; ++dx)
                for (int dy = -1; dy <= 0; ++dy) fset.insert({v.x + dx, v.y + dy});
        dom.faces.assign(fset.begin(), fset.end());
        std::sort(dom.faces.begin(), dom.faces.end());
        for (int i = 0; i < int(dom.faces.size()); ++i) dom.findex[dom.faces[i]] = i;
    }
    dom.dual_nbr.assign(dom.n_faces(), {-1, -1, -1, -1});
    for (int f = 0; f < dom.n_faces(); ++f)
        for (int d = 0; d < 4; ++d) {
            if (!dom.dual_edge_exists(f, d)) continue;
            auto it = dom.findex.find({dom.faces[f].x + DX[d], dom.faces[f].y + DY[d]});
            if (it != dom.findex.end()) dom.dual_nbr[f][d] = it->second;
        }

    // clockwise boundary walk, inside on the right of travel
    {
        // start at the topmost (then leftmost) vertex, crossing its north edge eastwards
        Vec2i top = dom.verts[0];
        for (const auto& v : dom.verts)
            if (v.y > top.y || (v.y == top.y && v.x < top.x)) top = v;
        Vec2i f0{top.x - 1, top.y};
        int d0 = East;
        auto valid = [&](Vec2i f, int d) {
            return dom.has_vertex(crossed_right(f, d)) && !dom.has_vertex(crossed_left(f, d));
        };
        Vec2i f = f0;
        int d = d0;
        do {
            BoundaryStep st;
            st.dual_from = f;
            st.dual_to = {f.x + DX[d], f.y + DY[d]};
            st.dir = d;
            st.inside = dom.vindex.at(crossed_right(f, d));
            st.outside = crossed_left(f, d);
            dom.boundary.push_back(st);
            // advance: at the new face try right, straight, left
            f = st.dual_to;
            int nd = -1;
            for (int cand : {turn_right(d), d, turn_left(d)})
                if (valid(f, cand)) { nd = cand; break; }
            if (nd < 0) throw Error("Internal", "boundary walk stuck");
            d = nd;
        } while (!(f == f0 && d == d0));
    }

    dom.step_dual_to.resize(dom.n_boundary());
    dom.step_pivot.assign(dom.n_boundary(), -1);
    dom.face_first_in_dir.assign(dom.n_faces(), -1);
    dom.face_first_out_dir.assign(dom.n_faces(), -1);
    for (int i = 0; i < dom.n_boundary(); ++i) {
        const auto& st = dom.boundary[i];
        int fid = dom.findex.at(st.dual_to);
        int fid0 = dom.findex.at(st.dual_from);
        dom.step_dual_to[i] = fid;
        if (dom.face_first_in_dir[fid] < 0) dom.face_first_in_dir[fid] = st.dir;
        if (dom.face_first_out_dir[fid0] < 0) dom.face_first_out_dir[fid0] = st.dir;
        if (!dom.vert_to_bvert.count(st.inside)) {
            dom.vert_to_bvert[st.inside] = int(dom.bvert_ids.size());
            dom.bvert_ids.push_back(st.inside);
            dom.bvert_first_step.push_back(i);
        }
        // A left turn passes a reflex-corner vertex (the face corner diagonal
        // to the shared outside point) that no crossed edge touches; record it
        // so the boundary vertex cycle stays complete.
        const auto& nx = dom.boundary[(i + 1) % dom.n_boundary()];
        if (nx.dir == turn_left(st.dir)) {
            Vec2i piv{2 * st.dual_to.x + 1 - st.outside.x, 2 * st.dual_to.y + 1 - st.outside.y};
            auto it = dom.vindex.find(piv);
            if (it != dom.vindex.end()) dom.step_pivot[i] = it->second;
        }
    }
    return dom;
}

// Four marked boundary points in clockwise order; splits the boundary cycle
// into the arcs [ab], [bc], [cd], [da].
class RectangleMarking {
public:
    enum Arc { AB = 0, BC = 1, CD = 2, DA = 3 };

    const LatticeDomain* dom = nullptr;
    std::array<int, 4> marked_vertex{};   // vertex ids of a_delta..d_delta
    std::array<int, 4> split_step{};      // first boundary-step index of each marked vertex

    // Edge range of an arc: steps [split(arc), split(arc+1)) cyclically.
    int arc_begin(Arc a) const { return split_step[a]; }
    int arc_end(Arc a) const { return split_step[(a + 1) & 3]; }

    int arc_edge_count(Arc a) const {
        int nb = dom->n_boundary();
        return (arc_end(a) - arc_begin(a) + nb) % nb;
    }

    Arc edge_arc(int step) const {
        int nb = dom->n_boundary();
        for (int a = 0; a < 4; ++a) {
            int b = split_step[a], len = arc_edge_count(Arc(a));
            if ((step - b + nb) % nb < len) return Arc(a);
        }
        return DA;  // unreachable
    }

    // Closed arc as a vertex set: from x_delta to y_delta inclusive. Reflex
    // pivot vertices touch the arc only across a corner, a contact visible to
    // star connectivity but not to 4-connectivity; callers deciding plus
    // crossings pass with_pivots = false.
    std::vector<int> arc_vertices_closed(Arc a, bool with_pivots = true) const {
        return arc_vertices(a, /*include_last=*/true, with_pivots);
    }
    // Half-open: includes x_delta, excludes y_delta (disjoint across arcs).
    std::vector<int> arc_vertices_half_open(Arc a) const {
        return arc_vertices(a, /*include_last=*/false, /*with_pivots=*/true);
    }

private:
    std::vector<int> arc_vertices(Arc a, bool include_last, bool with_pivots) const {
        int nb = dom->n_boundary();
        int len = arc_edge_count(a);
        std::vector<int> out;
        std::unordered_set<int> seen;
        int last = include_last ? len : len - 1;
        for (int k = 0; k <= last; ++k) {
            int s = (arc_begin(a) + k) % nb;
            int v = dom->boundary[s].inside;
            if (!(!include_last && v == marked_vertex[(a + 1) & 3]) && seen.insert(v).second)
                out.push_back(v);
            // reflex-corner vertices between step s and s+1 sit strictly
            // before the closing mark, so they belong to this arc either way
            int piv = with_pivots && k < len ? dom->step_pivot[s] : -1;
            if (piv >= 0 && seen.insert(piv).second) out.push_back(piv);
        }
        return out;
    }
};

inline RectangleMarking mark_rectangle(const LatticeDomain& dom, const RatPt& a, const RatPt& b,
                                       const RatPt& c, const RatPt& d) {
    RectangleMarking m;
    m.dom = &dom;
    const std::array<RatPt, 4> marks{a, b, c, d};
    for (int i = 0; i < 4; ++i) {
        // nearest boundary vertex (exact squared distance), ties broken by
        // smallest first-occurrence index along the boundary cycle
        int best = -1;
        Rat bestd2;
        for (int k = 0; k < int(dom.bvert_ids.size()); ++k) {
            int v = dom.bvert_ids[k];
            Rat dx = dom.verts[v].x * dom.delta - marks[i].x;
            Rat dy = dom.verts[v].y * dom.delta - marks[i].y;
            Rat d2 = dx * dx + dy * dy;
            if (best < 0 || d2 < bestd2) { best = k; bestd2 = d2; }
        }
        m.marked_vertex[i] = dom.bvert_ids[best];
        m.split_step[i] = dom.bvert_first_step[best];
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (m.marked_vertex[i] == m.marked_vertex[j])
                throw Error("DegenerateArc", "two marked points map to the same boundary vertex");
    // clockwise order along the cycle: offsets from a strictly increasing
    int nb = dom.n_boundary();
    int o1 = (m.split_step[1] - m.split_step[0] + nb) % nb;
    int o2 = (m.split_step[2] - m.split_step[0] + nb) % nb;
    int o3 = (m.split_step[3] - m.split_step[0] + nb) % nb;
    if (!(0 < o1 && o1 < o2 && o2 < o3))
        throw Error("OrderViolation", "marked points are not in clockwise order");

    return m;
}

// Dual boundary vertex immediately clockwise of a marked vertex: the end face
// of the last boundary step in that vertex's run.
inline int dual_start_vertex(const RectangleMarking& m, RectangleMarking::Arc corner) {
    const LatticeDomain& dom = *m.dom;
    int nb = dom.n_boundary();
    int i = m.split_step[corner];
    int v = m.marked_vertex[corner];
    while (dom.boundary[(i + 1) % nb].inside == v) i = (i + 1) % nb;
    return dom.step_dual_to[i];
}

// A dual boundary vertex on arc [bc], at the given fraction of the arc;
// used as the explorer's target.
inline int observation_dual_vertex(const RectangleMarking& m, double frac = 0.5) {
    const LatticeDomain& dom = *m.dom;
    int nb = dom.n_boundary();
    int len = m.arc_edge_count(RectangleMarking::BC);
    int k = std::min(len - 1, std::max(0, int(frac * len)));
    return dom.step_dual_to[(m.arc_begin(RectangleMarking::BC) + k) % nb];
}

}  // namespace iselab
