#pragma once

#include "ising.hpp"

namespace iselab {

// Crossing decisions between opposite marked arcs. Arc vertex sets are
// closed (both marked endpoints included); the exhaustive duality test in
// the suite locks this convention.
//
// Union-find with a reusable buffer; reset cost is one pass per call.
class CrossingTester {
public:
    explicit CrossingTester(const RectangleMarking& m) : m_(&m), dom_(m.dom) {
        parent_.resize(dom_->n_verts());
        // star crossings see reflex pivot vertices as arc members, plus
        // crossings do not; this is what makes the dual pairs exact complements
        src_ab_[0] = vertex_mask(m.arc_vertices_closed(RectangleMarking::AB, false));
        dst_cd_[0] = vertex_mask(m.arc_vertices_closed(RectangleMarking::CD, false));
        src_bc_[0] = vertex_mask(m.arc_vertices_closed(RectangleMarking::BC, false));
        dst_da_[0] = vertex_mask(m.arc_vertices_closed(RectangleMarking::DA, false));
        src_ab_[1] = vertex_mask(m.arc_vertices_closed(RectangleMarking::AB, true));
        dst_cd_[1] = vertex_mask(m.arc_vertices_closed(RectangleMarking::CD, true));
        src_bc_[1] = vertex_mask(m.arc_vertices_closed(RectangleMarking::BC, true));
        dst_da_[1] = vertex_mask(m.arc_vertices_closed(RectangleMarking::DA, true));
    }

    // + path from [ab] to [cd] under 4-adjacency
    bool plus_crossing(const SpinConfiguration& cfg) {
        return crossing(cfg.s, 1, src_ab_[0], dst_cd_[0], false);
    }
    // + path from [ab] to [cd] under 8-adjacency
    bool star_crossing(const SpinConfiguration& cfg) {
        return crossing(cfg.s, 1, src_ab_[1], dst_cd_[1], true);
    }
    // - star path from [bc] to [da] (the dual event of plus_crossing)
    bool minus_star_crossing(const SpinConfiguration& cfg) {
        return crossing(cfg.s, -1, src_bc_[1], dst_da_[1], true);
    }
    // - 4-path from [bc] to [da] (the dual event of star_crossing)
    bool minus_plus_crossing(const SpinConfiguration& cfg) {
        return crossing(cfg.s, -1, src_bc_[0], dst_da_[0], false);
    }

private:
    std::vector<uint8_t> vertex_mask(const std::vector<int>& vs) {
        std::vector<uint8_t> mask(dom_->n_verts(), 0);
        for (int v : vs) mask[v] = 1;
        return mask;
    }

    int find(int v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    bool crossing(const std::vector<int8_t>& s, int8_t sign, const std::vector<uint8_t>& src,
                  const std::vector<uint8_t>& dst, bool star) {
        const int n = dom_->n_verts();
        for (int v = 0; v < n; ++v) parent_[v] = v;
        for (int v = 0; v < n; ++v) {
            if (s[v] != sign) continue;
            int deg = star ? 8 : 4;
            for (int d = 0; d < deg; ++d) {
                int w = star ? dom_->nbr8[v][d] : dom_->nbr4[v][d];
                if (w > v && s[w] == sign) parent_[find(w)] = find(v);
            }
        }
        // any source root that is also a destination root
        roots_.assign(n, 0);
        for (int v = 0; v < n; ++v)
            if (src[v] && s[v] == sign) roots_[find(v)] |= 1;
        for (int v = 0; v < n; ++v)
            if (dst[v] && s[v] == sign && (roots_[find(v)] & 1)) return true;
        return false;
    }

    const RectangleMarking* m_;
    const LatticeDomain* dom_;
    std::vector<int> parent_;
    std::vector<uint8_t> roots_;
    std::vector<uint8_t> src_ab_[2], dst_cd_[2], src_bc_[2], dst_da_[2];
};

}  // namespace iselab
