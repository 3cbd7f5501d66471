#pragma once

#include <cmath>

#include "lattice.hpp"

namespace iselab {

// Discrete extremal length of ([ab],[cd]) via the Dirichlet-energy dual:
// harmonic potential 0 on [ab], 1 on [cd], natural (zero-flux) condition on
// the free arcs, modulus = 1/energy. Edges are weighted by the number of
// adjacent lattice faces inside the domain over two, which makes an LxW
// rectangle marked on the two W-sides come out exactly L/W.
inline double discrete_modulus(const LatticeDomain& dom, const RectangleMarking& m,
                               double tol = 1e-10, int max_iter = 50000) {
    const int n = dom.n_verts();
    std::vector<int8_t> fixed(n, -1);
    for (int v : m.arc_vertices_closed(RectangleMarking::AB, false)) fixed[v] = 0;
    for (int v : m.arc_vertices_closed(RectangleMarking::CD, false)) fixed[v] = 1;

    auto face_inside = [&](Vec2i f) {
        return dom.has_vertex(f) && dom.has_vertex({f.x + 1, f.y}) &&
               dom.has_vertex({f.x, f.y + 1}) && dom.has_vertex({f.x + 1, f.y + 1});
    };
    // weight of the edge from v in direction d (East or North)
    auto edge_weight = [&](int v, int d) {
        Vec2i p = dom.verts[v];
        int cnt = 0;
        if (d == East) {
            cnt = face_inside({p.x, p.y}) + face_inside({p.x, p.y - 1});
        } else {
            cnt = face_inside({p.x, p.y}) + face_inside({p.x - 1, p.y});
        }
        return cnt ? 0.5 * cnt : 0.5;
    };

    struct Edge {
        int a, b;
        double w;
    };
    std::vector<Edge> edges;
    for (int v = 0; v < n; ++v)
        for (int d : {East, North})
            if (dom.nbr4[v][d] >= 0) edges.push_back({v, dom.nbr4[v][d], edge_weight(v, d)});

    // conjugate gradient on the free vertices, Jacobi preconditioner
    std::vector<double> u(n, 0), diag(n, 0), b(n, 0);
    for (int v = 0; v < n; ++v)
        if (fixed[v] >= 0) u[v] = fixed[v];
    for (const auto& e : edges) {
        diag[e.a] += e.w;
        diag[e.b] += e.w;
        if (fixed[e.a] < 0 && fixed[e.b] >= 0) b[e.a] += e.w * u[e.b];
        if (fixed[e.b] < 0 && fixed[e.a] >= 0) b[e.b] += e.w * u[e.a];
    }
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        std::fill(y.begin(), y.end(), 0.0);
        for (const auto& e : edges) {
            if (fixed[e.a] < 0) y[e.a] += e.w * x[e.a];
            if (fixed[e.b] < 0) y[e.b] += e.w * x[e.b];
            if (fixed[e.a] < 0 && fixed[e.b] < 0) {
                y[e.a] -= e.w * x[e.b];
                y[e.b] -= e.w * x[e.a];
            }
        }
    };
    std::vector<double> x(n, 0), r(n, 0), z(n, 0), p(n, 0), ap(n, 0);
    apply(x, ap);
    double bnorm = 0;
    for (int v = 0; v < n; ++v)
        if (fixed[v] < 0) {
            r[v] = b[v] - ap[v];
            bnorm += b[v] * b[v];
        }
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0) bnorm = 1;
    double rz = 0;
    for (int v = 0; v < n; ++v)
        if (fixed[v] < 0 && diag[v] > 0) {
            z[v] = r[v] / diag[v];
            rz += r[v] * z[v];
        }
    p = z;
    int it = 0;
    for (; it < max_iter; ++it) {
        double rnorm = 0;
        for (int v = 0; v < n; ++v)
            if (fixed[v] < 0) rnorm += r[v] * r[v];
        if (std::sqrt(rnorm) <= tol * bnorm) break;
        apply(p, ap);
        double pap = 0;
        for (int v = 0; v < n; ++v)
            if (fixed[v] < 0) pap += p[v] * ap[v];
        if (pap <= 0) break;
        double alpha = rz / pap;
        for (int v = 0; v < n; ++v)
            if (fixed[v] < 0) {
                x[v] += alpha * p[v];
                r[v] -= alpha * ap[v];
            }
        double rz_new = 0;
        for (int v = 0; v < n; ++v)
            if (fixed[v] < 0 && diag[v] > 0) {
                z[v] = r[v] / diag[v];
                rz_new += r[v] * z[v];
            }
        for (int v = 0; v < n; ++v)
            if (fixed[v] < 0) p[v] = z[v] + (rz_new / rz) * p[v];
        rz = rz_new;
    }
    if (it >= max_iter) throw Error("NoConvergence", "modulus CG did not converge");
    for (int v = 0; v < n; ++v)
        if (fixed[v] < 0) u[v] = x[v];
    double energy = 0;
    for (const auto& e : edges) {
        double du = u[e.a] - u[e.b];
        energy += e.w * du * du;
    }
    if (energy <= 0) throw Error("NoConvergence", "degenerate Dirichlet energy");
    return 1.0 / energy;
}

// Complete elliptic integral of the first kind by the arithmetic-geometric
// mean: K(k) = pi / (2 agm(1, sqrt(1-k^2))).
inline double elliptic_K(double k) {
    double a = 1.0, b = std::sqrt(1.0 - k * k);
    for (int i = 0; i < 60 && std::fabs(a - b) > 1e-16 * a; ++i) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return M_PI / (2.0 * a);
}

// Solve K(k') / (2 K(k)) = m by bisection; the half-plane images of a
// modulus-m rectangle's corners are (-1/k, -1, 1, 1/k).
struct HalfPlanePoints {
    double x1, x2, x3, x4;
};

inline double modulus_to_k(double m) {
    double lo = 1e-15, hi = 1.0 - 1e-15;
    for (int i = 0; i < 200; ++i) {
        double k = 0.5 * (lo + hi);
        double kp = std::sqrt(1.0 - k * k);
        double f = elliptic_K(kp) / (2.0 * elliptic_K(k));
        (f > m ? lo : hi) = k;  // f decreasing in k
    }
    return 0.5 * (lo + hi);
}

inline HalfPlanePoints modulus_to_halfplane(double m) {
    double k = modulus_to_k(m);
    return {-1.0 / k, -1.0, 1.0, 1.0 / k};
}

// Corner images in counterclockwise marking order for a quadrilateral whose
// extremal distance [ab]->[cd] is m: a=-1, b=1, c=1/k, d=-1/k, so that
// [ab]=(-1,1) and [cd] is the outer pair of rays through infinity.
struct QuadMarks {
    double a, b, c, d;
};

inline QuadMarks halfplane_marks(double m) {
    double k = modulus_to_k(m);
    return {-1.0, 1.0, 1.0 / k, -1.0 / k};
}

// Moebius map of the half plane sending the start a to 0 and an interior
// point v of arc [bc] to infinity, normalized so b maps to 1. Returns the
// images in the arrangement x_c < x_d < 0 < x_b = 1 used by
// cde_hitting_probability.
struct CdePoints {
    double x_b, x_c, x_d;
};

inline CdePoints moebius_normalize(const QuadMarks& q, double v) {
    auto T = [&](double x) { return ((q.b - v) / (q.b - q.a)) * (x - q.a) / (x - v); };
    CdePoints r{T(q.b), T(q.c), T(q.d)};
    if (!(r.x_c < r.x_d && r.x_d < 0 && r.x_b > 0))
        throw Error("BadArrangement", "moebius_normalize: v not interior to [bc]");
    return r;
}

inline double cross_ratio(double x1, double x2, double x3, double x4) {
    return ((x1 - x3) * (x2 - x4)) / ((x1 - x4) * (x2 - x3));
}

}  // namespace iselab
