#pragma once

#include <functional>
#include <vector>

#include "lattice.hpp"
#include "rng.hpp"

namespace iselab {

inline double beta_critical() { return 0.5 * std::log(1.0 + std::sqrt(2.0)); }

// Free everywhere, or spins fixed arc-wise on the boundary.
struct BoundaryCondition {
    std::vector<std::pair<int, int8_t>> fixed;  // (vertex id, sign)

    static BoundaryCondition free_bc() { return {}; }

    static BoundaryCondition fixed_arcs(
        const RectangleMarking& m,
        const std::vector<std::pair<RectangleMarking::Arc, int8_t>>& arcs) {
        BoundaryCondition bc;
        for (auto [arc, sign] : arcs)
            for (int v : m.arc_vertices_half_open(arc)) bc.fixed.emplace_back(v, sign);
        return bc;
    }
};

struct SpinConfiguration {
    std::vector<int8_t> s;   // one spin per domain vertex
    double beta = 0;
};

class IsingSampler {
public:
    IsingSampler(const LatticeDomain& dom, BoundaryCondition bc, double beta, Rng rng)
        : dom_(&dom), bc_(std::move(bc)), rng_(rng) {
        cfg_.beta = beta;
        cfg_.s.assign(dom.n_verts(), 1);
        fixed_.assign(dom.n_verts(), 0);
        for (auto [v, sign] : bc_.fixed) { fixed_[v] = 1; cfg_.s[v] = sign; }
        randomize();
        p_add_ = 1.0 - std::exp(-2.0 * beta);
        for (int k = 0; k <= 8; ++k) acc_[k] = std::min(1.0, std::exp(-2.0 * beta * (k - 4)));
        stack_.reserve(dom.n_verts());
        in_cluster_.assign(dom.n_verts(), 0);
    }

    const SpinConfiguration& config() const { return cfg_; }
    SpinConfiguration& config() { return cfg_; }
    const LatticeDomain& domain() const { return *dom_; }
    bool is_fixed(int v) const { return fixed_[v] != 0; }

    void randomize() {
        for (int v = 0; v < dom_->n_verts(); ++v)
            if (!fixed_[v]) cfg_.s[v] = rng_.coin() ? 1 : -1;
    }

    void metropolis_sweep() {
        for (int v = 0; v < dom_->n_verts(); ++v) {
            if (fixed_[v]) continue;
            int field = 0;
            for (int d = 0; d < 4; ++d) {
                int w = dom_->nbr4[v][d];
                if (w >= 0) field += cfg_.s[w];
            }
            // flip cost: dE = 2*s*field, accept with exp(-beta*dE)
            int k = cfg_.s[v] * field + 4;
            if (rng_.uniform() < acc_[k]) cfg_.s[v] = -cfg_.s[v];
        }
    }

    // One Wolff cluster; clusters containing a fixed vertex are left unflipped.
    // Returns the cluster size.
    int wolff_step() {
        int root = int(rng_.below(std::uint64_t(dom_->n_verts())));
        stack_.clear();
        cluster_.clear();
        bool touches_fixed = fixed_[root] != 0;
        int8_t sign = cfg_.s[root];
        in_cluster_[root] = 1;
        cluster_.push_back(root);
        stack_.push_back(root);
        while (!stack_.empty()) {
            int v = stack_.back();
            stack_.pop_back();
            for (int d = 0; d < 4; ++d) {
                int w = dom_->nbr4[v][d];
                if (w < 0 || in_cluster_[w] || cfg_.s[w] != sign) continue;
                if (rng_.uniform() >= p_add_) continue;
                in_cluster_[w] = 1;
                cluster_.push_back(w);
                stack_.push_back(w);
                if (fixed_[w]) touches_fixed = true;
            }
        }
        if (!touches_fixed)
            for (int v : cluster_) cfg_.s[v] = -sign;
        for (int v : cluster_) in_cluster_[v] = 0;
        return int(cluster_.size());
    }

    // Thermalize and return a (reference to the) sampled configuration.
    // Default length: 10*sqrt(n) Wolff steps, one Metropolis sweep each.
    const SpinConfiguration& sample(int n_thermalize = -1) {
        if (n_thermalize < 0)
            n_thermalize = std::max(1, int(10.0 * std::sqrt(double(dom_->n_verts()))));
        randomize();
        for (int i = 0; i < n_thermalize; ++i) {
            wolff_step();
            metropolis_sweep();
        }
        return cfg_;
    }

    // Decorrelation between successive measurements of one chain.
    void decorrelate(int n_wolff = 3, int n_sweeps = 1) {
        for (int i = 0; i < n_wolff; ++i) wolff_step();
        for (int i = 0; i < n_sweeps; ++i) metropolis_sweep();
    }

private:
    const LatticeDomain* dom_;
    BoundaryCondition bc_;
    Rng rng_;
    SpinConfiguration cfg_;
    std::vector<int8_t> fixed_;
    double p_add_ = 0;
    double acc_[9] = {};
    std::vector<int> stack_, cluster_;
    std::vector<int8_t> in_cluster_;
};

// Exact Gibbs probability of an event by Gray-code enumeration over free spins.
inline double enumerate_exact(const LatticeDomain& dom, const BoundaryCondition& bc, double beta,
                              const std::function<bool(const SpinConfiguration&)>& event,
                              int max_free = 25) {
    SpinConfiguration cfg;
    cfg.beta = beta;
    cfg.s.assign(dom.n_verts(), 1);
    std::vector<int8_t> fixed(dom.n_verts(), 0);
    for (auto [v, sign] : bc.fixed) { fixed[v] = 1; cfg.s[v] = sign; }
    std::vector<int> free_sites;
    for (int v = 0; v < dom.n_verts(); ++v)
        if (!fixed[v]) free_sites.push_back(v);
    int k = int(free_sites.size());
    if (k > max_free) throw Error("TooLarge", "too many free spins to enumerate");

    auto energy = [&]() {
        long e = 0;
        for (int v = 0; v < dom.n_verts(); ++v)
            for (int d : {East, North}) {
                int w = dom.nbr4[v][d];
                if (w >= 0) e += cfg.s[v] * cfg.s[w];
            }
        return e;
    };

    long e = energy();
    long double z = 0, zev = 0;
    const std::uint64_t total = 1ULL << k;
    for (std::uint64_t g = 0;; ++g) {
        long double w = std::exp((long double)(beta) * e);
        z += w;
        if (event(cfg)) zev += w;
        if (g + 1 == total) break;
        // Gray code: flip the spin at the lowest set bit of g+1
        int bit = __builtin_ctzll(g + 1);
        int v = free_sites[bit];
        int field = 0;
        for (int d = 0; d < 4; ++d) {
            int u = dom.nbr4[v][d];
            if (u >= 0) field += cfg.s[u];
        }
        e -= 2 * cfg.s[v] * field;
        cfg.s[v] = -cfg.s[v];
    }
    return double(zev / z);
}

}  // namespace iselab
