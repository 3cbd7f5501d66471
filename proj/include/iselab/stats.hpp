#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace iselab {

// 95% Wilson score interval.
inline std::pair<double, double> wilson_interval(long successes, long total) {
    if (total <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    double n = double(total), p = double(successes) / n, z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = (z / denom) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Monte Carlo estimate of an event probability. Undecided runs are excluded
// from p_hat but counted; warning set when they exceed 1%.
struct Estimate {
    long successes = 0;
    long undecided = 0;
    long total = 0;
    double p_hat = 0, ci_lo = 0, ci_hi = 1;
    std::uint64_t seed = 0;
    double wall_time = 0;
    bool warning = false;

    long decided() const { return total - undecided; }

    void finalize() {
        long dec = decided();
        p_hat = dec > 0 ? double(successes) / double(dec) : 0.0;
        std::tie(ci_lo, ci_hi) = wilson_interval(successes, dec);
        warning = total > 0 && double(undecided) > 0.01 * double(total);
    }
};

inline Estimate merge(const Estimate& a, const Estimate& b) {
    Estimate e;
    e.successes = a.successes + b.successes;
    e.undecided = a.undecided + b.undecided;
    e.total = a.total + b.total;
    e.seed = a.seed;
    e.wall_time = a.wall_time + b.wall_time;
    e.finalize();
    return e;
}

// Two-proportion z statistic (pooled), pass at 3 sigma.
struct CompareReport {
    double z = 0;
    bool pass = true;
};

inline CompareReport compare(const Estimate& a, const Estimate& b) {
    CompareReport r;
    long na = a.decided(), nb = b.decided();
    if (na == 0 || nb == 0) return r;
    double pa = a.p_hat, pb = b.p_hat;
    double pool = double(a.successes + b.successes) / double(na + nb);
    double se = std::sqrt(pool * (1 - pool) * (1.0 / na + 1.0 / nb));
    r.z = se > 0 ? (pa - pb) / se : 0.0;
    r.pass = std::fabs(r.z) < 3.0;
    return r;
}

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
struct KsReport {
    double d = 0;
    double p_value = 1;
};

inline double ks_pvalue(double d, double n_eff) {
    double lam = (std::sqrt(n_eff) + 0.12 + 0.11 / std::sqrt(n_eff)) * d;
    if (lam < 1e-3) return 1.0;  // alternating series cycles at lam ~ 0
    double sum = 0;
    for (int j = 1; j <= 100; ++j) {
        double term = 2.0 * ((j & 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
        sum += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

inline KsReport ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    KsReport r;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        double fa = double(i) / a.size(), fb = double(j) / b.size();
        r.d = std::max(r.d, std::fabs(fa - fb));
    }
    double n_eff = double(a.size()) * b.size() / double(a.size() + b.size());
    r.p_value = ks_pvalue(r.d, n_eff);
    return r;
}

}  // namespace iselab
