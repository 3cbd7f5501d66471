#pragma once

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "connect.hpp"
#include "explorer.hpp"
#include "stats.hpp"

namespace iselab {

struct DomainSpec {
    std::string name;
    Polygon poly;
    Rat delta{1, 16};
    RatPt interior;
    RatPt marks[4];  // a, b, c, d clockwise
};

namespace detail {

inline Rat json_rat(const nlohmann::json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    return rat_from_double(j.get<double>());
}

inline RatPt json_pt(const nlohmann::json& j) { return {json_rat(j.at(0)), json_rat(j.at(1))}; }

}  // namespace detail

// {"polygon": [[x,y],...] ccw, "delta": "1/16", "interior": [x,y],
//  "marks": {"a": [x,y], "b": ..., "c": ..., "d": ...}};
// coordinates are numbers or exact "p/q" strings.
inline DomainSpec load_domain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("BadDomainFile", path + ": " + e.what());
    }
    try {
        DomainSpec d;
        d.name = j.value("name", path);
        for (const auto& p : j.at("polygon")) d.poly.pts.push_back(detail::json_pt(p));
        if (j.contains("delta")) d.delta = detail::json_rat(j.at("delta"));
        d.interior = detail::json_pt(j.at("interior"));
        const auto& m = j.at("marks");
        d.marks[0] = detail::json_pt(m.at("a"));
        d.marks[1] = detail::json_pt(m.at("b"));
        d.marks[2] = detail::json_pt(m.at("c"));
        d.marks[3] = detail::json_pt(m.at("d"));
        return d;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("BadDomainFile", path + ": " + e.what());
    }
}

struct ExperimentSpec {
    std::string experiment_id = "run";
    std::string kind;  // lattice-crossing | lattice-explorer-hit | sle-hit | modulus | validation
    std::string domain_file;
    std::vector<Rat> deltas;
    std::string boundary = "free";  // free | mixed (- on [bc] and [da])
    long n_samples = 10000;
    std::uint64_t seed = 1;
    double beta = beta_critical();
    double dt = 2e-4;
    double obs_frac = 0.5;
    int workers = 1;
    int decorrelate_wolff = 3;
};

// One CSV row of the results table.
struct Record {
    std::string experiment_id, kind, domain, delta, marking, event;
    int N = 0;
    Estimate est;
    double dt = -1;  // <0: not an SLE run
};

inline std::string csv_header() {
    return "experiment_id,kind,domain,delta,N,marking,event,n_total,n_undecided,p_hat,ci_lo,"
           "ci_hi,seed,dt,wall_time_s";
}

inline std::string csv_row(const Record& r) {
    std::ostringstream os;
    os.precision(10);
    os << r.experiment_id << ',' << r.kind << ',' << r.domain << ',' << r.delta << ',' << r.N
       << ',' << r.marking << ',' << r.event << ',' << r.est.total << ',' << r.est.undecided
       << ',' << r.est.p_hat << ',' << r.est.ci_lo << ',' << r.est.ci_hi << ',' << r.est.seed
       << ',';
    if (r.dt >= 0) os << r.dt;
    os << ',' << r.est.wall_time;
    return os.str();
}

inline void persist(const std::vector<Record>& records, const ExperimentSpec& spec,
                    const std::string& out_dir) {
    std::string csv_path = out_dir + "/" + spec.experiment_id + ".csv";
    bool fresh = !std::ifstream(csv_path).good();
    std::ofstream csv(csv_path, std::ios::app);
    if (!csv) throw Error("WriteFailed", csv_path);
    if (fresh) csv << csv_header() << '\n';
    for (const auto& r : records) csv << csv_row(r) << '\n';

    nlohmann::json man;
    man["experiment_id"] = spec.experiment_id;
    man["kind"] = spec.kind;
    man["domain_file"] = spec.domain_file;
    for (const auto& d : spec.deltas) man["deltas"].push_back(d.str());
    man["boundary"] = spec.boundary;
    man["n_samples"] = spec.n_samples;
    man["seed"] = spec.seed;
    man["beta"] = spec.beta;
    man["dt"] = spec.dt;
    man["obs_frac"] = spec.obs_frac;
    man["workers"] = spec.workers;
    man["version"] = "0.1.0";
    std::ofstream mf(out_dir + "/" + spec.experiment_id + ".manifest.json");
    mf << man.dump(2) << '\n';
}

namespace detail {

inline BoundaryCondition boundary_condition(const ExperimentSpec& spec,
                                            const RectangleMarking& m) {
    if (spec.boundary == "free") return BoundaryCondition::free_bc();
    if (spec.boundary == "mixed")
        return BoundaryCondition::fixed_arcs(
            m, {{RectangleMarking::BC, -1}, {RectangleMarking::DA, -1}});
    throw Error("BadBoundary", spec.boundary);
}

// Splits n_samples over workers; each worker owns a private sampler seeded
// from (root seed, worker index) so merged counts are order-independent.
template <class Body>
inline std::vector<Estimate> parallel_counts(const ExperimentSpec& spec, int n_events,
                                             const Body& body) {
    int nw = std::max(1, spec.workers);
    std::vector<std::vector<Estimate>> parts(nw, std::vector<Estimate>(n_events));
    auto run = [&](int w) {
        long lo = spec.n_samples * w / nw, hi = spec.n_samples * (w + 1) / nw;
        for (auto& e : parts[w]) e.seed = spec.seed;
        body(w, hi - lo, parts[w]);
        for (auto& e : parts[w]) e.finalize();
    };
    if (nw == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < nw; ++w) threads.emplace_back(run, w);
        for (auto& t : threads) t.join();
    }
    std::vector<Estimate> out = parts[0];
    for (int w = 1; w < nw; ++w)
        for (int e = 0; e < n_events; ++e) out[e] = merge(out[e], parts[w][e]);
    return out;
}

inline std::string rat_str(const Rat& r) { return r.str(); }

}  // namespace detail

// Crossing estimates per (delta, event), all four events evaluated on shared
// samples. The per-batch dualities plus + minus-star = total and
// star + minus-plus = total are exact and asserted on every batch.
inline std::vector<Record> run_lattice_crossing(const ExperimentSpec& spec) {
    DomainSpec ds = load_domain(spec.domain_file);
    std::vector<Rat> deltas = spec.deltas.empty() ? std::vector<Rat>{ds.delta} : spec.deltas;
    static const char* events[] = {"plus", "star", "minus-star", "minus-plus"};
    std::vector<Record> out;
    for (const Rat& delta : deltas) {
        auto t0 = std::chrono::steady_clock::now();
        LatticeDomain dom = discretize(ds.poly, delta, ds.interior);
        RectangleMarking m = mark_rectangle(dom, ds.marks[0], ds.marks[1], ds.marks[2], ds.marks[3]);
        BoundaryCondition bc = detail::boundary_condition(spec, m);
        auto counts = detail::parallel_counts(
            spec, 4, [&](int w, long n, std::vector<Estimate>& est) {
                IsingSampler sampler(dom, bc, spec.beta, Rng(spec.seed, w + 1));
                CrossingTester tester(m);
                sampler.sample();
                for (long i = 0; i < n; ++i) {
                    sampler.decorrelate(spec.decorrelate_wolff);
                    const auto& cfg = sampler.config();
                    bool ev[4] = {tester.plus_crossing(cfg), tester.star_crossing(cfg),
                                  tester.minus_star_crossing(cfg), tester.minus_plus_crossing(cfg)};
                    if (ev[0] == ev[2] || ev[1] == ev[3])
                        throw Error("DualityViolation", "complementary events disagree");
                    for (int e = 0; e < 4; ++e) {
                        est[e].total++;
                        est[e].successes += ev[e];
                    }
                }
            });
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (int e = 0; e < 4; ++e) {
            Record r;
            r.experiment_id = spec.experiment_id;
            r.kind = "lattice-crossing";
            r.domain = ds.name;
            r.delta = detail::rat_str(delta);
            r.N = int(std::lround(1.0 / to_double(delta)));
            r.marking = "abcd";
            r.event = events[e];
            r.est = counts[e];
            r.est.wall_time = wall;
            out.push_back(r);
        }
    }
    return out;
}

// Explorer hit estimates per (delta, explorer); per sample the hit
// classification is checked against the paired crossing event -- leftmost
// pairs with the plus crossing and rightmost with the star crossing -- and
// any mismatch is a hard failure.
inline std::vector<Record> run_explorer_hit(const ExperimentSpec& spec) {
    DomainSpec ds = load_domain(spec.domain_file);
    std::vector<Rat> deltas = spec.deltas.empty() ? std::vector<Rat>{ds.delta} : spec.deltas;
    static const char* events[] = {"leftmost-hit-cd", "rightmost-hit-cd"};
    std::vector<Record> out;
    for (const Rat& delta : deltas) {
        auto t0 = std::chrono::steady_clock::now();
        LatticeDomain dom = discretize(ds.poly, delta, ds.interior);
        RectangleMarking m = mark_rectangle(dom, ds.marks[0], ds.marks[1], ds.marks[2], ds.marks[3]);
        BoundaryCondition bc = detail::boundary_condition(spec, m);
        int v = observation_dual_vertex(m, spec.obs_frac);
        auto counts = detail::parallel_counts(
            spec, 2, [&](int w, long n, std::vector<Estimate>& est) {
                IsingSampler sampler(dom, bc, spec.beta, Rng(spec.seed, w + 1));
                CrossingTester tester(m);
                HitClassifier classify(m);
                sampler.sample();
                for (long i = 0; i < n; ++i) {
                    sampler.decorrelate(spec.decorrelate_wolff);
                    const auto& cfg = sampler.config();
                    bool lhit = classify(leftmost_explorer(m, cfg, v), cfg, true) == Hit::CDFirst;
                    bool rhit = classify(rightmost_explorer(m, cfg, v), cfg, false) == Hit::CDFirst;
                    if (lhit != tester.plus_crossing(cfg) || rhit != tester.star_crossing(cfg))
                        throw Error("IdentityViolation",
                                    "explorer hit disagrees with paired crossing event");
                    est[0].total++;
                    est[0].successes += lhit;
                    est[1].total++;
                    est[1].successes += rhit;
                }
            });
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (int e = 0; e < 2; ++e) {
            Record r;
            r.experiment_id = spec.experiment_id;
            r.kind = "lattice-explorer-hit";
            r.domain = ds.name;
            r.delta = detail::rat_str(delta);
            r.N = int(std::lround(1.0 / to_double(delta)));
            r.marking = "abcd";
            r.event = events[e];
            r.est = counts[e];
            r.est.wall_time = wall;
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace iselab
