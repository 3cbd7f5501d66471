#include <doctest.h>

#include "iselab/sle.hpp"

using namespace iselab;

TEST_CASE("zero-noise symmetric CDE: walls recede at the deterministic rate") {
    // with dB = 0 both gaps obey dg = 2 dt/g, so g(t) = sqrt(g0^2 + 4t)
    SleParams p = SleParams::cde();
    p.startup_gap = 1.0;
    DrivingTriple s = initial_state(p, 1e-4);
    REQUIRE(s.O_L == -1.0);
    REQUIRE(s.O_R == 1.0);
    double h = 1e-4;
    for (int i = 0; i < 10000; ++i) advance_step(s, p, h, 0.0);
    CHECK(s.U == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.O_L == doctest::Approx(-std::sqrt(1.0 + 4.0)).epsilon(1e-3));
    CHECK(s.O_R == doctest::Approx(std::sqrt(1.0 + 4.0)).epsilon(1e-3));
}

TEST_CASE("zero-noise tracked point follows the Loewner flow closed form") {
    SleParams p = SleParams::plain(3.0);
    DrivingTriple s = initial_state(p, 1e-4);
    std::vector<TrackedPoint> pts = {tracked_point(2.0)};
    for (int i = 0; i < 10000; ++i) advance_step(s, p, 1e-4, 0.0, &pts, 0.0);
    CHECK(pts[0].y == doctest::Approx(std::sqrt(4.0 + 4.0)).epsilon(1e-4));
}

TEST_CASE("plain driving variance is kappa t") {
    for (double kappa : {3.0, 6.0}) {
        SleParams p = SleParams::plain(kappa);
        Rng rng(42, 1);
        double s2 = 0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            DrivingTriple s = initial_state(p, 1e-2);
            while (s.t < 1.0 - 1e-9) advance(s, p, 1e-2, rng);
            s2 += s.U * s.U;
        }
        CHECK(s2 / n == doctest::Approx(kappa).epsilon(0.1));
    }
}

TEST_CASE("CDE wall recession matches the reference mean") {
    // E[O_L(1)] = -E[gl(1)] by mirror symmetry; reference -3.60 frozen from
    // an independent reflected-Euler integration of the coupled gap SDEs at
    // dt = 1e-6. The flow-integral recovery must reproduce it at coarse dt.
    SleParams p = SleParams::cde();
    Rng rng(7, 2);
    double sum = 0;
    const int n = 3000;
    for (int i = 0; i < n; ++i) {
        DrivingTriple s = initial_state(p, 1e-3);
        while (s.t < 1.0 - 1e-9) advance(s, p, 1e-3, rng);
        sum += s.O_L;
    }
    CHECK(sum / n == doctest::Approx(-3.60).epsilon(0.035));
}

TEST_CASE("bessel moments") {
    Rng rng(9, 1);
    for (double d : {4.0 / 3.0, 3.0}) {
        double s2 = 0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            auto path = bessel_path(d, 0.5, 1.0, 1e-3, rng);
            s2 += path.back() * path.back() - 0.25;
        }
        CHECK(s2 / n == doctest::Approx(d).epsilon(0.05));  // E[X_t^2] - x0^2 = d t
    }
}

TEST_CASE("hypergeometric race formula") {
    CHECK(hypergeometric_race_formula(0.5, 6.0) == doctest::Approx(0.5).epsilon(1e-12));
    for (double z : {0.1, 0.3, 0.45})
        CHECK(hypergeometric_race_formula(z, 6.0) +
                  hypergeometric_race_formula(1.0 - z, 6.0) ==
              doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hypergeometric_race_formula(0.25, 6.0) < hypergeometric_race_formula(0.26, 6.0));
    CHECK_THROWS(hypergeometric_race_formula(0.5, 3.0));
}

TEST_CASE("symmetric kappa=6 race is fair") {
    Rng rng(123, 4);
    auto e = swallow_race_probability(6, 0, 0, 1, -1, 4000, 1e-4, rng);
    CHECK(e.p_hat == doctest::Approx(0.5).epsilon(0.06));
    CHECK(e.undecided < 80);
}

TEST_CASE("scale invariance of the race probability") {
    Rng rng(55, 1);
    auto a = swallow_race_probability(6, 0, 0, 1, -3, 4000, 1e-4, rng);
    auto b = swallow_race_probability(6, 0, 0, 10, -30, 4000, 1e-4, rng);
    auto rep = compare(a, b);
    CHECK(rep.pass);
}

TEST_CASE("CDE hitting probability input validation and mirror symmetry") {
    Rng rng(77, 1);
    CHECK_THROWS(cde_hitting_probability(1.0, -0.5, 0.5, 10, 1e-3, rng));
    // mirror-symmetric configuration: P = 1/2
    auto e = cde_hitting_probability(1.0, -16.4853, -0.8918, 1500, 5e-4, rng);
    CHECK(e.p_hat == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("startup gap sensitivity is below the noise floor") {
    double means[2] = {0, 0};
    int idx = 0;
    for (double eps0 : {0.0, 0.0005}) {  // 0 -> sqrt(dt) default
        SleParams p = SleParams::cde();
        p.startup_gap = eps0;
        Rng rng(31, 6);
        const int n = 1500;
        for (int i = 0; i < n; ++i) {
            DrivingTriple s = initial_state(p, 1e-3);
            while (s.t < 0.5 - 1e-9) advance(s, p, 1e-3, rng);
            means[idx] += s.O_R / n;
        }
        ++idx;
    }
    CHECK(means[0] == doctest::Approx(means[1]).epsilon(0.1));
}

TEST_CASE("driving sample and trace are well formed") {
    Rng rng(21, 9);
    auto driving = sample_driving(SleParams::cde(), 0.5, 1e-3, rng);
    REQUIRE(driving.size() > 100);
    for (size_t i = 1; i < driving.size(); ++i) {
        CHECK(driving[i].t > driving[i - 1].t);
        CHECK(driving[i].O_L <= driving[i].U);
        CHECK(driving[i].U <= driving[i].O_R);
    }
    auto pts = trace_points(driving, 50);
    CHECK(pts.size() == 50);
    for (const auto& z : pts) CHECK(z.imag() >= 0.0);
}
