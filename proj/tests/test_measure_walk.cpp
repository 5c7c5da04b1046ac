#include "doctest.h"

#include <cmath>
#include <vector>

#include "evtwalk/measure.hpp"
#include "evtwalk/philox.hpp"
#include "evtwalk/torus.hpp"
#include "evtwalk/walk.hpp"

using namespace evtwalk;

namespace {

MatD mat2(double a, double b, double c, double d) {
    MatD m;
    m.n = 2;
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

} // namespace

TEST_CASE("measure validation rejects structural problems") {
    const std::vector<MatD> cat = {mat2(2, 1, 1, 1)};

    CHECK_THROWS_AS(validate_measure(WalkMode::torus, 2, {}, {}),
                    EmptySupport);
    CHECK_THROWS_AS(validate_measure(WalkMode::torus, 2, cat, {0.5, 0.5}),
                    BadWeights);
    CHECK_THROWS_AS(validate_measure(WalkMode::torus, 2, cat, {0.0}),
                    BadWeights);
    CHECK_THROWS_AS(validate_measure(WalkMode::torus, 2, cat, {-1.0}),
                    BadWeights);
    CHECK_THROWS_AS(validate_measure(WalkMode::torus, 2, cat, {0.9}),
                    BadWeights);
    CHECK_THROWS_AS(
        validate_measure(WalkMode::torus, 2, {mat2(2, 1, 1, 1.5)}, {1.0}),
        NonIntegerEntries);
    CHECK_THROWS_AS(
        validate_measure(WalkMode::torus, 2, {mat2(2, 0, 0, 2)}, {1.0}),
        NonUnimodular);
    CHECK_THROWS_AS(
        validate_measure(WalkMode::lattice, 2, {mat2(2, 0, 0, 2)}, {1.0}),
        NonUnimodular);
    CHECK_THROWS_AS(validate_measure(WalkMode::torus, 3, cat, {1.0}),
                    InvalidArgument); // dim mismatch
    CHECK_THROWS_AS(validate_measure(WalkMode::torus, 0, cat, {1.0}),
                    InvalidArgument);

    // det -1 is fine on the torus (automorphism), rejected for lattices
    CHECK_NOTHROW(
        validate_measure(WalkMode::torus, 2, {mat2(0, 1, 1, 0)}, {1.0}));
    CHECK_THROWS_AS(
        validate_measure(WalkMode::lattice, 2, {mat2(0, 1, 1, 0)}, {1.0}),
        NonUnimodular);
}

TEST_CASE("weights renormalize exactly and drive sample_index") {
    const std::vector<MatD> gens = {mat2(2, 1, 1, 1), mat2(1, 1, 1, 2)};
    GeneratorMeasure m =
        validate_measure(WalkMode::torus, 2, gens, {0.25, 0.75});
    CHECK(m.cumulative.back() == 1.0);
    CHECK(m.sample_index(0.0) == 0);
    CHECK(m.sample_index(0.2499) == 0);
    CHECK(m.sample_index(0.25) == 1);
    CHECK(m.sample_index(0.999999) == 1);

    // frequencies within 4 binomial sigma
    GeneratorMeasure eq =
        validate_measure(WalkMode::torus, 2, gens, {0.5, 0.5});
    Philox rng(77, 0);
    const int n = 100000;
    int c0 = 0;
    for (int i = 0; i < n; ++i)
        if (eq.sample_index(rng.next_unit()) == 0) ++c0;
    const double sigma = std::sqrt(0.25 * n);
    CHECK(std::fabs(c0 - n / 2.0) < 4.0 * sigma);
}

TEST_CASE("documented default generator sets") {
    GeneratorMeasure t2 = default_measure(WalkMode::torus, 2);
    CHECK(t2.elements.size() == 2);
    CHECK(t2.ielements[0].at(0, 0) == 2);
    CHECK(t2.ielements[0].at(0, 1) == 1);
    CHECK(t2.ielements[1].at(1, 1) == 2);
    CHECK(t2.weights[0] == 0.5);

    GeneratorMeasure l2 = default_measure(WalkMode::lattice, 2);
    CHECK(l2.elements.size() == 2);
    CHECK(l2.elements[0].at(0, 1) == 2.0);
    CHECK(l2.elements[1].at(1, 0) == 2.0);

    CHECK_NOTHROW(default_measure(WalkMode::torus, 3));
    CHECK_NOTHROW(default_measure(WalkMode::lattice, 3));
    CHECK_THROWS_AS(default_measure(WalkMode::torus, 5), ConfigError);
}

TEST_CASE("walks are reproducible and trajectory-separated") {
    GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    TorusAction act{&m};
    Philox init(31, 0, Substream::init);
    const TorusPoint x0 = random_torus_point(2, 64, init);

    const auto w1 = walk_stream(act, x0, 50, SeedPlan{31, 0});
    const auto w2 = walk_stream(act, x0, 50, SeedPlan{31, 0});
    const auto w3 = walk_stream(act, x0, 50, SeedPlan{31, 1});
    bool same = true, diff = false;
    for (int i = 0; i < 50; ++i) {
        same = same && (w1[i] == w2[i]);
        diff = diff || !(w1[i] == w3[i]);
    }
    CHECK(same);
    CHECK(diff);
    CHECK(w1[0] == x0);
}

TEST_CASE("single-generator walk is the deterministic orbit") {
    GeneratorMeasure m =
        validate_measure(WalkMode::torus, 2, {mat2(2, 1, 1, 1)}, {1.0});
    TorusAction act{&m};
    const TorusPoint x0 = torus_point_from_unit(std::vector<double>{0.25, 0.5});
    const auto w = walk_stream(act, x0, 4, SeedPlan{1, 0});

    TorusPoint y = x0;
    for (int i = 1; i < 4; ++i) {
        apply_automorphism(m.ielements[0], y);
        CHECK(w[i] == y);
    }
}

TEST_CASE("automorphisms preserve the uniform law") {
    // mean of each coordinate after a few steps stays 1/2 within 3 sigma
    GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    TorusAction act{&m};
    const int n = 20000;
    double s0 = 0.0, s1 = 0.0;
    for (int t = 0; t < n; ++t) {
        Philox init(555, static_cast<std::uint64_t>(t), Substream::init);
        TorusPoint x = random_torus_point(2, 64, init);
        const auto w = walk_stream(act, x, 6, SeedPlan{555, static_cast<std::uint64_t>(t)});
        const TorusPoint& y = w.back();
        s0 += std::ldexp(static_cast<double>(y.c[0]), -64);
        s1 += std::ldexp(static_cast<double>(y.c[1]), -64);
    }
    const double sigma = std::sqrt(1.0 / 12.0 / n);
    CHECK(std::fabs(s0 / n - 0.5) < 3.0 * sigma);
    CHECK(std::fabs(s1 / n - 0.5) < 3.0 * sigma);
}

TEST_CASE("delta distribution is stationary in the step index") {
    // invariant start: exceedance rate of Delta(X_i) must not depend on i
    GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    TorusAction act{&m};
    const int n = 20000;
    const double z = std::log(4.0);
    const auto exceed_rate = [&](int step, std::uint64_t traj0) {
        int count = 0;
        for (int t = 0; t < n; ++t) {
            const SeedPlan sp{777, traj0 + static_cast<std::uint64_t>(t)};
            Philox init(sp, Substream::init);
            TorusPoint x = random_torus_point(2, 64, init);
            const TorusPoint target = random_torus_point(2, 64, init);
            TrajectoryStream<TorusAction> w(act, x, Philox(sp, Substream::steps));
            for (int i = 0; i < step; ++i) w.advance();
            if (!(w.state() == target) &&
                closest_return_delta(w.state(), target) >= z)
                ++count;
        }
        return static_cast<double>(count) / n;
    };
    const double p1 = exceed_rate(1, 0);
    const double p5 = exceed_rate(5, n);
    // independent samples: 3 sigma on the difference of two binomials
    const double p = 0.5 * (p1 + p5);
    const double sigma = std::sqrt(2.0 * p * (1.0 - p) / n);
    CHECK(std::fabs(p1 - p5) < 3.0 * sigma);
}
