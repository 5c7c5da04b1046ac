#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "evtwalk/evt.hpp"
#include "evtwalk/measure.hpp"
#include "evtwalk/philox.hpp"
#include "evtwalk/torus.hpp"

using namespace evtwalk;

namespace {

MatI imat2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    MatI m;
    m.n = 2;
    m.at(0, 0) = a;
    m.at(0, 1) = b;
    m.at(1, 0) = c;
    m.at(1, 1) = d;
    return m;
}

TorusPoint pt(double x, double y, std::uint32_t bits = 64) {
    const std::vector<double> v{x, y};
    return torus_point_from_unit(v, bits);
}

} // namespace

TEST_CASE("automorphisms act exactly mod 1") {
    // (0.5, 0.25) under [[2,1],[1,1]] -> (1.25, 0.75) = (0.25, 0.75) mod 1
    TorusPoint x = pt(0.5, 0.25);
    apply_automorphism(imat2(2, 1, 1, 1), x);
    CHECK(x == pt(0.25, 0.75));

    // reduced precision: same arithmetic in 16 bits
    TorusPoint y = pt(0.5, 0.25, 16);
    apply_automorphism(imat2(2, 1, 1, 1), y);
    CHECK(y == pt(0.25, 0.75, 16));

    // negative entries wrap correctly
    TorusPoint z = pt(0.75, 0.5);
    apply_automorphism(imat2(1, -1, 0, 1), z);
    CHECK(z == pt(0.25, 0.5));
}

TEST_CASE("inverse automorphism is an exact round trip") {
    const MatI a = imat2(2, 1, 1, 1);
    const MatI ainv = imat2(1, -1, -1, 2); // a * ainv = I
    Philox rng(404, 0);
    for (int trial = 0; trial < 200; ++trial) {
        TorusPoint x = random_torus_point(2, 64, rng);
        const TorusPoint orig = x;
        apply_automorphism(a, x);
        apply_automorphism(ainv, x);
        CHECK(x == orig);
    }
    Philox rng2(404, 1);
    for (int trial = 0; trial < 200; ++trial) {
        TorusPoint x = random_torus_point(2, 20, rng2);
        const TorusPoint orig = x;
        apply_automorphism(a, x);
        apply_automorphism(ainv, x);
        CHECK(x == orig);
    }
}

TEST_CASE("torus distance respects wraparound") {
    CHECK(torus_distance(pt(0.0, 0.0), pt(0.5, 0.5)) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    // wrap: 0.875 vs 0.125 are 0.25 apart through the seam
    CHECK(torus_distance(pt(0.875, 0.0), pt(0.125, 0.0)) ==
          doctest::Approx(0.25).epsilon(1e-14));
    CHECK(torus_distance(pt(0.25, 0.25), pt(0.25, 0.25)) == 0.0);
    // max distance is sqrt(d)/2 at the antipode
    CHECK(torus_distance(pt(0.0, 0.0), pt(0.5, 0.0)) ==
          doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("closest-return delta and the infinite case") {
    CHECK(closest_return_delta(pt(0.25, 0.0), pt(0.0, 0.0)) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK_THROWS_AS(
        (void)closest_return_delta(pt(0.25, 0.5), pt(0.25, 0.5)),
        InfiniteDelta);
}

TEST_CASE("finite det condition holds for the default pair") {
    GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    const DetConditionReport rep = check_det_condition(m, 6);
    CHECK(rep.pass);
    CHECK(rep.max_len == 6);
    CHECK(rep.words_checked == 2 + 4 + 8 + 16 + 32 + 64);
    CHECK(rep.violations.empty());
}

TEST_CASE("det condition flags identity-like words") {
    // the swap matrix squares to the identity, so length-2 words violate
    GeneratorMeasure m = validate_measure(
        WalkMode::torus, 2,
        {[] {
            MatD s;
            s.n = 2;
            s.at(0, 0) = 0;
            s.at(0, 1) = 1;
            s.at(1, 0) = 1;
            s.at(1, 1) = 0;
            return s;
        }()},
        {1.0});
    const DetConditionReport rep = check_det_condition(m, 2);
    CHECK(!rep.pass);
    CHECK(!rep.violations.empty());
    // length-1 word: det(swap - I) = 0 already
    CHECK(rep.violations.front().size() == 1);
}

TEST_CASE("det condition respects the word cap") {
    GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    CHECK_THROWS_AS((void)check_det_condition(m, 20, 100),
                    WordLimitExceeded);
}

TEST_CASE("det condition agrees with a direct 2x2 oracle") {
    GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    // enumerate words of length <= 3 directly and evaluate det(w - I)
    std::vector<MatI> words = {m.ielements[0], m.ielements[1]};
    bool any_zero = false;
    for (int len = 1; len <= 3; ++len) {
        std::vector<MatI> next;
        for (const MatI& w : words) {
            const std::int64_t a = w.at(0, 0) - 1, b = w.at(0, 1);
            const std::int64_t c = w.at(1, 0), d = w.at(1, 1) - 1;
            if (a * d - b * c == 0) any_zero = true;
            if (len < 3)
                for (const MatI& g : m.ielements)
                    next.push_back(mati_mul_checked(g, w));
        }
        words = std::move(next);
    }
    CHECK(!any_zero);
    CHECK(check_det_condition(m, 3).pass);
}

TEST_CASE("exact torus tail formula") {
    const double pi = std::acos(-1.0);
    CHECK(exact_torus_tail(std::log(2.0), 2) ==
          doctest::Approx(pi / 4.0).epsilon(1e-13));
    CHECK(exact_torus_tail(std::log(4.0), 2) ==
          doctest::Approx(pi / 16.0).epsilon(1e-13));
    CHECK(exact_torus_tail(1.0, 3) ==
          doctest::Approx((4.0 * pi / 3.0) * std::exp(-3.0)).epsilon(1e-13));
    CHECK_THROWS_AS((void)exact_torus_tail(0.5, 2), BallTooLarge);
}

TEST_CASE("scaling threshold makes n * tail constant") {
    const double pi = std::acos(-1.0);
    for (double r : {-1.0, 0.0, 1.0}) {
        const double u = scaling_u(ScalingSequence{r, 2.0}, 4096);
        CHECK(4096.0 * exact_torus_tail(u, 2) ==
              doctest::Approx(pi * std::exp(-2.0 * r)).epsilon(1e-12));
    }
}

TEST_CASE("orbit coordinates stay uniform (chi-square)") {
    GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    const int n = 20000, bins = 64, steps = 3;
    std::vector<int> count(bins, 0);
    for (int t = 0; t < n; ++t) {
        const SeedPlan sp{808, static_cast<std::uint64_t>(t)};
        Philox init(sp, Substream::init);
        TorusPoint x = random_torus_point(2, 64, init);
        Philox walk(sp, Substream::steps);
        for (int i = 0; i < steps; ++i)
            apply_automorphism(m.ielements[m.sample_index(walk.next_unit())],
                               x);
        ++count[static_cast<int>(x.c[0] >> 58)]; // top 6 bits
    }
    double chi2 = 0.0;
    const double expect = static_cast<double>(n) / bins;
    for (int b = 0; b < bins; ++b) {
        const double d = count[b] - expect;
        chi2 += d * d / expect;
    }
    // Wilson-Hilferty: chi2_{df,q} ~ df (1 - 2/(9 df) + z sqrt(2/(9 df)))^3
    const double df = bins - 1;
    const double z = 4.0;
    const double crit =
        df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)),
                      3.0);
    CHECK(chi2 < crit);
}

TEST_CASE("empirical tail matches the exact law at 4 sigma") {
    const double pi = std::acos(-1.0);
    const int n = 200000;
    const double z = std::log(4.0);
    int count = 0;
    for (int t = 0; t < n; ++t) {
        Philox rng(909, static_cast<std::uint64_t>(t), Substream::init);
        const TorusPoint x = random_torus_point(2, 64, rng);
        const TorusPoint y = random_torus_point(2, 64, rng);
        double delta;
        try {
            delta = closest_return_delta(x, y);
        } catch (const InfiniteDelta&) {
            delta = std::numeric_limits<double>::infinity();
        }
        if (delta >= z) ++count;
    }
    const double p = pi / 16.0;
    const double sigma = std::sqrt(p * (1.0 - p) * n);
    CHECK(std::fabs(count - p * n) < 4.0 * sigma);
}
