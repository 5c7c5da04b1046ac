#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "evtwalk/diagnostics.hpp"
#include "evtwalk/measure.hpp"
#include "evtwalk/philox.hpp"

using namespace evtwalk;

TEST_CASE("tail curve counts exceedances inclusively") {
    const std::vector<double> samples{1.0, 2.0, 3.0};
    const std::vector<double> grid{1.5, 2.5};
    const auto pts = tail_curve(samples, grid);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].count == 2);
    CHECK(pts[0].phi_hat == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(pts[1].count == 1);
    CHECK(pts[1].phi_hat == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(tail_curve(samples, std::vector<double>{2.0})[0].count == 2);
}

TEST_CASE("tail fit recovers a planted exponent") {
    // Delta = (1/2) log(pi / U): Phi(z) = pi e^{-2z} for z >= ln 2
    const double pi = std::acos(-1.0);
    const int n = 200000;
    std::vector<double> samples;
    samples.reserve(n);
    Philox rng(1201, 0);
    for (int i = 0; i < n; ++i)
        samples.push_back(0.5 * std::log(pi / std::max(rng.next_unit(), 1e-300)));
    const std::vector<double> grid{1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6,
                                   2.8, 3.0};
    const TailFit fit = tail_estimate_and_fit(samples, grid);
    CHECK(fit.k_hat > 1.95);
    CHECK(fit.k_hat < 2.05);
    CHECK(fit.points_used == 10);
    CHECK(fit.r2 > 0.99);
    CHECK(fit.v1_hat > 0.9 * pi);
    CHECK(fit.v2_hat < 1.1 * pi);
    CHECK(fit.v1_hat <= fit.v2_hat);
    CHECK(fit.z_lo == 1.2);
    CHECK(fit.z_hi == 3.0);
    CHECK(fit.n_samples == static_cast<std::uint64_t>(n));
}

TEST_CASE("tail fit refuses starved inputs") {
    std::vector<double> few(5000, 1.0);
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK_THROWS_AS((void)tail_estimate_and_fit(few, grid),
                    InsufficientExceedances);
    // enough samples but the grid sits past every exceedance
    Philox rng(1202, 0);
    std::vector<double> samples;
    for (int i = 0; i < 20000; ++i)
        samples.push_back(rng.next_unit()); // all < 1
    const std::vector<double> deep{6.0, 6.5, 7.0, 7.5, 8.0};
    CHECK_THROWS_AS((void)tail_estimate_and_fit(samples, deep),
                    InsufficientExceedances);
}

TEST_CASE("dprime sums match the closed formula") {
    const std::vector<double> joint{0.25, 0.125, 0.0625, 0.03125};
    const std::vector<std::uint64_t> q{2, 4};
    const DPrimeReport rep = dprime_sum(joint, 8, q, 100000, 0.1);
    REQUIRE(rep.q.size() == 2);
    CHECK(rep.terms[0] == 4);
    CHECK(rep.terms[1] == 2);
    CHECK(rep.g[0] == doctest::Approx(8.0 * 0.46875).epsilon(1e-15));
    CHECK(rep.g[1] == doctest::Approx(8.0 * 0.375).epsilon(1e-15));
    CHECK(rep.g_indep[0] == doctest::Approx(8.0 * 4 * 0.01).epsilon(1e-15));
    CHECK(rep.g_indep[1] == doctest::Approx(8.0 * 2 * 0.01).epsilon(1e-15));
    double var = 0.0;
    for (int j = 0; j < 4; ++j) var += joint[j] * (1.0 - joint[j]) / 100000.0;
    CHECK(rep.g_se[0] == doctest::Approx(8.0 * std::sqrt(var)).epsilon(1e-14));
    // nesting: g is non-increasing in q because the sum loses terms
    CHECK(rep.g[1] <= rep.g[0]);
}

TEST_CASE("dprime input validation") {
    const std::vector<double> joint{0.1, 0.1};
    const std::vector<std::uint64_t> q{2};
    CHECK_THROWS_AS((void)dprime_sum(joint, 4, q, 5000, 0.1),
                    InsufficientTrajectories);
    const std::vector<std::uint64_t> big_q{5};
    CHECK_THROWS_AS((void)dprime_sum(joint, 4, big_q, 20000, 0.1),
                    InvalidArgument);
    // q = 1 needs n/1 = 4 estimates, only 2 supplied
    const std::vector<std::uint64_t> q1{1};
    CHECK_THROWS_AS((void)dprime_sum(joint, 4, q1, 20000, 0.1),
                    InvalidArgument);
}

TEST_CASE("joint counts merge exactly and match the whole") {
    JointExceedanceCounts a;
    a.n_traj = 12000;
    a.base = 500;
    a.joint = {40, 30, 20, 10};
    JointExceedanceCounts b;
    b.n_traj = 8000;
    b.base = 300;
    b.joint = {24, 18, 12, 6};
    JointExceedanceCounts whole = a;
    whole.merge(b);
    CHECK(whole.n_traj == 20000);
    CHECK(whole.base == 800);
    CHECK(whole.joint[0] == 64);
    CHECK(whole.joint[3] == 16);
    const std::vector<std::uint64_t> q{2, 4};
    const DPrimeReport merged = dprime_sum(whole, 8, q);
    std::vector<double> p(4);
    for (int j = 0; j < 4; ++j) p[j] = whole.joint[j] / 20000.0;
    const DPrimeReport direct = dprime_sum(p, 8, q, 20000, 800.0 / 20000.0);
    for (int i = 0; i < 2; ++i) {
        CHECK(merged.g[i] == direct.g[i]);
        CHECK(merged.g_indep[i] == direct.g_indep[i]);
    }
    JointExceedanceCounts short_counts;
    short_counts.n_traj = 1;
    short_counts.joint = {1, 2};
    CHECK_THROWS_AS(whole.merge(short_counts), InvalidArgument);
}

TEST_CASE("correlation fit recovers a planted geometric decay") {
    const double m = 0.05;
    std::vector<double> joint;
    for (int j = 1; j <= 32; ++j)
        joint.push_back(m * m + 0.3 * std::pow(0.5, j) * m);
    const SpectralGapEstimate est =
        correlation_decay_fit(joint, m, 1000000000000ULL);
    CHECK(est.resolved);
    CHECK(est.lambda_hat == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(est.c0_hat == doctest::Approx(0.3).epsilon(1e-4));
    CHECK(est.points_used >= 10);
    CHECK(est.r2 > 0.999);
}

TEST_CASE("correlation fit reports unresolved under independence") {
    const double m = 0.05;
    const std::vector<double> joint(32, m * m);
    const SpectralGapEstimate est = correlation_decay_fit(joint, m, 200000);
    CHECK(!est.resolved);
    CHECK(est.points_used < 10);
    CHECK_THROWS_AS((void)correlation_decay_fit(joint, m, 500),
                    InsufficientTrajectories);
    CHECK_THROWS_AS((void)correlation_decay_fit(joint, 0.0, 200000),
                    InvalidArgument);
}

TEST_CASE("recurrence probability equals the ball volume") {
    // every short word w of the default pair has |det(w - I)| >= 1, so
    // (w - I)x mod 1 is Haar and P(d(X_i, x) < 1/s) is exactly V_2 / s^2
    const GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    const double pi = std::acos(-1.0);
    for (int i : {1, 3}) {
        const RecurrenceEstimate est = recurrence_prob(m, i, 10.0, 200000, 55);
        CHECK(est.trials == 200000);
        const double p = pi / 100.0;
        CHECK(std::fabs(est.p_hat - p) <
              4.0 * std::sqrt(p * (1.0 - p) / 200000.0));
        CHECK(est.se ==
              doctest::Approx(std::sqrt(est.p_hat * (1.0 - est.p_hat) /
                                        200000.0)).epsilon(1e-12));
    }
}

TEST_CASE("grid oracle confirms the one-step return set has ball volume") {
    // direct measure of {x : d(Ax, x) < 1/10} on a 2000^2 midpoint grid
    const GeneratorMeasure m = default_measure(WalkMode::torus, 2);
    const double pi = std::acos(-1.0);
    for (const MatI& g : m.ielements) {
        const double a = static_cast<double>(g.at(0, 0)) - 1.0;
        const double b = static_cast<double>(g.at(0, 1));
        const double c = static_cast<double>(g.at(1, 0));
        const double d = static_cast<double>(g.at(1, 1)) - 1.0;
        const int grid = 2000;
        std::int64_t hits = 0;
        for (int i = 0; i < grid; ++i) {
            const double x = (i + 0.5) / grid;
            for (int j = 0; j < grid; ++j) {
                const double y = (j + 0.5) / grid;
                double u = a * x + b * y;
                double v = c * x + d * y;
                u -= std::nearbyint(u);
                v -= std::nearbyint(v);
                if (u * u + v * v < 0.01) ++hits;
            }
        }
        const double est = static_cast<double>(hits) / (static_cast<double>(grid) * grid);
        CHECK(std::fabs(est - pi / 100.0) < 1e-3);
    }
}

TEST_CASE("recurrence input validation") {
    const GeneratorMeasure t = default_measure(WalkMode::torus, 2);
    CHECK_THROWS_AS((void)recurrence_prob(t, 0, 10.0, 1000, 1),
                    InvalidArgument);
    CHECK_THROWS_AS((void)recurrence_prob(t, 1, 1.5, 1000, 1),
                    InvalidArgument);
    const GeneratorMeasure l = default_measure(WalkMode::lattice, 2);
    CHECK_THROWS_AS((void)recurrence_prob(l, 1, 10.0, 1000, 1),
                    InvalidArgument);
}

TEST_CASE("log-law statistic converges on a planted logarithmic record") {
    const double c = 0.7;
    const auto delta_at = [&](std::uint64_t i) {
        return c * std::log(static_cast<double>(i) + 1.0);
    };
    const std::vector<std::uint64_t> cps{10,    30,     100,    300,
                                         1000,  3000,   10000,  30000,
                                         100000, 300000, 1000000};
    const LogLawSeries s = loglaw_estimate(delta_at, cps);
    REQUIRE(s.n.size() == cps.size());
    CHECK(s.n.back() == 1000000);
    CHECK(s.stat.back() == doctest::Approx(c).epsilon(1e-4));
    // statistic is c log(n+1)/log(n): decreasing toward c
    for (size_t i = 1; i < s.stat.size(); ++i)
        CHECK(s.stat[i] <= s.stat[i - 1] + 1e-15);
}

TEST_CASE("log-law checkpoint validation") {
    const auto delta_at = [](std::uint64_t) { return 1.0; };
    CHECK_THROWS_AS(
        (void)loglaw_estimate(delta_at, std::vector<std::uint64_t>{10, 20, 30}),
        InvalidArgument);
    CHECK_THROWS_AS(
        (void)loglaw_estimate(delta_at,
                              std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8,
                                                         9, 10000}),
        InvalidArgument);
    CHECK_THROWS_AS(
        (void)loglaw_estimate(delta_at,
                              std::vector<std::uint64_t>{10, 9, 100, 300, 1000,
                                                         3000, 10000, 30000,
                                                         100000, 300000}),
        InvalidArgument);
    // back < 1000 * front: spans fewer than 3 decades
    CHECK_THROWS_AS(
        (void)loglaw_estimate(delta_at,
                              std::vector<std::uint64_t>{10, 20, 30, 40, 50, 60,
                                                         70, 80, 90, 9000}),
        InvalidArgument);
}
