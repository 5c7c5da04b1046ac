#include "evtwalk/evt.hpp"

#include <cmath>
#include <numbers>

#include "evtwalk/smallmat.hpp"

namespace evtwalk {

double scaling_u(const ScalingSequence& s, std::uint64_t n) {
    if (n < 1) throw InvalidArgument("scaling_u: n must be >= 1");
    if (!(s.k > 0.0)) throw InvalidArgument("scaling_u: k must be positive");
    return s.r + std::log(static_cast<double>(n)) / s.k;
}

MaxSchedule full_schedule() { return MaxSchedule{}; }

MaxSchedule sparse_schedule(std::uint64_t a) {
    if (a < 1) throw InvalidArgument("sparse schedule: a must be >= 1");
    MaxSchedule s;
    s.kind = MaxSchedule::Kind::sparse;
    s.a = a;
    return s;
}

MaxSchedule gap_schedule_squares() {
    MaxSchedule s;
    s.kind = MaxSchedule::Kind::gap;
    s.gap_m = [](std::uint64_t j) { return j * j; };
    s.gap_window = [](std::uint64_t n) { return std::make_pair(n, 2 * n); };
    return s;
}

EcdfPoint empirical_cdf(std::span<const double> values, double threshold) {
    if (values.empty()) throw EmptySample("empirical_cdf: empty sample");
    EcdfPoint p;
    p.n = values.size();
    for (double v : values)
        if (v <= threshold) ++p.count;
    p.fraction = static_cast<double>(p.count) / static_cast<double>(p.n);
    p.se = std::sqrt(p.fraction * (1.0 - p.fraction) /
                     static_cast<double>(p.n));
    return p;
}

namespace {

// Gamma(x) for x a positive multiple of 1/2, by the recurrence
// Gamma(x+1) = x Gamma(x).
double gamma_half_steps(int twice_x) {
    double g = (twice_x % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
    for (int t = twice_x; t > 2; t -= 2) g *= (t - 2) / 2.0;
    return g;
}

} // namespace

double ball_volume(int d) {
    if (d < 1 || d > kMaxDim) throw InvalidArgument("ball_volume: d must be 1..8");
    // V_d = pi^{d/2} / Gamma(d/2 + 1)
    return std::pow(std::numbers::pi, d / 2.0) / gamma_half_steps(d + 2);
}

double zeta_value(int d) {
    if (d < 2) throw InvalidArgument("zeta_value: needs s >= 2");
    return std::riemann_zeta(static_cast<double>(d));
}

BallW ball_volume_and_w(int d) {
    BallW b;
    b.volume = ball_volume(d);
    if (d >= 2) {
        b.zeta = zeta_value(d);
        b.w = b.volume / (2.0 * b.zeta);
    }
    return b;
}

UpperCoefficientForms upper_coefficient(double lambda, double c0, double v1,
                                        double v2, std::uint64_t a) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw MissingFit("upper bound needs a decay rate in (0,1)");
    if (!(c0 > 0.0) || !(v1 > 0.0) || !(v2 > 0.0) || a < 1)
        throw MissingFit("upper bound needs positive c0, v1, v2 and a >= 1");
    const double la = std::pow(lambda, static_cast<double>(a));
    UpperCoefficientForms f;
    f.theta = (la / (1.0 - la)) * c0 * v2 - v1;
    f.w_a = -f.theta;
    return f;
}

LimitCurve torus_limit(int d) {
    LimitCurve c;
    c.kind = LimitCurve::Kind::torus_exact;
    c.k = d;
    c.coef = ball_volume(d);
    return c;
}

LimitCurve lattice_lower_limit(int d) {
    const BallW b = ball_volume_and_w(d);
    if (!b.w) throw InvalidArgument("lattice lower bound needs d >= 2");
    LimitCurve c;
    c.kind = LimitCurve::Kind::lattice_lower;
    c.k = d;
    c.coef = *b.w;
    return c;
}

LimitCurve lattice_upper_limit(int d, double lambda, double c0, double v1,
                               double v2, std::uint64_t a) {
    const UpperCoefficientForms f = upper_coefficient(lambda, c0, v1, v2, a);
    LimitCurve c;
    c.kind = LimitCurve::Kind::lattice_upper;
    c.k = d;
    c.coef = f.theta;
    c.trivial_upper = f.theta >= 0.0;
    return c;
}

LimitCurve gap_limit(double k, double v1) {
    if (!(k > 0.0) || !(v1 > 0.0))
        throw InvalidArgument("gap limit needs positive k and v1");
    LimitCurve c;
    c.kind = LimitCurve::Kind::gap_exact;
    c.k = k;
    c.coef = v1;
    return c;
}

LimitCurve excursion_lower_limit(double k_hat, double w_hat) {
    if (!(k_hat > 0.0) || !(w_hat > 0.0))
        throw MissingFit("excursion bound needs fitted k and w");
    LimitCurve c;
    c.kind = LimitCurve::Kind::excursion_lower;
    c.k = k_hat;
    c.coef = w_hat;
    return c;
}

} // namespace evtwalk
