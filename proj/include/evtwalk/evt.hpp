#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evtwalk/errors.hpp"

namespace evtwalk {

// Threshold sequence u_n(r) = r + (1/k) log n. k is the tail exponent of the
// observable (d for torus and lattice delta, fitted for excursions).
struct ScalingSequence {
    double r = 0.0;
    double k = 2.0;
};

double scaling_u(const ScalingSequence& s, std::uint64_t n);

// Which indices of the delta stream enter the maximum.
//   full:    0, 1, ..., n-1
//   sparse:  0, a, 2a, ..., a(n-1)
//   gap:     m_j for j in [alpha_n, beta_n)
struct MaxSchedule {
    enum class Kind { full, sparse, gap };
    Kind kind = Kind::full;
    std::uint64_t a = 1;
    std::function<std::uint64_t(std::uint64_t)> gap_m;
    std::function<std::pair<std::uint64_t, std::uint64_t>(std::uint64_t)> gap_window;
};

MaxSchedule full_schedule();
MaxSchedule sparse_schedule(std::uint64_t a);
// Default gap schedule: m_j = j^2, window [n, 2n).
MaxSchedule gap_schedule_squares();

struct MaxSeries {
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> values;
};

// Maxima of delta over the scheduled indices, reported at each checkpoint.
// delta_at(i) is called with strictly increasing stream indices i; a finite
// source signals overrun by throwing StreamExhausted. For full/sparse the
// checkpoint value n means "first n scheduled samples" and the series is
// non-decreasing; for gap each checkpoint n is the max over its own window.
template <class DeltaAt>
MaxSeries running_maxima(DeltaAt&& delta_at, const MaxSchedule& sched,
                         const std::vector<std::uint64_t>& checkpoints) {
    if (checkpoints.empty())
        throw InvalidArgument("running_maxima: no checkpoints");
    for (size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1)
            throw InvalidArgument("running_maxima: checkpoints must be >= 1");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw InvalidArgument("running_maxima: checkpoints must increase");
    }

    MaxSeries out;
    out.checkpoints = checkpoints;
    out.values.reserve(checkpoints.size());

    if (sched.kind == MaxSchedule::Kind::full ||
        sched.kind == MaxSchedule::Kind::sparse) {
        const std::uint64_t a =
            sched.kind == MaxSchedule::Kind::sparse ? sched.a : 1;
        if (a < 1) throw InvalidArgument("running_maxima: sparse spacing must be >= 1");
        double m = -std::numeric_limits<double>::infinity();
        std::uint64_t j = 0;
        for (std::uint64_t cp : checkpoints) {
            for (; j < cp; ++j) m = std::max(m, delta_at(j * a));
            out.values.push_back(m);
        }
        return out;
    }

    if (!sched.gap_m || !sched.gap_window)
        throw InvalidArgument("running_maxima: gap schedule is missing its maps");
    std::uint64_t j_lo = ~std::uint64_t{0}, j_hi = 0;
    for (std::uint64_t cp : checkpoints) {
        const auto [alpha, beta] = sched.gap_window(cp);
        if (alpha >= beta)
            throw InvalidArgument("running_maxima: gap window must be nonempty");
        j_lo = std::min(j_lo, alpha);
        j_hi = std::max(j_hi, beta);
    }
    std::vector<double> deltas;
    deltas.reserve(j_hi - j_lo);
    std::uint64_t prev_idx = 0;
    bool first = true;
    for (std::uint64_t j = j_lo; j < j_hi; ++j) {
        const std::uint64_t idx = sched.gap_m(j);
        if (!first && idx <= prev_idx)
            throw InvalidArgument("running_maxima: gap index map must strictly increase");
        first = false;
        prev_idx = idx;
        deltas.push_back(delta_at(idx));
    }
    for (std::uint64_t cp : checkpoints) {
        const auto [alpha, beta] = sched.gap_window(cp);
        double m = -std::numeric_limits<double>::infinity();
        for (std::uint64_t j = alpha; j < beta; ++j)
            m = std::max(m, deltas[j - j_lo]);
        out.values.push_back(m);
    }
    return out;
}

// Adapter over a finite vector of deltas; exhaustion is an error.
class VectorDeltaSource {
  public:
    explicit VectorDeltaSource(std::vector<double> v) : v_(std::move(v)) {}
    double operator()(std::uint64_t i) const {
        if (i >= v_.size())
            throw StreamExhausted("delta stream exhausted at index " +
                                  std::to_string(i));
        return v_[i];
    }

  private:
    std::vector<double> v_;
};

struct EcdfPoint {
    double fraction = 0.0;
    double se = 0.0; // binomial standard error
    std::uint64_t count = 0;
    std::uint64_t n = 0;
};

// P(value <= threshold) over the sample, with sqrt(p(1-p)/n) error bar.
EcdfPoint empirical_cdf(std::span<const double> values, double threshold);

// Volume of the d-dimensional Euclidean unit ball, Gamma by recurrence from
// Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
double ball_volume(int d);

// Riemann zeta at integer s >= 2.
double zeta_value(int d);

struct BallW {
    double volume = 0.0;
    double zeta = std::numeric_limits<double>::quiet_NaN();
    // w = V_d / (2 zeta(d)); undefined at d = 1 (zeta diverges).
    std::optional<double> w;
};

BallW ball_volume_and_w(int d);

// Both sign conventions of the finite-a upper-bound coefficient:
// theta = (lambda^a / (1 - lambda^a)) c0 v2 - v1 (exponent as proved) and
// w_a = -theta (the form that tends to v1 as a grows). Reports emit both.
struct UpperCoefficientForms {
    double theta = 0.0;
    double w_a = 0.0;
};

UpperCoefficientForms upper_coefficient(double lambda, double c0, double v1,
                                        double v2, std::uint64_t a);

// Reference limit curves F(r) for P(M_n <= u_n(r)).
//   torus_exact:     exp(-V_d e^{-dr})            (exact limit)
//   lattice_lower:   exp(-w e^{-dr})              (liminf bound, w = V_d/2zeta(d))
//   lattice_upper:   min(1, exp(theta e^{-dr}))   (limsup bound, needs a fit)
//   gap_exact:       exp(-v1 e^{-kr})             (exact along gap subsequences)
//   excursion_lower: exp(-w_hat e^{-k_hat r})     (fitted-parameter bound)
struct LimitCurve {
    enum class Kind { torus_exact, lattice_lower, lattice_upper, gap_exact,
                      excursion_lower };
    Kind kind = Kind::torus_exact;
    double k = 2.0;
    double coef = 1.0;  // coefficient of e^{-kr} in the exponent, sign included
    bool trivial_upper = false; // theta >= 0: bound degenerates to 1

    double operator()(double r) const {
        const double e = coef * std::exp(-k * r);
        const double v = std::exp(kind == Kind::lattice_upper ? e : -e);
        return kind == Kind::lattice_upper ? std::min(1.0, v) : v;
    }
};

LimitCurve torus_limit(int d);
LimitCurve lattice_lower_limit(int d);
LimitCurve lattice_upper_limit(int d, double lambda, double c0, double v1,
                               double v2, std::uint64_t a);
LimitCurve gap_limit(double k, double v1);
LimitCurve excursion_lower_limit(double k_hat, double w_hat);

} // namespace evtwalk
