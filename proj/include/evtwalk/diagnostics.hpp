#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "evtwalk/errors.hpp"
#include "evtwalk/measure.hpp"
#include "evtwalk/philox.hpp"

namespace evtwalk {

struct TailPoint {
    double z = 0.0;
    std::uint64_t count = 0; // exceedances
    double phi_hat = 0.0;
    double se = 0.0;
};

// Empirical tail Phi(z) = P(sample >= z) on a grid.
std::vector<TailPoint> tail_curve(std::span<const double> samples,
                                  std::span<const double> z_grid);

struct TailFit {
    double k_hat = 0.0;
    double v1_hat = 0.0; // min of phi_hat e^{k z} over the fit window
    double v2_hat = 0.0; // max of the same
    double r2 = 0.0;
    int points_used = 0;
    double z_lo = 0.0, z_hi = 0.0;
    std::uint64_t n_samples = 0;
};

// Weighted least squares of log Phi_hat against z (weights from binomial
// variance). Grid points with fewer than 30 exceedances are excluded; at
// least 5 points with >= 100 exceedances are required, and >= 10^4 samples.
TailFit tail_estimate_and_fit(std::span<const double> samples,
                              std::span<const double> z_grid);

// Mergeable joint-exceedance tallies: indicator at time 0 AND time j within
// the same trajectory, j = 1..joint.size(). Integer counts merge exactly,
// so results do not depend on how trajectories were batched.
struct JointExceedanceCounts {
    std::uint64_t n_traj = 0;
    std::uint64_t base = 0; // exceedances at time 0
    std::vector<std::uint64_t> joint;

    void merge(const JointExceedanceCounts& o);
};

struct DPrimeReport {
    std::vector<std::uint64_t> q;
    std::vector<std::uint64_t> terms; // floor(n/q)
    std::vector<double> g;
    std::vector<double> g_se;     // propagated binomial error
    std::vector<double> g_indep;  // n * floor(n/q) * marginal^2
};

// g_q = n * sum_{j=1}^{floor(n/q)} P(xi_0 > u, xi_j > u), from per-j
// probability estimates over >= 10^4 trajectories.
DPrimeReport dprime_sum(std::span<const double> joint_prob, std::uint64_t n,
                        std::span<const std::uint64_t> q_list,
                        std::uint64_t n_traj, double marginal);

DPrimeReport dprime_sum(const JointExceedanceCounts& counts, std::uint64_t n,
                        std::span<const std::uint64_t> q_list);

struct SpectralGapEstimate {
    double lambda_hat = 0.0;
    double c0_hat = 0.0;
    double r2 = 0.0;
    bool resolved = false; // false: correlations within noise (fast mixing)
    int points_used = 0;
};

// Fits |joint_j - marginal^2| ~ c0 lambda^j marginal on the j with residual
// above 3 sigma of the estimation noise. Needs >= 10 such points and a rate
// inside (0,1) to report resolved; anything else is returned unresolved, not
// an error (consistent with fast mixing).
SpectralGapEstimate correlation_decay_fit(std::span<const double> joint,
                                          double marginal,
                                          std::uint64_t n_traj);

struct RecurrenceEstimate {
    double p_hat = 0.0;
    double se = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
};

// Monte Carlo estimate of P(d(X_i, x) < 1/s) with x uniform on the torus and
// a fresh walk per trial. s >= 2 so the target ball embeds without wrap.
RecurrenceEstimate recurrence_prob(const GeneratorMeasure& m, int i_steps,
                                   double s, std::uint64_t trials,
                                   std::uint64_t master_seed,
                                   std::uint64_t trial_index0 = 0,
                                   std::uint32_t bits = 64);

struct LogLawSeries {
    std::vector<std::uint64_t> n;
    std::vector<double> stat; // (max_{m<=n} delta_m) / log n
};

// Running log-law statistic at the checkpoints. delta_at(i) is called for
// consecutive i = 0..max checkpoint. Checkpoints: at least 10, spanning at
// least 3 decades, all >= 2.
template <class DeltaAt>
LogLawSeries loglaw_estimate(DeltaAt&& delta_at,
                             std::span<const std::uint64_t> checkpoints) {
    if (checkpoints.size() < 10)
        throw InvalidArgument("loglaw: need at least 10 checkpoints");
    for (size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 2)
            throw InvalidArgument("loglaw: checkpoints must be >= 2");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw InvalidArgument("loglaw: checkpoints must increase");
    }
    if (static_cast<double>(checkpoints.back()) <
        1000.0 * static_cast<double>(checkpoints.front()))
        throw InvalidArgument("loglaw: checkpoints must span 3 decades");

    LogLawSeries out;
    double m = -std::numeric_limits<double>::infinity();
    std::uint64_t i = 0;
    for (std::uint64_t cp : checkpoints) {
        for (; i <= cp; ++i) m = std::max(m, delta_at(i));
        out.n.push_back(cp);
        out.stat.push_back(m / std::log(static_cast<double>(cp)));
    }
    return out;
}

} // namespace evtwalk
