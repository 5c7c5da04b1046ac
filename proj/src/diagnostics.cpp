#include "evtwalk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evtwalk/torus.hpp"
#include "evtwalk/walk.hpp"

namespace evtwalk {

namespace {

// y ~ b0 + b1 x, weighted; returns (b0, b1, weighted r2).
struct WlsFit {
    double b0 = 0.0, b1 = 0.0, r2 = 0.0;
};

WlsFit wls(const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& w) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
        sxx += w[i] * x[i] * x[i];
        sxy += w[i] * x[i] * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    const double vxx = sxx / sw - mx * mx;
    const double vxy = sxy / sw - mx * my;
    WlsFit f;
    f.b1 = vxy / vxx;
    f.b0 = my - f.b1 * mx;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.b0 + f.b1 * x[i]);
        ss_res += w[i] * e * e;
        const double t = y[i] - my;
        ss_tot += w[i] * t * t;
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace

std::vector<TailPoint> tail_curve(std::span<const double> samples,
                                  std::span<const double> z_grid) {
    if (samples.empty()) throw EmptySample("tail_curve: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<TailPoint> out;
    out.reserve(z_grid.size());
    for (double z : z_grid) {
        TailPoint p;
        p.z = z;
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), z);
        p.count = static_cast<std::uint64_t>(sorted.end() - it);
        p.phi_hat = static_cast<double>(p.count) / n;
        p.se = std::sqrt(p.phi_hat * (1.0 - p.phi_hat) / n);
        out.push_back(p);
    }
    return out;
}

TailFit tail_estimate_and_fit(std::span<const double> samples,
                              std::span<const double> z_grid) {
    if (samples.size() < 10000)
        throw InsufficientExceedances("tail fit: need at least 10^4 samples");
    const std::vector<TailPoint> curve = tail_curve(samples, z_grid);

    const double n = static_cast<double>(samples.size());
    std::vector<double> x, y, w;
    int strong = 0;
    double z_lo = std::numeric_limits<double>::infinity(), z_hi = -z_lo;
    for (const TailPoint& p : curve) {
        if (p.count < 30) continue; // too noisy for the regression
        if (p.count >= 100) ++strong;
        x.push_back(p.z);
        // Var(log phi_hat) ~ (1 - phi) / (n phi)
        y.push_back(std::log(p.phi_hat));
        w.push_back(n * p.phi_hat / (1.0 - p.phi_hat + 1e-300));
        z_lo = std::min(z_lo, p.z);
        z_hi = std::max(z_hi, p.z);
    }
    if (strong < 5)
        throw InsufficientExceedances(
            "tail fit: need >= 5 grid points with >= 100 exceedances");

    const WlsFit f = wls(x, y, w);
    TailFit fit;
    fit.k_hat = -f.b1;
    fit.r2 = f.r2;
    fit.points_used = static_cast<int>(x.size());
    fit.z_lo = z_lo;
    fit.z_hi = z_hi;
    fit.n_samples = samples.size();
    double v1 = std::numeric_limits<double>::infinity(), v2 = -v1;
    for (size_t i = 0; i < x.size(); ++i) {
        const double v = std::exp(y[i] + fit.k_hat * x[i]);
        v1 = std::min(v1, v);
        v2 = std::max(v2, v);
    }
    fit.v1_hat = v1;
    fit.v2_hat = v2;
    return fit;
}

void JointExceedanceCounts::merge(const JointExceedanceCounts& o) {
    if (joint.size() != o.joint.size())
        throw InvalidArgument("joint counts: window mismatch in merge");
    n_traj += o.n_traj;
    base += o.base;
    for (size_t j = 0; j < joint.size(); ++j) joint[j] += o.joint[j];
}

DPrimeReport dprime_sum(std::span<const double> joint_prob, std::uint64_t n,
                        std::span<const std::uint64_t> q_list,
                        std::uint64_t n_traj, double marginal) {
    if (n_traj < 10000)
        throw InsufficientTrajectories("dprime: need >= 10^4 trajectories");
    if (n < 1) throw InvalidArgument("dprime: n must be >= 1");
    DPrimeReport rep;
    const double nd = static_cast<double>(n);
    for (std::uint64_t q : q_list) {
        if (q < 1 || q > n) throw InvalidArgument("dprime: q must be in [1, n]");
        const std::uint64_t terms = n / q;
        if (terms > joint_prob.size())
            throw InvalidArgument("dprime: joint estimates shorter than n/q");
        double s = 0.0, var = 0.0;
        for (std::uint64_t j = 0; j < terms; ++j) {
            s += joint_prob[j];
            var += joint_prob[j] * (1.0 - joint_prob[j]) /
                   static_cast<double>(n_traj);
        }
        rep.q.push_back(q);
        rep.terms.push_back(terms);
        rep.g.push_back(nd * s);
        rep.g_se.push_back(nd * std::sqrt(var));
        rep.g_indep.push_back(nd * static_cast<double>(terms) * marginal *
                              marginal);
    }
    return rep;
}

DPrimeReport dprime_sum(const JointExceedanceCounts& counts, std::uint64_t n,
                        std::span<const std::uint64_t> q_list) {
    std::vector<double> p(counts.joint.size());
    for (size_t j = 0; j < p.size(); ++j)
        p[j] = static_cast<double>(counts.joint[j]) /
               static_cast<double>(counts.n_traj);
    const double marginal = static_cast<double>(counts.base) /
                            static_cast<double>(counts.n_traj);
    return dprime_sum(p, n, q_list, counts.n_traj, marginal);
}

SpectralGapEstimate correlation_decay_fit(std::span<const double> joint,
                                          double marginal,
                                          std::uint64_t n_traj) {
    if (n_traj < 10000)
        throw InsufficientTrajectories("correlation fit: need >= 10^4 trajectories");
    if (!(marginal > 0.0 && marginal < 1.0))
        throw InvalidArgument("correlation fit: marginal must be in (0,1)");

    SpectralGapEstimate est;
    const double nt = static_cast<double>(n_traj);
    const double m2 = marginal * marginal;
    // Var(p_hat^2) by the delta method feeds the noise floor together with
    // the binomial error of each joint estimate.
    const double var_m2 =
        4.0 * m2 * marginal * (1.0 - marginal) / nt;

    std::vector<double> x, y, w;
    for (size_t idx = 0; idx < joint.size(); ++idx) {
        const double j = static_cast<double>(idx + 1);
        const double res = std::fabs(joint[idx] - m2);
        const double var_j =
            std::max(joint[idx], m2) * (1.0 - std::min(joint[idx], 1.0)) / nt;
        const double sigma = std::sqrt(var_j + var_m2);
        if (res <= 3.0 * sigma) continue;
        x.push_back(j);
        y.push_back(std::log(res / marginal));
        const double rel = sigma / res;
        w.push_back(1.0 / (rel * rel));
    }
    est.points_used = static_cast<int>(x.size());
    if (est.points_used < 10) {
        est.resolved = false;
        return est;
    }
    const WlsFit f = wls(x, y, w);
    est.lambda_hat = std::exp(f.b1);
    est.c0_hat = std::exp(f.b0);
    est.r2 = f.r2;
    est.resolved = est.lambda_hat > 0.0 && est.lambda_hat < 1.0;
    return est;
}

RecurrenceEstimate recurrence_prob(const GeneratorMeasure& m, int i_steps,
                                   double s, std::uint64_t trials,
                                   std::uint64_t master_seed,
                                   std::uint64_t trial_index0,
                                   std::uint32_t bits) {
    if (m.mode != WalkMode::torus)
        throw InvalidArgument("recurrence_prob is a torus-mode estimate");
    if (i_steps < 1) throw InvalidArgument("recurrence: steps must be >= 1");
    if (!(s >= 2.0)) throw InvalidArgument("recurrence: s must be >= 2");
    if (trials < 1) throw InvalidArgument("recurrence: trials must be >= 1");

    const double radius = 1.0 / s;
    RecurrenceEstimate est;
    est.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const SeedPlan sp{master_seed, trial_index0 + t};
        Philox init(sp, Substream::init);
        const TorusPoint x = random_torus_point(m.dim, bits, init);
        TorusPoint y = x;
        Philox steps(sp, Substream::steps);
        for (int i = 0; i < i_steps; ++i) {
            const size_t gi = m.sample_index(steps.next_unit());
            apply_automorphism(m.ielements[gi], y);
        }
        if (torus_distance(y, x) < radius) ++est.hits;
    }
    est.p_hat = static_cast<double>(est.hits) / static_cast<double>(trials);
    est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) /
                       static_cast<double>(trials));
    return est;
}

} // namespace evtwalk
