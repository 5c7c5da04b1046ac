#include "evtwalk/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "evtwalk/diagnostics.hpp"
#include "evtwalk/errors.hpp"
#include "evtwalk/evt.hpp"
#include "evtwalk/lattice.hpp"
#include "evtwalk/measure.hpp"
#include "evtwalk/parallel.hpp"
#include "evtwalk/philox.hpp"
#include "evtwalk/torus.hpp"
#include "evtwalk/version.hpp"
#include "evtwalk/walk.hpp"

namespace evtwalk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GeneratorMeasure build_measure(const ExperimentConfig& cfg) {
    const WalkMode wm =
        cfg.space == "torus" ? WalkMode::torus : WalkMode::lattice;
    return validate_measure(wm, cfg.d, cfg.generators, cfg.weights);
}

double resolved_k(const ExperimentConfig& cfg) {
    if (cfg.k_scale > 0.0) return cfg.k_scale;
    return cfg.space == "excursion" ? 1.0 : static_cast<double>(cfg.d);
}

std::string reals_to_text(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_cell(v[i], 'r');
    }
    return s;
}

std::string u64s_to_text(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::string ints_to_text(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

// Every knob is echoed whether or not the mode reads it, so a meta.txt can
// always be replayed into an identical run.
void push_meta(const ExperimentConfig& cfg, ExperimentResult& res) {
    auto add = [&](const char* k, std::string v) {
        res.meta.emplace_back(k, std::move(v));
    };
    add("version", EVTWALK_VERSION);
    add("mode", cfg.mode);
    add("space", cfg.space);
    add("d", std::to_string(cfg.d));
    add("bits", std::to_string(cfg.bits));
    add("generators", matrices_to_text(cfg.generators));
    add("weights", reals_to_text(cfg.weights));
    add("n", std::to_string(cfg.n));
    add("trajectories", std::to_string(cfg.trajectories));
    add("schedule", cfg.schedule);
    add("sparse_a", std::to_string(cfg.sparse_a));
    add("r_grid", reals_to_text(cfg.r_grid));
    add("z_grid", reals_to_text(cfg.z_grid));
    add("q_list", u64s_to_text(cfg.q_list));
    add("i_list", ints_to_text(cfg.i_list));
    add("s", format_cell(cfg.s, 'r'));
    add("trials", std::to_string(cfg.trials));
    add("n_samples", std::to_string(cfg.n_samples));
    add("seeds", std::to_string(cfg.seeds));
    add("j_max", std::to_string(cfg.j_max));
    add("r", format_cell(cfg.r, 'r'));
    add("marginal_target", format_cell(cfg.marginal_target, 'r'));
    add("lambda_hat", format_cell(cfg.lambda_hat, 'r'));
    add("c0_hat", format_cell(cfg.c0_hat, 'r'));
    add("w_hat", format_cell(cfg.w_hat, 'r'));
    add("k_scale", format_cell(cfg.k_scale, 'r'));
    add("upper_a", std::to_string(cfg.upper_a));
    add("lll_delta", format_cell(cfg.lll_delta, 'r'));
    add("renorm_every", std::to_string(cfg.renorm_every));
    add("burn_in", std::to_string(cfg.burn_in));
    add("seed", std::to_string(cfg.seed));
    add("threads", std::to_string(cfg.threads));
}

// Exact coincidence with the target makes delta infinite; that is the honest
// supremum, and +inf flows through maxima, CDFs and tails correctly.
double guarded_torus_delta(const TorusPoint& x, const TorusPoint& target) {
    try {
        return closest_return_delta(x, target);
    } catch (const InfiniteDelta&) {
        return std::numeric_limits<double>::infinity();
    }
}

template <class Visit>
void for_each_scheduled_index(const ExperimentConfig& cfg, Visit&& v) {
    if (cfg.schedule == "sparse") {
        for (std::uint64_t j = 0; j < cfg.n; ++j) v(j * cfg.sparse_a);
    } else if (cfg.schedule == "gap") {
        const MaxSchedule gs = gap_schedule_squares();
        const auto [alpha, beta] = gs.gap_window(cfg.n);
        for (std::uint64_t j = alpha; j < beta; ++j) v(gs.gap_m(j));
    } else {
        for (std::uint64_t j = 0; j < cfg.n; ++j) v(j);
    }
}

// Number of samples entering the max; the threshold u_n is scaled by this.
std::uint64_t scheduled_count(const ExperimentConfig& cfg) {
    if (cfg.schedule == "gap") {
        const auto [alpha, beta] = gap_schedule_squares().gap_window(cfg.n);
        return beta - alpha;
    }
    return cfg.n;
}

LatticeBasis initial_lattice(const ExperimentConfig& cfg,
                             const GeneratorMeasure& m, const SeedPlan& sp) {
    if (cfg.d == 2) return haar_sample_2d(sp);
    return burn_in_sample(m, cfg.burn_in, sp, cfg.lll_delta, cfg.renorm_every);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return kNaN;
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Largest singular value via power iteration on g^T g; deterministic start.
double operator_norm(const MatD& g) {
    const int d = g.n;
    std::array<double, kMaxDim> v{};
    for (int i = 0; i < d; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(d));
    double s = 0.0;
    for (int it = 0; it < 200; ++it) {
        std::array<double, kMaxDim> gv{}, w{};
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int j = 0; j < d; ++j) acc += g.at(i, j) * v[j];
            gv[i] = acc;
        }
        for (int j = 0; j < d; ++j) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) acc += g.at(i, j) * gv[i];
            w[j] = acc;
        }
        double norm = 0.0;
        for (int j = 0; j < d; ++j) norm += w[j] * w[j];
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (int j = 0; j < d; ++j) v[j] = w[j] / norm;
        s = norm; // converges to sigma_max^2
    }
    return std::sqrt(s);
}

// ---------------------------------------------------------------- evt modes

ExperimentResult run_evt(const ExperimentConfig& cfg) {
    const GeneratorMeasure m = build_measure(cfg);
    const bool torus = cfg.space == "torus";
    const bool excursion = cfg.space == "excursion";
    const ModularPoint cusp_base{0.0, 1.0};
    const std::uint64_t N = cfg.trajectories;

    std::vector<double> maxima(N);
    parallel_blocks(N, 64, cfg.threads,
                    [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            const SeedPlan sp{cfg.seed, t};
            double best = -std::numeric_limits<double>::infinity();
            if (torus) {
                Philox init(sp, Substream::init);
                const TorusPoint target =
                    random_torus_point(cfg.d, cfg.bits, init);
                TorusPoint x0 = random_torus_point(cfg.d, cfg.bits, init);
                TrajectoryStream<TorusAction> traj(
                    TorusAction{&m}, x0, Philox(sp, Substream::steps));
                for_each_scheduled_index(cfg, [&](std::uint64_t idx) {
                    while (traj.index() < idx) traj.advance();
                    best = std::max(
                        best, guarded_torus_delta(traj.state(), target));
                });
            } else {
                LatticeBasis x0 = initial_lattice(cfg, m, sp);
                LatticeAction act{&m, cfg.lll_delta, cfg.renorm_every};
                TrajectoryStream<LatticeAction> traj(
                    act, x0, Philox(sp, Substream::steps));
                for_each_scheduled_index(cfg, [&](std::uint64_t idx) {
                    while (traj.index() < idx) traj.advance();
                    const double dl =
                        excursion ? modular_distance(
                                        to_modular_point(traj.state()),
                                        cusp_base)
                                  : delta_shortest(traj.state());
                    best = std::max(best, dl);
                });
            }
            maxima[t] = best;
        }
    });

    const double k = resolved_k(cfg);
    const std::uint64_t count_n = scheduled_count(cfg);
    const bool gap = cfg.schedule == "gap";

    std::optional<LimitCurve> limit;
    std::optional<LimitCurve> upper;
    if (torus) {
        limit = gap ? gap_limit(k, ball_volume(cfg.d)) : torus_limit(cfg.d);
    } else if (!excursion) {
        const BallW bw = ball_volume_and_w(cfg.d);
        const double w_eff = std::isnan(cfg.w_hat) ? bw.w.value() : cfg.w_hat;
        LimitCurve c;
        c.kind = gap ? LimitCurve::Kind::gap_exact
                     : LimitCurve::Kind::lattice_lower;
        c.k = k;
        c.coef = w_eff;
        limit = c;
        if (!gap && !std::isnan(cfg.lambda_hat) && !std::isnan(cfg.c0_hat))
            upper = lattice_upper_limit(cfg.d, cfg.lambda_hat, cfg.c0_hat,
                                        w_eff, w_eff, cfg.upper_a);
    } else if (!std::isnan(cfg.w_hat)) {
        limit = gap ? gap_limit(k, cfg.w_hat)
                    : excursion_lower_limit(k, cfg.w_hat);
    }

    ExperimentResult res;
    push_meta(cfg, res);
    res.meta.emplace_back("k", format_cell(k, 'r'));
    res.meta.emplace_back("samples_per_max", std::to_string(count_n));
    if (limit) {
        res.meta.emplace_back("limit_coef", format_cell(limit->coef, 'r'));
        res.meta.emplace_back(
            "limit_kind",
            gap ? "gap_exact"
                : (torus ? "torus_exact"
                         : (excursion ? "excursion_lower" : "lattice_lower")));
    }
    if (upper) {
        const BallW bw = ball_volume_and_w(cfg.d);
        const double w_eff = std::isnan(cfg.w_hat) ? bw.w.value() : cfg.w_hat;
        const UpperCoefficientForms forms = upper_coefficient(
            cfg.lambda_hat, cfg.c0_hat, w_eff, w_eff, cfg.upper_a);
        res.meta.emplace_back("upper_theta", format_cell(forms.theta, 'r'));
        res.meta.emplace_back("upper_w_a", format_cell(forms.w_a, 'r'));
    }

    ResultTable tab;
    tab.name = "evt_cdf";
    tab.columns = {"r", "u_n", "f_hat", "se", "count", "n_traj",
                   "f_limit", "f_upper"};
    tab.kinds = "rrrriirr";
    for (double r : cfg.r_grid) {
        const double u = scaling_u(ScalingSequence{r, k}, count_n);
        const EcdfPoint p = empirical_cdf(maxima, u);
        tab.rows.push_back({r, u, p.fraction, p.se,
                            static_cast<double>(p.count),
                            static_cast<double>(p.n),
                            limit ? (*limit)(r) : kNaN,
                            upper ? (*upper)(r) : kNaN});
    }
    res.tables.push_back(std::move(tab));
    return res;
}

// --------------------------------------------------------------------- tail

ExperimentResult run_tail(const ExperimentConfig& cfg) {
    const GeneratorMeasure m = build_measure(cfg);
    const bool torus = cfg.space == "torus";
    const bool excursion = cfg.space == "excursion";
    const std::uint64_t N = cfg.n_samples;

    std::vector<double> samples(N);
    parallel_blocks(N, 4096, cfg.threads,
                    [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            const SeedPlan sp{cfg.seed, t};
            if (torus) {
                Philox rng(sp, Substream::init);
                const TorusPoint x = random_torus_point(cfg.d, cfg.bits, rng);
                const TorusPoint y = random_torus_point(cfg.d, cfg.bits, rng);
                samples[t] = guarded_torus_delta(x, y);
            } else {
                const LatticeBasis b = initial_lattice(cfg, m, sp);
                samples[t] =
                    excursion
                        ? modular_distance(to_modular_point(b),
                                           ModularPoint{0.0, 1.0})
                        : delta_shortest(b);
            }
        }
    });

    ExperimentResult res;
    push_meta(cfg, res);

    const std::vector<TailPoint> curve = tail_curve(samples, cfg.z_grid);
    std::optional<double> w_coef;
    if (!torus && !excursion) w_coef = ball_volume_and_w(cfg.d).w.value();

    ResultTable tc;
    tc.name = "tail_curve";
    tc.columns = {"z", "count", "phi_hat", "se", "phi_model"};
    tc.kinds = "rirrr";
    for (const TailPoint& p : curve) {
        double model = kNaN;
        if (torus) {
            if (p.z >= std::log(2.0) - 1e-12)
                model = exact_torus_tail(p.z, cfg.d);
        } else if (w_coef && p.z >= 0.0) {
            model = *w_coef * std::exp(-cfg.d * p.z);
        }
        tc.rows.push_back({p.z, static_cast<double>(p.count), p.phi_hat,
                           p.se, model});
    }
    res.tables.push_back(std::move(tc));

    try {
        const TailFit f = tail_estimate_and_fit(samples, cfg.z_grid);
        ResultTable tf;
        tf.name = "tail_fit";
        tf.columns = {"k_hat", "v1_hat", "v2_hat", "r2", "points_used",
                      "z_lo", "z_hi", "n_samples"};
        tf.kinds = "rrrrirri";
        tf.rows.push_back({f.k_hat, f.v1_hat, f.v2_hat, f.r2,
                           static_cast<double>(f.points_used), f.z_lo, f.z_hi,
                           static_cast<double>(f.n_samples)});
        res.tables.push_back(std::move(tf));
    } catch (const InsufficientExceedances& e) {
        res.meta.emplace_back("tail_fit_skipped", e.what());
    }
    return res;
}

// ------------------------------------------------------- joint exceedances

JointExceedanceCounts count_joint_exceedances(const ExperimentConfig& cfg,
                                              const GeneratorMeasure& m,
                                              double u, std::uint64_t jmax) {
    const bool torus = cfg.space == "torus";
    const std::uint64_t N = cfg.trajectories;
    const std::uint64_t block = 256;
    const std::uint64_t n_blocks = (N + block - 1) / block;
    std::vector<JointExceedanceCounts> parts(n_blocks);

    parallel_blocks(N, block, cfg.threads,
                    [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
        JointExceedanceCounts& c = parts[b];
        c.joint.assign(jmax, 0);
        for (std::uint64_t t = lo; t < hi; ++t) {
            const SeedPlan sp{cfg.seed, t};
            ++c.n_traj;
            if (torus) {
                Philox init(sp, Substream::init);
                const TorusPoint target =
                    random_torus_point(cfg.d, cfg.bits, init);
                TorusPoint x0 = random_torus_point(cfg.d, cfg.bits, init);
                // trajectories that miss at time 0 contribute nothing beyond
                // n_traj, so the walk itself is skipped
                if (!(guarded_torus_delta(x0, target) > u)) continue;
                ++c.base;
                TrajectoryStream<TorusAction> traj(
                    TorusAction{&m}, x0, Philox(sp, Substream::steps));
                for (std::uint64_t j = 1; j <= jmax; ++j) {
                    traj.advance();
                    if (guarded_torus_delta(traj.state(), target) > u)
                        ++c.joint[j - 1];
                }
            } else {
                LatticeBasis x0 = initial_lattice(cfg, m, sp);
                if (!(delta_shortest(x0) > u)) continue;
                ++c.base;
                LatticeAction act{&m, cfg.lll_delta, cfg.renorm_every};
                TrajectoryStream<LatticeAction> traj(
                    act, x0, Philox(sp, Substream::steps));
                for (std::uint64_t j = 1; j <= jmax; ++j) {
                    traj.advance();
                    if (delta_shortest(traj.state()) > u) ++c.joint[j - 1];
                }
            }
        }
    });

    JointExceedanceCounts total;
    total.joint.assign(jmax, 0);
    for (const JointExceedanceCounts& p : parts) total.merge(p);
    return total;
}

double marginal_model_at(const ExperimentConfig& cfg, double u) {
    if (cfg.space == "torus") {
        if (u >= std::log(2.0) - 1e-12) return exact_torus_tail(u, cfg.d);
        return kNaN;
    }
    if (cfg.space == "lattice" && u >= 0.0) {
        return ball_volume_and_w(cfg.d).w.value() * std::exp(-cfg.d * u);
    }
    return kNaN;
}

ExperimentResult run_dprime(const ExperimentConfig& cfg) {
    const GeneratorMeasure m = build_measure(cfg);
    const double k = static_cast<double>(cfg.d);
    const double u = scaling_u(ScalingSequence{cfg.r, k}, cfg.n);
    const std::uint64_t qmin =
        *std::min_element(cfg.q_list.begin(), cfg.q_list.end());
    const std::uint64_t jmax = cfg.n / qmin;

    const JointExceedanceCounts total =
        count_joint_exceedances(cfg, m, u, jmax);
    const DPrimeReport rep = dprime_sum(total, cfg.n, cfg.q_list);
    const double marginal_hat =
        static_cast<double>(total.base) / static_cast<double>(total.n_traj);
    const double marginal_model = marginal_model_at(cfg, u);

    ExperimentResult res;
    push_meta(cfg, res);
    res.meta.emplace_back("u", format_cell(u, 'r'));
    res.meta.emplace_back("lags", std::to_string(jmax));
    res.meta.emplace_back("base_exceedances", std::to_string(total.base));
    res.meta.emplace_back("marginal_hat", format_cell(marginal_hat, 'r'));
    res.meta.emplace_back("marginal_model",
                          format_cell(marginal_model, 'r'));

    ResultTable tab;
    tab.name = "dprime";
    tab.columns = {"q", "terms", "g", "g_se", "g_indep", "g_model"};
    tab.kinds = "iirrrr";
    for (std::size_t i = 0; i < rep.q.size(); ++i) {
        const double g_model =
            std::isnan(marginal_model)
                ? kNaN
                : static_cast<double>(cfg.n) *
                      static_cast<double>(rep.terms[i]) * marginal_model *
                      marginal_model;
        tab.rows.push_back({static_cast<double>(rep.q[i]),
                            static_cast<double>(rep.terms[i]), rep.g[i],
                            rep.g_se[i], rep.g_indep[i], g_model});
    }
    res.tables.push_back(std::move(tab));
    return res;
}

// --------------------------------------------------------------------- corr

ExperimentResult run_corr(const ExperimentConfig& cfg) {
    const GeneratorMeasure m = build_measure(cfg);
    const bool torus = cfg.space == "torus";
    const double k = static_cast<double>(cfg.d);
    const double coef =
        torus ? ball_volume(cfg.d) : ball_volume_and_w(cfg.d).w.value();
    // threshold with exact exceedance probability marginal_target
    const double u = std::log(coef / cfg.marginal_target) / k;

    const JointExceedanceCounts total =
        count_joint_exceedances(cfg, m, u, cfg.j_max);
    const double n_traj = static_cast<double>(total.n_traj);
    const double marginal_hat = static_cast<double>(total.base) / n_traj;

    std::vector<double> joint_p(total.joint.size());
    for (std::size_t j = 0; j < joint_p.size(); ++j)
        joint_p[j] = static_cast<double>(total.joint[j]) / n_traj;

    const SpectralGapEstimate fit =
        correlation_decay_fit(joint_p, marginal_hat, total.n_traj);

    ExperimentResult res;
    push_meta(cfg, res);
    res.meta.emplace_back("u", format_cell(u, 'r'));
    res.meta.emplace_back("marginal_hat", format_cell(marginal_hat, 'r'));

    ResultTable curve;
    curve.name = "corr_curve";
    curve.columns = {"j", "count", "joint_p", "indep_p", "excess"};
    curve.kinds = "iirrr";
    for (std::size_t j = 0; j < joint_p.size(); ++j) {
        curve.rows.push_back({static_cast<double>(j + 1),
                              static_cast<double>(total.joint[j]), joint_p[j],
                              marginal_hat * marginal_hat,
                              joint_p[j] - marginal_hat * marginal_hat});
    }
    res.tables.push_back(std::move(curve));

    ResultTable ft;
    ft.name = "corr_fit";
    ft.columns = {"lambda_hat", "c0_hat", "r2", "resolved", "points_used",
                  "marginal_hat", "u"};
    ft.kinds = "rrriirr";
    ft.rows.push_back({fit.lambda_hat, fit.c0_hat, fit.r2,
                       fit.resolved ? 1.0 : 0.0,
                       static_cast<double>(fit.points_used), marginal_hat, u});
    res.tables.push_back(std::move(ft));
    return res;
}

// --------------------------------------------------------------- recurrence

ExperimentResult run_recurrence(const ExperimentConfig& cfg) {
    const GeneratorMeasure m = build_measure(cfg);
    const double vd = ball_volume(cfg.d);
    double t_norm = 0.0;
    for (const MatD& g : m.elements)
        t_norm = std::max(t_norm, operator_norm(g));
    const double equi = vd * std::pow(cfg.s, -cfg.d);

    ExperimentResult res;
    push_meta(cfg, res);
    res.meta.emplace_back("generator_norm", format_cell(t_norm, 'r'));
    res.meta.emplace_back("equidistributed_p", format_cell(equi, 'r'));

    ResultTable tab;
    tab.name = "recurrence";
    tab.columns = {"i", "trials", "hits", "p_hat", "se", "equi",
                   "m1_scale", "m2_model"};
    tab.kinds = "iiirrrrr";

    const std::uint64_t block = 4096;
    for (std::size_t ii = 0; ii < cfg.i_list.size(); ++ii) {
        const int i = cfg.i_list[ii];
        const std::uint64_t n_blocks = (cfg.trials + block - 1) / block;
        std::vector<std::uint64_t> parts(n_blocks, 0);
        parallel_blocks(cfg.trials, block, cfg.threads,
                        [&](std::uint64_t b, std::uint64_t lo,
                            std::uint64_t hi) {
            const RecurrenceEstimate e = recurrence_prob(
                m, i, cfg.s, hi - lo, cfg.seed,
                static_cast<std::uint64_t>(ii) * cfg.trials + lo, cfg.bits);
            parts[b] = e.hits;
        });
        std::uint64_t hits = 0;
        for (std::uint64_t h : parts) hits += h;
        const double trials = static_cast<double>(cfg.trials);
        const double p_hat = static_cast<double>(hits) / trials;
        const double se = std::sqrt(
            std::max(0.0, p_hat * (1.0 - p_hat) / trials));
        // indicative scales of the two bounds: geometric-growth counting
        // (norm^(d^2 i) / s^d, constants dropped) and equidistribution plus
        // correlation decay (needs fitted lambda, c0)
        const double m1 = std::exp(
            static_cast<double>(cfg.d) * cfg.d * i * std::log(t_norm) -
            cfg.d * std::log(cfg.s));
        const double m2 =
            (!std::isnan(cfg.lambda_hat) && !std::isnan(cfg.c0_hat))
                ? equi + cfg.c0_hat * std::pow(cfg.lambda_hat, i)
                : kNaN;
        tab.rows.push_back({static_cast<double>(i), trials,
                            static_cast<double>(hits), p_hat, se, equi, m1,
                            m2});
    }
    res.tables.push_back(std::move(tab));
    return res;
}

// ------------------------------------------------------------------- loglaw

ExperimentResult run_loglaw(const ExperimentConfig& cfg) {
    const GeneratorMeasure m = build_measure(cfg);
    const bool torus = cfg.space == "torus";
    const bool excursion = cfg.space == "excursion";
    const std::vector<std::uint64_t> cps = loglaw_checkpoints(cfg.n);
    const std::uint64_t S = cfg.seeds;
    const ModularPoint cusp_base{0.0, 1.0};

    std::vector<std::vector<double>> stats(S);
    parallel_blocks(S, 1, cfg.threads,
                    [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t t = lo; t < hi; ++t) {
            const SeedPlan sp{cfg.seed, t};
            if (torus) {
                Philox init(sp, Substream::init);
                const TorusPoint target =
                    random_torus_point(cfg.d, cfg.bits, init);
                TorusPoint x0 = random_torus_point(cfg.d, cfg.bits, init);
                TrajectoryStream<TorusAction> traj(
                    TorusAction{&m}, x0, Philox(sp, Substream::steps));
                auto delta_at = [&](std::uint64_t i) {
                    while (traj.index() < i) traj.advance();
                    return guarded_torus_delta(traj.state(), target);
                };
                stats[t] = loglaw_estimate(delta_at, cps).stat;
            } else {
                LatticeBasis x0 = initial_lattice(cfg, m, sp);
                LatticeAction act{&m, cfg.lll_delta, cfg.renorm_every};
                TrajectoryStream<LatticeAction> traj(
                    act, x0, Philox(sp, Substream::steps));
                auto delta_at = [&](std::uint64_t i) {
                    while (traj.index() < i) traj.advance();
                    return excursion
                               ? modular_distance(
                                     to_modular_point(traj.state()),
                                     cusp_base)
                               : delta_shortest(traj.state());
                };
                stats[t] = loglaw_estimate(delta_at, cps).stat;
            }
        }
    });

    ExperimentResult res;
    push_meta(cfg, res);
    res.meta.emplace_back("checkpoints", u64s_to_text(cps));
    res.meta.emplace_back("expected_limit",
                          format_cell(1.0 / resolved_k(cfg), 'r'));

    ResultTable longtab;
    longtab.name = "loglaw";
    longtab.columns = {"seed", "n", "stat"};
    longtab.kinds = "iir";
    for (std::uint64_t t = 0; t < S; ++t)
        for (std::size_t c = 0; c < cps.size(); ++c)
            longtab.rows.push_back({static_cast<double>(t),
                                    static_cast<double>(cps[c]),
                                    stats[t][c]});
    res.tables.push_back(std::move(longtab));

    ResultTable sum;
    sum.name = "loglaw_summary";
    sum.columns = {"n", "median", "min", "max"};
    sum.kinds = "irrr";
    for (std::size_t c = 0; c < cps.size(); ++c) {
        std::vector<double> col(S);
        for (std::uint64_t t = 0; t < S; ++t) col[t] = stats[t][c];
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        const double lo = *mn, hi = *mx;
        sum.rows.push_back({static_cast<double>(cps[c]), median_of(col),
                            lo, hi});
    }
    res.tables.push_back(std::move(sum));
    return res;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.mode == "torus-evt" || cfg.mode == "lattice-evt" ||
        cfg.mode == "excursion-evt")
        return run_evt(cfg);
    if (cfg.mode == "tail") return run_tail(cfg);
    if (cfg.mode == "dprime") return run_dprime(cfg);
    if (cfg.mode == "corr") return run_corr(cfg);
    if (cfg.mode == "recurrence") return run_recurrence(cfg);
    if (cfg.mode == "loglaw") return run_loglaw(cfg);
    throw ConfigError("unknown mode '" + cfg.mode + "'");
}

} // namespace evtwalk
