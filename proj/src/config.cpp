#include "evtwalk/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "evtwalk/errors.hpp"
#include "evtwalk/evt.hpp"

namespace evtwalk {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string normalize_key(const std::string& raw) {
    std::string k;
    k.reserve(raw.size());
    for (char c : raw) {
        if (c == '-') {
            k.push_back('_');
        } else {
            k.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return k;
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v +
                          "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-')
            throw std::invalid_argument(v);
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key +
                          "': expected a nonnegative integer, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v +
                          "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    std::string w = normalize_key(v);
    if (w == "true" || w == "1" || w == "yes" || w == "on") return true;
    if (w == "false" || w == "0" || w == "no" || w == "off") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<double> parse_real_list(const std::string& key,
                                    const std::string& v) {
    std::vector<double> out;
    for (const std::string& tok : split(v, ','))
        out.push_back(parse_real(key, trim(tok)));
    return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key,
                                          const std::string& v) {
    std::vector<std::uint64_t> out;
    for (const std::string& tok : split(v, ','))
        out.push_back(parse_u64(key, trim(tok)));
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const std::string& tok : split(v, ','))
        out.push_back(parse_int(key, trim(tok)));
    return out;
}

} // namespace

std::vector<MatD> parse_matrices(const std::string& text) {
    std::vector<MatD> out;
    for (const std::string& mtext : split(text, '|')) {
        std::vector<std::vector<double>> rows;
        for (const std::string& rtext : split(mtext, ';')) {
            std::vector<double> row;
            for (const std::string& tok : split(rtext, ','))
                row.push_back(parse_real("generators", trim(tok)));
            rows.push_back(row);
        }
        std::size_t n = rows.size();
        if (n == 0 || n > kMaxDim)
            throw ConfigError("generators: matrix must be 1x1 up to " +
                              std::to_string(kMaxDim) + "x" +
                              std::to_string(kMaxDim));
        MatD m;
        m.n = static_cast<int>(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n)
                throw ConfigError("generators: matrix rows must all have " +
                                  std::to_string(n) + " entries");
            for (std::size_t j = 0; j < n; ++j) m.at(static_cast<int>(i),
                                                     static_cast<int>(j)) =
                rows[i][j];
        }
        out.push_back(m);
    }
    return out;
}

std::string matrices_to_text(const std::vector<MatD>& ms) {
    std::ostringstream os;
    for (std::size_t g = 0; g < ms.size(); ++g) {
        if (g) os << '|';
        for (int i = 0; i < ms[g].n; ++i) {
            if (i) os << ';';
            for (int j = 0; j < ms[g].n; ++j) {
                if (j) os << ',';
                os << format_cell(ms[g].at(i, j), 'r');
            }
        }
    }
    return os.str();
}

ExperimentConfig default_config(const std::string& mode) {
    ExperimentConfig cfg;
    cfg.mode = mode;
    if (mode == "torus-evt") {
        cfg.space = "torus";
        cfg.schedule = "full";
        cfg.n = 4096;
        cfg.trajectories = 20000;
    } else if (mode == "lattice-evt") {
        cfg.space = "lattice";
        cfg.schedule = "sparse";
        cfg.sparse_a = 8;
        cfg.n = 2048;
        cfg.trajectories = 20000;
    } else if (mode == "excursion-evt") {
        cfg.space = "excursion";
        cfg.schedule = "sparse";
        cfg.sparse_a = 8;
        cfg.n = 2048;
        cfg.trajectories = 20000;
    } else if (mode == "tail") {
        cfg.space = "torus";
        cfg.n_samples = 1000000;
    } else if (mode == "dprime") {
        cfg.space = "torus";
        cfg.n = 4096;
        cfg.trajectories = 20000;
        cfg.q_list = {2, 4, 8, 16};
        cfg.r = 0.0;
    } else if (mode == "corr") {
        cfg.space = "torus";
        cfg.trajectories = 200000;
        cfg.j_max = 32;
        cfg.marginal_target = 0.05;
    } else if (mode == "recurrence") {
        cfg.space = "torus";
        cfg.i_list = {1, 2, 3, 4, 6, 8, 10, 12};
        cfg.s = 10.0;
        cfg.trials = 200000;
    } else if (mode == "loglaw") {
        cfg.space = "torus";
        cfg.n = 1000000;
        cfg.seeds = 64;
    } else {
        throw ConfigError("unknown mode '" + mode + "'");
    }
    return cfg;
}

void apply_key(ExperimentConfig& cfg, const std::string& raw_key,
               const std::string& raw_value) {
    std::string key = normalize_key(trim(raw_key));
    std::string v = trim(raw_value);
    if (key == "d") cfg.d = parse_int(key, v);
    else if (key == "bits") cfg.bits = static_cast<std::uint32_t>(parse_u64(key, v));
    else if (key == "space") cfg.space = normalize_key(v);
    else if (key == "generators") cfg.generators = parse_matrices(v);
    else if (key == "weights") cfg.weights = parse_real_list(key, v);
    else if (key == "n") cfg.n = parse_u64(key, v);
    else if (key == "trajectories") cfg.trajectories = parse_u64(key, v);
    else if (key == "schedule") cfg.schedule = normalize_key(v);
    else if (key == "sparse_a") cfg.sparse_a = parse_u64(key, v);
    else if (key == "r_grid") cfg.r_grid = parse_real_list(key, v);
    else if (key == "z_grid") cfg.z_grid = parse_real_list(key, v);
    else if (key == "q_list") cfg.q_list = parse_u64_list(key, v);
    else if (key == "i_list") cfg.i_list = parse_int_list(key, v);
    else if (key == "s") cfg.s = parse_real(key, v);
    else if (key == "trials") cfg.trials = parse_u64(key, v);
    else if (key == "n_samples") cfg.n_samples = parse_u64(key, v);
    else if (key == "seeds") cfg.seeds = parse_u64(key, v);
    else if (key == "j_max") cfg.j_max = parse_u64(key, v);
    else if (key == "r") cfg.r = parse_real(key, v);
    else if (key == "marginal_target") cfg.marginal_target = parse_real(key, v);
    else if (key == "lambda_hat") cfg.lambda_hat = parse_real(key, v);
    else if (key == "c0_hat") cfg.c0_hat = parse_real(key, v);
    else if (key == "w_hat") cfg.w_hat = parse_real(key, v);
    else if (key == "k_scale") cfg.k_scale = parse_real(key, v);
    else if (key == "upper_a") cfg.upper_a = parse_u64(key, v);
    else if (key == "lll_delta") cfg.lll_delta = parse_real(key, v);
    else if (key == "renorm_every") cfg.renorm_every = parse_int(key, v);
    else if (key == "burn_in") cfg.burn_in = parse_u64(key, v);
    else if (key == "seed") cfg.seed = parse_u64(key, v);
    else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_u64(key, v));
    else if (key == "output_dir") cfg.output_dir = v;
    else if (key == "force") cfg.force = parse_bool(key, v);
    else throw ConfigError("unknown key '" + key + "'");
}

namespace {

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        try {
            apply_key(cfg, t.substr(0, eq), t.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " +
                              e.what());
        }
    }
}

// Sparse geometric checkpoint ladder 10, 30, 100, ... capped at n, with n kept
// as the final checkpoint so the long-run statistic lands exactly at n.
std::vector<std::uint64_t> loglaw_ladder(std::uint64_t n) {
    std::vector<std::uint64_t> cps;
    std::uint64_t base = 10;
    bool three = false;
    std::uint64_t cp = 10;
    while (cp < n) {
        cps.push_back(cp);
        if (three) {
            base *= 10;
            cp = base;
        } else {
            cp = 3 * base;
        }
        three = !three;
    }
    cps.push_back(n);
    if (cps.size() >= 10) return cps;
    // short horizons: densify to a 1-2-3-5 ladder so the estimator's
    // 10-checkpoint floor is still met (n >= 10^4 guarantees >= 13 entries)
    cps.clear();
    static constexpr std::uint64_t steps[] = {10, 20, 30, 50};
    for (std::uint64_t scale = 1;; scale *= 10)
        for (std::uint64_t s : steps) {
            const std::uint64_t v = scale * s;
            if (v >= n) {
                cps.push_back(n);
                return cps;
            }
            cps.push_back(v);
        }
}

std::vector<double> default_z_grid(const std::string& space, int d) {
    std::vector<double> z;
    if (space == "torus") {
        z = {1.2, std::log(4.0), 1.6, 1.8, std::log(8.0),
             2.3, 2.5, std::log(16.0), 3.0};
    } else if (space == "lattice") {
        if (d == 2) {
            z = {1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
        } else {
            // keep roughly 1e2..1e5 exceedances per point at 1e6 samples
            double hi = std::log(1.0e4) / d + 0.3;
            double lo = hi - 1.5;
            for (int i = 0; i < 7; ++i) z.push_back(lo + i * (hi - lo) / 6.0);
        }
    } else { // excursion
        z = {2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5};
    }
    return z;
}

} // namespace

void validate_config(ExperimentConfig& cfg) {
    const std::string& mode = cfg.mode;
    bool evt_mode = mode == "torus-evt" || mode == "lattice-evt" ||
                    mode == "excursion-evt";

    if (cfg.space != "torus" && cfg.space != "lattice" &&
        cfg.space != "excursion")
        throw ConfigError("space must be torus, lattice, or excursion");
    if (mode == "torus-evt" && cfg.space != "torus")
        throw ConfigError("torus-evt runs on space=torus");
    if (mode == "lattice-evt" && cfg.space != "lattice")
        throw ConfigError("lattice-evt runs on space=lattice");
    if (mode == "excursion-evt" && cfg.space != "excursion")
        throw ConfigError("excursion-evt runs on space=excursion");
    if ((mode == "recurrence" || mode == "corr" || mode == "dprime") &&
        cfg.space == "excursion")
        throw ConfigError(mode + " supports space=torus or space=lattice");
    if (mode == "recurrence" && cfg.space != "torus")
        throw ConfigError("recurrence runs on space=torus");

    bool torus_like = cfg.space == "torus";
    int dmin = torus_like ? 1 : 2;
    if (cfg.d < dmin || cfg.d > kMaxDim)
        throw ConfigError("d must be in [" + std::to_string(dmin) + ", " +
                          std::to_string(kMaxDim) + "]");
    if (cfg.space == "excursion" && cfg.d != 2)
        throw ConfigError("excursion space requires d=2");
    if (cfg.bits < 1 || cfg.bits > 64)
        throw ConfigError("bits must be in [1, 64]");
    if (cfg.n < 1) throw ConfigError("n must be positive");
    if (cfg.trajectories < 1) throw ConfigError("trajectories must be positive");
    if (evt_mode) {
        if (cfg.schedule != "full" && cfg.schedule != "sparse" &&
            cfg.schedule != "gap")
            throw ConfigError("schedule must be full, sparse, or gap");
        if (cfg.schedule == "sparse" && cfg.sparse_a < 1)
            throw ConfigError("sparse_a must be positive");
        if (cfg.r_grid.empty())
            cfg.r_grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
    }
    if (mode == "tail") {
        if (cfg.n_samples < 1) throw ConfigError("n_samples must be positive");
        if (cfg.z_grid.empty()) cfg.z_grid = default_z_grid(cfg.space, cfg.d);
        for (double z : cfg.z_grid)
            if (!std::isfinite(z)) throw ConfigError("z_grid must be finite");
    }
    if (mode == "dprime") {
        if (cfg.q_list.empty()) throw ConfigError("q_list must be nonempty");
        for (std::uint64_t q : cfg.q_list)
            if (q < 1 || q > cfg.n)
                throw ConfigError("q_list entries must be in [1, n]");
    }
    if (mode == "corr") {
        if (cfg.j_max < 1) throw ConfigError("j_max must be positive");
        // torus: target radius must stay below 1/2; lattice: threshold u >= 0
        double cap = torus_like
                         ? ball_volume(cfg.d) * std::pow(2.0, -cfg.d)
                         : ball_volume_and_w(cfg.d).w.value();
        if (!(cfg.marginal_target > 0.0 && cfg.marginal_target <= cap))
            throw ConfigError("marginal_target must be in (0, " +
                              format_cell(cap, 'r') + "] for this space");
    }
    if (mode == "recurrence") {
        if (cfg.i_list.empty()) throw ConfigError("i_list must be nonempty");
        for (int i : cfg.i_list)
            if (i < 1) throw ConfigError("i_list entries must be positive");
        if (!(cfg.s >= 2.0)) throw ConfigError("s must be at least 2");
        if (cfg.trials < 1) throw ConfigError("trials must be positive");
    }
    if (mode == "loglaw") {
        if (cfg.seeds < 1) throw ConfigError("seeds must be positive");
        if (cfg.n < 10000)
            throw ConfigError("loglaw needs n >= 10000 for a usable "
                              "checkpoint ladder");
    }
    if (!(cfg.lll_delta > 0.25 && cfg.lll_delta < 1.0))
        throw ConfigError("lll_delta must lie in (0.25, 1)");
    if (cfg.renorm_every < 0)
        throw ConfigError("renorm_every must be nonnegative");
    if (cfg.space != "torus" && cfg.d > 2 && cfg.burn_in < 1)
        throw ConfigError("burn_in must be positive for lattice walks in d>2");
    if (!std::isnan(cfg.lambda_hat) &&
        !(cfg.lambda_hat > 0.0 && cfg.lambda_hat < 1.0))
        throw ConfigError("lambda_hat must lie in (0, 1)");
    if (cfg.upper_a < 1) throw ConfigError("upper_a must be positive");
    if (cfg.k_scale < 0.0) throw ConfigError("k_scale must be nonnegative");

    // generator measure; empty selection falls back to the documented defaults
    WalkMode wm = torus_like ? WalkMode::torus : WalkMode::lattice;
    if (cfg.generators.empty()) {
        GeneratorMeasure gm = default_measure(wm, cfg.d);
        cfg.generators = gm.elements;
        if (cfg.weights.empty()) cfg.weights = gm.weights;
    }
    if (cfg.weights.empty())
        cfg.weights.assign(cfg.generators.size(),
                           1.0 / static_cast<double>(cfg.generators.size()));
    try {
        GeneratorMeasure gm =
            validate_measure(wm, cfg.d, cfg.generators, cfg.weights);
        cfg.weights = gm.weights;
    } catch (const Error& e) {
        // structural problems in a user-supplied measure are config errors
        throw ConfigError(e.what());
    }
}

ExperimentConfig
parse_config(const std::string& mode, const std::string& config_file,
             const std::vector<std::pair<std::string, std::string>>& overrides) {
    ExperimentConfig cfg = default_config(mode);
    if (!config_file.empty()) load_config_file(cfg, config_file);
    if (const char* env = std::getenv("EVTWALK_SEED")) {
        std::string v = trim(env);
        if (!v.empty()) cfg.seed = parse_u64("EVTWALK_SEED", v);
    }
    for (const auto& kv : overrides) apply_key(cfg, kv.first, kv.second);
    validate_config(cfg);
    return cfg;
}

std::vector<std::uint64_t> loglaw_checkpoints(std::uint64_t n) {
    return loglaw_ladder(n);
}

} // namespace evtwalk
