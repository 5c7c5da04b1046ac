#include "evtwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace evtwalk {

namespace {

double row_dot(const LatticeBasis& b, int i, int j) {
    double s = 0.0;
    for (int k = 0; k < b.dim(); ++k) s += b.at(i, k) * b.at(j, k);
    return s;
}

// Gram-Schmidt: bstar holds the orthogonalized rows, mu the coefficients.
struct Gs {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> bstar{};
    std::array<double, kMaxDim * kMaxDim> mu{};
    std::array<double, kMaxDim> norm2{}; // |bstar_i|^2

    double& bs(int i, int k) { return bstar[static_cast<size_t>(i) * n + k]; }
    double bs(int i, int k) const { return bstar[static_cast<size_t>(i) * n + k]; }
    double& m(int i, int j) { return mu[static_cast<size_t>(i) * n + j]; }
    double m(int i, int j) const { return mu[static_cast<size_t>(i) * n + j]; }
};

Gs gram_schmidt(const LatticeBasis& b) {
    Gs g;
    g.n = b.dim();
    for (int i = 0; i < g.n; ++i) {
        for (int k = 0; k < g.n; ++k) g.bs(i, k) = b.at(i, k);
        for (int j = 0; j < i; ++j) {
            double d = 0.0;
            for (int k = 0; k < g.n; ++k) d += b.at(i, k) * g.bs(j, k);
            const double mu = g.norm2[j] > 0.0 ? d / g.norm2[j] : 0.0;
            g.m(i, j) = mu;
            for (int k = 0; k < g.n; ++k) g.bs(i, k) -= mu * g.bs(j, k);
        }
        double n2 = 0.0;
        for (int k = 0; k < g.n; ++k) n2 += g.bs(i, k) * g.bs(i, k);
        g.norm2[i] = n2;
    }
    return g;
}

void check_condition(const LatticeBasis& b, const Gs& g) {
    double max_row = 0.0, min_star = std::numeric_limits<double>::infinity();
    for (int i = 0; i < b.dim(); ++i) {
        max_row = std::max(max_row, row_dot(b, i, i));
        min_star = std::min(min_star, g.norm2[i]);
    }
    if (!(min_star > 0.0) || max_row / min_star > 1e24)
        throw IllConditioned("lattice basis condition number exceeds 1e12");
}

} // namespace

LatticeBasis lattice_identity(int d) {
    if (d < 1 || d > kMaxDim) throw InvalidArgument("lattice: bad dimension");
    LatticeBasis b;
    b.rows = mat_identity(d);
    return b;
}

double basis_det(const LatticeBasis& b) { return mat_det(b.rows); }

void renormalize_det(LatticeBasis& b) {
    // reductions may swap rows, so only |det| is pinned to 1
    const double det = std::fabs(basis_det(b));
    if (det < 1e-3)
        throw DetCollapsed("basis determinant collapsed below 1e-3");
    if (std::fabs(det - 1.0) > 1e-3)
        throw DetDrifted("basis determinant drifted more than 1e-3 from 1");
    const double scale = std::exp(-std::log(det) / b.dim());
    for (int i = 0; i < b.dim(); ++i)
        for (int k = 0; k < b.dim(); ++k) b.at(i, k) *= scale;
}

void gauss_reduce(LatticeBasis& b) {
    if (b.dim() != 2) throw InvalidArgument("gauss_reduce needs d = 2");
    for (int iter = 0; iter < 1000; ++iter) {
        double n0 = row_dot(b, 0, 0), n1 = row_dot(b, 1, 1);
        if (!(n0 > 0.0) || !(n1 > 0.0))
            throw IllConditioned("gauss reduction hit a zero-length row");
        if (n0 > n1) {
            for (int k = 0; k < 2; ++k) std::swap(b.at(0, k), b.at(1, k));
            std::swap(n0, n1);
        }
        const double r = std::nearbyint(row_dot(b, 0, 1) / n0);
        if (r != 0.0)
            for (int k = 0; k < 2; ++k) b.at(1, k) -= r * b.at(0, k);
        if (row_dot(b, 1, 1) >= n0) return;
    }
    throw IllConditioned("gauss reduction failed to terminate");
}

void lll_reduce(LatticeBasis& b, double delta) {
    const int n = b.dim();
    if (n < 2 || n > kMaxDim) throw InvalidArgument("lll_reduce needs 2 <= d <= 8");
    if (!(delta > 0.25 && delta < 1.0))
        throw InvalidArgument("lll_reduce: delta must be in (0.25, 1)");

    Gs g = gram_schmidt(b);
    check_condition(b, g);
    int k = 1;
    for (int iter = 0; k < n; ++iter) {
        if (iter > 100000) throw IllConditioned("lll reduction failed to terminate");
        for (int j = k - 1; j >= 0; --j) {
            const double r = std::nearbyint(g.m(k, j));
            if (r != 0.0) {
                for (int c = 0; c < n; ++c) b.at(k, c) -= r * b.at(j, c);
                g = gram_schmidt(b);
            }
        }
        if (g.norm2[k] >= (delta - g.m(k, k - 1) * g.m(k, k - 1)) * g.norm2[k - 1]) {
            ++k;
        } else {
            for (int c = 0; c < n; ++c) std::swap(b.at(k, c), b.at(k - 1, c));
            g = gram_schmidt(b);
            k = std::max(k - 1, 1);
        }
    }
}

void reduce_basis(LatticeBasis& b, double delta) {
    if (b.dim() == 2) gauss_reduce(b); else lll_reduce(b, delta);
}

namespace {

// Solves a = v * rows^-1 and rounds; used to report integer coefficients.
void solve_coeffs(const LatticeBasis& rows, const std::array<double, kMaxDim>& v,
                  std::array<std::int64_t, kMaxDim>& out) {
    const int n = rows.dim();
    // Gaussian elimination on rows^T x = v (v = a rows means rows^T a^T = v^T).
    MatD m; m.n = n;
    std::array<double, kMaxDim> rhs{};
    for (int i = 0; i < n; ++i) {
        rhs[i] = v[i];
        for (int j = 0; j < n; ++j) m.at(i, j) = rows.at(j, i);
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(m.at(r, c)) > std::fabs(m.at(piv, c))) piv = r;
        if (m.at(piv, c) == 0.0) return; // leave zeros; degenerate input
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(c, j));
            std::swap(rhs[piv], rhs[c]);
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = m.at(r, c) / m.at(c, c);
            for (int j = c; j < n; ++j) m.at(r, j) -= f * m.at(c, j);
            rhs[r] -= f * rhs[c];
        }
    }
    for (int i = 0; i < n; ++i)
        out[i] = static_cast<std::int64_t>(std::nearbyint(rhs[i] / m.at(i, i)));
}

// Depth-first enumeration of all lattice vectors with squared norm below
// best2, over the Gram-Schmidt decomposition of a reduced basis.
struct Enumerator {
    const Gs* g;
    int n;
    std::array<std::int64_t, kMaxDim> x{};
    std::array<std::int64_t, kMaxDim> best_x{};
    double best2 = 0.0;
    bool found = false;

    void search(int i, double partial2) {
        if (i < 0) {
            bool zero = true;
            for (int k = 0; k < n; ++k) if (x[k] != 0) { zero = false; break; }
            if (!zero && partial2 < best2) {
                best2 = partial2;
                best_x = x;
                found = true;
            }
            return;
        }
        double center = 0.0;
        for (int j = i + 1; j < n; ++j)
            center -= static_cast<double>(x[j]) * g->m(j, i);
        const double room = best2 - partial2;
        if (room < 0.0) return;
        const double spread = std::sqrt(room / g->norm2[i]) + 1e-12;
        const std::int64_t lo = static_cast<std::int64_t>(std::ceil(center - spread));
        const std::int64_t hi = static_cast<std::int64_t>(std::floor(center + spread));
        for (std::int64_t xi = lo; xi <= hi; ++xi) {
            const double off = static_cast<double>(xi) - center;
            const double add = off * off * g->norm2[i];
            if (partial2 + add <= best2 + 1e-12) {
                x[i] = xi;
                search(i - 1, partial2 + add);
            }
        }
        x[i] = 0;
    }
};

} // namespace

ShortestVectorResult shortest_vector(const LatticeBasis& b, double delta) {
    const int n = b.dim();
    ShortestVectorResult res;
    LatticeBasis red = b;
    if (n == 1) {
        res.length = std::fabs(b.at(0, 0));
        res.v[0] = b.at(0, 0);
        res.coeffs[0] = 1;
        res.certified = true;
        return res;
    }
    reduce_basis(red, delta);

    if (n == 2) {
        // Lagrange: first row is shortest.
        for (int k = 0; k < 2; ++k) res.v[k] = red.at(0, k);
        res.length = std::sqrt(row_dot(red, 0, 0));
        res.certified = true;
    } else {
        Gs g = gram_schmidt(red);
        check_condition(red, g);
        Enumerator en;
        en.g = &g;
        en.n = n;
        double min_row = std::numeric_limits<double>::infinity();
        int min_i = 0;
        for (int i = 0; i < n; ++i) {
            const double r2 = row_dot(red, i, i);
            if (r2 < min_row) { min_row = r2; min_i = i; }
        }
        en.best2 = min_row * (1.0 + 1e-12);
        en.best_x[min_i] = 1;
        en.search(n - 1, 0.0);
        for (int k = 0; k < n; ++k) {
            double c = 0.0;
            for (int i = 0; i < n; ++i)
                c += static_cast<double>(en.best_x[i]) * red.at(i, k);
            res.v[k] = c;
        }
        double n2 = 0.0;
        for (int k = 0; k < n; ++k) n2 += res.v[k] * res.v[k];
        res.length = std::sqrt(n2);
        res.certified = true;
    }
    solve_coeffs(b, res.v, res.coeffs);
    return res;
}

ShortestVectorResult shortest_vector_oracle(const LatticeBasis& b, std::int64_t C) {
    const int n = b.dim();
    if (C < 1) throw InvalidArgument("oracle: C must be >= 1");
    double budget = 1.0;
    for (int i = 0; i < n; ++i) budget *= static_cast<double>(C);
    if (budget > 1e8) throw BudgetExceeded("oracle: C^d exceeds 10^8");

    ShortestVectorResult res;
    res.length = std::numeric_limits<double>::infinity();
    std::array<std::int64_t, kMaxDim> a{};
    for (int i = 0; i < n; ++i) a[i] = -C;
    // Odometer over [-C, C]^d; the all-zero vector is skipped, and only the
    // half with positive leading nonzero coefficient is visited.
    for (;;) {
        int lead = -1;
        for (int i = 0; i < n; ++i) if (a[i] != 0) { lead = i; break; }
        if (lead >= 0 && a[lead] > 0) {
            double n2 = 0.0;
            std::array<double, kMaxDim> v{};
            for (int k = 0; k < n; ++k) {
                double c = 0.0;
                for (int i = 0; i < n; ++i)
                    c += static_cast<double>(a[i]) * b.at(i, k);
                v[k] = c;
                n2 += c * c;
            }
            if (n2 < res.length * res.length) {
                res.length = std::sqrt(n2);
                res.v = v;
                res.coeffs = a;
            }
        }
        int i = n - 1;
        while (i >= 0 && a[i] == C) { a[i] = -C; --i; }
        if (i < 0) break;
        ++a[i];
    }

    const Gs g = gram_schmidt(b);
    double min_star = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) min_star = std::min(min_star, g.norm2[i]);
    res.certified = res.length < static_cast<double>(C) * std::sqrt(min_star);
    return res;
}

double delta_shortest(const LatticeBasis& b) {
    return -std::log(shortest_vector(b).length);
}

void lattice_walk_step(LatticeBasis& b, const MatD& g, double lll_delta) {
    const int n = b.dim();
    std::array<double, kMaxDim> tmp;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += b.at(i, j) * g.at(k, j);
            tmp[k] = s;
        }
        for (int k = 0; k < n; ++k) b.at(i, k) = tmp[k];
    }
    reduce_basis(b, lll_delta);
}

LatticeBasis haar_sample_2d(Philox& rng) {
    constexpr int kBudget = 4096;
    const double y_floor = std::sqrt(3.0) / 2.0;
    double x = 0.0, y = 0.0;
    bool ok = false;
    for (int i = 0; i < kBudget; ++i) {
        x = rng.next_unit() - 0.5;
        y = y_floor / (1.0 - rng.next_unit()); // inverse CDF of 1/y^2 tail
        if (x * x + y * y >= 1.0) { ok = true; break; }
    }
    if (!ok) throw RejectionBudgetExceeded("haar sampler: rejection budget hit");
    const double theta = rng.next_unit() * 2.0 * std::numbers::pi;
    const double c = std::cos(theta), s = std::sin(theta);
    const double inv = 1.0 / std::sqrt(y);
    // Rows of the frame for z = x + iy, then a uniform rotation.
    const double r0x = inv, r0y = 0.0;
    const double r1x = x * inv, r1y = y * inv;
    LatticeBasis b;
    b.rows.n = 2;
    b.at(0, 0) = r0x * c - r0y * s;
    b.at(0, 1) = r0x * s + r0y * c;
    b.at(1, 0) = r1x * c - r1y * s;
    b.at(1, 1) = r1x * s + r1y * c;
    return b;
}

LatticeBasis haar_sample_2d(const SeedPlan& sp) {
    Philox rng(sp, Substream::init);
    return haar_sample_2d(rng);
}

LatticeBasis burn_in_sample(const GeneratorMeasure& m, std::uint64_t steps,
                            const SeedPlan& sp, double lll_delta,
                            int renorm_every) {
    if (m.mode != WalkMode::lattice)
        throw InvalidArgument("burn_in_sample needs a lattice measure");
    if (steps < 1) throw InvalidArgument("burn_in_sample: steps must be >= 1");
    Philox rng(sp, Substream::init);
    LatticeBasis b = lattice_identity(m.dim);
    for (std::uint64_t i = 1; i <= steps; ++i) {
        const size_t gi = m.sample_index(rng.next_unit());
        lattice_walk_step(b, m.elements[gi], lll_delta);
        if (renorm_every > 0 && i % static_cast<std::uint64_t>(renorm_every) == 0)
            renormalize_det(b);
    }
    return b;
}

ModularPoint to_modular_point(const LatticeBasis& b) {
    if (b.dim() != 2) throw InvalidArgument("modular point needs d = 2");
    double b00 = b.at(0, 0), b01 = b.at(0, 1);
    double b10 = b.at(1, 0), b11 = b.at(1, 1);
    const double det = b00 * b11 - b01 * b10;
    if (det < 0.0) { b10 = -b10; b11 = -b11; }
    const double n1 = b00 * b00 + b01 * b01;
    if (!(n1 > 0.0)) throw IllConditioned("modular point: zero first row");
    // tau = (second row as complex) / (first row as complex)
    double re = (b10 * b00 + b11 * b01) / n1;
    double im = std::fabs(det) / n1;

    for (int iter = 0; iter < 10000; ++iter) {
        re -= std::nearbyint(re);
        const double n2 = re * re + im * im;
        if (n2 < 1.0 - 1e-15) {
            re = -re / n2;
            im = im / n2;
        } else {
            ModularPoint p;
            p.x = re;
            p.y = im;
            return p;
        }
    }
    throw ReductionDiverged("modular reduction exceeded 10^4 steps");
}

double modular_distance(const ModularPoint& p, const ModularPoint& q) {
    const auto dist = [&](double qx, double qy) {
        const double dx = p.x - qx, dy = p.y - qy;
        const double ch = 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * qy);
        return std::acosh(std::max(1.0, ch));
    };
    double best = dist(q.x, q.y);
    best = std::min(best, dist(q.x + 1.0, q.y));
    best = std::min(best, dist(q.x - 1.0, q.y));
    const double n2 = q.x * q.x + q.y * q.y;
    best = std::min(best, dist(-q.x / n2, q.y / n2));
    return best;
}

double fundamental_domain_area() { return std::numbers::pi / 3.0; }

} // namespace evtwalk
