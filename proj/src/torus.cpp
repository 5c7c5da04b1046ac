#include "evtwalk/torus.hpp"

#include <cmath>

#include "evtwalk/evt.hpp"

namespace evtwalk {

TorusPoint make_torus_point(int dim, std::uint32_t bits,
                            std::span<const std::uint64_t> coords) {
    if (dim < 1 || dim > kMaxDim) throw InvalidArgument("torus point: bad dim");
    if (bits < 1 || bits > 64) throw InvalidArgument("torus point: bits must be 1..64");
    if (coords.size() != static_cast<size_t>(dim))
        throw InvalidArgument("torus point: coordinate count mismatch");
    TorusPoint p;
    p.dim = dim;
    p.bits = bits;
    for (int k = 0; k < dim; ++k) p.c[k] = coords[k] & p.mask();
    return p;
}

TorusPoint torus_point_from_unit(std::span<const double> fracs, std::uint32_t bits) {
    TorusPoint p;
    p.dim = static_cast<int>(fracs.size());
    if (p.dim < 1 || p.dim > kMaxDim) throw InvalidArgument("torus point: bad dim");
    p.bits = bits;
    for (int k = 0; k < p.dim; ++k) {
        double f = fracs[k] - std::floor(fracs[k]);
        const double scaled = std::nearbyint(std::ldexp(f, static_cast<int>(bits)));
        p.c[k] = static_cast<std::uint64_t>(scaled) & p.mask();
    }
    return p;
}

TorusPoint random_torus_point(int dim, std::uint32_t bits, Philox& rng) {
    TorusPoint p;
    p.dim = dim;
    p.bits = bits;
    for (int k = 0; k < dim; ++k) p.c[k] = rng.next_u64() & p.mask();
    return p;
}

void apply_automorphism(const MatI& a, TorusPoint& x) {
    std::array<std::uint64_t, kMaxDim> out;
    const int n = a.n;
    for (int i = 0; i < n; ++i) {
        std::uint64_t s = 0;
        for (int j = 0; j < n; ++j)
            s += static_cast<std::uint64_t>(a.at(i, j)) * x.c[j];
        out[i] = s;
    }
    const std::uint64_t mask = x.mask();
    for (int i = 0; i < n; ++i) x.c[i] = out[i] & mask;
}

double torus_distance(const TorusPoint& x, const TorusPoint& y) {
    const std::uint64_t mask = x.mask();
    double s = 0.0;
    const int neg_bits = -static_cast<int>(x.bits);
    for (int k = 0; k < x.dim; ++k) {
        const std::uint64_t diff = (x.c[k] - y.c[k]) & mask;
        const std::uint64_t alt = (0 - diff) & mask;
        const double f = std::ldexp(static_cast<double>(diff < alt ? diff : alt),
                                    neg_bits);
        s += f * f;
    }
    return std::sqrt(s);
}

double closest_return_delta(const TorusPoint& x, const TorusPoint& target) {
    if (x == target)
        throw InfiniteDelta("delta undefined: point coincides with target");
    return -std::log(torus_distance(x, target));
}

namespace {

struct DetSearch {
    const std::vector<MatI>* gens;
    int max_len;
    std::uint64_t cap;
    DetConditionReport rep;
    std::vector<int> word;

    void visit(const MatI& prod) {
        if (rep.words_checked >= cap)
            throw WordLimitExceeded("det condition: word cap hit before max_len");
        ++rep.words_checked;
        MatI diff = prod;
        for (int i = 0; i < diff.n; ++i) diff.at(i, i) -= 1;
        if (mati_det(diff) == 0) {
            rep.pass = false;
            if (rep.violations.size() < 8) rep.violations.push_back(word);
        }
        if (static_cast<int>(word.size()) == max_len) return;
        for (size_t g = 0; g < gens->size(); ++g) {
            word.push_back(static_cast<int>(g));
            visit(mati_mul_checked(prod, (*gens)[g]));
            word.pop_back();
        }
    }
};

} // namespace

DetConditionReport check_det_condition(const GeneratorMeasure& m, int max_len,
                                       std::uint64_t word_cap) {
    if (m.mode != WalkMode::torus)
        throw InvalidArgument("det condition is a torus-mode check");
    if (max_len < 1) throw InvalidArgument("det condition: max_len must be >= 1");

    DetSearch search;
    search.gens = &m.ielements;
    search.max_len = max_len;
    search.cap = word_cap;
    search.rep.pass = true;
    search.rep.max_len = max_len;

    for (size_t g = 0; g < m.ielements.size(); ++g) {
        search.word.assign(1, static_cast<int>(g));
        search.visit(m.ielements[g]);
    }
    return search.rep;
}

double exact_torus_tail(double z, int d) {
    if (d < 1 || d > kMaxDim) throw InvalidArgument("exact tail: bad dimension");
    const double radius = std::exp(-z);
    if (radius > 0.5 + 1e-15)
        throw BallTooLarge("exact tail needs e^-z <= 1/2 (z >= ln 2)");
    return ball_volume(d) * std::exp(-static_cast<double>(d) * z);
}

} // namespace evtwalk
