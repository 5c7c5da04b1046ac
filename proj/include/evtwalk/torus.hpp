#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "evtwalk/measure.hpp"
#include "evtwalk/philox.hpp"
#include "evtwalk/smallmat.hpp"

namespace evtwalk {

// Point on T^d stored as d unsigned fixed-point coordinates: the real value
// of coordinate k is c[k] / 2^bits. Integer matrices act exactly mod 2^bits,
// so orbits never drift; rounding enters only when distances are taken.
struct TorusPoint {
    int dim = 0;
    std::uint32_t bits = 64;
    std::array<std::uint64_t, kMaxDim> c{};

    std::uint64_t mask() const {
        return bits >= 64 ? ~std::uint64_t{0}
                          : ((std::uint64_t{1} << bits) - 1);
    }
    bool operator==(const TorusPoint& o) const {
        if (dim != o.dim || bits != o.bits) return false;
        for (int k = 0; k < dim; ++k) if (c[k] != o.c[k]) return false;
        return true;
    }
};

TorusPoint make_torus_point(int dim, std::uint32_t bits,
                            std::span<const std::uint64_t> coords);

// Nearest fixed-point representation of fractional coordinates; convenient
// in tests ((0.5, 0.5) and friends are exact).
TorusPoint torus_point_from_unit(std::span<const double> fracs,
                                 std::uint32_t bits = 64);

TorusPoint random_torus_point(int dim, std::uint32_t bits, Philox& rng);

// x <- A x mod 2^bits, exactly (unsigned wraparound is the modulus).
void apply_automorphism(const MatI& a, TorusPoint& x);

// Euclidean distance with per-coordinate wraparound, computed in integers
// first and converted once; error <= 2^-52 * sqrt(d).
double torus_distance(const TorusPoint& x, const TorusPoint& y);

// Delta(x) = -log d(x, target). Exact coincidence has no finite value.
double closest_return_delta(const TorusPoint& x, const TorusPoint& target);

struct DetConditionReport {
    bool pass = false;
    std::uint64_t words_checked = 0;
    int max_len = 0;
    // Generator-index words w with det(w - I) = 0, at most 8 recorded.
    std::vector<std::vector<int>> violations;
};

// Checks det(w - I) != 0 for every product w of support elements of length
// 1..max_len. Finite check only: PASS rules out violations up to max_len,
// nothing beyond. Word count is capped (default 10^6).
DetConditionReport check_det_condition(const GeneratorMeasure& m, int max_len,
                                       std::uint64_t word_cap = 1000000);

// P(Delta > z) under Lebesgue: V_d e^{-dz}, valid while the ball of radius
// e^{-z} embeds without wrap (e^{-z} <= 1/2).
double exact_torus_tail(double z, int d);

} // namespace evtwalk
