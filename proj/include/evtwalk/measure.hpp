#pragma once

#include <cstdint>
#include <vector>

#include "evtwalk/smallmat.hpp"

namespace evtwalk {

enum class WalkMode { torus, lattice };

// Finitely supported step distribution mu on matrices. Torus mode keeps an
// exact integer copy of each generator; lattice mode uses the real entries.
// Weights are stored renormalized to sum exactly 1.
struct GeneratorMeasure {
    WalkMode mode = WalkMode::torus;
    int dim = 0;
    std::vector<MatD> elements;
    std::vector<MatI> ielements; // torus mode only, same order as elements
    std::vector<double> weights;
    std::vector<double> cumulative; // cumulative[k] = sum of weights[0..k]

    // Maps a uniform u in [0,1) to a generator index.
    size_t sample_index(double u) const {
        size_t lo = 0, hi = cumulative.size() - 1;
        while (lo < hi) {
            const size_t mid = (lo + hi) / 2;
            if (u < cumulative[mid]) hi = mid; else lo = mid + 1;
        }
        return lo;
    }
};

// Validates support and weights and builds the sampling tables.
// Torus mode requires integer entries (within 1e-12 of an integer) and
// |det| = 1 exactly; lattice mode requires det within 1e-9 of 1.
// Weights must be strictly positive and sum to 1 within 1e-9.
GeneratorMeasure validate_measure(WalkMode mode, int dim,
                                  const std::vector<MatD>& elements,
                                  const std::vector<double>& weights);

// Documented default generator sets. d = 2 and d = 3 are provided; both
// generate non-amenable groups acting ergodically (free subgroups of
// SL(2,Z); the d = 3 lattice set generates all of SL(3,Z)).
GeneratorMeasure default_measure(WalkMode mode, int dim);

} // namespace evtwalk
