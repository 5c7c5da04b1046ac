#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "evtwalk/measure.hpp"
#include "evtwalk/philox.hpp"
#include "evtwalk/smallmat.hpp"

namespace evtwalk {

// Unimodular lattice given by d row vectors (the lattice is the integer row
// span). Walk code keeps |det - 1| <= 1e-6 by renormalizing on a fixed
// cadence.
struct LatticeBasis {
    MatD rows;

    int dim() const { return rows.n; }
    double at(int i, int j) const { return rows.at(i, j); }
    double& at(int i, int j) { return rows.at(i, j); }
};

LatticeBasis lattice_identity(int d);
double basis_det(const LatticeBasis& b);

// Scales rows to make det exactly 1 again. Precondition: det within 1e-3 of
// 1 (drift beyond that means upstream state is corrupt, DetDrifted); a
// determinant below 1e-3 in magnitude is DetCollapsed.
void renormalize_det(LatticeBasis& b);

// Lagrange reduction, d = 2: afterwards row 0 is a shortest lattice vector
// and |<b0,b1>| <= |b0|^2 / 2.
void gauss_reduce(LatticeBasis& b);

// LLL with Lovasz parameter delta in (0.25, 1), 2 <= d <= 8.
void lll_reduce(LatticeBasis& b, double delta = 0.75);

// Gauss for d = 2, LLL otherwise. Same lattice afterwards (integer
// unimodular change of basis).
void reduce_basis(LatticeBasis& b, double delta = 0.75);

struct ShortestVectorResult {
    std::array<double, kMaxDim> v{};
    double length = 0.0;
    std::array<std::int64_t, kMaxDim> coeffs{}; // in terms of the input rows
    bool certified = false;
};

// Exact shortest nonzero vector: Lagrange (d=2) or LLL plus exhaustive
// enumeration inside the LLL radius (d>=3). Certified up to float roundoff.
ShortestVectorResult shortest_vector(const LatticeBasis& b, double delta = 0.75);

// Brute force over integer coefficients in [-C, C]^d. Budget C^d <= 10^8.
// certified is true when the minimum found is shorter than C times the
// shortest Gram-Schmidt length, which rules out better vectors outside the
// box; otherwise the result is flagged possibly-not-global.
ShortestVectorResult shortest_vector_oracle(const LatticeBasis& b, std::int64_t C);

// Delta(x) = -log(shortest vector length).
double delta_shortest(const LatticeBasis& b);

// One walk step: rows <- rows * g^T, then reduce. Keeps the running basis
// well conditioned so float error stays ~1e-12 per step.
void lattice_walk_step(LatticeBasis& b, const MatD& g, double lll_delta = 0.75);

// Haar-distributed unimodular lattice, d = 2. Exact: hyperbolic rejection
// sampling in the modular fundamental domain (acceptance ~ 0.91, the
// y-marginal is sampled by inverse CDF so the cusp gets full weight) plus a
// uniform rotation.
LatticeBasis haar_sample_2d(Philox& rng);
LatticeBasis haar_sample_2d(const SeedPlan& sp);

// Approximate invariant sample for d >= 2: walk `steps` steps from the
// identity lattice. steps must be >= 1.
LatticeBasis burn_in_sample(const GeneratorMeasure& m, std::uint64_t steps,
                            const SeedPlan& sp, double lll_delta = 0.75,
                            int renorm_every = 64);

// Point on the modular surface (upper half plane mod SL(2,Z)), stored as a
// representative in the standard fundamental domain |Re| <= 1/2, |z| >= 1.
struct ModularPoint {
    double x = 0.0;
    double y = 1.0;
};

// Projects a d=2 basis to its modular point (rotation part discarded).
ModularPoint to_modular_point(const LatticeBasis& b);

// Hyperbolic distance on the quotient: cosh d = 1 + |z-w|^2 / (2 Im z Im w),
// minimized over the translates {w, w+1, w-1, -1/w} to respect the boundary
// gluing of the fundamental domain.
double modular_distance(const ModularPoint& p, const ModularPoint& q);

// Hyperbolic area of the fundamental domain (pi/3); the Haar sampler's
// normalization depends on it.
double fundamental_domain_area();

} // namespace evtwalk
