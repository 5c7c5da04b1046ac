#pragma once

#include <cstdint>
#include <vector>

#include "evtwalk/lattice.hpp"
#include "evtwalk/measure.hpp"
#include "evtwalk/philox.hpp"
#include "evtwalk/torus.hpp"

namespace evtwalk {

// Walk actions bind a generator measure to a state type. One generator index
// draw per step; the draw sequence is fixed by the seed plan alone, so a
// trajectory is reproducible regardless of scheduling.

struct TorusAction {
    using State = TorusPoint;
    const GeneratorMeasure* m = nullptr;

    void apply(size_t gi, State& x, std::uint64_t /*step*/) const {
        apply_automorphism(m->ielements[gi], x);
    }
};

struct LatticeAction {
    using State = LatticeBasis;
    const GeneratorMeasure* m = nullptr;
    double lll_delta = 0.75;
    int renorm_every = 64;

    void apply(size_t gi, State& x, std::uint64_t step) const {
        lattice_walk_step(x, m->elements[gi], lll_delta);
        if (renorm_every > 0 &&
            step % static_cast<std::uint64_t>(renorm_every) == 0)
            renormalize_det(x);
    }
};

// Pull-based trajectory: state() is X_i, advance() moves to X_{i+1}.
// X_0 is the start state itself; the first generator draw happens on the
// first advance.
template <class Action>
class TrajectoryStream {
  public:
    using State = typename Action::State;

    TrajectoryStream(Action act, State x0, Philox rng)
        : act_(act), x_(std::move(x0)), rng_(std::move(rng)) {}

    const State& state() const { return x_; }
    std::uint64_t index() const { return i_; }

    void advance() {
        const size_t gi = act_.m->sample_index(rng_.next_unit());
        ++i_;
        act_.apply(gi, x_, i_);
    }

  private:
    Action act_;
    State x_;
    Philox rng_;
    std::uint64_t i_ = 0;
};

// Materializes X_0 .. X_{n-1}. Meant for tests and small runs; the big
// experiments stream instead.
template <class Action>
std::vector<typename Action::State>
walk_stream(const Action& act, typename Action::State x0, std::uint64_t n,
            const SeedPlan& sp) {
    if (n < 1) throw InvalidArgument("walk_stream: n must be >= 1");
    std::vector<typename Action::State> out;
    out.reserve(n);
    TrajectoryStream<Action> t(act, std::move(x0), Philox(sp, Substream::steps));
    out.push_back(t.state());
    for (std::uint64_t i = 1; i < n; ++i) {
        t.advance();
        out.push_back(t.state());
    }
    return out;
}

} // namespace evtwalk
