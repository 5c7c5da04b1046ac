#pragma once

#include <cstdint>

#include "evtwalk/errors.hpp"

namespace evtwalk {

// Identifies one trajectory's random stream. Streams for distinct
// (master_seed, trajectory_index) pairs never overlap, so trajectories can be
// computed in any order, on any thread, with identical results.
struct SeedPlan {
    std::uint64_t master_seed = 0;
    std::uint64_t trajectory_index = 0;
};

// Draw domains inside one trajectory. Initial-state sampling and step
// sampling come from disjoint counter ranges, so adding draws to one phase
// never shifts the other.
enum class Substream : std::uint32_t {
    init = 1,
    steps = 2,
    aux = 3,
};

// Counter-based Philox 4x32-10. The output at draw position p is a pure
// function of (master_seed, trajectory_index, substream, p); there is no
// hidden global state and skip-ahead is O(1).
//
// Word layout: key = master_seed, counter = [block_lo, block_hi|substream<<24,
// traj_lo, traj_hi]. One block yields two 64-bit draws.
class Philox {
  public:
    Philox(std::uint64_t master_seed, std::uint64_t trajectory_index,
           Substream sub = Substream::steps)
        : key0_(static_cast<std::uint32_t>(master_seed)),
          key1_(static_cast<std::uint32_t>(master_seed >> 32)),
          traj_lo_(static_cast<std::uint32_t>(trajectory_index)),
          traj_hi_(static_cast<std::uint32_t>(trajectory_index >> 32)),
          sub_(static_cast<std::uint32_t>(sub)) {}

    Philox(const SeedPlan& sp, Substream sub = Substream::steps)
        : Philox(sp.master_seed, sp.trajectory_index, sub) {}

    std::uint64_t next_u64() {
        const std::uint64_t block = pos_ >> 1;
        if (block != cached_block_ || !cache_valid_) fill(block);
        const std::uint64_t out = buf_[pos_ & 1];
        ++pos_;
        return out;
    }

    // Uniform in [0,1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0,n), unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw InvalidArgument("next_below: n must be positive");
        const std::uint64_t rem = (~std::uint64_t{0}) % n;
        const std::uint64_t limit = ~std::uint64_t{0} - rem;
        for (;;) {
            const std::uint64_t v = next_u64();
            if (v <= limit) return v % n;
        }
    }

    // Jump ahead n 64-bit draws without generating them.
    void skip(std::uint64_t n) { pos_ += n; }

    std::uint64_t position() const { return pos_; }

  private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                        std::uint32_t& lo) {
        const std::uint64_t p =
            static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b);
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void fill(std::uint64_t block) {
        std::uint32_t c0 = static_cast<std::uint32_t>(block);
        std::uint32_t c1 = (static_cast<std::uint32_t>(block >> 32) & 0xFFFFFFu) |
                           (sub_ << 24);
        std::uint32_t c2 = traj_lo_;
        std::uint32_t c3 = traj_hi_;
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0;; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c0, hi0, lo0);
            mulhilo(0xCD9E8D57u, c2, hi1, lo1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            if (round == 9) break;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_[0] = static_cast<std::uint64_t>(c0) |
                  (static_cast<std::uint64_t>(c1) << 32);
        buf_[1] = static_cast<std::uint64_t>(c2) |
                  (static_cast<std::uint64_t>(c3) << 32);
        cached_block_ = block;
        cache_valid_ = true;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t traj_lo_, traj_hi_;
    std::uint32_t sub_;
    std::uint64_t pos_ = 0;
    std::uint64_t cached_block_ = 0;
    bool cache_valid_ = false;
    std::uint64_t buf_[2] = {0, 0};
};

// Raw single-shot Philox block, exposed for known-answer tests.
inline void philox4x32_10(const std::uint32_t ctr[4], const std::uint32_t key[2],
                          std::uint32_t out[4]) {
    std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0;; ++round) {
        std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * c0;
        std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * c2;
        const std::uint32_t n0 =
            static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
        const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n2 =
            static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
        const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        if (round == 9) break;
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
}

} // namespace evtwalk
