#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "evtwalk/errors.hpp"

namespace evtwalk {

inline constexpr int kMaxDim = 8;

// Dense row-major d x d matrix, d <= 8. Small enough to live on the stack in
// walk inner loops.
struct MatD {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> a{};

    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

struct MatI {
    int n = 0;
    std::array<std::int64_t, kMaxDim * kMaxDim> a{};

    std::int64_t& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    std::int64_t at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

inline MatD mat_identity(int n) {
    MatD m; m.n = n;
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

inline MatI mati_identity(int n) {
    MatI m; m.n = n;
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

inline MatD mat_mul(const MatD& x, const MatD& y) {
    MatD r; r.n = x.n;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) {
            double s = 0.0;
            for (int k = 0; k < x.n; ++k) s += x.at(i, k) * y.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

// Integer product with overflow detection; entries of long generator words
// grow exponentially, so every multiply-add is checked.
inline MatI mati_mul_checked(const MatI& x, const MatI& y) {
    MatI r; r.n = x.n;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) {
            std::int64_t s = 0;
            for (int k = 0; k < x.n; ++k) {
                std::int64_t p;
                if (__builtin_mul_overflow(x.at(i, k), y.at(k, j), &p) ||
                    __builtin_add_overflow(s, p, &s))
                    throw EntryOverflow("integer matrix product overflows int64");
            }
            r.at(i, j) = s;
        }
    return r;
}

// Determinant by LU with partial pivoting. Exact enough for unimodularity
// checks at d <= 8.
inline double mat_det(const MatD& m) {
    MatD lu = m;
    const int n = m.n;
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(lu.at(r, c)) > std::fabs(lu.at(piv, c))) piv = r;
        if (lu.at(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(lu.at(piv, j), lu.at(c, j));
            det = -det;
        }
        det *= lu.at(c, c);
        for (int r = c + 1; r < n; ++r) {
            const double f = lu.at(r, c) / lu.at(c, c);
            for (int j = c; j < n; ++j) lu.at(r, j) -= f * lu.at(c, j);
        }
    }
    return det;
}

// Exact integer determinant (Bareiss, fraction-free) in 128-bit
// intermediates. Throws on overflow rather than returning garbage.
inline __int128 mati_det(const MatI& m) {
    const int n = m.n;
    std::array<__int128, kMaxDim * kMaxDim> w{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w[static_cast<size_t>(i) * n + j] = m.at(i, j);
    auto at = [&](int i, int j) -> __int128& { return w[static_cast<size_t>(i) * n + j]; };
    const __int128 lim = (static_cast<__int128>(1) << 126);
    __int128 sign = 1, prev = 1;
    for (int c = 0; c < n - 1; ++c) {
        if (at(c, c) == 0) {
            int piv = -1;
            for (int r = c + 1; r < n; ++r)
                if (at(r, c) != 0) { piv = r; break; }
            if (piv < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(at(c, j), at(piv, j));
            sign = -sign;
        }
        for (int r = c + 1; r < n; ++r)
            for (int j = c + 1; j < n; ++j) {
                __int128 t = at(r, j) * at(c, c) - at(r, c) * at(c, j);
                if (t > lim || t < -lim)
                    throw EntryOverflow("integer determinant overflows int128");
                at(r, j) = t / prev;
            }
        prev = at(c, c);
    }
    return sign * at(n - 1, n - 1);
}

inline bool mati_equal(const MatI& x, const MatI& y) {
    if (x.n != y.n) return false;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j)
            if (x.at(i, j) != y.at(i, j)) return false;
    return true;
}

} // namespace evtwalk
