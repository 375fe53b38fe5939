#pragma once

// Fincke-Pohst enumeration on positive definite Gram matrices. Floating
// Cholesky with a slack margin steers the search; every candidate norm is
// recomputed exactly before acceptance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "enr/errors.hpp"
#include "enr/lattice.hpp"
#include "enr/smallmat.hpp"

namespace enr {

struct ShortVector {
    std::vector<int> coords; // in the original basis
    i64 norm;
};

inline bool short_vector_less(const ShortVector& a, const ShortVector& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.coords < b.coords;
}

namespace detail {

// Enumerate all z != 0 with z^T gr z <= bound, one of each +-pair (the
// highest-index nonzero coordinate is positive), exact norm filter.
inline void enumerate_reduced(const SMat& gr, i64 bound,
                              const std::function<void(const std::vector<int>&, i64)>& emit) {
    const int n = gr.n;
    if (n == 0 || bound <= 0) return;
    // q[i][i] = d_i, q[i][j] = mu_{j,i} for j > i (standard FP arrays)
    std::vector<std::vector<double>> q(n, std::vector<double>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) q[i][j] = double(gr(i, j));
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            double t = q[i][k] / q[i][i];
            for (int l = k; l < n; ++l) q[k][l] -= t * q[i][l];
            q[i][k] = t;
        }
        if (!(q[i][i] > 0)) throw NotPositiveDefinite("short vector search needs a positive definite form");
    }
    const double c = double(bound) * (1.0 + 1e-9) + 1e-6;
    std::vector<double> partial(n + 1, 0); // partial[k]: weight consumed by levels > k
    std::vector<double> center(n, 0);      // sum_{j>k} q[k][j] z_j
    std::vector<int> z(n, 0);
    std::vector<int> lo(n, 0), hi(n, 0);

    int k = n - 1;
    bool descend = true;
    while (true) {
        if (descend) {
            double rem = c - partial[k + 1];
            double s = 0;
            for (int j = k + 1; j < n; ++j) s += q[k][j] * z[j];
            center[k] = s;
            double half = std::sqrt(std::max(rem, 0.0) / q[k][k]);
            lo[k] = int(std::ceil(-half - s - 1e-9));
            hi[k] = int(std::floor(half - s + 1e-9));
            if (k == n - 1) lo[k] = std::max(lo[k], 0); // half-space cut at the top level
            z[k] = lo[k] - 1;
        }
        ++z[k];
        if (z[k] > hi[k]) {
            ++k;
            if (k == n) return;
            descend = false;
            continue;
        }
        double t = z[k] + center[k];
        partial[k] = partial[k + 1] + q[k][k] * t * t;
        if (k == 0) {
            // leaf: skip zero and the negative of an already-seen vector
            bool nonzero = false, leadpos = false;
            for (int i = n - 1; i >= 0; --i)
                if (z[i] != 0) { nonzero = true; leadpos = z[i] > 0; break; }
            if (nonzero && leadpos) {
                i64 norm = sym_dot(gr, z, z);
                if (norm > 0 && norm <= bound) emit(z, norm);
            }
            descend = false;
        } else {
            --k;
            descend = true;
        }
    }
}

} // namespace detail

// All vectors with 0 < <x,x> <= bound, one per +-pair, canonical sign
// (first nonzero coordinate in the original basis positive), sorted by
// (norm, lex coordinates).
inline std::vector<ShortVector> short_vectors(const SMat& g, i64 bound) {
    SmallReduce red = reduce_gram(g);
    const int n = g.n;
    std::vector<ShortVector> out;
    detail::enumerate_reduced(red.gram, bound, [&](const std::vector<int>& z, i64 norm) {
        ShortVector sv;
        sv.coords.assign(n, 0);
        for (int i = 0; i < n; ++i) {
            i64 s = 0;
            for (int j = 0; j < n; ++j) s += red.transform(i, j) * z[j];
            if (s > INT32_MAX || s < INT32_MIN) throw TooLarge("short vector coordinate overflow");
            sv.coords[i] = int(s);
        }
        for (int i = 0; i < n; ++i) {
            if (sv.coords[i] > 0) break;
            if (sv.coords[i] < 0) {
                for (auto& x : sv.coords) x = -x;
                break;
            }
        }
        sv.norm = norm;
        out.push_back(std::move(sv));
    });
    std::sort(out.begin(), out.end(), short_vector_less);
    return out;
}

inline std::vector<ShortVector> short_vectors(const IntegralLattice& l, const Int& bound) {
    IntegralLattice work = l;
    if (l.rank() > 0 && l.is_negative_definite()) work = twist(l, -1);
    if (l.rank() > 0 && !work.is_positive_definite())
        throw NotPositiveDefinite("short_vectors requires a definite lattice");
    if (!bound.fits_slong_p()) throw TooLarge("short vector bound too large");
    return short_vectors(smat_from_int(work.gram()), bound.get_si());
}

// Minimum nonzero norm (in absolute value for negative definite input).
inline i64 lattice_minimum(const SMat& g) {
    if (g.n == 0) throw Error("minimum of rank-0 lattice");
    SmallReduce red = reduce_gram(g);
    i64 bound = red.gram(0, 0);
    for (int i = 1; i < g.n; ++i) bound = std::min(bound, red.gram(i, i));
    i64 best = bound;
    detail::enumerate_reduced(red.gram, bound, [&](const std::vector<int>&, i64 norm) {
        best = std::min(best, norm);
    });
    return best;
}

inline Int lattice_minimum(const IntegralLattice& l) {
    IntegralLattice work = l;
    if (l.is_negative_definite()) work = twist(l, -1);
    if (!work.is_positive_definite()) throw NotPositiveDefinite("minimum requires a definite lattice");
    return Int(static_cast<long>(lattice_minimum(smat_from_int(work.gram()))));
}

// No vectors of norm -2 (negative definite convention): roots are the
// obstruction we care about downstream.
inline bool root_free(const IntegralLattice& l) {
    IntegralLattice work = l;
    if (l.rank() == 0) return true;
    if (l.is_negative_definite()) work = twist(l, -1);
    if (!work.is_positive_definite()) throw NotPositiveDefinite("root_free requires a definite lattice");
    if (!work.is_even()) throw Error("root_free expects an even lattice");
    return lattice_minimum(smat_from_int(work.gram())) > 2;
}

inline long root_count(const SMat& g_posdef) {
    long c = 0;
    detail::enumerate_reduced(reduce_gram(g_posdef).gram, 2, [&](const std::vector<int>&, i64 norm) {
        if (norm == 2) ++c;
    });
    return 2 * c; // both signs
}

} // namespace enr
