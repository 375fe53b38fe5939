#pragma once

// Machine-word kernels for definite lattices of moderate rank. Entries are
// checked against an overflow budget when converting from exact matrices;
// inner products accumulate in 128-bit.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "enr/errors.hpp"
#include "enr/intmat.hpp"

namespace enr {

using i64 = long long;
using i128 = __int128;

struct SMat {
    int n = 0;
    std::vector<i64> a;

    SMat() = default;
    explicit SMat(int n_) : n(n_), a(size_t(n_) * n_, 0) {}

    static SMat identity(int n) {
        SMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    i64& operator()(int i, int j) { return a[size_t(i) * n + j]; }
    i64 operator()(int i, int j) const { return a[size_t(i) * n + j]; }
    bool operator==(const SMat& o) const { return n == o.n && a == o.a; }
};

constexpr i64 kEntryBudget = i64(1) << 40;

inline SMat smat_from_int(const IntMatrix& m) {
    SMat s(m.rows());
    if (m.rows() != m.cols()) throw Error("smat_from_int: not square");
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (!m(i, j).fits_slong_p()) throw TooLarge("gram entry exceeds machine budget");
            i64 v = m(i, j).get_si();
            if (v > kEntryBudget || v < -kEntryBudget) throw TooLarge("gram entry exceeds machine budget");
            s(i, j) = v;
        }
    return s;
}

inline IntMatrix smat_to_int(const SMat& m) {
    IntMatrix r(m.n, m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) r(i, j) = static_cast<long>(m(i, j));
    return r;
}

inline SMat smat_mul(const SMat& a, const SMat& b) {
    SMat r(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            i64 v = a(i, k);
            if (!v) continue;
            for (int j = 0; j < a.n; ++j) r(i, j) += v * b(k, j);
        }
    return r;
}

inline SMat smat_transpose(const SMat& a) {
    SMat r(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) r(j, i) = a(i, j);
    return r;
}

// x^T G y with 128-bit accumulation
inline i64 sym_dot(const SMat& g, const std::vector<int>& x, const std::vector<int>& y) {
    i128 s = 0;
    for (int i = 0; i < g.n; ++i) {
        if (!x[i]) continue;
        i128 row = 0;
        for (int j = 0; j < g.n; ++j) row += i128(g(i, j)) * y[j];
        s += i128(x[i]) * row;
    }
    return i64(s);
}

// u = G x
inline void gram_times(const SMat& g, const std::vector<int>& x, std::vector<i64>& u) {
    u.assign(g.n, 0);
    for (int j = 0; j < g.n; ++j) {
        if (!x[j]) continue;
        for (int i = 0; i < g.n; ++i) u[i] += g(i, j) * x[j];
    }
}

inline i64 dot_vec(const std::vector<int>& v, const std::vector<i64>& u) {
    i128 s = 0;
    for (size_t i = 0; i < v.size(); ++i) s += i128(v[i]) * u[i];
    return i64(s);
}

struct SmallReduce {
    SMat gram;      // T^T G T
    SMat transform; // unimodular
};

// LLL on an int64 Gram matrix, double-precision Gram-Schmidt, exact updates.
// Falls back to the exact rational path if the float loop misbehaves.
inline SmallReduce reduce_gram(const SMat& g0) {
    const int n = g0.n;
    SmallReduce r{g0, SMat::identity(n)};
    if (n <= 1) return r;
    SMat& g = r.gram;
    SMat& t = r.transform;
    std::vector<std::vector<double>> mu(n, std::vector<double>(n, 0));
    std::vector<double> b(n, 0);
    auto compute_gso = [&]() {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) {
                double s = double(g(i, j));
                for (int k = 0; k < j; ++k) s -= mu[i][k] * mu[j][k] * b[k];
                mu[i][j] = s / b[j];
            }
            double s = double(g(i, i));
            for (int k = 0; k < i; ++k) s -= mu[i][k] * mu[i][k] * b[k];
            b[i] = s;
            if (!(b[i] > 0)) throw NotPositiveDefinite("reduce_gram: not positive definite");
        }
    };
    auto add_basis = [&](int i, int j, i64 c) { // b_i += c b_j
        for (int k = 0; k < n; ++k) g(i, k) += c * g(j, k);
        for (int k = 0; k < n; ++k) g(k, i) += c * g(k, j);
        for (int k = 0; k < n; ++k) t(k, i) += c * t(k, j);
    };
    auto swap_basis = [&](int i, int j) {
        for (int k = 0; k < n; ++k) std::swap(g(i, k), g(j, k));
        for (int k = 0; k < n; ++k) std::swap(g(k, i), g(k, j));
        for (int k = 0; k < n; ++k) std::swap(t(k, i), t(k, j));
    };
    bool ok = true;
    try {
        compute_gso();
        int k = 1, guard = 0;
        while (k < n) {
            if (++guard > 20000) { ok = false; break; }
            bool changed = false;
            for (int j = k - 1; j >= 0; --j) {
                double m = mu[k][j];
                if (std::abs(m) > 0.5 + 1e-9) {
                    i64 c = llround(m);
                    add_basis(k, j, -c);
                    changed = true;
                }
            }
            if (changed) compute_gso();
            if (b[k] + mu[k][k - 1] * mu[k][k - 1] * b[k - 1] >= 0.99 * b[k - 1]) {
                ++k;
            } else {
                swap_basis(k, k - 1);
                compute_gso();
                k = std::max(k - 1, 1);
            }
        }
    } catch (const NotPositiveDefinite&) {
        throw;
    }
    if (!ok) {
        // exact fallback
        ReduceResult rr = basis_reduce(smat_to_int(g0));
        return SmallReduce{smat_from_int(rr.gram), smat_from_int(rr.transform)};
    }
    return r;
}

} // namespace enr
