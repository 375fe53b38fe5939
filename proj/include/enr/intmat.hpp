#pragma once

// Exact integer / rational matrices: Smith normal form with transforms,
// exact signatures, rational LDL, unimodular basis reduction.

#include <gmpxx.h>

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "enr/errors.hpp"

namespace enr {

using Int = mpz_class;
using Rat = mpq_class;

class IntMatrix {
public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

    static IntMatrix identity(int n) {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Int& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const Int& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    bool operator==(const IntMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    IntMatrix transpose() const {
        IntMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    IntMatrix operator*(const IntMatrix& o) const {
        assert(cols_ == o.rows_);
        IntMatrix r(rows_, o.cols_);
        Int tmp;
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const Int& v = (*this)(i, k);
                if (v == 0) continue;
                for (int j = 0; j < o.cols_; ++j) {
                    tmp = v * o(k, j);
                    r(i, j) += tmp;
                }
            }
        return r;
    }

    IntMatrix operator-() const {
        IntMatrix r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
        return r;
    }

    bool is_symmetric() const {
        if (rows_ != cols_) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }
    void swap_cols(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < rows_; ++k) std::swap((*this)(k, i), (*this)(k, j));
    }
    // row i += c * row j
    void add_row(int i, int j, const Int& c) {
        for (int k = 0; k < cols_; ++k) (*this)(i, k) += c * (*this)(j, k);
    }
    // col i += c * col j
    void add_col(int i, int j, const Int& c) {
        for (int k = 0; k < rows_; ++k) (*this)(k, i) += c * (*this)(k, j);
    }
    void negate_row(int i) {
        for (int k = 0; k < cols_; ++k) (*this)(i, k) = -(*this)(i, k);
    }
    void negate_col(int i) {
        for (int k = 0; k < rows_; ++k) (*this)(k, i) = -(*this)(k, i);
    }

private:
    int rows_, cols_;
    std::vector<Int> a_;
};

class RatMatrix {
public:
    RatMatrix() : rows_(0), cols_(0) {}
    RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static RatMatrix from_int(const IntMatrix& m) {
        RatMatrix r(m.rows(), m.cols());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
        return r;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rat& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const Rat& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    bool operator==(const RatMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    RatMatrix transpose() const {
        RatMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    RatMatrix operator*(const RatMatrix& o) const {
        assert(cols_ == o.rows_);
        RatMatrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const Rat& v = (*this)(i, k);
                if (v == 0) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }

private:
    int rows_, cols_;
    std::vector<Rat> a_;
};

// Exact determinant, fraction-free elimination (Bareiss).
inline Int det(const IntMatrix& m) {
    assert(m.rows() == m.cols());
    const int n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (a(i, k) != 0) { piv = i; break; }
            if (piv < 0) return 0;
            a.swap_rows(k, piv);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                a(i, j) = a(k, k) * a(i, j) - a(i, k) * a(k, j);
                mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
            }
        prev = a(k, k);
    }
    return sign > 0 ? a(n - 1, n - 1) : Int(-a(n - 1, n - 1));
}

// Inverse over the rationals.
inline RatMatrix rat_inverse(const RatMatrix& m) {
    assert(m.rows() == m.cols());
    const int n = m.rows();
    RatMatrix a = m;
    RatMatrix inv = RatMatrix::identity(n);
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        for (int i = k; i < n; ++i)
            if (a(i, k) != 0) { piv = i; break; }
        if (piv < 0) throw SingularMatrix();
        for (int j = 0; j < n; ++j) {
            std::swap(a(k, j), a(piv, j));
            std::swap(inv(k, j), inv(piv, j));
        }
        Rat d = a(k, k);
        for (int j = 0; j < n; ++j) { a(k, j) /= d; inv(k, j) /= d; }
        for (int i = 0; i < n; ++i) {
            if (i == k || a(i, k) == 0) continue;
            Rat c = a(i, k);
            for (int j = 0; j < n; ++j) {
                a(i, j) -= c * a(k, j);
                inv(i, j) -= c * inv(k, j);
            }
        }
    }
    return inv;
}

inline RatMatrix rat_inverse(const IntMatrix& m) { return rat_inverse(RatMatrix::from_int(m)); }

struct SmithResult {
    IntMatrix s; // diagonal, d_i | d_{i+1}, d_i >= 0
    IntMatrix u; // unimodular row transform
    IntMatrix v; // unimodular column transform, u*m*v = s
};

// Smith normal form with transforms. Pivot selection: minimal nonzero
// absolute value in the remaining block, to curb coefficient growth.
inline SmithResult smith_normal_form(const IntMatrix& m) {
    const int rows = m.rows(), cols = m.cols();
    SmithResult r{m, IntMatrix::identity(rows), IntMatrix::identity(cols)};
    IntMatrix& s = r.s;
    const int n = std::min(rows, cols);
    Int q;
    for (int k = 0; k < n; ++k) {
        for (;;) {
            // locate minimal nonzero entry in block [k.., k..]
            int pi = -1, pj = -1;
            for (int i = k; i < rows; ++i)
                for (int j = k; j < cols; ++j) {
                    if (s(i, j) == 0) continue;
                    if (pi < 0 || mpz_cmpabs(s(i, j).get_mpz_t(), s(pi, pj).get_mpz_t()) < 0) {
                        pi = i; pj = j;
                    }
                }
            if (pi < 0) goto done; // remaining block zero
            if (pi != k) { s.swap_rows(k, pi); r.u.swap_rows(k, pi); }
            if (pj != k) { s.swap_cols(k, pj); r.v.swap_cols(k, pj); }
            bool clean = true;
            for (int i = k + 1; i < rows; ++i) {
                if (s(i, k) == 0) continue;
                mpz_fdiv_q(q.get_mpz_t(), s(i, k).get_mpz_t(), s(k, k).get_mpz_t());
                s.add_row(i, k, -q);
                r.u.add_row(i, k, -q);
                if (s(i, k) != 0) clean = false;
            }
            for (int j = k + 1; j < cols; ++j) {
                if (s(k, j) == 0) continue;
                mpz_fdiv_q(q.get_mpz_t(), s(k, j).get_mpz_t(), s(k, k).get_mpz_t());
                s.add_col(j, k, -q);
                r.v.add_col(j, k, -q);
                if (s(k, j) != 0) clean = false;
            }
            if (!clean) continue;
            // pivot must divide the rest of the block
            bool divides = true;
            for (int i = k + 1; i < rows && divides; ++i)
                for (int j = k + 1; j < cols && divides; ++j)
                    if (s(i, j) % s(k, k) != 0) {
                        s.add_row(k, i, 1);
                        r.u.add_row(k, i, 1);
                        divides = false;
                    }
            if (divides) break;
        }
        if (s(k, k) < 0) { s.negate_row(k); r.u.negate_row(k); }
    }
done:
    return r;
}

// Inertia indices over Q, exact. Symmetric congruence elimination with
// 2x2 hyperbolic handling of zero diagonals.
inline std::pair<int, int> symmetric_signature(const IntMatrix& g) {
    if (!g.is_symmetric()) throw Error("symmetric_signature: matrix not symmetric");
    const int n = g.rows();
    RatMatrix a = RatMatrix::from_int(g);
    int n_plus = 0, n_minus = 0;
    std::vector<bool> usedv(n, false);
    for (int step = 0; step < n; ++step) {
        int piv = -1;
        for (int i = 0; i < n; ++i)
            if (!usedv[i] && a(i, i) != 0) { piv = i; break; }
        if (piv < 0) {
            // all free diagonal entries zero: find an off-diagonal nonzero
            int fi = -1, fj = -1;
            for (int i = 0; i < n && fi < 0; ++i) {
                if (usedv[i]) continue;
                for (int j = 0; j < n; ++j)
                    if (!usedv[j] && j != i && a(i, j) != 0) { fi = i; fj = j; break; }
            }
            if (fi < 0) throw SingularMatrix("symmetric_signature: form is degenerate");
            // congruence x_fi -> x_fi + x_fj creates 2*a(fi,fj) on the diagonal
            for (int k = 0; k < n; ++k) a(fi, k) += a(fj, k);
            for (int k = 0; k < n; ++k) a(k, fi) += a(k, fj);
            piv = fi;
        }
        Rat d = a(piv, piv);
        if (d > 0) ++n_plus; else ++n_minus;
        usedv[piv] = true;
        for (int i = 0; i < n; ++i) {
            if (usedv[i] || a(i, piv) == 0) continue;
            Rat c = a(i, piv) / d;
            for (int k = 0; k < n; ++k) a(i, k) -= c * a(piv, k);
            for (int k = 0; k < n; ++k) a(k, i) -= c * a(k, piv);
        }
    }
    return {n_plus, n_minus};
}

struct LdlResult {
    RatMatrix lower;           // unit lower triangle
    std::vector<Rat> pivots;   // positive rational pivots, L*D*L^T = G
};

inline LdlResult rational_cholesky(const IntMatrix& g) {
    if (!g.is_symmetric()) throw NotPositiveDefinite("rational_cholesky: matrix not symmetric");
    const int n = g.rows();
    RatMatrix a = RatMatrix::from_int(g);
    LdlResult r{RatMatrix::identity(n), std::vector<Rat>(n)};
    for (int k = 0; k < n; ++k) {
        if (a(k, k) <= 0) throw NotPositiveDefinite();
        r.pivots[k] = a(k, k);
        for (int i = k + 1; i < n; ++i) r.lower(i, k) = a(i, k) / a(k, k);
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j <= i; ++j) {
                a(i, j) -= a(i, k) * a(j, k) / a(k, k);
                a(j, i) = a(i, j);
            }
    }
    return r;
}

namespace detail {

// LLL on a Gram matrix with exact rational Gram-Schmidt data.
// G is overwritten with T^T G T.
inline void lll_gram_exact(IntMatrix& g, IntMatrix& t, long delta_num = 99, long delta_den = 100) {
    const int n = g.rows();
    if (n <= 1) return;
    Rat delta(delta_num, delta_den);
    // mu(i,j) and squared GS norms b(i) recomputed from scratch (rank <= 22)
    RatMatrix mu(n, n);
    std::vector<Rat> b(n);
    auto compute_gso = [&]() {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) {
                Rat s = g(i, j);
                for (int k = 0; k < j; ++k) s -= mu(i, k) * mu(j, k) * b[k];
                mu(i, j) = s / b[j];
            }
            Rat s = g(i, i);
            for (int k = 0; k < i; ++k) s -= mu(i, k) * mu(i, k) * b[k];
            b[i] = s;
            if (b[i] <= 0) throw NotPositiveDefinite("lll_gram_exact: form not positive definite");
        }
    };
    compute_gso();
    auto size_reduce = [&](int i, int j) {
        Rat m = mu(i, j);
        if (m <= Rat(-1, 2) || m > Rat(1, 2)) {
            Int c;
            Rat half = m + Rat(1, 2);
            mpz_fdiv_q(c.get_mpz_t(), half.get_num().get_mpz_t(), half.get_den().get_mpz_t());
            if (c != 0) {
                // basis op b_i -= c b_j, congruence on gram
                g.add_row(i, j, -c);
                g.add_col(i, j, -c);
                t.add_col(i, j, -c);
                for (int k = 0; k <= j; ++k) mu(i, k) -= Rat(c) * mu(j, k);
            }
        }
    };
    int k = 1;
    int guard = 0;
    while (k < n) {
        if (++guard > 100000) throw Error("lll_gram_exact: did not terminate");
        for (int j = k - 1; j >= 0; --j) size_reduce(k, j);
        Rat lhs = b[k] + mu(k, k - 1) * mu(k, k - 1) * b[k - 1];
        if (lhs >= delta * b[k - 1]) {
            ++k;
        } else {
            g.swap_rows(k, k - 1);
            g.swap_cols(k, k - 1);
            t.swap_cols(k, k - 1);
            compute_gso();
            k = std::max(k - 1, 1);
        }
    }
}

} // namespace detail

struct ReduceResult {
    IntMatrix gram;      // T^T G T
    IntMatrix transform; // unimodular T
};

// Unimodular reduction of a positive definite Gram matrix (exact LLL).
// The returned transform is verified exactly against the input.
inline ReduceResult basis_reduce(const IntMatrix& g) {
    if (!g.is_symmetric()) throw NotPositiveDefinite("basis_reduce: matrix not symmetric");
    ReduceResult r{g, IntMatrix::identity(g.rows())};
    detail::lll_gram_exact(r.gram, r.transform);
    assert(r.transform.transpose() * g * r.transform == r.gram);
    return r;
}

inline std::vector<Int> elementary_divisors(const IntMatrix& m) {
    SmithResult s = smith_normal_form(m);
    std::vector<Int> d;
    for (int i = 0; i < std::min(m.rows(), m.cols()); ++i)
        if (s.s(i, i) != 0 && s.s(i, i) != 1) d.push_back(s.s(i, i));
    return d;
}

} // namespace enr
