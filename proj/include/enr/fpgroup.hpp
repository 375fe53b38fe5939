#pragma once

// Matrix groups over F_p acting on column vectors: exact group order via a
// deterministic Schreier-Sims stabilizer chain with base e_0, ..., e_{n-1}.

#include <map>
#include <vector>

#include "enr/errors.hpp"
#include "enr/intmat.hpp"

namespace enr {

struct FpMat {
    long p = 0;
    int n = 0;
    std::vector<int> a;

    FpMat() = default;
    FpMat(long p_, int n_) : p(p_), n(n_), a(size_t(n_) * n_, 0) {}

    static FpMat identity(long p, int n) {
        FpMat m(p, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int& operator()(int i, int j) { return a[size_t(i) * n + j]; }
    int operator()(int i, int j) const { return a[size_t(i) * n + j]; }
    bool operator==(const FpMat& o) const { return p == o.p && n == o.n && a == o.a; }
    bool is_identity() const { return *this == identity(p, n); }

    FpMat operator*(const FpMat& o) const {
        FpMat r(p, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                long v = (*this)(i, k);
                if (!v) continue;
                for (int j = 0; j < n; ++j) r(i, j) = int((r(i, j) + v * o(k, j)) % p);
            }
        return r;
    }

    std::vector<int> apply(const std::vector<int>& v) const {
        std::vector<int> r(n, 0);
        for (int j = 0; j < n; ++j) {
            if (!v[j]) continue;
            for (int i = 0; i < n; ++i) r[i] = int((r[i] + long((*this)(i, j)) * v[j]) % p);
        }
        return r;
    }
};

namespace detail {

inline long fp_inv(long a, long p) {
    long b = p, x0 = 1, x1 = 0;
    a %= p;
    if (a < 0) a += p;
    long aa = a;
    while (b != 0) {
        long q = aa / b, t = aa % b;
        aa = b; b = t;
        t = x0 - q * x1; x0 = x1; x1 = t;
    }
    return ((x0 % p) + p) % p;
}

inline FpMat fp_inverse(const FpMat& m) {
    const int n = m.n;
    const long p = m.p;
    FpMat w = m, inv = FpMat::identity(p, n);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (w(r, c) != 0) { piv = r; break; }
        if (piv < 0) throw Error("fp_inverse: singular matrix");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(w(piv, j), w(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
        long s = fp_inv(w(c, c), p);
        for (int j = 0; j < n; ++j) {
            w(c, j) = int(w(c, j) * s % p);
            inv(c, j) = int(inv(c, j) * s % p);
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || w(r, c) == 0) continue;
            long f = w(r, c);
            for (int j = 0; j < n; ++j) {
                w(r, j) = int(((w(r, j) - f * w(c, j)) % p + p) % p);
                inv(r, j) = int(((inv(r, j) - f * inv(c, j)) % p + p) % p);
            }
        }
    }
    return inv;
}

inline unsigned long long fp_vec_index(const std::vector<int>& v, long p) {
    unsigned long long idx = 0;
    for (size_t i = v.size(); i-- > 0;) idx = idx * (unsigned long long)p + (unsigned long long)v[i];
    return idx;
}

class StabilizerChain {
public:
    StabilizerChain(long p, int n) : p_(p), n_(n) {
        levels_.resize(n);
        for (int i = 0; i < n; ++i) {
            levels_[i].beta.assign(n, 0);
            levels_[i].beta[i] = 1;
            levels_[i].transversal[fp_vec_index(levels_[i].beta, p)] = FpMat::identity(p, n);
        }
    }

    void insert(const FpMat& g) {
        if (sift_add(g, 0)) {
            // new coset representatives spawn Schreier generators; iterate
            // until every one of them sifts to the identity
            while (verify_once()) {}
        }
    }

    Int order() const {
        Int o = 1;
        for (const Level& l : levels_) o *= Int(long(l.transversal.size()));
        return o;
    }

private:
    struct Level {
        std::vector<int> beta;
        std::vector<FpMat> gens;
        std::map<unsigned long long, FpMat> transversal; // orbit point -> coset rep
    };

    void rebuild_orbit(int i) {
        Level& l = levels_[i];
        l.transversal.clear();
        l.transversal[fp_vec_index(l.beta, p_)] = FpMat::identity(p_, n_);
        // all generators of deeper-stabilizer levels also fix beta_0..beta_{i-1}
        std::vector<const FpMat*> gens;
        for (int j = i; j < n_; ++j)
            for (const FpMat& s : levels_[j].gens) gens.push_back(&s);
        std::vector<unsigned long long> frontier{fp_vec_index(l.beta, p_)};
        while (!frontier.empty()) {
            std::vector<unsigned long long> next;
            for (unsigned long long idx : frontier) {
                FpMat u = l.transversal.at(idx);
                std::vector<int> pt = u.apply(l.beta);
                for (const FpMat* s : gens) {
                    std::vector<int> im = s->apply(pt);
                    unsigned long long ii = fp_vec_index(im, p_);
                    if (!l.transversal.count(ii)) {
                        l.transversal.emplace(ii, *s * u);
                        next.push_back(ii);
                    }
                }
            }
            frontier = std::move(next);
        }
    }

    // one pass over all Schreier generators; returns true if the chain grew
    bool verify_once() {
        for (int i = n_ - 1; i >= 0; --i) {
            Level& l = levels_[i];
            std::vector<const FpMat*> gens;
            for (int j = i; j < n_; ++j)
                for (const FpMat& s : levels_[j].gens) gens.push_back(&s);
            for (auto& [idx, u] : l.transversal) {
                std::vector<int> pt = u.apply(l.beta);
                for (const FpMat* s : gens) {
                    std::vector<int> im = s->apply(pt);
                    const FpMat& v = l.transversal.at(fp_vec_index(im, p_));
                    FpMat schreier = fp_inverse(v) * (*s * u);
                    if (sift_add(schreier, i)) return true;
                }
            }
        }
        return false;
    }

    // sift an element fixing beta_0..beta_{i-1}; on a nontrivial residue the
    // residue is recorded as a generator and every orbit is rebuilt (a new
    // generator at level j also acts at all shallower levels)
    bool sift_add(FpMat h, int i) {
        for (int j = i; j < n_; ++j) {
            std::vector<int> im = h.apply(levels_[j].beta);
            auto it = levels_[j].transversal.find(fp_vec_index(im, p_));
            if (it == levels_[j].transversal.end()) {
                levels_[j].gens.push_back(h);
                for (int k = 0; k < n_; ++k) rebuild_orbit(k);
                return true;
            }
            h = fp_inverse(it->second) * h;
        }
        return false;
    }

    long p_;
    int n_;
    std::vector<Level> levels_;
};

} // namespace detail

// Order of the subgroup of GL(n, F_p) generated by `gens`.
inline Int fp_matrix_group_order(const std::vector<FpMat>& gens) {
    if (gens.empty()) return 1;
    const long p = gens[0].p;
    const int n = gens[0].n;
    if (n == 0) return 1;
    detail::StabilizerChain chain(p, n);
    for (const FpMat& g : gens) {
        if (g.p != p || g.n != n) throw Error("fp_matrix_group_order: mixed shapes");
        chain.insert(g);
    }
    return chain.order();
}

} // namespace enr
