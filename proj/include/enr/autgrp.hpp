#pragma once

// Automorphism groups and isometry testing for definite lattices:
// backtracking over short vectors with candidate-list pruning, group order
// by orbit-stabilizer counting along the basis flag.

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "enr/errors.hpp"
#include "enr/shortvec.hpp"
#include "enr/smallmat.hpp"

namespace enr {

struct IsometryGroupGens {
    std::vector<IntMatrix> generators; // each T satisfies T^T G T = G
    Int order;
};

namespace detail {

struct VecPool {
    int n = 0;
    std::vector<std::vector<int>> vecs; // both signs
    std::vector<i64> norms;
    std::vector<std::vector<i64>> gv; // gv[i] = G * vecs[i]
};

inline VecPool build_pool(const SMat& g, i64 bound) {
    VecPool p;
    p.n = g.n;
    for (const ShortVector& sv : short_vectors(g, bound)) {
        std::vector<int> neg(sv.coords);
        for (auto& x : neg) x = -x;
        p.vecs.push_back(sv.coords);
        p.norms.push_back(sv.norm);
        p.vecs.push_back(std::move(neg));
        p.norms.push_back(sv.norm);
    }
    p.gv.resize(p.vecs.size());
    for (size_t i = 0; i < p.vecs.size(); ++i) gram_times(g, p.vecs[i], p.gv[i]);
    return p;
}

// Distribution of inner products against a pool of short vectors, grouped by
// norm: an isometry invariant used to prune candidate images.
using VecFp = std::vector<std::pair<std::pair<i64, i64>, long>>;

inline VecFp vector_fingerprint(const VecPool& pool, const std::vector<i64>& gv, i64 fp_bound) {
    std::map<std::pair<i64, i64>, long> m;
    // pool is sorted by norm
    for (size_t i = 0; i < pool.vecs.size() && pool.norms[i] <= fp_bound; ++i)
        ++m[{pool.norms[i], dot_vec(pool.vecs[i], gv)}];
    return {m.begin(), m.end()};
}

// Search W (columns = images, living in the lattice of `pool`) with
// prescribed inner products target(i,j) = <w_i, w_j>. Images for levels
// < fixed.size() are prescribed. Levels are visited in `order`.
class IsomSearch {
public:
    IsomSearch(const SMat& target, const VecPool& pool, std::vector<int> order)
        : target_(target), pool_(pool), order_(std::move(order)), n_(target.n) {}

    // enable fingerprint pruning: basis vectors of the target lattice are
    // profiled against target_pool; candidates against the search pool
    void set_fingerprints(const VecPool* target_pool, i64 fp_bound) {
        fp_pool_ = target_pool;
        fp_bound_ = fp_bound;
        fp_memo_.assign(pool_.vecs.size(), {});
        fp_known_.assign(pool_.vecs.size(), false);
    }

    // fixed[t] = image of basis vector order_[t]
    std::optional<std::vector<std::vector<int>>> run(const std::vector<std::vector<int>>& fixed) {
        const int m = int(fixed.size());
        std::vector<std::vector<int>> cand(n_);
        std::vector<std::vector<i64>> fixed_gv(m);
        for (int t = 0; t < m; ++t) gram_times_pool(fixed[t], fixed_gv[t]);
        // consistency of the prescribed images themselves
        for (int t = 0; t < m; ++t)
            for (int s = 0; s <= t; ++s)
                if (dot_vec(fixed[s], fixed_gv[t]) != target_(order_[s], order_[t])) return std::nullopt;
        for (int k = m; k < n_; ++k) {
            const int bk = order_[k];
            VecFp want;
            if (fp_pool_) {
                // dot(x, G2 e_bk) over the target pool is gv[x][bk]
                std::map<std::pair<i64, i64>, long> wm;
                for (size_t i = 0; i < fp_pool_->vecs.size() && fp_pool_->norms[i] <= fp_bound_; ++i)
                    ++wm[{fp_pool_->norms[i], fp_pool_->gv[i][bk]}];
                want.assign(wm.begin(), wm.end());
            }
            for (size_t i = 0; i < pool_.vecs.size(); ++i) {
                if (pool_.norms[i] != target_(bk, bk)) continue;
                bool ok = true;
                for (int t = 0; t < m && ok; ++t)
                    ok = dot_vec(pool_.vecs[i], fixed_gv[t]) == target_(order_[t], bk);
                if (ok && fp_pool_ && candidate_fp(int(i)) != want) ok = false;
                if (ok) cand[k].push_back(int(i));
            }
            if (cand[k].empty()) return std::nullopt;
        }
        images_ = fixed;
        images_.resize(n_);
        if (dfs(m, cand)) {
            std::vector<std::vector<int>> cols(n_);
            for (int t = 0; t < n_; ++t) cols[order_[t]] = images_[t];
            return cols;
        }
        return std::nullopt;
    }

private:
    void gram_times_pool(const std::vector<int>& v, std::vector<i64>& out) const {
        // the pool's Gram is the one its gv entries were built from; recompute
        // for arbitrary vectors via the target-side identity is not available,
        // so we keep a copy of G here
        gram_times(*gram_, v, out);
    }

public:
    const SMat* gram_ = nullptr; // Gram of the pool's ambient lattice

private:
    bool dfs(int k, const std::vector<std::vector<int>>& cand) {
        if (k == n_) return true;
        const int bk = order_[k];
        for (int ci : cand[k]) {
            const std::vector<i64>& u = pool_.gv[ci];
            std::vector<std::vector<int>> next = cand;
            bool dead = false;
            for (int j = k + 1; j < n_ && !dead; ++j) {
                std::vector<int> keep;
                keep.reserve(next[j].size());
                const i64 want = target_(bk, order_[j]);
                for (int cj : next[j])
                    if (dot_vec(pool_.vecs[cj], u) == want) keep.push_back(cj);
                if (keep.empty()) dead = true;
                next[j] = std::move(keep);
            }
            if (dead) continue;
            images_[k] = pool_.vecs[ci];
            if (dfs(k + 1, next)) return true;
        }
        return false;
    }

    const VecFp& candidate_fp(int i) {
        if (!fp_known_[i]) {
            fp_memo_[i] = vector_fingerprint(pool_, pool_.gv[i], fp_bound_);
            fp_known_[i] = true;
        }
        return fp_memo_[i];
    }

    const SMat& target_;
    const VecPool& pool_;
    std::vector<int> order_;
    int n_;
    std::vector<std::vector<int>> images_;
    const VecPool* fp_pool_ = nullptr;
    i64 fp_bound_ = 0;
    std::vector<VecFp> fp_memo_;
    std::vector<char> fp_known_;
};

inline SMat columns_to_smat(const std::vector<std::vector<int>>& cols) {
    SMat w(int(cols.size()));
    for (int j = 0; j < w.n; ++j)
        for (int i = 0; i < w.n; ++i) w(i, j) = cols[j][i];
    return w;
}

// visit order: scarce candidate counts first
inline std::vector<int> scarcity_order(const SMat& g, const VecPool& pool) {
    std::vector<std::pair<long, int>> counts;
    for (int k = 0; k < g.n; ++k) {
        long c = 0;
        for (i64 nm : pool.norms)
            if (nm == g(k, k)) ++c;
        counts.push_back({c, k});
    }
    std::sort(counts.begin(), counts.end());
    std::vector<int> order;
    for (auto& [c, k] : counts) order.push_back(k);
    return order;
}

inline std::vector<int> apply_cols(const SMat& w, const std::vector<int>& v) {
    std::vector<int> r(w.n, 0);
    for (int j = 0; j < w.n; ++j) {
        if (!v[j]) continue;
        for (int i = 0; i < w.n; ++i) r[i] += int(w(i, j)) * v[j];
    }
    return r;
}

struct SmallAut {
    std::vector<SMat> gens; // in the basis of the given Gram
    Int order;
};

inline SmallAut automorphism_group_small(const SMat& g) {
    const int n = g.n;
    SmallAut res;
    res.order = 1;
    if (n == 0) return res;
    i64 bound = 0;
    for (int i = 0; i < n; ++i) bound = std::max(bound, g(i, i));
    VecPool pool = build_pool(g, bound);
    std::vector<int> order = scarcity_order(g, pool);

    // process the flag from the deepest stabilizer outwards; generators found
    // at position k fix order[0..k-1], so they act within every later orbit
    for (int k = n - 1; k >= 0; --k) {
        std::vector<std::vector<int>> fixed;
        for (int t = 0; t < k; ++t) {
            std::vector<int> e(n, 0);
            e[order[t]] = 1;
            fixed.push_back(std::move(e));
        }
        std::vector<int> ek(n, 0);
        ek[order[k]] = 1;

        std::set<std::vector<int>> orbit{ek};
        auto close_orbit = [&]() {
            std::vector<std::vector<int>> frontier(orbit.begin(), orbit.end());
            while (!frontier.empty()) {
                std::vector<std::vector<int>> next;
                for (const auto& v : frontier)
                    for (const SMat& a : res.gens) {
                        std::vector<int> w = apply_cols(a, v);
                        if (orbit.insert(w).second) next.push_back(std::move(w));
                    }
                frontier = std::move(next);
            }
        };
        close_orbit();

        // candidates: vectors with the right norm and inner products
        IsomSearch base(g, pool, order);
        base.gram_ = &g;
        base.set_fingerprints(&pool, pool.norms.empty() ? 0 : pool.norms.front());
        for (size_t i = 0; i < pool.vecs.size(); ++i) {
            if (pool.norms[i] != g(order[k], order[k])) continue;
            if (orbit.count(pool.vecs[i])) continue;
            bool ok = true;
            for (int t = 0; t < k && ok; ++t)
                ok = pool.gv[i][order[t]] == g(order[t], order[k]);
            if (!ok) continue;
            std::vector<std::vector<int>> pre = fixed;
            pre.push_back(pool.vecs[i]);
            auto w = base.run(pre);
            if (w) {
                res.gens.push_back(columns_to_smat(*w));
                close_orbit();
            }
        }
        res.order *= Int(long(orbit.size()));
    }
    return res;
}

} // namespace detail

inline IsometryGroupGens automorphism_generators(const IntegralLattice& l) {
    IntegralLattice work = l;
    if (l.rank() > 0 && l.is_negative_definite()) work = twist(l, -1);
    if (l.rank() > 0 && !work.is_positive_definite())
        throw NotPositiveDefinite("automorphism_generators requires a definite lattice");
    IsometryGroupGens out;
    if (l.rank() == 0) {
        out.order = 1;
        return out;
    }
    SmallReduce red = reduce_gram(smat_from_int(work.gram()));
    detail::SmallAut aut = detail::automorphism_group_small(red.gram);
    out.order = aut.order;
    // conjugate back: A_orig = T A_red T^{-1}
    IntMatrix t = smat_to_int(red.transform);
    RatMatrix tinv = rat_inverse(RatMatrix::from_int(t));
    for (const SMat& a : aut.gens) {
        RatMatrix conj = RatMatrix::from_int(t) * RatMatrix::from_int(smat_to_int(a)) * tinv;
        IntMatrix ai(l.rank(), l.rank());
        for (int i = 0; i < l.rank(); ++i)
            for (int j = 0; j < l.rank(); ++j) {
                const Rat& e = conj(i, j);
                if (e.get_den() != 1) throw Error("automorphism conjugation produced a non-integer");
                ai(i, j) = e.get_num();
            }
        IntMatrix check = ai.transpose() * l.gram() * ai;
        if (!(check == l.gram())) throw Error("automorphism verification failed");
        out.generators.push_back(std::move(ai));
    }
    return out;
}

inline Int automorphism_order(const IntegralLattice& l) { return automorphism_generators(l).order; }

// T with T^T G1 T = G2, or nullopt.
inline std::optional<IntMatrix> isometry_test(const IntegralLattice& l1, const IntegralLattice& l2) {
    if (l1.rank() != l2.rank()) return std::nullopt;
    const int n = l1.rank();
    if (n == 0) return IntMatrix(0, 0);
    bool neg = l1.is_negative_definite();
    IntegralLattice w1 = neg ? twist(l1, -1) : l1;
    IntegralLattice w2 = l2.is_negative_definite() ? twist(l2, -1) : l2;
    if (!w1.is_positive_definite() || !w2.is_positive_definite())
        throw NotPositiveDefinite("isometry_test requires definite lattices");
    if ((l2.is_negative_definite() != neg) || l1.det() != l2.det()) return std::nullopt;

    SmallReduce r1 = reduce_gram(smat_from_int(w1.gram()));
    SmallReduce r2 = reduce_gram(smat_from_int(w2.gram()));
    i64 b1 = 0, b2 = 0;
    for (int i = 0; i < n; ++i) {
        b1 = std::max(b1, r1.gram(i, i));
        b2 = std::max(b2, r2.gram(i, i));
    }
    // theta prefix up to the common diag bound must agree
    const i64 fb = std::max(b1, b2);
    detail::VecPool pool1 = detail::build_pool(r1.gram, fb);
    detail::VecPool pool2 = detail::build_pool(r2.gram, fb);
    {
        std::map<i64, long> c1, c2;
        for (i64 nm : pool1.norms) ++c1[nm];
        for (i64 nm : pool2.norms) ++c2[nm];
        if (c1 != c2) return std::nullopt;
    }

    // images of the r2 flag inside lattice 1: W^T G1r W = G2r
    detail::IsomSearch search(r2.gram, pool1, detail::scarcity_order(r2.gram, pool1));
    search.gram_ = &r1.gram;
    // profile against the kissing set only: cheap and already discriminating
    search.set_fingerprints(&pool2, pool1.norms.empty() ? 0 : pool1.norms.front());
    auto w = search.run({});
    if (!w) return std::nullopt;
    SMat wm = detail::columns_to_smat(*w);

    // T = T1 W T2^{-1}
    RatMatrix t2inv = rat_inverse(RatMatrix::from_int(smat_to_int(r2.transform)));
    RatMatrix tq = RatMatrix::from_int(smat_to_int(r1.transform)) *
                   RatMatrix::from_int(smat_to_int(wm)) * t2inv;
    IntMatrix t(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Rat& e = tq(i, j);
            if (e.get_den() != 1) throw Error("isometry transform not integral");
            t(i, j) = e.get_num();
        }
    IntMatrix check = t.transpose() * l1.gram() * t;
    if (!(check == l2.gram())) throw Error("isometry verification failed");
    return t;
}

} // namespace enr
