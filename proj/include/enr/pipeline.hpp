#pragma once

// From (p, sigma) to the Enriques-quotient bounds: Neron-Severi lattice,
// twisted Gamma, gluing form delta, a seed in the complement genus, genus
// enumeration, and the orbit-counting upper bound.

#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "enr/autgrp.hpp"
#include "enr/finite_form.hpp"
#include "enr/fpgroup.hpp"
#include "enr/lattice.hpp"
#include "enr/neighbor.hpp"

namespace enr {

struct SupersingularParams {
    long p = 3;
    int sigma = 1;
};

inline void validate_params(const SupersingularParams& pr) {
    if (pr.p < 3 || pr.p % 2 == 0) throw UnsupportedParameter("p must be an odd prime >= 3");
    for (long d = 3; d * d <= pr.p; d += 2)
        if (pr.p % d == 0) throw UnsupportedParameter("p must be prime");
    if (pr.sigma < 1 || pr.sigma > 10) throw UnsupportedParameter("sigma must be in 1..10");
}

namespace detail {

// Bounded exhaustive search over Minkowski-style reduced even positive
// definite rank-4 Grams of determinant D; first accepted candidate wins.
// Reduced: diag 2a_1 <= ... <= 2a_4, |g_ij| <= a_i, and g_{1j} >= 0 by sign
// normalization of the basis vectors.
inline std::optional<IntegralLattice> search_rank4_even(const Int& big_d,
                                                        const std::function<bool(const IntegralLattice&)>& accept) {
    if (!big_d.fits_slong_p()) throw TooLarge("rank-4 search determinant too large");
    const long d = big_d.get_si();
    // Minkowski: product of diagonal entries <= (4/3)^6 * det (margin 8)
    const long prod_hi = 8 * d;
    for (long a1 = 1; 16 * a1 * a1 * a1 * a1 <= prod_hi; ++a1)
        for (long a2 = a1; 16 * a1 * a2 * a2 * a2 <= prod_hi; ++a2)
            for (long a3 = a2; 16 * a1 * a2 * a3 * a3 <= prod_hi; ++a3)
                for (long a4 = a3; 16 * a1 * a2 * a3 * a4 <= prod_hi; ++a4) {
                    if (16 * a1 * a2 * a3 * a4 < d) continue;
                    for (long g12 = 0; g12 <= a1; ++g12) {
                        if (4 * a1 * a2 - g12 * g12 <= 0) continue;
                        for (long g13 = 0; g13 <= a1; ++g13)
                            for (long g23 = -a2; g23 <= a2; ++g23) {
                                // det of the 3x3 leading minor
                                long m3 = 2 * a1 * (4 * a2 * a3 - g23 * g23) - g12 * (2 * g12 * a3 - g23 * g13) +
                                          g13 * (g12 * g23 - 2 * a2 * g13);
                                if (m3 <= 0) continue;
                                for (long g14 = 0; g14 <= a1; ++g14)
                                    for (long g24 = -a2; g24 <= a2; ++g24)
                                        for (long g34 = -a3; g34 <= a3; ++g34) {
                                            IntMatrix g(4, 4);
                                            g(0, 0) = 2 * a1; g(1, 1) = 2 * a2;
                                            g(2, 2) = 2 * a3; g(3, 3) = 2 * a4;
                                            g(0, 1) = g(1, 0) = g12;
                                            g(0, 2) = g(2, 0) = g13;
                                            g(1, 2) = g(2, 1) = g23;
                                            g(0, 3) = g(3, 0) = g14;
                                            g(1, 3) = g(3, 1) = g24;
                                            g(2, 3) = g(3, 2) = g34;
                                            if (det(g) != d) continue;
                                            IntegralLattice cand(g);
                                            if (!cand.is_positive_definite()) continue;
                                            if (accept(cand)) return cand;
                                        }
                            }
                    }
                }
    return std::nullopt;
}

inline bool divisors_are(const IntegralLattice& l, const std::vector<long>& expect) {
    std::vector<Int> got;
    for (const Int& e : discriminant_group(l).elementary_divisors) got.push_back(e);
    if (got.size() != expect.size()) return false;
    std::vector<long> gl;
    for (const Int& e : got) {
        if (!e.fits_slong_p()) return false;
        gl.push_back(e.get_si());
    }
    std::vector<long> ex = expect;
    std::sort(gl.begin(), gl.end());
    std::sort(ex.begin(), ex.end());
    return gl == ex;
}

// deterministic sweep of index-p descent vectors: basis vectors, then pairs,
// then triples, until `keep` accepts a sublattice
inline std::optional<IntegralLattice> descend_once(const IntegralLattice& l, long p,
                                                   const std::function<bool(const IntegralLattice&)>& keep,
                                                   long budget) {
    const int n = l.rank();
    long tried = 0;
    auto attempt = [&](const std::vector<Int>& v) -> std::optional<IntegralLattice> {
        if (tried >= budget) return std::nullopt;
        ++tried;
        try {
            IntegralLattice sub = index_p_sublattice(l, v, p);
            if (keep(sub)) return sub;
        } catch (const TrivialFunctional&) {
        }
        return std::nullopt;
    };
    std::vector<Int> v(n, 0);
    for (int i = 0; i < n && tried < budget; ++i) {
        v.assign(n, 0);
        v[i] = 1;
        if (auto r = attempt(v)) return r;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (long c = 1; c < p; ++c) {
                if (tried >= budget) return std::nullopt;
                v.assign(n, 0);
                v[i] = 1;
                v[j] = c;
                if (auto r = attempt(v)) return r;
            }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (long c = 1; c < p; ++c)
                    for (long e = 1; e < p; ++e) {
                        if (tried >= budget) return std::nullopt;
                        v.assign(n, 0);
                        v[i] = 1;
                        v[j] = c;
                        v[k] = e;
                        if (auto r = attempt(v)) return r;
                    }
    return std::nullopt;
}

} // namespace detail

// The supersingular K3 Neron-Severi lattice: even, rank 22, signature (1,21),
// p-elementary with discriminant group (Z/p)^{2 sigma}.
inline IntegralLattice ns_lattice(const SupersingularParams& pr, long budget = 200000) {
    validate_params(pr);
    const long p = pr.p;
    IntegralLattice base;
    if (p % 4 == 3) {
        base = direct_sum(direct_sum(standard_lattice("U"), direct_sum(standard_lattice("E8"), standard_lattice("E8"))),
                          direct_sum(k2_lattice(p), k2_lattice(p)));
    } else {
        auto x4 = detail::search_rank4_even(Int(p) * p, [&](const IntegralLattice& cand) {
            return detail::divisors_are(cand, {p, p});
        });
        if (!x4) throw ConstructionFailed("no rank-4 block with determinant p^2 found");
        base = direct_sum(direct_sum(standard_lattice("U"), direct_sum(standard_lattice("E8"), standard_lattice("E8"))),
                          twist(*x4, -1));
    }
    auto verify = [&](const IntegralLattice& l, int sigma) {
        if (l.rank() != 22 || !l.is_even()) return false;
        if (l.signature() != std::pair<int, int>(1, 21)) return false;
        return detail::divisors_are(l, std::vector<long>(size_t(2 * sigma), p));
    };
    if (!verify(base, 1)) throw ConstructionFailed("sigma=1 lattice failed verification");
    IntegralLattice cur = base;
    for (int s = 2; s <= pr.sigma; ++s) {
        auto next = detail::descend_once(cur, p, [&](const IntegralLattice& sub) { return verify(sub, s); }, budget);
        if (!next) throw ConstructionFailed("descent to sigma=" + std::to_string(s) + " exhausted its budget");
        cur = *next;
    }
    return cur;
}

// (U + E8)(2): the fixed lattice of the Enriques involution.
inline IntegralLattice gamma_twisted() {
    return twist(direct_sum(standard_lattice("U"), standard_lattice("E8")), 2);
}

// delta = (-q_NS) + q_{Gamma(2)}
inline FiniteQuadraticForm delta_form(const SupersingularParams& pr) {
    validate_params(pr);
    FiniteQuadraticForm d = form_direct_sum(negate_form(discriminant_form(ns_lattice(pr))),
                                            discriminant_form(gamma_twisted()));
    if (milgram_signature(d) != 4)
        throw Error("delta form has the wrong Milgram signature"); // -12 = 4 (mod 8)
    return d;
}

// Gate for candidate members of the complement genus (0, 12, delta).
inline void verify_seed(const IntegralLattice& l, const SupersingularParams& pr) {
    validate_params(pr);
    if (l.rank() != 12) throw SeedRejected("seed must have rank 12");
    if (!l.is_even()) throw SeedRejected("seed must be even");
    if (l.signature() != std::pair<int, int>(0, 12)) throw SeedRejected("seed must have signature (0,12)");
    if (!forms_isomorphic(discriminant_form(l), delta_form(pr)))
        throw SeedRejected("seed discriminant form does not match delta");
}

// Some lattice of genus (0, 12, delta_{p,sigma}); roots allowed.
inline IntegralLattice seed_complement(const SupersingularParams& pr, long budget = 200000) {
    validate_params(pr);
    FiniteQuadraticForm delta1 = delta_form({pr.p, 1});
    IntegralLattice e8_2 = twist(standard_lattice("E8"), 2); // negative definite block
    auto x4 = detail::search_rank4_even(Int(4) * pr.p * pr.p, [&](const IntegralLattice& cand) {
        if (!detail::divisors_are(cand, {2 * pr.p, 2 * pr.p})) return false;
        IntegralLattice full = direct_sum(e8_2, twist(cand, -1));
        return forms_isomorphic(discriminant_form(full), delta1);
    });
    if (!x4) throw SeedNotFound("no rank-4 completion of the 2-elementary block found");
    IntegralLattice cur = direct_sum(e8_2, twist(*x4, -1));
    for (int s = 2; s <= pr.sigma; ++s) {
        FiniteQuadraticForm target = delta_form({pr.p, s});
        auto next = detail::descend_once(cur, pr.p, [&](const IntegralLattice& sub) {
            if (sub.signature() != std::pair<int, int>(0, 12) || !sub.is_even()) return false;
            return forms_isomorphic(discriminant_form(sub), target);
        }, budget);
        if (!next) throw SeedNotFound("descent to sigma=" + std::to_string(s) + " found no verified sublattice");
        cur = *next;
    }
    verify_seed(cur, pr);
    return cur;
}

inline long neighbor_prime(const IntegralLattice& seed) {
    Int two_det = 2 * abs(seed.det());
    for (long ell = 3;; ell += 2) {
        bool prime = true;
        for (long d = 3; d * d <= ell; d += 2)
            if (ell % d == 0) { prime = false; break; }
        if (prime && two_det % ell != 0) return ell;
    }
}

struct PipelineOptions {
    int jobs = 1;
    bool cross_check = false;
    long budget = 200000;
};

// Full genus of the complement; Rep(p, sigma) = number of root-free classes.
inline GenusCatalog rep_classes(const SupersingularParams& pr, const PipelineOptions& opt = {}) {
    IntegralLattice seed;
    try {
        seed = seed_complement(pr, opt.budget);
    } catch (const SeedNotFound&) {
        // the genus is nonempty exactly for sigma <= 5; past that an exhausted
        // search is the expected outcome and the catalog is empty
        if (pr.sigma >= 6) return {};
        throw;
    }
    GenusStrategy strat;
    long ell = neighbor_prime(seed);
    strat.primes = {ell};
    if (opt.cross_check) {
        for (long ell2 = ell + 2;; ell2 += 2) {
            bool prime = true;
            for (long d = 3; d * d <= ell2; d += 2)
                if (ell2 % d == 0) { prime = false; break; }
            if (prime && (2 * abs(seed.det())) % ell2 != 0) {
                strat.primes.push_back(ell2);
                break;
            }
        }
    }
    strat.cross_check = opt.cross_check;
    strat.jobs = opt.jobs;
    GenusCatalog cat = enumerate_genus(seed, strat);
    FiniteQuadraticForm delta = delta_form(pr);
    for (const GenusClass& c : cat.classes) {
        if (c.lattice.signature() != std::pair<int, int>(0, 12)) throw Error("catalog class has wrong signature");
        if (!forms_isomorphic(discriminant_form(c.lattice), delta))
            throw Error("catalog class has wrong discriminant form");
    }
    return cat;
}

inline long rep_count(const GenusCatalog& cat) {
    long n = 0;
    for (const GenusClass& c : cat.classes)
        if (c.root_free) ++n;
    return n;
}

// Induced action of an isometry on the p-part of the discriminant group,
// on its SNF generators.
inline FpMat discriminant_action(const IntMatrix& t, const IntegralLattice& l, long p) {
    const int n = l.rank();
    if (!(t.transpose() * l.gram() * t == l.gram())) throw NotAnIsometry("T does not preserve the Gram matrix");
    SmithResult snf = smith_normal_form(l.gram());
    std::vector<int> pidx;
    std::vector<long> m_cof; // d_i = p * m_i
    for (int i = 0; i < n; ++i) {
        Int d = snf.s(i, i);
        if (d <= 1 || d % p != 0) continue;
        Int m = d / p;
        if (m % p == 0) throw UnsupportedShape("discriminant group is not p-elementary at p");
        pidx.push_back(i);
        m_cof.push_back(m.get_si());
    }
    const int b = int(pidx.size());
    FpMat act(p, b);
    RatMatrix tq = RatMatrix::from_int(t);
    RatMatrix gq = RatMatrix::from_int(l.gram());
    IntMatrix uu = snf.u;
    for (int jj = 0; jj < b; ++jj) {
        const int j = pidx[jj];
        // p-part generator h_j = m_j * (V e_j / d_j); image y = T h_j
        RatMatrix x(n, 1);
        for (int r = 0; r < n; ++r) x(r, 0) = Rat(Int(m_cof[jj]) * snf.v(r, j), snf.s(j, j));
        RatMatrix gy = gq * (tq * x);
        // class coefficients c = U G y (integral for dual vectors)
        for (int ii = 0; ii < b; ++ii) {
            const int i = pidx[ii];
            Rat ci(0);
            for (int r = 0; r < n; ++r) ci += Rat(uu(i, r)) * gy(r, 0);
            if (ci.get_den() != 1) throw Error("discriminant action: non-integral class coefficient");
            Int c = ci.get_num();
            long inv_m = detail::mod_inverse(m_cof[ii] % p, p);
            Int e;
            mpz_fdiv_r_ui(e.get_mpz_t(), Int(c * inv_m).get_mpz_t(), p);
            act(ii, jj) = int(e.get_si());
        }
    }
    // the action must preserve the p-part form
    FiniteQuadraticForm qp = p_part(discriminant_form(l), p);
    if (qp.length() != b) throw Error("discriminant action: p-part length mismatch");
    for (int j = 0; j < b; ++j) {
        std::vector<long> cj(b), ci(b);
        for (int i = 0; i < b; ++i) cj[i] = act(i, j);
        if (qp.q_of(cj) != qp.q[j]) throw Error("discriminant action does not preserve q");
        for (int j2 = 0; j2 < j; ++j2) {
            for (int i = 0; i < b; ++i) ci[i] = act(i, j2);
            if (qp.b_of(cj, ci) != qp.b(j, j2)) throw Error("discriminant action does not preserve b");
        }
    }
    return act;
}

// |im(O(L) -> O(q_p))| by a stabilizer chain over F_p.
inline Int image_order(const IntegralLattice& l, const SupersingularParams& pr) {
    validate_params(pr);
    double envelope = std::pow(double(pr.p), 2.0 * pr.sigma);
    if (envelope > 1e9)
        throw TooLarge("p^(2 sigma) exceeds the feasibility envelope (10^9)");
    IsometryGroupGens gens = automorphism_generators(l);
    std::vector<FpMat> action;
    for (const IntMatrix& t : gens.generators) action.push_back(discriminant_action(t, l, pr.p));
    if (action.empty()) return 1;
    return fp_matrix_group_order(action);
}

// |O((q)_p)| for the complement genus, from the closed-form order.
inline Int oq_order(const SupersingularParams& pr) {
    FiniteQuadraticForm qp = p_part(delta_form(pr), pr.p);
    int eps = witt_epsilon(qp, pr.p);
    return orthogonal_group_order(pr.p, pr.sigma, eps);
}

struct ClassReport {
    IntegralLattice lattice;
    Int oq;       // |O(q_p)|
    Int im;       // image order
    Int quotient; // oq / im
    Int aut_order;
};

struct EnriquesReport {
    SupersingularParams params;
    long lower = 0;
    Int upper;
    bool equality = false;
    std::vector<ClassReport> classes; // root-free classes only
    std::vector<long> primes;
    unsigned long long lines_visited = 0;
    long total_classes = 0;
};

inline EnriquesReport report_from_catalog(const SupersingularParams& pr, const GenusCatalog& cat) {
    EnriquesReport rep;
    rep.params = pr;
    rep.primes = cat.primes;
    rep.lines_visited = cat.lines_visited;
    rep.total_classes = long(cat.classes.size());
    rep.lower = rep_count(cat);
    Int oq = rep.lower > 0 ? oq_order(pr) : Int(0);
    rep.upper = 0;
    for (const GenusClass& c : cat.classes) {
        if (!c.root_free) continue;
        ClassReport cr;
        cr.lattice = c.lattice;
        cr.aut_order = c.aut_order;
        cr.oq = oq;
        cr.im = image_order(c.lattice, pr);
        if (oq % cr.im != 0) throw Error("image order does not divide |O(q_p)|");
        cr.quotient = oq / cr.im;
        rep.upper += cr.quotient;
        rep.classes.push_back(std::move(cr));
    }
    rep.equality = (Int(rep.lower) == rep.upper);
    if (Int(rep.lower) > rep.upper) throw Error("lower bound exceeds upper bound");
    return rep;
}

inline EnriquesReport full_report(const SupersingularParams& pr, const PipelineOptions& opt = {}) {
    GenusCatalog cat = rep_classes(pr, opt);
    return report_from_catalog(pr, cat);
}

inline nlohmann::json report_to_json(const EnriquesReport& rep) {
    nlohmann::json classes = nlohmann::json::array();
    for (const ClassReport& c : rep.classes)
        classes.push_back({{"gram", gram_to_json(c.lattice)},
                           {"aut_order", c.aut_order.get_str()},
                           {"oq_order", c.oq.get_str()},
                           {"image_order", c.im.get_str()},
                           {"quotient", c.quotient.get_str()}});
    return nlohmann::json{{"params", {{"p", rep.params.p}, {"sigma", rep.params.sigma}}},
                          {"lower", rep.lower},
                          {"upper", rep.upper.get_str()},
                          {"equality", rep.equality},
                          {"total_classes", rep.total_classes},
                          {"classes", std::move(classes)},
                          {"closure", {{"primes", rep.primes}, {"lines_visited", rep.lines_visited}}}};
}

} // namespace enr
