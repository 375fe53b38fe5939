#pragma once

// Kneser neighbors at an odd prime and genus enumeration by closure of the
// neighbor graph, with automorphism-orbit reduction on isotropic lines.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "enr/autgrp.hpp"
#include "enr/errors.hpp"
#include "enr/lattice.hpp"
#include "enr/shortvec.hpp"

namespace enr {

namespace detail {

// column-style HNF basis: columns of `gens` (n x m, m >= n) generate a
// full-rank sublattice of Z^n; returns an n x n triangular basis
inline IntMatrix hnf_basis(const IntMatrix& gens) {
    const int n = gens.rows(), m = gens.cols();
    IntMatrix w = gens;
    for (int r = 0; r < n; ++r) {
        while (true) {
            int best = -1;
            for (int c = r; c < m; ++c)
                if (w(r, c) != 0 && (best < 0 || cmp(abs(w(r, c)), abs(w(r, best))) < 0)) best = c;
            if (best < 0) throw Error("hnf_basis: columns do not span full rank");
            if (best != r)
                for (int i = 0; i < n; ++i) std::swap(w(i, r), w(i, best));
            bool clean = true;
            for (int c = r + 1; c < m; ++c) {
                if (w(r, c) == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), w(r, c).get_mpz_t(), w(r, r).get_mpz_t());
                for (int i = 0; i < n; ++i) w(i, c) -= q * w(i, r);
                if (w(r, c) != 0) clean = false;
            }
            if (clean) break;
        }
        if (w(r, r) < 0)
            for (int i = 0; i < n; ++i) w(i, r) = -w(i, r);
    }
    IntMatrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = w(i, j);
    return b;
}

inline long mod_inverse(long a, long ell) {
    long b = ell, x0 = 1, x1 = 0;
    a %= ell;
    if (a < 0) a += ell;
    long aa = a;
    while (b != 0) {
        long q = aa / b, t = aa % b;
        aa = b; b = t;
        t = x0 - q * x1; x0 = x1; x1 = t;
    }
    return ((x0 % ell) + ell) % ell;
}

// Visit one representative per isotropic line of (F_ell^n, G mod ell):
// first nonzero coordinate equals 1. Also reports the total line count.
template <class F>
inline unsigned long long isotropic_lines(const SMat& g, long ell, F&& emit) {
    const int n = g.n;
    std::vector<std::vector<long>> gm(n, std::vector<long>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gm[i][j] = ((g(i, j) % ell) + ell) % ell;
    std::vector<int> v(n, 0);
    std::vector<std::vector<long>> u(n + 1, std::vector<long>(n, 0)); // u[d][j] = <partial v, e_j> mod ell
    unsigned long long count = 0;

    std::function<void(int, long)> rec = [&](int j, long norm) {
        if (j == n) {
            if (norm % ell == 0) {
                ++count;
                emit(v);
            }
            return;
        }
        for (long c = 0; c < ell; ++c) {
            v[j] = int(c);
            long nn = (norm + 2 * c * u[j][j] + c * c * gm[j][j]) % ell;
            for (int t = j + 1; t < n; ++t) u[j + 1][t] = (u[j][t] + c * gm[j][t]) % ell;
            rec(j + 1, nn);
        }
        v[j] = 0;
    };

    for (int piv = 0; piv < n; ++piv) {
        std::fill(v.begin(), v.end(), 0);
        v[piv] = 1;
        for (int t = piv + 1; t < n; ++t) u[piv + 1][t] = gm[piv][t] % ell;
        rec(piv + 1, gm[piv][piv] % ell);
    }
    return count;
}

inline void check_neighbor_prime(const IntegralLattice& l, long ell) {
    if (l.rank() < 3) throw BadPrime("neighbor method needs rank >= 3");
    if (ell < 3 || ell % 2 == 0) throw BadPrime("neighbor prime must be odd");
    bool prime = ell > 1;
    for (long d = 3; d * d <= ell; d += 2)
        if (ell % d == 0) prime = false;
    if (!prime) throw BadPrime("neighbor prime must be prime");
    if (l.det() % ell == 0) throw BadPrime("neighbor prime must not divide det");
}

// The ell-neighbor attached to an isotropic line [v] of L/ellL.
inline IntegralLattice neighbor_of_line(const IntegralLattice& l, std::vector<Int> v, long ell) {
    const int n = l.rank();
    const IntMatrix& g = l.gram();
    // functional coefficients <v, e_j> mod ell
    std::vector<long> f(n);
    int piv = -1;
    for (int j = 0; j < n; ++j) {
        Int s = 0;
        for (int i = 0; i < n; ++i) s += g(i, j) * v[i];
        Int r;
        mpz_fdiv_r_ui(r.get_mpz_t(), s.get_mpz_t(), ell);
        f[j] = r.get_si();
        if (f[j] != 0 && piv < 0) piv = j;
    }
    if (piv < 0) throw Error("neighbor_of_line: line not primitive mod ell");
    // adjust v so that <v,v> = 0 mod 2 ell^2, shifting along e_piv
    Int norm = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) norm += g(i, j) * v[i] * v[j];
    if (norm % 2 != 0) throw Error("neighbor_of_line: odd norm on an even lattice");
    Int half = norm / 2;
    if (half % ell != 0) throw Error("neighbor_of_line: line is not isotropic");
    Int a_big;
    mpz_fdiv_r_ui(a_big.get_mpz_t(), Int(half / ell).get_mpz_t(), ell);
    long a = a_big.get_si();
    long t = (ell - (a * mod_inverse(f[piv], ell)) % ell) % ell;
    v[piv] += Int(ell) * t;

    // generators of ell * N: ell * (kernel of <., v> mod ell) and v itself
    IntMatrix gens(n, n + 1);
    long inv = mod_inverse(f[piv], ell);
    int col = 0;
    for (int i = 0; i < n; ++i) {
        if (i == piv) continue;
        gens(i, col) = ell;
        gens(piv, col) = -((f[i] * inv) % ell) * ell;
        ++col;
    }
    gens(piv, col) = Int(ell) * ell;
    ++col;
    for (int i = 0; i < n; ++i) gens(i, col) = v[i];

    IntMatrix b = hnf_basis(gens);
    IntMatrix gg = b.transpose() * g * b;
    const Int ell2 = Int(ell) * ell;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (gg(i, j) % ell2 != 0) throw Error("neighbor_of_line: non-integral neighbor Gram");
            gg(i, j) /= ell2;
        }
    IntegralLattice out{std::move(gg)};
    if (out.det() != l.det()) throw Error("neighbor_of_line: determinant changed");
    if (!out.is_even()) throw Error("neighbor_of_line: neighbor not even");
    return out;
}

} // namespace detail

// One neighbor per isotropic line, in enumeration order.
inline std::vector<IntegralLattice> p_neighbors(const IntegralLattice& l, long ell) {
    if (!l.is_positive_definite() || !l.is_even())
        throw BadPrime("p_neighbors expects an even positive definite lattice");
    detail::check_neighbor_prime(l, ell);
    std::vector<IntegralLattice> out;
    detail::isotropic_lines(smat_from_int(l.gram()), ell, [&](const std::vector<int>& v) {
        std::vector<Int> vi(v.begin(), v.end());
        out.push_back(detail::neighbor_of_line(l, std::move(vi), ell));
    });
    return out;
}

struct GenusClass {
    IntegralLattice lattice; // reduced Gram, same sign convention as the seed
    bool root_free = false;
    Int aut_order;
    i64 minimum = 0;
    long roots = 0;                        // count of norm +-2 vectors (both signs)
    std::vector<std::pair<i64, long>> theta; // (norm, ±pair count) up to max diag
};

struct GenusCatalog {
    std::vector<GenusClass> classes;
    std::vector<long> primes;
    unsigned long long lines_visited = 0;
};

struct GenusStrategy {
    std::vector<long> primes; // primes[0] drives the closure
    bool cross_check = false;
    int jobs = 1;
};

namespace detail {

struct ClassEntry {
    SMat gram;                 // reduced, positive definite
    IntMatrix lexmin_gram;     // lexicographically least reduced Gram seen
    std::vector<SMat> aut_gens;
    Int aut_order;
    i64 minimum = 0;
    std::vector<std::pair<i64, long>> theta;
    bool explored = false;
};

// counts of ±pairs per norm up to max(minimum, 8): an isometry invariant
inline std::vector<std::pair<i64, long>> theta_prefix(const SMat& g) {
    i64 bound = std::max<i64>(lattice_minimum(g), 8);
    std::map<i64, long> counts;
    for (const ShortVector& v : short_vectors(g, bound)) ++counts[v.norm];
    return {counts.begin(), counts.end()};
}

inline ClassEntry make_entry(const SMat& reduced) {
    ClassEntry e;
    e.gram = reduced;
    e.lexmin_gram = smat_to_int(reduced);
    SmallAut aut = automorphism_group_small(reduced);
    e.aut_gens = std::move(aut.gens);
    e.aut_order = aut.order;
    e.theta = theta_prefix(reduced);
    e.minimum = e.theta.empty() ? 0 : e.theta.front().first;
    return e;
}

inline bool lex_less(const IntMatrix& a, const IntMatrix& b) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            int c = cmp(a(i, j), b(i, j));
            if (c != 0) return c < 0;
        }
    return false;
}

// closure at one prime, positive definite seed
inline std::pair<std::vector<ClassEntry>, unsigned long long> genus_closure(const IntegralLattice& seed,
                                                                            long ell, int jobs) {
    const int n = seed.rank();
    check_neighbor_prime(seed, ell);
    std::vector<ClassEntry> classes;
    {
        SmallReduce red = reduce_gram(smat_from_int(seed.gram()));
        classes.push_back(make_entry(red.gram));
    }
    unsigned long long lines_total = 0;

    // vector index in F_ell^n for the visited bitmap
    unsigned long long space = 1;
    for (int i = 0; i < n; ++i) space *= (unsigned long long)ell;
    auto index_of = [&](const std::vector<int>& v) {
        unsigned long long idx = 0;
        for (int i = n - 1; i >= 0; --i) idx = idx * ell + (unsigned long long)v[i];
        return idx;
    };

    const bool dbg = std::getenv("ENR_DEBUG") != nullptr;
    for (size_t ci = 0; ci < classes.size(); ++ci) {
        if (dbg) std::cerr << "[closure] class " << ci << "/" << classes.size() << " aut=" << classes[ci].aut_order << "\n";
        // snapshot: entry references may dangle after push_back
        SMat g = classes[ci].gram;
        std::vector<SMat> gens = classes[ci].aut_gens;
        classes[ci].explored = true;
        IntegralLattice lat(smat_to_int(g));

        // generator action mod ell
        std::vector<std::vector<long>> gens_mod;
        for (const SMat& a : gens) {
            std::vector<long> am(size_t(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) am[size_t(i) * n + j] = ((a(i, j) % ell) + ell) % ell;
            gens_mod.push_back(std::move(am));
        }
        auto canonicalize = [&](std::vector<int>& v) {
            int lead = -1;
            for (int i = 0; i < n; ++i)
                if (v[i] != 0) { lead = i; break; }
            long inv = mod_inverse(v[lead], ell);
            for (int i = 0; i < n; ++i) v[i] = int((v[i] * inv) % ell);
        };

        std::vector<uint64_t> visited((space + 63) / 64, 0);
        auto test_and_set = [&](unsigned long long idx) {
            uint64_t mask = uint64_t(1) << (idx & 63);
            bool was = visited[idx >> 6] & mask;
            visited[idx >> 6] |= mask;
            return was;
        };

        std::vector<std::vector<int>> reps;
        lines_total += isotropic_lines(g, ell, [&](const std::vector<int>& v) {
            if (test_and_set(index_of(v))) return;
            reps.push_back(v);
            // close the automorphism orbit of the line (packed indices on the
            // stack: orbits can run to millions of lines)
            std::vector<unsigned long long> stack{index_of(v)};
            std::vector<int> cur(n), w(n);
            while (!stack.empty()) {
                unsigned long long idx = stack.back();
                stack.pop_back();
                for (int i = 0; i < n; ++i) {
                    cur[i] = int(idx % (unsigned long long)ell);
                    idx /= (unsigned long long)ell;
                }
                for (const auto& am : gens_mod) {
                    for (int i = 0; i < n; ++i) {
                        long s = 0;
                        for (int j = 0; j < n; ++j) s += am[size_t(i) * n + j] * cur[j];
                        w[i] = int(s % ell);
                    }
                    canonicalize(w);
                    unsigned long long wi = index_of(w);
                    if (!test_and_set(wi)) stack.push_back(wi);
                }
            }
        });

        if (dbg) std::cerr << "[closure]   reps " << reps.size() << "\n";
        // build the neighbors for the orbit representatives
        std::vector<SMat> reduced(reps.size());
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (size_t i = next.fetch_add(1); i < reps.size(); i = next.fetch_add(1)) {
                std::vector<Int> vi(reps[i].begin(), reps[i].end());
                IntegralLattice nb = neighbor_of_line(lat, std::move(vi), ell);
                reduced[i] = reduce_gram(smat_from_int(nb.gram())).gram;
            }
        };
        if (jobs <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        // serial, deterministic-order commit
        for (size_t i = 0; i < reps.size(); ++i) {
            const SMat& cand = reduced[i];
            auto theta = theta_prefix(cand);
            bool known = false;
            for (ClassEntry& e : classes) {
                if (e.theta != theta) continue;
                if (isometry_test(IntegralLattice(smat_to_int(e.gram)), IntegralLattice(smat_to_int(cand)))) {
                    IntMatrix ci2 = smat_to_int(cand);
                    if (lex_less(ci2, e.lexmin_gram)) e.lexmin_gram = ci2;
                    known = true;
                    break;
                }
            }
            if (!known) {
                ClassEntry e = make_entry(cand);
                classes.push_back(std::move(e));
            }
        }
    }
    return {classes, lines_total};
}

} // namespace detail

inline GenusCatalog enumerate_genus(const IntegralLattice& seed, const GenusStrategy& strategy) {
    if (!seed.is_even()) throw Error("enumerate_genus expects an even lattice");
    bool neg = seed.is_negative_definite();
    IntegralLattice work = neg ? twist(seed, -1) : seed;
    if (!work.is_positive_definite()) throw Error("enumerate_genus expects a definite lattice");
    if (strategy.primes.empty()) throw BadPrime("enumerate_genus needs at least one prime");

    auto [classes, lines] = detail::genus_closure(work, strategy.primes[0], std::max(strategy.jobs, 1));

    if (strategy.cross_check && strategy.primes.size() > 1) {
        auto [other, lines2] = detail::genus_closure(work, strategy.primes[1], std::max(strategy.jobs, 1));
        lines += lines2;
        if (other.size() != classes.size()) throw Error("cross-check: class counts differ between primes");
        for (const auto& e : other) {
            bool found = false;
            for (const auto& f : classes)
                if (isometry_test(IntegralLattice(smat_to_int(e.gram)), IntegralLattice(smat_to_int(f.gram)))) {
                    found = true;
                    break;
                }
            if (!found) throw Error("cross-check: class sets differ between primes");
        }
    }

    GenusCatalog cat;
    cat.primes = strategy.primes;
    if (!strategy.cross_check) cat.primes.resize(1);
    cat.lines_visited = lines;
    for (const auto& e : classes) {
        GenusClass c;
        long roots = 0;
        for (const auto& [nm, cnt] : e.theta)
            if (nm == 2) roots = 2 * cnt;
        c.roots = roots;
        c.minimum = e.minimum;
        c.theta = e.theta;
        c.aut_order = e.aut_order;
        c.root_free = e.minimum > 2;
        IntMatrix gfinal = e.lexmin_gram;
        if (neg)
            for (int i = 0; i < gfinal.rows(); ++i)
                for (int j = 0; j < gfinal.cols(); ++j) gfinal(i, j) = -gfinal(i, j);
        c.lattice = IntegralLattice(std::move(gfinal));
        cat.classes.push_back(std::move(c));
    }
    std::sort(cat.classes.begin(), cat.classes.end(), [](const GenusClass& a, const GenusClass& b) {
        if (a.roots != b.roots) return a.roots < b.roots;
        if (a.minimum != b.minimum) return a.minimum < b.minimum;
        if (a.theta != b.theta) return a.theta < b.theta;
        return detail::lex_less(a.lattice.gram(), b.lattice.gram());
    });
    return cat;
}

inline nlohmann::json catalog_to_json(const GenusCatalog& cat, const nlohmann::json& params) {
    nlohmann::json classes = nlohmann::json::array();
    for (const GenusClass& c : cat.classes) {
        nlohmann::json theta = nlohmann::json::array();
        for (const auto& [nm, cnt] : c.theta) theta.push_back({nm, cnt});
        classes.push_back({{"gram", gram_to_json(c.lattice)},
                           {"root_free", c.root_free},
                           {"aut_order", c.aut_order.get_str()},
                           {"fingerprint",
                            {{"det", c.lattice.det().get_str()},
                             {"min", c.minimum},
                             {"roots", c.roots},
                             {"theta", std::move(theta)}}}});
    }
    return nlohmann::json{{"params", params},
                          {"classes", std::move(classes)},
                          {"closure", {{"primes", cat.primes}, {"lines_visited", cat.lines_visited}}}};
}

inline GenusCatalog catalog_from_json(const nlohmann::json& j) {
    GenusCatalog cat;
    if (!j.contains("classes") || !j.contains("closure")) throw ParseError("catalog JSON missing fields");
    for (const auto& e : j.at("classes")) {
        GenusClass c;
        c.lattice = gram_from_json(e.at("gram"));
        c.root_free = e.at("root_free").get<bool>();
        c.aut_order = Int(e.at("aut_order").get<std::string>());
        const auto& fp = e.at("fingerprint");
        c.minimum = fp.at("min").get<long long>();
        c.roots = fp.at("roots").get<long>();
        for (const auto& t : fp.at("theta")) c.theta.push_back({t[0].get<long long>(), t[1].get<long>()});
        cat.classes.push_back(std::move(c));
    }
    cat.primes = j.at("closure").at("primes").get<std::vector<long>>();
    cat.lines_visited = j.at("closure").at("lines_visited").get<unsigned long long>();
    return cat;
}

} // namespace enr
