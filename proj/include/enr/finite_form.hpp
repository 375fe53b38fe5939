#pragma once

// Finite quadratic forms (A, q: A -> Q/2Z): direct sums, p-parts,
// Gauss-Milgram signatures, isomorphism invariants of elementary parts,
// and orthogonal group orders over F_p.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "enr/errors.hpp"
#include "enr/intmat.hpp"
#include "enr/lattice.hpp"

namespace enr {

struct FiniteQuadraticForm {
    std::vector<Int> orders; // elementary divisors of the group, each > 1
    std::vector<Rat> q;      // q(g_i) in Q/2Z, representatives in [0,2)
    RatMatrix b;             // b(g_i,g_j) in Q/Z, representatives in [0,1)

    int length() const { return int(orders.size()); }
    Int group_order() const {
        Int o = 1;
        for (const Int& d : orders) o *= d;
        return o;
    }
    bool is_trivial() const { return orders.empty(); }

    // q evaluated on a coordinate tuple (mod orders)
    Rat q_of(const std::vector<long>& x) const {
        Rat s = 0;
        for (int i = 0; i < length(); ++i) {
            if (x[i] == 0) continue;
            s += Rat(Int(x[i]) * x[i]) * q[i];
            for (int j = i + 1; j < length(); ++j)
                if (x[j] != 0) s += Rat(2 * Int(x[i]) * x[j]) * b(i, j);
        }
        return detail::mod_z(s, 2);
    }
    Rat b_of(const std::vector<long>& x, const std::vector<long>& y) const {
        Rat s = 0;
        for (int i = 0; i < length(); ++i)
            for (int j = 0; j < length(); ++j)
                if (x[i] != 0 && y[j] != 0) s += Rat(Int(x[i]) * y[j]) * b(i, j);
        return detail::mod_z(s, 1);
    }
};

inline FiniteQuadraticForm form_of_discriminant(const DiscriminantData& d) {
    FiniteQuadraticForm f;
    f.orders = d.elementary_divisors;
    f.q = d.q_values;
    f.b = d.b_values;
    return f;
}

inline FiniteQuadraticForm discriminant_form(const IntegralLattice& l) {
    return form_of_discriminant(discriminant_group(l));
}

inline FiniteQuadraticForm form_direct_sum(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b) {
    FiniteQuadraticForm f;
    const int ka = a.length(), kb = b.length();
    f.orders = a.orders;
    f.orders.insert(f.orders.end(), b.orders.begin(), b.orders.end());
    f.q = a.q;
    f.q.insert(f.q.end(), b.q.begin(), b.q.end());
    f.b = RatMatrix(ka + kb, ka + kb);
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < ka; ++j) f.b(i, j) = a.b(i, j);
    for (int i = 0; i < kb; ++i)
        for (int j = 0; j < kb; ++j) f.b(ka + i, ka + j) = b.b(i, j);
    return f;
}

inline FiniteQuadraticForm negate_form(const FiniteQuadraticForm& a) {
    FiniteQuadraticForm f = a;
    for (auto& x : f.q) x = detail::mod_z(-x, 2);
    for (int i = 0; i < f.b.rows(); ++i)
        for (int j = 0; j < f.b.cols(); ++j) f.b(i, j) = detail::mod_z(-f.b(i, j), 1);
    return f;
}

// Restriction to the p-Sylow subgroup. Coprime parts are orthogonal, so
// this is an orthogonal summand.
inline FiniteQuadraticForm p_part(const FiniteQuadraticForm& a, long p) {
    std::vector<int> keep;
    std::vector<Int> mult;   // cofactor m_i with g'_i = m_i g_i
    std::vector<Int> porder; // p^v_i
    for (int i = 0; i < a.length(); ++i) {
        Int d = a.orders[i], pv = 1;
        while (d % p == 0) { d /= p; pv *= p; }
        if (pv > 1) {
            keep.push_back(i);
            mult.push_back(d);
            porder.push_back(pv);
        }
    }
    FiniteQuadraticForm f;
    const int k = int(keep.size());
    f.orders = porder;
    f.q.resize(k);
    f.b = RatMatrix(k, k);
    for (int i = 0; i < k; ++i) {
        f.q[i] = detail::mod_z(Rat(mult[i] * mult[i]) * a.q[keep[i]], 2);
        for (int j = 0; j < k; ++j)
            f.b(i, j) = detail::mod_z(Rat(mult[i] * mult[j]) * a.b(keep[i], keep[j]), 1);
    }
    return f;
}

namespace detail {

inline int legendre_symbol(Int a, long p) {
    Int pp(p);
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), pp.get_mpz_t());
    if (r == 0) return 0;
    int k = mpz_legendre(r.get_mpz_t(), pp.get_mpz_t());
    return k;
}

// Symmetric matrix of the F_p quadratic space underlying an elementary
// odd-p part: Q(x) = x^T M x with q = (2/p) Q mod 2Z.
inline IntMatrix fp_gram_of_odd_part(const FiniteQuadraticForm& f, long p) {
    const int k = f.length();
    for (const Int& d : f.orders)
        if (d != p) throw UnsupportedShape("p-part is not p-elementary");
    IntMatrix m(k, k);
    long inv2 = (p + 1) / 2; // inverse of 2 mod p
    for (int i = 0; i < k; ++i) {
        // q(g_i) = 2 a_i / p mod 2Z
        Rat qi = f.q[i];
        Int num = qi.get_num(), den = qi.get_den();
        if (den != p && !(den == 1)) throw UnsupportedShape("q-value denominator mismatch in p-part");
        Int e = (den == 1) ? Int(num * p) : num; // numerator over p
        if (e % 2 != 0) e += p;                  // pick the even representative
        Int a = e / 2;
        mpz_fdiv_r_ui(a.get_mpz_t(), a.get_mpz_t(), p);
        m(i, i) = a;
        for (int j = i + 1; j < k; ++j) {
            Rat bij = f.b(i, j);
            Int bn = bij.get_num(), bd = bij.get_den();
            if (bd != p && bd != 1) throw UnsupportedShape("b-value denominator mismatch in p-part");
            Int c = (bd == 1) ? Int(0) : bn;
            // b_ij = 2 M_ij / p mod Z, so M_ij = c * inv(2) mod p
            Int mij = c * inv2 % p;
            m(i, j) = m(j, i) = mij;
        }
    }
    return m;
}

// Congruent diagonalization over F_p (p odd). Returns diagonal entries.
inline std::vector<long> fp_diagonalize(IntMatrix m, long p) {
    const int n = m.rows();
    auto norm = [p](Int x) {
        Int r;
        mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), p);
        return r;
    };
    long inv2 = (p + 1) / 2;
    std::vector<long> diag;
    std::vector<bool> used(n, false);
    for (int step = 0; step < n; ++step) {
        int piv = -1;
        for (int i = 0; i < n; ++i)
            if (!used[i] && norm(m(i, i)) != 0) { piv = i; break; }
        if (piv < 0) {
            int fi = -1, fj = -1;
            for (int i = 0; i < n && fi < 0; ++i) {
                if (used[i]) continue;
                for (int j = 0; j < n; ++j)
                    if (!used[j] && j != i && norm(m(i, j)) != 0) { fi = i; fj = j; break; }
            }
            if (fi < 0) break; // degenerate remainder
            for (int k2 = 0; k2 < n; ++k2) m(fi, k2) = norm(m(fi, k2) + m(fj, k2));
            for (int k2 = 0; k2 < n; ++k2) m(k2, fi) = norm(m(k2, fi) + m(k2, fj));
            piv = fi;
        }
        Int d = norm(m(piv, piv));
        diag.push_back(d.get_si());
        used[piv] = true;
        // eliminate: row_i -= (m_ip / d) row_p, symmetric
        Int dinv;
        {
            Int pp(p);
            mpz_invert(dinv.get_mpz_t(), d.get_mpz_t(), pp.get_mpz_t());
        }
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            Int c = norm(m(i, piv) * dinv);
            if (c == 0) continue;
            for (int k2 = 0; k2 < n; ++k2) m(i, k2) = norm(m(i, k2) - c * m(piv, k2));
            for (int k2 = 0; k2 < n; ++k2) m(k2, i) = norm(m(k2, i) - c * m(k2, piv));
        }
        (void)inv2;
    }
    return diag;
}

// Signature mod 8 of the rank-1 block (Z/p, q = 2a/p), p odd, gcd(a,p)=1.
inline int milgram_block_odd(long p, long a) {
    int chi = legendre_symbol(Int(a), p);
    if (p % 4 == 1) return chi == 1 ? 0 : 4;
    return chi == 1 ? 2 : 6;
}

} // namespace detail

// Gauss-Milgram signature mod 8.
inline int milgram_signature(const FiniteQuadraticForm& f) {
    if (f.is_trivial()) return 0;
    Int total = f.group_order();
    // collect the primes involved
    std::vector<long> primes;
    {
        Int t = total;
        for (long p = 2; p * p <= t; ++p)
            if (t % p == 0) {
                primes.push_back(p);
                while (t % p == 0) t /= p;
            }
        if (t > 1) {
            if (!t.fits_slong_p()) throw UnsupportedShape("milgram_signature: prime too large");
            primes.push_back(t.get_si());
        }
    }
    int sig = 0;
    for (long p : primes) {
        FiniteQuadraticForm fp = (primes.size() == 1) ? f : p_part(f, p);
        bool elementary = true;
        for (const Int& d : fp.orders)
            if (d != p) elementary = false;
        if (p == 2) {
            if (!elementary) {
                if (fp.group_order() > 1000000) throw UnsupportedShape("milgram_signature: 2-part too large");
                // numeric Gauss sum
                double re = 0, im = 0;
                std::vector<long> x(fp.length(), 0);
                const long n = fp.group_order().get_si();
                std::vector<long> ords(fp.length());
                for (int i = 0; i < fp.length(); ++i) ords[i] = fp.orders[i].get_si();
                for (long c = 0; c < n; ++c) {
                    double a = fp.q_of(x).get_d() * M_PI;
                    re += std::cos(a);
                    im += std::sin(a);
                    for (int i = 0; i < fp.length(); ++i) {
                        if (++x[i] < ords[i]) break;
                        x[i] = 0;
                    }
                }
                double mag2 = re * re + im * im;
                if (std::abs(mag2 - double(n)) > 1e-3 * n) throw DegenerateForm();
                int s = int(std::lround(std::atan2(im, re) / (M_PI / 4)));
                sig = (sig + s % 8 + 8) % 8;
            } else {
                // exact Gaussian-integer Gauss sum; q-values are halves of integers
                const int k = fp.length();
                if (k > 24) throw UnsupportedShape("milgram_signature: 2-part too long");
                long long re = 0, im = 0;
                for (uint32_t mask = 0; mask < (uint32_t(1) << k); ++mask) {
                    std::vector<long> x(k, 0);
                    for (int i = 0; i < k; ++i) x[i] = (mask >> i) & 1;
                    Rat qv = fp.q_of(x); // in {0, 1/2, 1, 3/2}
                    long num = qv.get_num().get_si(), den = qv.get_den().get_si();
                    int r = int((num * (2 / den)) % 4); // quarter turns
                    switch (r) {
                        case 0: ++re; break;
                        case 1: ++im; break;
                        case 2: --re; break;
                        case 3: --im; break;
                    }
                }
                // sum = sqrt(2^k) * e^{i pi s/4}
                long long m2 = re * re + im * im;
                if (m2 != (1LL << k)) throw DegenerateForm("degenerate 2-elementary part");
                int s;
                if (im == 0) s = re > 0 ? 0 : 4;
                else if (re == 0) s = im > 0 ? 2 : 6;
                else if (re > 0 && im > 0) s = 1;
                else if (re < 0 && im > 0) s = 3;
                else if (re < 0 && im < 0) s = 5;
                else s = 7;
                sig = (sig + s) % 8;
            }
        } else {
            if (!elementary) {
                if (fp.group_order() > 1000000) throw UnsupportedShape("milgram_signature: odd part too large");
                double re = 0, im = 0;
                const long n = fp.group_order().get_si();
                std::vector<long> x(fp.length(), 0);
                std::vector<long> ords(fp.length());
                for (int i = 0; i < fp.length(); ++i) ords[i] = fp.orders[i].get_si();
                for (long c = 0; c < n; ++c) {
                    double a = fp.q_of(x).get_d() * M_PI;
                    re += std::cos(a);
                    im += std::sin(a);
                    for (int i = 0; i < fp.length(); ++i) {
                        if (++x[i] < ords[i]) break;
                        x[i] = 0;
                    }
                }
                double mag2 = re * re + im * im;
                if (std::abs(mag2 - double(n)) > 1e-3 * n) throw DegenerateForm();
                int s = int(std::lround(std::atan2(im, re) / (M_PI / 4)));
                sig = (sig + s % 8 + 8) % 8;
            } else {
                IntMatrix m = detail::fp_gram_of_odd_part(fp, p);
                std::vector<long> diag = detail::fp_diagonalize(m, p);
                if (int(diag.size()) != fp.length()) throw DegenerateForm("degenerate odd p-part");
                for (long a : diag) sig = (sig + detail::milgram_block_odd(p, a)) % 8;
            }
        }
    }
    return sig;
}

struct PrimeInvariants {
    long p = 0;
    int length = 0;
    int det_class = 0;   // odd p: Legendre character of det of the F_p form
    bool even_type = true; // p = 2 only
    int sig8 = 0;          // p = 2 only: Milgram signature of the 2-part
    std::array<long long, 4> q_hist{}; // p = 2 only: counts of q = 0, 1/2, 1, 3/2
    auto tie() const { return std::tie(p, length, det_class, even_type, sig8, q_hist); }
    bool operator==(const PrimeInvariants& o) const { return tie() == o.tie(); }
};

struct FormInvariants {
    std::vector<PrimeInvariants> per_prime; // sorted by p
    bool operator==(const FormInvariants& o) const { return per_prime == o.per_prime; }
};

// Complete isomorphism invariants for forms whose p-parts are all
// p-elementary (odd p) resp. even 2-elementary.
inline FormInvariants form_invariants(const FiniteQuadraticForm& f) {
    FormInvariants inv;
    std::vector<long> primes;
    {
        Int t = f.group_order();
        for (long p = 2; p * p <= t; ++p)
            if (t % p == 0) {
                primes.push_back(p);
                while (t % p == 0) t /= p;
            }
        if (t > 1) {
            if (!t.fits_slong_p()) throw UnsupportedShape("form_invariants: prime too large");
            primes.push_back(t.get_si());
        }
    }
    for (long p : primes) {
        FiniteQuadraticForm fp = p_part(f, p);
        for (const Int& d : fp.orders)
            if (d != p) throw UnsupportedShape("non-elementary p-part at p=" + std::to_string(p));
        PrimeInvariants pi;
        pi.p = p;
        pi.length = fp.length();
        if (p == 2) {
            for (const Rat& qv : fp.q)
                if (qv.get_den() != 1) pi.even_type = false;
            pi.sig8 = milgram_signature(fp);
            // q-value histogram over the whole 2-group, in quarter turns
            if (pi.length > 20) throw UnsupportedShape("2-part too long for invariants");
            const uint32_t total = uint32_t(1) << pi.length;
            std::vector<long> x(pi.length, 0);
            for (uint32_t mask = 0; mask < total; ++mask) {
                for (int i = 0; i < pi.length; ++i) x[i] = (mask >> i) & 1;
                Rat qv = fp.q_of(x); // in {0, 1/2, 1, 3/2}
                long num = qv.get_num().get_si(), den = qv.get_den().get_si();
                ++pi.q_hist[size_t((num * (2 / den)) % 4)];
            }
        } else {
            IntMatrix m = detail::fp_gram_of_odd_part(fp, p);
            Int d = det(m);
            pi.det_class = detail::legendre_symbol(d, p);
            if (pi.det_class == 0) throw DegenerateForm("degenerate odd p-part");
        }
        inv.per_prime.push_back(pi);
    }
    return inv;
}

inline bool forms_isomorphic(const FiniteQuadraticForm& a, const FiniteQuadraticForm& b) {
    if (a.group_order() != b.group_order()) return false;
    return form_invariants(a) == form_invariants(b);
}

// Order of the orthogonal group of a nondegenerate quadratic space of
// dimension 2*sigma over F_p with Witt type epsilon:
//   2 p^{sigma(sigma-1)} (p^sigma - eps) prod_{i=1}^{sigma-1} (p^{2i} - 1)
inline Int orthogonal_group_order(long p, int sigma, int epsilon) {
    if (sigma < 1) throw UnsupportedParameter("orthogonal_group_order: sigma >= 1 required");
    if (epsilon != 1 && epsilon != -1) throw UnsupportedParameter("epsilon must be +-1");
    Int pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), p, unsigned(sigma) * (sigma - 1));
    Int ps;
    mpz_ui_pow_ui(ps.get_mpz_t(), p, sigma);
    Int r = 2 * pw * (ps - epsilon);
    for (int i = 1; i <= sigma - 1; ++i) {
        Int t;
        mpz_ui_pow_ui(t.get_mpz_t(), p, 2 * unsigned(i));
        r *= (t - 1);
    }
    return r;
}

// Witt type of an even-length p-elementary form, p odd:
// epsilon = chi((-1)^sigma * det).
inline int witt_epsilon(const FiniteQuadraticForm& q_p, long p) {
    for (const Int& d : q_p.orders)
        if (d != p) throw UnsupportedShape("witt_epsilon: not p-elementary");
    if (q_p.length() % 2 != 0) throw OddLength();
    int sigma = q_p.length() / 2;
    IntMatrix m = detail::fp_gram_of_odd_part(q_p, p);
    Int d = det(m);
    if (sigma % 2 == 1) d = -d;
    int chi = detail::legendre_symbol(d, p);
    if (chi == 0) throw DegenerateForm("witt_epsilon: degenerate form");
    return chi;
}

// Exhaustive orthogonal group of a small finite quadratic form. Oracle only.
// Automorphisms returned as integer matrices on the generators (column i =
// image of g_i).
inline std::vector<IntMatrix> brute_force_orthogonal_group(const FiniteQuadraticForm& f) {
    Int order = f.group_order();
    if (order > 10000) throw TooLarge("brute_force_orthogonal_group: order > 10^4");
    const int k = f.length();
    if (k == 0) return {IntMatrix(0, 0)};
    std::vector<long> ords(k);
    long n = order.get_si();
    for (int i = 0; i < k; ++i) ords[i] = f.orders[i].get_si();
    // all group elements
    std::vector<std::vector<long>> elems;
    elems.reserve(n);
    {
        std::vector<long> x(k, 0);
        for (long c = 0; c < n; ++c) {
            elems.push_back(x);
            for (int i = 0; i < k; ++i) {
                if (++x[i] < ords[i]) break;
                x[i] = 0;
            }
        }
    }
    auto elem_order_divides = [&](const std::vector<long>& x, long d) {
        for (int i = 0; i < k; ++i)
            if ((x[i] * d) % ords[i] != 0) return false;
        return true;
    };
    // candidate images per generator
    std::vector<std::vector<int>> cand(k);
    for (int g = 0; g < k; ++g)
        for (int e = 0; e < n; ++e)
            if (elem_order_divides(elems[e], ords[g]) && f.q_of(elems[e]) == f.q[g])
                cand[g].push_back(e);
    std::vector<IntMatrix> result;
    std::vector<int> pick(k, -1);
    auto is_bijective = [&](const std::vector<int>& images) {
        // subgroup closure of the images must be the whole group
        std::vector<char> seen(n, 0);
        std::vector<long> zero(k, 0);
        auto code = [&](const std::vector<long>& x) {
            long c = 0;
            for (int i = k - 1; i >= 0; --i) c = c * ords[i] + x[i];
            return c;
        };
        std::vector<std::vector<long>> queue{zero};
        seen[0] = 1;
        long count = 1;
        while (!queue.empty()) {
            auto cur = queue.back();
            queue.pop_back();
            for (int g = 0; g < k; ++g) {
                std::vector<long> nx(k);
                for (int i = 0; i < k; ++i) nx[i] = (cur[i] + elems[images[g]][i]) % ords[i];
                long c = code(nx);
                if (!seen[c]) {
                    seen[c] = 1;
                    ++count;
                    queue.push_back(nx);
                }
            }
        }
        return count == n;
    };
    std::function<void(int)> dfs = [&](int g) {
        if (g == k) {
            if (is_bijective(pick)) {
                IntMatrix m(k, k);
                for (int j = 0; j < k; ++j)
                    for (int i = 0; i < k; ++i) m(i, j) = elems[pick[j]][i];
                result.push_back(m);
            }
            return;
        }
        for (int e : cand[g]) {
            bool ok = true;
            for (int h = 0; h < g && ok; ++h)
                if (f.b_of(elems[e], elems[pick[h]]) != f.b(g, h)) ok = false;
            if (!ok) continue;
            pick[g] = e;
            dfs(g + 1);
        }
    };
    dfs(0);
    return result;
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json form_to_json(const FiniteQuadraticForm& f) {
    nlohmann::json orders = nlohmann::json::array(), qn = nlohmann::json::array(),
                   qd = nlohmann::json::array(), bm = nlohmann::json::array();
    for (const Int& d : f.orders) orders.push_back(d.get_str());
    for (const Rat& q : f.q) {
        qn.push_back(q.get_num().get_str());
        qd.push_back(q.get_den().get_str());
    }
    for (int i = 0; i < f.b.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < f.b.cols(); ++j) {
            Rat v = f.b(i, j);
            row.push_back(v.get_num().get_str() + "/" + v.get_den().get_str());
        }
        bm.push_back(row);
    }
    return {{"orders", orders}, {"q_num", qn}, {"q_den", qd}, {"b", bm}};
}

inline FiniteQuadraticForm form_from_json(const nlohmann::json& j) {
    FiniteQuadraticForm f;
    for (const auto& o : j.at("orders")) f.orders.emplace_back(o.get<std::string>());
    const auto& qn = j.at("q_num");
    const auto& qd = j.at("q_den");
    if (qn.size() != f.orders.size() || qd.size() != f.orders.size())
        throw ParseError("form JSON: length mismatch");
    for (size_t i = 0; i < qn.size(); ++i) {
        Rat v(Int(qn[i].get<std::string>()), Int(qd[i].get<std::string>()));
        v.canonicalize();
        f.q.push_back(v);
    }
    const int k = f.length();
    f.b = RatMatrix(k, k);
    const auto& bm = j.at("b");
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < k; ++c) {
            std::string s = bm.at(i).at(c).get<std::string>();
            auto slash = s.find('/');
            Rat v(Int(s.substr(0, slash)), Int(slash == std::string::npos ? "1" : s.substr(slash + 1)));
            v.canonicalize();
            f.b(i, c) = v;
        }
    return f;
}

} // namespace enr
