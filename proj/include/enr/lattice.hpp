#pragma once

// Integral lattices: constructors, twists, orthogonal sums, discriminant
// groups with their Q/2Z quadratic forms, index-p sublattices, Gram IO.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "enr/errors.hpp"
#include "enr/intmat.hpp"

namespace enr {

class IntegralLattice {
public:
    IntegralLattice() = default;
    explicit IntegralLattice(IntMatrix gram) : gram_(std::move(gram)) {
        if (!gram_.is_symmetric()) throw Error("lattice Gram matrix must be symmetric");
        det_ = enr::det(gram_);
        if (rank() > 0 && det_ == 0) throw Error("lattice form must be nondegenerate");
    }

    int rank() const { return gram_.rows(); }
    const IntMatrix& gram() const { return gram_; }
    const Int& det() const { return det_; }

    bool is_even() const {
        for (int i = 0; i < rank(); ++i)
            if (gram_(i, i) % 2 != 0) return false;
        return true;
    }

    std::pair<int, int> signature() const { return symmetric_signature(gram_); }

    bool is_positive_definite() const {
        auto [np, nm] = signature();
        return nm == 0;
    }
    bool is_negative_definite() const {
        auto [np, nm] = signature();
        return np == 0;
    }

private:
    IntMatrix gram_;
    Int det_ = 1;
};

inline IntegralLattice lattice_from_rows(int n, const std::vector<std::vector<long>>& rows) {
    IntMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rows[i][j];
    return IntegralLattice(std::move(g));
}

inline IntegralLattice k2_lattice(long p);

// Fixed Gram matrices. E8 follows the negative definite convention,
// signature (0,8).
inline IntegralLattice standard_lattice(const std::string& name) {
    if (name == "U") return lattice_from_rows(2, {{0, 1}, {1, 0}});
    if (name == "A2") return lattice_from_rows(2, {{2, -1}, {-1, 2}});
    if (name == "A2neg") return lattice_from_rows(2, {{-2, 1}, {1, -2}});
    if (name == "D4")
        return lattice_from_rows(4, {{2, -1, 0, 0}, {-1, 2, -1, -1}, {0, -1, 2, 0}, {0, -1, 0, 2}});
    if (name == "E8") {
        // Cartan matrix of E8 (chain 0..6, node 7 attached to node 4), negated.
        std::vector<std::vector<long>> c = {
            {2, -1, 0, 0, 0, 0, 0, 0},
            {-1, 2, -1, 0, 0, 0, 0, 0},
            {0, -1, 2, -1, 0, 0, 0, 0},
            {0, 0, -1, 2, -1, 0, 0, 0},
            {0, 0, 0, -1, 2, -1, 0, -1},
            {0, 0, 0, 0, -1, 2, -1, 0},
            {0, 0, 0, 0, 0, -1, 2, 0},
            {0, 0, 0, 0, -1, 0, 0, 2}};
        for (auto& row : c)
            for (auto& x : row) x = -x;
        return lattice_from_rows(8, c);
    }
    if (name.rfind("K2(", 0) == 0 && name.back() == ')') {
        long p = std::stol(name.substr(3, name.size() - 4));
        return k2_lattice(p);
    }
    throw UnsupportedParameter("unknown standard lattice: " + name);
}

// Rank-2 even negative definite lattice of determinant p. Only exists for
// p = 3 (mod 4): det of a rank-2 even form is 4ac - b^2, never 1 mod 4.
inline IntegralLattice k2_lattice(long p) {
    if (p < 3 || p % 4 != 3) throw UnsupportedParameter("K2(p) requires a prime p = 3 (mod 4)");
    long c = (p + 1) / 2;
    IntMatrix g(2, 2);
    g(0, 0) = -2; g(0, 1) = 1; g(1, 0) = 1; g(1, 1) = -c;
    return IntegralLattice(std::move(g));
}

inline IntegralLattice twist(const IntegralLattice& l, const Int& a) {
    if (a == 0) throw UnsupportedParameter("twist by zero");
    IntMatrix g = l.gram();
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) g(i, j) *= a;
    return IntegralLattice(std::move(g));
}

inline IntegralLattice direct_sum(const IntegralLattice& l1, const IntegralLattice& l2) {
    const int n1 = l1.rank(), n2 = l2.rank();
    IntMatrix g(n1 + n2, n1 + n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j) g(i, j) = l1.gram()(i, j);
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) g(n1 + i, n1 + j) = l2.gram()(i, j);
    return IntegralLattice(std::move(g));
}

// A_L = L^dual / L presented on Smith-form generators.
struct DiscriminantData {
    std::vector<Int> elementary_divisors; // orders > 1
    RatMatrix generator_coords;           // column i = coords of generator i in the lattice basis
    std::vector<Rat> q_values;            // q(g_i) in Q/2Z, reduced to [0,2)
    RatMatrix b_values;                   // b(g_i,g_j) in Q/Z, reduced to [0,1)
};

namespace detail {

inline Rat mod_z(Rat x, long modulus) {
    // reduce into [0, modulus)
    Int num = x.get_num(), den = x.get_den();
    Int m = Int(modulus) * den;
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), m.get_mpz_t());
    Rat out(r, den);
    out.canonicalize();
    return out;
}

} // namespace detail

inline DiscriminantData discriminant_group(const IntegralLattice& l) {
    const int n = l.rank();
    SmithResult snf = smith_normal_form(l.gram());
    // Z^n / G Z^n = (+) Z/d_i with generator V e_i / d_i as an element of L^dual
    DiscriminantData d;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
        if (snf.s(i, i) > 1) {
            idx.push_back(i);
            d.elementary_divisors.push_back(snf.s(i, i));
        }
    const int k = int(idx.size());
    d.generator_coords = RatMatrix(n, k);
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < n; ++r)
            d.generator_coords(r, c) = Rat(snf.v(r, idx[c]), snf.s(idx[c], idx[c]));
    d.q_values.resize(k);
    d.b_values = RatMatrix(k, k);
    RatMatrix gq = RatMatrix::from_int(l.gram());
    RatMatrix prod = d.generator_coords.transpose() * gq * d.generator_coords;
    for (int i = 0; i < k; ++i) {
        d.q_values[i] = detail::mod_z(prod(i, i), 2);
        for (int j = 0; j < k; ++j) d.b_values(i, j) = detail::mod_z(prod(i, j), 1);
    }
    return d;
}

// Kernel of x -> <x,v> mod p, as a sublattice of index p.
inline IntegralLattice index_p_sublattice(const IntegralLattice& l, const std::vector<Int>& v, long p) {
    const int n = l.rank();
    if (int(v.size()) != n) throw Error("index_p_sublattice: bad vector length");
    // functional coefficients w = G v mod p
    std::vector<long> w(n);
    int piv = -1;
    for (int i = 0; i < n; ++i) {
        Int s = 0;
        for (int j = 0; j < n; ++j) s += l.gram()(i, j) * v[j];
        Int r;
        mpz_fdiv_r_ui(r.get_mpz_t(), s.get_mpz_t(), p);
        w[i] = r.get_si();
        if (w[i] != 0 && piv < 0) piv = i;
    }
    if (piv < 0) throw TrivialFunctional();
    // inverse of w[piv] mod p
    long inv = 1;
    {
        long a = w[piv] % p, x = 1;
        // extended Euclid
        long b = p, x0 = 1, x1 = 0;
        while (b != 0) {
            long q = a / b, t = a % b;
            a = b; b = t;
            t = x0 - q * x1; x0 = x1; x1 = t;
        }
        x = ((x0 % p) + p) % p;
        inv = x;
    }
    // basis of kernel: e_i - (w_i/w_piv) e_piv for i != piv, and p e_piv
    IntMatrix basis(n, n);
    int col = 0;
    for (int i = 0; i < n; ++i) {
        if (i == piv) continue;
        basis(i, col) = 1;
        long c = (w[i] * inv) % p;
        basis(piv, col) = -c;
        ++col;
    }
    basis(piv, col) = p;
    IntMatrix g = basis.transpose() * l.gram() * basis;
    return IntegralLattice(std::move(g));
}

// --- Gram exchange formats -------------------------------------------------

inline nlohmann::json gram_to_json(const IntegralLattice& l) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < l.rank(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < l.rank(); ++j) {
            const Int& e = l.gram()(i, j);
            if (e.fits_slong_p())
                row.push_back(e.get_si());
            else
                row.push_back(e.get_str());
        }
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"rank", l.rank()}, {"gram", std::move(rows)}};
}

inline IntegralLattice gram_from_json(const nlohmann::json& j) {
    if (!j.contains("rank") || !j.contains("gram")) throw ParseError("gram JSON needs 'rank' and 'gram'");
    int n = j.at("rank").get<int>();
    const auto& rows = j.at("gram");
    if (int(rows.size()) != n) throw ParseError("gram JSON: row count mismatch");
    IntMatrix g(n, n);
    for (int i = 0; i < n; ++i) {
        if (int(rows[i].size()) != n) throw ParseError("gram JSON: column count mismatch");
        for (int k = 0; k < n; ++k) {
            const auto& e = rows[i][k];
            if (e.is_number_integer())
                g(i, k) = Int(static_cast<long>(e.get<long long>()));
            else if (e.is_string())
                g(i, k) = Int(e.get<std::string>());
            else
                throw ParseError("gram JSON: entries must be integers or decimal strings");
        }
    }
    return IntegralLattice(std::move(g));
}

// Whitespace-delimited text: first token n, then n^2 integers row-major.
inline IntegralLattice gram_from_text(const std::string& text) {
    std::istringstream in(text);
    long long nn;
    if (!(in >> nn) || nn < 0 || nn > 1000) throw ParseError("gram text: bad rank");
    const int n = static_cast<int>(nn);
    IntMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::string tok;
            if (!(in >> tok)) throw ParseError("gram text: too few entries");
            try {
                g(i, j) = Int(tok);
            } catch (const std::invalid_argument&) {
                throw ParseError("gram text: bad integer '" + tok + "'");
            }
        }
    return IntegralLattice(std::move(g));
}

inline std::string gram_to_text(const IntegralLattice& l) {
    std::ostringstream out;
    out << l.rank() << "\n";
    for (int i = 0; i < l.rank(); ++i) {
        for (int j = 0; j < l.rank(); ++j) out << (j ? " " : "") << l.gram()(i, j);
        out << "\n";
    }
    return out.str();
}

} // namespace enr
