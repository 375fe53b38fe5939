#include "doctest.h"

#include <random>
#include <set>

#include "enr/finite_form.hpp"
#include "enr/lattice.hpp"

using namespace enr;

namespace {

FiniteQuadraticForm trivial_form() { return FiniteQuadraticForm{}; }

FiniteQuadraticForm z3_form() { // (Z/3, q = -2/3)
    return discriminant_form(standard_lattice("K2(3)"));
}

// random generator change of a finite form: replace generators by a
// random automorphism-free generating set of the same group
FiniteQuadraticForm rebase(const FiniteQuadraticForm& f, std::mt19937& rng) {
    const int k = f.length();
    // random invertible change of basis respecting orders (all orders equal
    // in our elementary test forms, so any matrix invertible mod p works)
    long p = f.orders[0].get_si();
    std::uniform_int_distribution<long> coef(0, p - 1);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<std::vector<long>> m(k, std::vector<long>(k));
        for (auto& row : m)
            for (auto& x : row) x = coef(rng);
        // check invertibility mod p
        IntMatrix im(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) im(i, j) = m[i][j];
        Int d = det(im);
        if (d % p == 0) continue;
        FiniteQuadraticForm g;
        g.orders = f.orders;
        g.q.resize(k);
        g.b = RatMatrix(k, k);
        for (int i = 0; i < k; ++i) {
            g.q[i] = f.q_of(m[i]);
            for (int j = 0; j < k; ++j) g.b(i, j) = f.b_of(m[i], m[j]);
        }
        return g;
    }
    throw std::runtime_error("rebase failed");
}

} // namespace

TEST_CASE("direct sum and negation") {
    FiniteQuadraticForm q3 = z3_form();
    CHECK(form_direct_sum(q3, trivial_form()).group_order() == 3);
    FiniteQuadraticForm s = form_direct_sum(q3, q3);
    CHECK(s.group_order() == 9);
    CHECK(s.length() == 2);

    CHECK(negate_form(trivial_form()).is_trivial());
    FiniteQuadraticForm n2 = negate_form(negate_form(q3));
    CHECK(n2.q == q3.q);

    // disc form of U(2) is fixed by negation (order-2 elements)
    FiniteQuadraticForm u2 = discriminant_form(twist(standard_lattice("U"), 2));
    FiniteQuadraticForm nu2 = negate_form(u2);
    CHECK(forms_isomorphic(u2, nu2));
}

TEST_CASE("p-part") {
    FiniteQuadraticForm q3 = z3_form();
    FiniteQuadraticForm mixed = form_direct_sum(q3, discriminant_form(twist(standard_lattice("U"), 2)));
    CHECK(p_part(mixed, 3).group_order() == 3);
    CHECK(p_part(mixed, 2).group_order() == 4);
    CHECK(p_part(mixed, 5).is_trivial());
    // mixed-order generator splits correctly: disc of A2(2) has a Z/6 part
    FiniteQuadraticForm a22 = discriminant_form(twist(standard_lattice("A2"), 2));
    CHECK(a22.group_order() == 12);
    CHECK(p_part(a22, 2).group_order() == 4);
    CHECK(p_part(a22, 3).group_order() == 3);
}

TEST_CASE("milgram signature") {
    CHECK(milgram_signature(trivial_form()) == 0);
    CHECK(milgram_signature(discriminant_form(twist(standard_lattice("U"), 2))) == 0);
    CHECK(milgram_signature(z3_form()) == 6);

    // additivity
    FiniteQuadraticForm q3 = z3_form();
    FiniteQuadraticForm u2 = discriminant_form(twist(standard_lattice("U"), 2));
    CHECK(milgram_signature(form_direct_sum(q3, u2)) == (milgram_signature(q3) + milgram_signature(u2)) % 8);
    // negation
    CHECK(milgram_signature(negate_form(q3)) == (8 - milgram_signature(q3)) % 8);
}

TEST_CASE("form invariants and isomorphism") {
    FiniteQuadraticForm g2 = discriminant_form(twist(direct_sum(standard_lattice("U"), standard_lattice("E8")), 2));
    FormInvariants inv = form_invariants(g2);
    REQUIRE(inv.per_prime.size() == 1);
    CHECK(inv.per_prime[0].p == 2);
    CHECK(inv.per_prime[0].length == 10);
    CHECK(inv.per_prime[0].even_type);
    CHECK(inv.per_prime[0].sig8 == 0);

    CHECK(forms_isomorphic(g2, g2));

    // u-type vs v-type length-2 even blocks differ (signatures 0 vs 4)
    FiniteQuadraticForm u2 = discriminant_form(twist(standard_lattice("U"), 2));
    FiniteQuadraticForm v2 = discriminant_form(twist(standard_lattice("A2"), 2));
    FiniteQuadraticForm v2_2part = p_part(v2, 2);
    CHECK(milgram_signature(u2) == 0);
    CHECK(milgram_signature(v2_2part) == 4);
    CHECK(!forms_isomorphic(u2, v2_2part));

    // a form with a Z/9 part is unsupported
    FiniteQuadraticForm z9 = discriminant_form(lattice_from_rows(2, {{2, 1}, {1, 5}}));
    CHECK(z9.group_order() == 9);
    REQUIRE(z9.length() == 1);
    CHECK_THROWS_AS(form_invariants(z9), UnsupportedShape);
}

TEST_CASE("invariants stable under generator change") {
    std::mt19937 rng(17);
    FiniteQuadraticForm base = form_direct_sum(z3_form(), negate_form(z3_form()));
    FormInvariants inv = form_invariants(base);
    for (int trial = 0; trial < 20; ++trial) {
        FiniteQuadraticForm r = rebase(base, rng);
        CHECK(form_invariants(r) == inv);
        CHECK(forms_isomorphic(base, r));
    }
}

TEST_CASE("orthogonal group order formula vs brute force") {
    // (Z/3, -2/3) has exactly the automorphisms +-1
    CHECK(brute_force_orthogonal_group(z3_form()).size() == 2);
    CHECK(brute_force_orthogonal_group(trivial_form()).size() == 1);

    for (long p : {3L, 5L, 7L}) {
        // split plane over F_p: discriminant form of U(p) has 3-part ... build
        // directly instead: q((x,y)) = 2xy/p on (Z/p)^2
        FiniteQuadraticForm split;
        split.orders = {Int(p), Int(p)};
        split.q = {Rat(0), Rat(0)};
        split.b = RatMatrix(2, 2);
        split.b(0, 1) = split.b(1, 0) = Rat(1, p);
        CHECK(witt_epsilon(split, p) == 1);
        CHECK(Int(brute_force_orthogonal_group(split).size()) == orthogonal_group_order(p, 1, 1));

        // anisotropic plane: norm form of F_{p^2}; q(x) = 2*(x1^2 + a x1 x2 + b x2^2)/p
        // realized as diag(1, -nonsquare) which has epsilon = -1
        long ns = 0;
        for (long a = 2; a < p; ++a)
            if (detail::legendre_symbol(Int(a), p) == -1) { ns = a; break; }
        FiniteQuadraticForm aniso;
        aniso.orders = {Int(p), Int(p)};
        aniso.q = {detail::mod_z(Rat(2, p), 2), detail::mod_z(Rat(-2 * ns, p), 2)};
        aniso.b = RatMatrix(2, 2);
        aniso.b(0, 0) = detail::mod_z(Rat(2, p), 1);
        aniso.b(1, 1) = detail::mod_z(Rat(-2 * ns, p), 1);
        CHECK(witt_epsilon(aniso, p) == -1);
        CHECK(Int(brute_force_orthogonal_group(aniso).size()) == orthogonal_group_order(p, 1, -1));
    }
    CHECK(orthogonal_group_order(3, 1, 1) == 4);
    CHECK(orthogonal_group_order(3, 1, -1) == 8);
    CHECK(orthogonal_group_order(5, 1, -1) == 12);
}

TEST_CASE("witt epsilon errors") {
    FiniteQuadraticForm one;
    one.orders = {Int(3)};
    one.q = {Rat(4, 3)};
    one.b = RatMatrix(1, 1);
    one.b(0, 0) = Rat(2, 3);
    CHECK_THROWS_AS(witt_epsilon(one, 3), OddLength);
}

TEST_CASE("form serialization roundtrip") {
    FiniteQuadraticForm f = form_direct_sum(z3_form(), discriminant_form(twist(standard_lattice("U"), 2)));
    auto j = form_to_json(f);
    FiniteQuadraticForm back = form_from_json(j);
    CHECK(back.orders == f.orders);
    CHECK(back.q == f.q);
    CHECK(back.b == f.b);
}
