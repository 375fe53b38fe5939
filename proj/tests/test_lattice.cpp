#include "doctest.h"

#include "enr/finite_form.hpp"
#include "enr/lattice.hpp"

using namespace enr;

TEST_CASE("standard lattices") {
    IntegralLattice u = standard_lattice("U");
    CHECK(u.det() == -1);
    CHECK(u.signature() == std::pair<int, int>(1, 1));
    CHECK(u.is_even());

    IntegralLattice e8 = standard_lattice("E8");
    CHECK(e8.det() == 1);
    CHECK(e8.signature() == std::pair<int, int>(0, 8));
    CHECK(e8.is_even());

    IntegralLattice k23 = standard_lattice("K2(3)");
    CHECK(k23.gram()(0, 0) == -2);
    CHECK(k23.gram()(1, 1) == -2);
    CHECK(k23.det() == 3);
    auto d = discriminant_group(k23);
    REQUIRE(d.elementary_divisors.size() == 1);
    CHECK(d.elementary_divisors[0] == 3);

    CHECK_THROWS_AS(standard_lattice("K2(5)"), UnsupportedParameter);

    IntegralLattice d4 = standard_lattice("D4");
    CHECK(d4.det() == 4);
    CHECK(d4.signature() == std::pair<int, int>(4, 0));
}

TEST_CASE("twist") {
    IntegralLattice u = standard_lattice("U");
    IntegralLattice u2 = twist(u, 2);
    CHECK(u2.gram()(0, 1) == 2);
    CHECK(twist(u, 1).gram() == u.gram());
    IntegralLattice e8pos = twist(standard_lattice("E8"), -1);
    CHECK(e8pos.signature() == std::pair<int, int>(8, 0));
    CHECK(e8pos.det() == 1);
    CHECK(e8pos.is_even());
    // twist(twist(L,a),b) = twist(L,ab)
    IntegralLattice a2 = standard_lattice("A2");
    CHECK(twist(twist(a2, 2), 3).gram() == twist(a2, 6).gram());
}

TEST_CASE("direct sums") {
    IntegralLattice u = standard_lattice("U");
    IntegralLattice e8 = standard_lattice("E8");
    IntegralLattice gamma = direct_sum(u, e8);
    CHECK(gamma.rank() == 10);
    CHECK(gamma.det() == u.det() * e8.det());
    CHECK(gamma.signature() == std::pair<int, int>(1, 9));

    IntegralLattice gamma2 = direct_sum(twist(u, 2), twist(e8, 2));
    CHECK(gamma2.rank() == 10);
    Int expect;
    mpz_ui_pow_ui(expect.get_mpz_t(), 2, 10);
    Int ad = abs(gamma2.det());
    CHECK(ad == expect);
    auto d = discriminant_group(gamma2);
    CHECK(d.elementary_divisors.size() == 10);
    for (const Int& e : d.elementary_divisors) CHECK(e == 2);
}

TEST_CASE("discriminant groups") {
    CHECK(discriminant_group(standard_lattice("E8")).elementary_divisors.empty());

    auto d = discriminant_group(twist(standard_lattice("U"), 2));
    REQUIRE(d.elementary_divisors.size() == 2);
    CHECK(d.elementary_divisors[0] == 2);
    CHECK(d.elementary_divisors[1] == 2);
    // q-values on the three nonzero elements are (0,0,1) in some order
    FiniteQuadraticForm f = form_of_discriminant(d);
    std::multiset<Rat> vals{f.q_of({1, 0}), f.q_of({0, 1}), f.q_of({1, 1})};
    CHECK(vals == std::multiset<Rat>{Rat(0), Rat(0), Rat(1)});

    auto k = discriminant_group(standard_lattice("K2(3)"));
    FiniteQuadraticForm fk = form_of_discriminant(k);
    REQUIRE(fk.length() == 1);
    CHECK(fk.orders[0] == 3);
    // q(g) = -2/3 mod 2Z, i.e. 4/3
    CHECK(fk.q[0] == Rat(4, 3));
}

TEST_CASE("#A_L equals |det| for sample lattices") {
    for (const char* name : {"U", "E8", "A2", "A2neg", "D4", "K2(3)", "K2(7)"}) {
        IntegralLattice l = standard_lattice(name);
        Int prod = 1;
        for (const Int& e : discriminant_group(l).elementary_divisors) prod *= e;
        CHECK(prod == abs(l.det()));
    }
    IntegralLattice g2 = twist(direct_sum(standard_lattice("U"), standard_lattice("E8")), 2);
    Int prod = 1;
    for (const Int& e : discriminant_group(g2).elementary_divisors) prod *= e;
    CHECK(prod == abs(g2.det()));
}

TEST_CASE("Milgram consistency for even lattices") {
    auto check_milgram = [](const IntegralLattice& l) {
        REQUIRE(l.is_even());
        auto [np, nm] = l.signature();
        int sig = milgram_signature(discriminant_form(l));
        CHECK(sig == ((np - nm) % 8 + 8) % 8);
    };
    check_milgram(standard_lattice("U"));
    check_milgram(standard_lattice("E8"));
    check_milgram(standard_lattice("A2"));
    check_milgram(standard_lattice("A2neg"));
    check_milgram(standard_lattice("D4"));
    check_milgram(standard_lattice("K2(3)"));
    check_milgram(standard_lattice("K2(7)"));
    check_milgram(standard_lattice("K2(11)"));
    check_milgram(twist(standard_lattice("U"), 2));
    check_milgram(twist(standard_lattice("E8"), 2));
    check_milgram(twist(direct_sum(standard_lattice("U"), standard_lattice("E8")), 2));
}

TEST_CASE("index-p sublattice") {
    IntegralLattice u = standard_lattice("U");
    std::vector<Int> e1{1, 0};
    IntegralLattice sub = index_p_sublattice(u, e1, 3);
    CHECK(sub.det() == 9 * u.det());
    // kernel of <.,e1> mod 3 on U is span(e1, 3 e2): Gram [[0,3],[3,0]] up to basis
    CHECK(abs(sub.det()) == 9);
    CHECK(sub.is_even());
    auto d = discriminant_group(sub);
    Int prod = 1;
    for (const Int& e : d.elementary_divisors) prod *= e;
    CHECK(prod == 9);

    std::vector<Int> v3{3, 0};
    CHECK_THROWS_AS(index_p_sublattice(u, v3, 3), TrivialFunctional);

    // determinant law on a bigger lattice
    IntegralLattice g = direct_sum(u, standard_lattice("E8"));
    std::vector<Int> v(10, 0);
    v[3] = 1;
    v[7] = 2;
    IntegralLattice s2 = index_p_sublattice(g, v, 5);
    CHECK(s2.det() == 25 * g.det());
    CHECK(s2.is_even());
}

TEST_CASE("gram IO") {
    IntegralLattice l = standard_lattice("A2");
    auto j = gram_to_json(l);
    IntegralLattice back = gram_from_json(j);
    CHECK(back.gram() == l.gram());

    std::string txt = gram_to_text(l);
    IntegralLattice back2 = gram_from_text(txt);
    CHECK(back2.gram() == l.gram());

    CHECK_THROWS_AS(gram_from_text("2 1 2 3"), ParseError);
    CHECK_THROWS_AS(gram_from_text("bogus"), ParseError);
}
