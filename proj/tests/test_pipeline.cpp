#include "doctest.h"

#include "enr/pipeline.hpp"

using namespace enr;

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate_params({2, 1}), UnsupportedParameter);
    CHECK_THROWS_AS(validate_params({9, 1}), UnsupportedParameter);
    CHECK_THROWS_AS(validate_params({3, 0}), UnsupportedParameter);
    CHECK_THROWS_AS(validate_params({3, 11}), UnsupportedParameter);
    CHECK_NOTHROW(validate_params({3, 1}));
    CHECK_NOTHROW(validate_params({13, 10}));
}

TEST_CASE("ns_lattice invariants") {
    IntegralLattice l31 = ns_lattice({3, 1});
    CHECK(l31.rank() == 22);
    CHECK(l31.is_even());
    CHECK(l31.signature() == std::pair<int, int>(1, 21));
    CHECK(l31.det() == -9);
    auto d = discriminant_group(l31);
    REQUIRE(d.elementary_divisors.size() == 2);
    CHECK(d.elementary_divisors[0] == 3);
    CHECK(d.elementary_divisors[1] == 3);

    IntegralLattice l32 = ns_lattice({3, 2});
    CHECK(l32.det() == -81);
    CHECK(l32.signature() == std::pair<int, int>(1, 21));
    CHECK(discriminant_group(l32).elementary_divisors.size() == 4);

    // p = 5 goes through the rank-4 search branch
    IntegralLattice l51 = ns_lattice({5, 1});
    CHECK(l51.det() == -25);
    CHECK(l51.is_even());
    CHECK(l51.signature() == std::pair<int, int>(1, 21));
    CHECK(discriminant_group(l51).elementary_divisors.size() == 2);
}

TEST_CASE("gamma twisted") {
    IntegralLattice g2 = gamma_twisted();
    CHECK(g2.rank() == 10);
    CHECK(g2.det() == -1024);
    CHECK(g2.signature() == std::pair<int, int>(1, 9));
    auto d = discriminant_group(g2);
    CHECK(d.elementary_divisors.size() == 10);
    for (const Int& e : d.elementary_divisors) CHECK(e == 2);
}

TEST_CASE("delta form") {
    FiniteQuadraticForm d31 = delta_form({3, 1});
    CHECK(d31.group_order() == Int(1024) * 9);
    CHECK(milgram_signature(d31) == 4);
    CHECK(p_part(d31, 3).length() == 2);
    CHECK(p_part(d31, 2).length() == 10);

    FiniteQuadraticForm d32 = delta_form({3, 2});
    CHECK(d32.group_order() == Int(1024) * 81);
    CHECK(milgram_signature(d32) == 4);
    CHECK(p_part(d32, 3).length() == 4);
}

TEST_CASE("seed complement and verification") {
    IntegralLattice seed = seed_complement({3, 1});
    CHECK(seed.rank() == 12);
    CHECK(seed.is_even());
    CHECK(seed.signature() == std::pair<int, int>(0, 12));
    CHECK(forms_isomorphic(discriminant_form(seed), delta_form({3, 1})));
    CHECK_NOTHROW(verify_seed(seed, {3, 1}));

    // ingesting a Gram of the wrong genus must be rejected
    CHECK_THROWS_AS(verify_seed(twist(standard_lattice("E8"), 2), {3, 1}), SeedRejected);
    CHECK_THROWS_AS(verify_seed(seed, {5, 1}), SeedRejected);
    CHECK_THROWS_AS(verify_seed(twist(seed, -1), {3, 1}), SeedRejected); // wrong signature
}

TEST_CASE("discriminant action basics") {
    IntegralLattice seed = seed_complement({3, 1});
    const int n = seed.rank();
    IntMatrix id(n, n), neg(n, n);
    for (int i = 0; i < n; ++i) { id(i, i) = 1; neg(i, i) = -1; }
    FpMat a = discriminant_action(id, seed, 3);
    CHECK(a.is_identity());
    FpMat b = discriminant_action(neg, seed, 3);
    CHECK(!b.is_identity());
    CHECK((b * b).is_identity());
    IntMatrix shear = id;
    shear(0, 1) = 1;
    CHECK_THROWS_AS(discriminant_action(shear, seed, 3), NotAnIsometry);
}

TEST_CASE("Rep(3,1) and the equality case") {
    GenusCatalog cat = rep_classes({3, 1});
    CHECK(rep_count(cat) == 2);
    for (const GenusClass& c : cat.classes) {
        CHECK(c.lattice.signature() == std::pair<int, int>(0, 12));
        CHECK(forms_isomorphic(discriminant_form(c.lattice), delta_form({3, 1})));
    }

    EnriquesReport rep = report_from_catalog({3, 1}, cat);
    CHECK(rep.lower == 2);
    CHECK(rep.upper == 2);
    CHECK(rep.equality);
    REQUIRE(rep.classes.size() == 2);
    for (const ClassReport& c : rep.classes) {
        CHECK(c.quotient == 1);
        CHECK(c.oq == c.im);
        CHECK(c.oq == oq_order({3, 1}));
    }

    nlohmann::json j = report_to_json(rep);
    CHECK(j.at("lower").get<long>() == 2);
    CHECK(j.at("upper").get<std::string>() == "2");
    CHECK(j.at("equality").get<bool>() == true);
}
