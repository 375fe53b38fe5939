#include "doctest.h"

#include <random>
#include <set>

#include "enr/autgrp.hpp"
#include "enr/neighbor.hpp"
#include "enr/shortvec.hpp"

using namespace enr;

namespace {

IntegralLattice diag_lattice(const std::vector<long>& d) {
    IntMatrix g(int(d.size()), int(d.size()));
    for (size_t i = 0; i < d.size(); ++i) g(int(i), int(i)) = d[i];
    return IntegralLattice(std::move(g));
}

// exhaustive reference: box bounds z_i^2 <= bound * (G^{-1})_{ii}
std::set<std::pair<long, std::vector<int>>> box_enumerate(const IntegralLattice& l, long bound) {
    const int n = l.rank();
    RatMatrix ginv = rat_inverse(RatMatrix::from_int(l.gram()));
    std::vector<long> box(n);
    for (int i = 0; i < n; ++i) {
        Rat r = ginv(i, i) * Rat(bound);
        double x = r.get_d();
        box[i] = long(std::floor(std::sqrt(std::max(x, 0.0)) + 1e-9));
    }
    std::set<std::pair<long, std::vector<int>>> out;
    std::vector<int> z(n, -int(box[0]) - 1);
    for (int i = 0; i < n; ++i) z[i] = -int(box[i]);
    while (true) {
        Int norm = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) norm += l.gram()(i, j) * z[i] * z[j];
        if (norm > 0 && norm <= bound) {
            std::vector<int> c = z;
            for (int i = 0; i < n; ++i) {
                if (c[i] > 0) break;
                if (c[i] < 0) {
                    for (auto& x : c) x = -x;
                    break;
                }
            }
            out.insert({norm.get_si(), c});
        }
        int k = 0;
        while (k < n && z[k] == int(box[k])) {
            z[k] = -int(box[k]);
            ++k;
        }
        if (k == n) break;
        ++z[k];
    }
    return out;
}

IntMatrix random_unimodular(int n, std::mt19937& rng) {
    IntMatrix u = IntMatrix::identity(n);
    std::uniform_int_distribution<int> pick(0, n - 1), coef(-2, 2);
    for (int step = 0; step < 3 * n; ++step) {
        int i = pick(rng), j = pick(rng);
        if (i == j) continue;
        long c = coef(rng);
        for (int r = 0; r < n; ++r) u(r, j) += c * u(r, i);
    }
    return u;
}

} // namespace

TEST_CASE("short vectors: fixed examples") {
    IntegralLattice e8neg = standard_lattice("E8"); // negative definite
    auto roots = short_vectors(e8neg, 2);
    CHECK(roots.size() == 120); // 240 vectors of norm 2 in +-pairs
    for (const auto& v : roots) CHECK(v.norm == 2);
    CHECK(lattice_minimum(e8neg) == 2);
    CHECK(!root_free(e8neg));

    CHECK(short_vectors(diag_lattice({4, 6}), 2).empty());
    CHECK(lattice_minimum(diag_lattice({4, 6})) == 4);
    CHECK(root_free(diag_lattice({-4, -6})));

    auto d22 = short_vectors(diag_lattice({2, 2}), 2);
    CHECK(d22.size() == 2);
}

TEST_CASE("short vectors are sorted and sign-canonical") {
    auto vs = short_vectors(standard_lattice("E8"), 4);
    for (size_t i = 1; i < vs.size(); ++i) CHECK(!short_vector_less(vs[i], vs[i - 1]));
    for (const auto& v : vs) {
        int lead = 0;
        for (int x : v.coords)
            if (x != 0) { lead = x; break; }
        CHECK(lead > 0);
    }
}

TEST_CASE("short vectors match box enumeration on random small lattices") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> rankd(1, 4), entry(-3, 3);
    int done = 0;
    while (done < 200) {
        int n = rankd(rng);
        IntMatrix b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) = entry(rng);
        Int d = det(b);
        if (d == 0) continue;
        IntMatrix g = b.transpose() * b;
        IntegralLattice l(g);
        long bound = 2 + int(rng() % 12);
        // keep the reference search affordable
        RatMatrix ginv = rat_inverse(RatMatrix::from_int(g));
        double volume = 1;
        for (int i = 0; i < n; ++i)
            volume *= 2 * std::sqrt(std::max(Rat(ginv(i, i) * Rat(bound)).get_d(), 0.0)) + 1;
        if (volume > 2e5) continue;
        auto fast = short_vectors(l, bound);
        std::set<std::pair<long, std::vector<int>>> got;
        for (const auto& v : fast) got.insert({long(v.norm), v.coords});
        CHECK(got.size() == fast.size()); // no duplicates
        CHECK(got == box_enumerate(l, bound));
        ++done;
    }
}

TEST_CASE("automorphism groups: fixed orders") {
    CHECK(automorphism_order(standard_lattice("A2")) == 12);
    CHECK(automorphism_order(standard_lattice("A2neg")) == 12);
    CHECK(automorphism_order(diag_lattice({2, 4})) == 4);
    CHECK(automorphism_order(diag_lattice({2, 2})) == 8);
    CHECK(automorphism_order(standard_lattice("D4")) == 1152);
}

TEST_CASE("E8 automorphism order") {
    IsometryGroupGens g = automorphism_generators(standard_lattice("E8"));
    CHECK(g.order == 696729600);
    CHECK(!g.generators.empty());
    for (const IntMatrix& a : g.generators) {
        IntMatrix check = a.transpose() * standard_lattice("E8").gram() * a;
        CHECK(check == standard_lattice("E8").gram());
    }
}

TEST_CASE("automorphism order is basis independent") {
    std::mt19937 rng(7);
    IntegralLattice base = direct_sum(standard_lattice("A2"), diag_lattice({2, 4}));
    Int ref = automorphism_order(base);
    for (int trial = 0; trial < 5; ++trial) {
        IntMatrix u = random_unimodular(base.rank(), rng);
        IntegralLattice moved(u.transpose() * base.gram() * u);
        CHECK(automorphism_order(moved) == ref);
    }
}

TEST_CASE("isometry test") {
    IntegralLattice a2 = standard_lattice("A2");
    auto self = isometry_test(a2, a2);
    REQUIRE(self.has_value());

    auto perm = isometry_test(diag_lattice({2, 4}), diag_lattice({4, 2}));
    REQUIRE(perm.has_value());

    CHECK(!isometry_test(diag_lattice({2, 2}), a2).has_value());
    CHECK(!isometry_test(diag_lattice({2}), diag_lattice({4})).has_value());
    CHECK(!isometry_test(a2, standard_lattice("A2neg")).has_value());

    // non-isometric lattices with equal det and rank
    IntegralLattice l1 = diag_lattice({2, 2, 36});
    IntegralLattice l2 = diag_lattice({2, 6, 12});
    CHECK(abs(l1.det()) == abs(l2.det()));
    CHECK(!isometry_test(l1, l2).has_value());
}

TEST_CASE("isometry test finds transforms for rebased lattices") {
    std::mt19937 rng(41);
    for (const char* name : {"A2", "D4", "E8"}) {
        IntegralLattice base = standard_lattice(name);
        for (int trial = 0; trial < 3; ++trial) {
            IntMatrix u = random_unimodular(base.rank(), rng);
            IntegralLattice moved(u.transpose() * base.gram() * u);
            auto t = isometry_test(base, moved);
            REQUIRE(t.has_value());
            IntMatrix check = t->transpose() * base.gram() * *t;
            CHECK(check == moved.gram());
        }
    }
}

TEST_CASE("neighbor construction at E8") {
    IntegralLattice e8 = twist(standard_lattice("E8"), -1); // positive definite
    auto nbs = p_neighbors(e8, 3);
    CHECK(nbs.size() == 1120); // isotropic lines in P(F_3^8)
    for (const auto& nb : nbs) {
        CHECK(nb.det() == e8.det());
        CHECK(nb.is_even());
    }
    // one-class genus: spot check isometry
    for (size_t i = 0; i < nbs.size(); i += 97) CHECK(isometry_test(e8, nbs[i]).has_value());

    CHECK_THROWS_AS(p_neighbors(e8, 2), BadPrime);
    CHECK_THROWS_AS(p_neighbors(e8, 9), BadPrime);
    IntegralLattice a2u = direct_sum(standard_lattice("A2"), diag_lattice({2}));
    CHECK_THROWS_AS(p_neighbors(a2u, 3), BadPrime); // 3 | det
    CHECK_THROWS_AS(p_neighbors(diag_lattice({2, 2}), 3), BadPrime); // rank < 3
}

TEST_CASE("neighbor symmetry sample") {
    IntegralLattice base = standard_lattice("D4");
    auto nbs = p_neighbors(base, 5);
    REQUIRE(!nbs.empty());
    IntegralLattice nb = nbs[0];
    bool back = false;
    for (const auto& x : p_neighbors(nb, 5))
        if (isometry_test(base, x)) { back = true; break; }
    CHECK(back);
}

TEST_CASE("genus of E8 has one class") {
    IntegralLattice e8 = twist(standard_lattice("E8"), -1);
    GenusStrategy strat;
    strat.primes = {3};
    GenusCatalog cat = enumerate_genus(e8, strat);
    REQUIRE(cat.classes.size() == 1);
    CHECK(cat.classes[0].aut_order == 696729600);
    CHECK(!cat.classes[0].root_free);
    CHECK(cat.classes[0].minimum == 2);
    CHECK(cat.lines_visited == 1120);

    // cross-check at a second prime agrees
    strat.primes = {3, 5};
    strat.cross_check = true;
    GenusCatalog cat2 = enumerate_genus(e8, strat);
    CHECK(cat2.classes.size() == 1);
}

TEST_CASE("genus catalog is deterministic across job counts") {
    IntegralLattice seed = direct_sum(twist(standard_lattice("E8"), -1), standard_lattice("D4"));
    GenusStrategy s1{{3}, false, 1}, s8{{3}, false, 8};
    auto j1 = catalog_to_json(enumerate_genus(seed, s1), {{"seed", "test"}});
    auto j8 = catalog_to_json(enumerate_genus(seed, s8), {{"seed", "test"}});
    CHECK(j1.dump() == j8.dump());
}

TEST_CASE("catalog JSON roundtrip") {
    IntegralLattice e8 = twist(standard_lattice("E8"), -1);
    GenusStrategy strat{{3}, false, 1};
    GenusCatalog cat = enumerate_genus(e8, strat);
    auto j = catalog_to_json(cat, {{"name", "e8"}});
    GenusCatalog back = catalog_from_json(j);
    REQUIRE(back.classes.size() == cat.classes.size());
    CHECK(back.classes[0].lattice.gram() == cat.classes[0].lattice.gram());
    CHECK(back.classes[0].aut_order == cat.classes[0].aut_order);
    CHECK(back.lines_visited == cat.lines_visited);
    CHECK(back.primes == cat.primes);
}
