#include "doctest.h"

#include "enr/finite_form.hpp"
#include "enr/fpgroup.hpp"
#include "enr/lattice.hpp"

using namespace enr;

namespace {

FpMat make(long p, std::vector<std::vector<int>> rows) {
    FpMat m(p, int(rows.size()));
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) m(i, j) = ((rows[i][j] % int(p)) + int(p)) % int(p);
    return m;
}

} // namespace

TEST_CASE("fp matrix basics") {
    FpMat a = make(5, {{1, 1}, {0, 1}});
    FpMat b = detail::fp_inverse(a);
    CHECK((a * b).is_identity());
    CHECK(a.apply({1, 0}) == std::vector<int>{1, 0});
    CHECK(a.apply({0, 1}) == std::vector<int>{1, 1});
}

TEST_CASE("group orders of classic groups") {
    CHECK(fp_matrix_group_order({}) == 1);
    CHECK(fp_matrix_group_order({FpMat::identity(3, 2)}) == 1);

    // SL(2,p) = <[[1,1],[0,1]], [[0,-1],[1,0]]>, order p(p^2-1)
    for (long p : {3L, 5L, 7L}) {
        std::vector<FpMat> gens{make(p, {{1, 1}, {0, 1}}), make(p, {{0, -1}, {1, 0}})};
        CHECK(fp_matrix_group_order(gens) == Int(p * (p * p - 1)));
    }

    // GL(2,3): add a non-square determinant generator, order 48
    std::vector<FpMat> gl{make(3, {{1, 1}, {0, 1}}), make(3, {{0, -1}, {1, 0}}),
                          make(3, {{2, 0}, {0, 1}})};
    CHECK(fp_matrix_group_order(gl) == 48);

    // cyclic subgroups: char polys x^2-x+1 (order 6) and x^2-x-1 (Singer, order 8)
    CHECK(fp_matrix_group_order({make(3, {{0, -1}, {1, 1}})}) == 6);
    CHECK(fp_matrix_group_order({make(3, {{0, 1}, {1, 1}})}) == 8);
}

TEST_CASE("group order matches brute-force orthogonal groups") {
    for (long p : {3L, 5L}) {
        FiniteQuadraticForm split;
        split.orders = {Int(p), Int(p)};
        split.q = {Rat(0), Rat(0)};
        split.b = RatMatrix(2, 2);
        split.b(0, 1) = split.b(1, 0) = Rat(1, p);
        auto elems = brute_force_orthogonal_group(split);
        std::vector<FpMat> gens;
        for (const IntMatrix& m : elems) {
            FpMat g(p, 2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) g(i, j) = int((Int((m(i, j) % p) + p).get_si()) % p);
            gens.push_back(g);
        }
        CHECK(fp_matrix_group_order(gens) == Int(long(elems.size())));
    }
}
