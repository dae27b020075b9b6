#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qforge/gf2.hpp"

using namespace qforge;

namespace {

BinaryMatrix rep3_checks() { return BinaryMatrix::from_dense({{1, 1, 0}, {0, 1, 1}}); }

// Independent oracle: naive triple loop mod 2.
BinaryMatrix naive_matmul(const BinaryMatrix& a, const BinaryMatrix& b) {
    BinaryMatrix out(a.rows(), b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) {
            int acc = 0;
            for (size_t k = 0; k < a.cols(); ++k) acc ^= (a.get(i, k) && b.get(k, j)) ? 1 : 0;
            out.set(i, j, acc);
        }
    return out;
}

}  // namespace

TEST_CASE("matmul identity and repetition code") {
    Rng rng(11);
    BinaryMatrix m = BinaryMatrix::random(3, 5, rng);
    CHECK(BinaryMatrix::identity(3) * m == m);

    BinaryVector ones = BinaryVector::from_indices(3, {0, 1, 2});
    CHECK((rep3_checks() * ones).is_zero());
}

TEST_CASE("matmul matches naive oracle") {
    Rng rng(7);
    BinaryMatrix a = BinaryMatrix::random(5, 7, rng);
    BinaryMatrix b = BinaryMatrix::random(7, 4, rng);
    CHECK(a * b == naive_matmul(a, b));

    for (int trial = 0; trial < 200; ++trial) {
        size_t r = 1 + rng.below(64);
        size_t k = 1 + rng.below(64);
        size_t c = 1 + rng.below(64);
        BinaryMatrix x = BinaryMatrix::random(r, k, rng);
        BinaryMatrix y = BinaryMatrix::random(k, c, rng);
        REQUIRE(x * y == naive_matmul(x, y));
    }
}

TEST_CASE("matmul dimension mismatch throws") {
    BinaryMatrix a(2, 3), b(4, 2);
    CHECK_THROWS_AS(a * b, std::invalid_argument);
}

TEST_CASE("rank") {
    CHECK(BinaryMatrix(4, 6).rank() == 0);
    CHECK(rep3_checks().rank() == 2);
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryMatrix a = BinaryMatrix::random(10, 14, rng);
        CHECK(a.rank() == a.transpose().rank());
    }
}

TEST_CASE("kernel basis") {
    CHECK(BinaryMatrix::identity(5).kernel_basis().rows() == 0);

    BinaryMatrix k = rep3_checks().kernel_basis();
    REQUIRE(k.rows() == 1);
    CHECK(k.row(0) == BinaryVector::from_indices(3, {0, 1, 2}));

    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryMatrix a = BinaryMatrix::random(6, 10, rng);
        BinaryMatrix basis = a.kernel_basis();
        CHECK(basis.rows() == a.cols() - a.rank());
        for (size_t r = 0; r < basis.rows(); ++r) CHECK((a * basis.row(r)).is_zero());
        CHECK(basis.rank() == basis.rows());
    }
}

TEST_CASE("row reduce") {
    auto idres = BinaryMatrix::identity(4).row_reduce();
    CHECK(idres.reduced == BinaryMatrix::identity(4));
    CHECK(idres.transform == BinaryMatrix::identity(4));
    CHECK(idres.pivot_cols == std::vector<uint32_t>{0, 1, 2, 3});

    auto rep = rep3_checks().row_reduce();
    CHECK(rep.pivot_cols == std::vector<uint32_t>{0, 1});

    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        BinaryMatrix a = BinaryMatrix::random(12, 12, rng);
        auto rr = a.row_reduce();
        CHECK(rr.transform * a == rr.reduced);
        CHECK(rr.transform.rank() == 12);
        for (size_t i = 1; i < rr.pivot_cols.size(); ++i) CHECK(rr.pivot_cols[i - 1] < rr.pivot_cols[i]);
    }
}

TEST_CASE("solve") {
    BinaryMatrix id = BinaryMatrix::identity(6);
    BinaryVector b = BinaryVector::from_indices(6, {1, 4});
    auto x = id.solve(b);
    REQUIRE(x.has_value());
    CHECK(*x == b);

    Rng rng(13);
    BinaryMatrix a = BinaryMatrix::random(8, 11, rng);
    auto zero = a.solve(BinaryVector(8));
    REQUIRE(zero.has_value());
    CHECK((a * *zero).is_zero());

    BinaryMatrix withzero(3, 4);
    withzero.set(0, 0, true);
    BinaryVector bad(3);
    bad.set(2, true);  // zero row of A vs 1 in b
    CHECK(!withzero.solve(bad).has_value());

    for (int trial = 0; trial < 50; ++trial) {
        BinaryMatrix m = BinaryMatrix::random(9, 7, rng);
        BinaryVector rhs(9);
        for (size_t i = 0; i < 9; ++i) rhs.set(i, rng.bernoulli(0.5));
        auto sol = m.solve(rhs);
        if (sol) CHECK(m * *sol == rhs);
    }
}

TEST_CASE("rank nullity") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        size_t r = 1 + rng.below(20), c = 1 + rng.below(20);
        BinaryMatrix a = BinaryMatrix::random(r, c, rng);
        CHECK(a.rank() + a.kernel_basis().rows() == a.cols());
    }
}

TEST_CASE("transpose and kron") {
    Rng rng(17);
    BinaryMatrix a = BinaryMatrix::random(5, 9, rng);
    CHECK(a.transpose().transpose() == a);

    BinaryMatrix b = BinaryMatrix::random(3, 4, rng);
    BinaryMatrix k = a.kron(b);
    CHECK(k.rows() == 15);
    CHECK(k.cols() == 36);
    for (int trial = 0; trial < 20; ++trial) {
        size_t r = rng.below(15), c = rng.below(36);
        CHECK(k.get(r, c) == (a.get(r / 3, c / 4) && b.get(r % 3, c % 4)));
    }
}

TEST_CASE("sparse ones round trip") {
    Rng rng(23);
    BinaryMatrix a = BinaryMatrix::random(10, 17, rng);
    CHECK(BinaryMatrix::from_ones(10, 17, a.ones()) == a);
}
