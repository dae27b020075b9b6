#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qforge/codes.hpp"

using namespace qforge;

TEST_CASE("repetition code") {
    ClassicalCode rep3 = repetition_code(3);
    CHECK(rep3.h == BinaryMatrix::from_dense({{1, 1, 0}, {0, 1, 1}}));
    CHECK(repetition_code(2).h == BinaryMatrix::from_dense({{1, 1}}));
    CHECK_THROWS_AS(repetition_code(1), std::invalid_argument);

    BinaryMatrix k = repetition_code(5).h.kernel_basis();
    REQUIRE(k.rows() == 1);
    CHECK(k.row_weight(0) == 5);
}

TEST_CASE("random biregular tanner graph") {
    TannerGraph g = random_biregular_tanner(16, 3, 4, 6, 42);
    CHECK(g.n_checks == 12);
    for (uint32_t d : g.bit_degrees()) CHECK(d == 3);
    for (uint32_t d : g.check_degrees()) CHECK(d == 4);
    CHECK(g.girth() >= 6);

    TannerGraph again = random_biregular_tanner(16, 3, 4, 6, 42);
    CHECK(again.edges == g.edges);

    CHECK_THROWS_AS(random_biregular_tanner(15, 3, 4, 6, 1), std::invalid_argument);
}

TEST_CASE("spectral gap") {
    BinaryMatrix ones_row(1, 7);
    for (size_t c = 0; c < 7; ++c) ones_row.set(0, c, true);
    CHECK(spectral_gap(ones_row) == doctest::Approx(std::sqrt(7.0)));

    // H_rep3 has singular values {sqrt(3), 1}.
    ClassicalCode rep3 = repetition_code(3);
    CHECK(spectral_gap(rep3.h) == doctest::Approx(std::sqrt(3.0) - 1.0));

    // Invariant under row/column permutation.
    BinaryMatrix perm = rep3.h.select_columns({2, 0, 1}).select_rows({1, 0});
    CHECK(spectral_gap(perm) == doctest::Approx(spectral_gap(rep3.h)));
}

TEST_CASE("classical distance") {
    auto rep5 = classical_distance(repetition_code(5));
    CHECK(rep5.distance == 5);
    CHECK(rep5.certified);

    ClassicalCode hamming;
    hamming.h = BinaryMatrix::from_dense({{0, 0, 0, 1, 1, 1, 1}, {0, 1, 1, 0, 0, 1, 1}, {1, 0, 1, 0, 1, 0, 1}});
    hamming.n = 7;
    hamming.k = 4;
    auto d = classical_distance(hamming);
    CHECK(d.distance == 3);
    CHECK(d.certified);

    // Certified result equals a direct subset-expansion oracle.
    ClassicalCode code = classical_code_from_graph(random_biregular_tanner(16, 3, 4, 6, 7));
    REQUIRE(code.d_certified);
    BinaryMatrix basis = code.h.kernel_basis();
    size_t best = code.n;
    for (uint64_t m = 1; m < (1ull << basis.rows()); ++m) {
        BinaryVector v(code.n);
        for (size_t b = 0; b < basis.rows(); ++b)
            if ((m >> b) & 1) v.xor_in(basis.row(b));
        best = std::min(best, v.weight());
    }
    CHECK(code.d_estimate == best);
}

TEST_CASE("hgp of repetition codes is the surface code") {
    CssCode surf = hgp(repetition_code(3), repetition_code(3));
    CHECK(surf.n == 13);
    CHECK(surf.k == 1);
    CHECK(surf.hx.rows() == 6);
    CHECK(surf.hz.rows() == 6);
    CHECK((surf.hx * surf.hz.transpose()).is_zero());
    CHECK(quantum_distance_upper(surf) == 3);

    // Canonical logicals: Z on a VV row of weight 3, X on a VV column.
    CHECK(surf.logicals_z.row_weight(0) == 3);
    CHECK(surf.logicals_x.row_weight(0) == 3);
    CHECK(surf.logicals_z.row(0).ones() == std::vector<uint32_t>{6, 7, 8});
    CHECK(surf.logicals_x.row(0).ones() == std::vector<uint32_t>{2, 5, 8});
}

TEST_CASE("hgp parameters and degrees") {
    CssCode c = hgp(repetition_code(5), repetition_code(3));
    CHECK(c.n == 5 * 3 + 4 * 2);
    CHECK(c.k == 1);
    CHECK(quantum_distance_upper(c) == 3);

    ClassicalCode a = classical_code_from_graph(random_biregular_tanner(16, 3, 4, 6, 5));
    ClassicalCode b = classical_code_from_graph(random_biregular_tanner(16, 3, 4, 6, 6));
    CssCode q = hgp(a, b);
    CHECK(q.n == 16 * 16 + 12 * 12);
    CHECK(q.k == a.k * b.k);
    CHECK((q.hx * q.hz.transpose()).is_zero());
    for (size_t r = 0; r < q.hx.rows(); ++r) CHECK(q.hx.row_weight(r) <= 7);
    for (size_t r = 0; r < q.hz.rows(); ++r) CHECK(q.hz.row_weight(r) <= 7);
    // VV qubits see bit_deg per sector (6 total), CC qubits check_deg (8 total).
    std::vector<uint32_t> qubit_deg(q.n, 0);
    for (auto [r, col] : q.hx.ones()) qubit_deg[col]++;
    for (auto [r, col] : q.hz.ones()) qubit_deg[col]++;
    for (size_t qi = 0; qi < q.n; ++qi) CHECK(qubit_deg[qi] <= (qi < 16 * 16 ? 6u : 8u));
}

TEST_CASE("circulant and lift") {
    CHECK(circulant({0}, 5) == BinaryMatrix::identity(5));

    BinaryMatrix shift = circulant({1}, 3);
    CHECK(shift.get(0, 1));
    CHECK(shift.get(1, 2));
    CHECK(shift.get(2, 0));
    CHECK(shift.ones().size() == 3);

    // lift is a ring homomorphism.
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        RingMatrix a(3, 4, 8), b(4, 2, 8);
        for (uint32_t r = 0; r < 3; ++r)
            for (uint32_t c = 0; c < 4; ++c)
                if (rng.bernoulli(0.7)) a.add_term(r, c, static_cast<uint32_t>(rng.below(8)));
        for (uint32_t r = 0; r < 4; ++r)
            for (uint32_t c = 0; c < 2; ++c)
                if (rng.bernoulli(0.7)) b.add_term(r, c, static_cast<uint32_t>(rng.below(8)));
        CHECK((a * b).lifted() == a.lifted() * b.lifted());
    }
    RingMatrix a(3, 4, 8), b(3, 4, 8);
    a.add_term(0, 0, 3);
    a.add_term(2, 1, 5);
    b.add_term(0, 0, 3);
    b.add_term(1, 2, 1);
    CHECK((a + b).lifted() == a.lifted() + b.lifted());

    // Ring transpose keeps the lift compatible with matrix transpose.
    CHECK(a.transpose().lifted() == a.lifted().transpose());

    RingMatrix bad(1, 1, 4);
    CHECK_THROWS_AS(bad.add_term(0, 0, 4), std::invalid_argument);
}

TEST_CASE("builtin lp codes") {
    auto codes = builtin_lp_codes();
    REQUIRE(codes.size() == 4);
    std::vector<uint32_t> sizes;
    for (auto& c : codes) sizes.push_back(c.n);
    CHECK(sizes == std::vector<uint32_t>{544, 714, 1020, 1428});

    for (auto& c : codes) {
        CHECK((c.hx * c.hz.transpose()).is_zero());
        CHECK(c.k * 17 >= 2 * c.n);  // rate >= 2/17
        double predicted = 0.38 * std::pow(double(c.n), 0.85);
        CHECK(std::abs(double(c.k) - predicted) / predicted < 0.15);
    }

    // Decoding-relevant girths. The X/Z Tanner graphs reach girth 8 for three
    // of the four codes; the l=30 instance tops out at 6. Everything is >= 6.
    std::vector<uint32_t> expected_girth{8, 8, 6, 8};
    for (size_t i = 0; i < codes.size(); ++i) {
        TannerGraph gx, gz;
        gx.n_checks = static_cast<uint32_t>(codes[i].hx.rows());
        gx.n_bits = codes[i].n;
        gx.edges = codes[i].hx.ones();
        gz.n_checks = static_cast<uint32_t>(codes[i].hz.rows());
        gz.n_bits = codes[i].n;
        gz.edges = codes[i].hz.ones();
        CHECK(gx.girth() == expected_girth[i]);
        CHECK(gz.girth() == expected_girth[i]);
    }
    for (auto& base : builtin_lp_bases()) {
        TannerGraph g;
        BinaryMatrix lifted = base.lifted();
        g.n_checks = static_cast<uint32_t>(lifted.rows());
        g.n_bits = static_cast<uint32_t>(lifted.cols());
        g.edges = lifted.ones();
        CHECK(g.girth() >= 6);
    }

    CHECK_THROWS_AS(builtin_lp_code(545), std::invalid_argument);

    RingMatrix l8(1, 1, 8), l9(1, 1, 9);
    CHECK_THROWS_AS(lifted_product(l8, l9), std::invalid_argument);
}

TEST_CASE("logical basis properties") {
    ClassicalCode a = classical_code_from_graph(random_biregular_tanner(12, 3, 4, 6, 9));
    CssCode q = hgp(a, a);
    CHECK(q.logicals_x * q.logicals_z.transpose() == BinaryMatrix::identity(q.k));
    CHECK((q.hz * q.logicals_x.transpose()).is_zero());
    CHECK((q.hx * q.logicals_z.transpose()).is_zero());

    // VV-sector X logicals live in a single VV column, Z logicals in a single row.
    size_t n2 = a.h.cols();
    for (size_t r = 0; r < q.k; ++r) {
        auto xs = q.logicals_x.row(r).ones();
        bool vv = true;
        for (auto i : xs) vv &= i < 12 * 12;
        if (vv)
            for (size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] % n2 == xs[0] % n2);
        auto zs = q.logicals_z.row(r).ones();
        bool vvz = true;
        for (auto i : zs) vvz &= i < 12 * 12;
        if (vvz)
            for (size_t i = 1; i < zs.size(); ++i) CHECK(zs[i] / n2 == zs[0] / n2);
    }
}

TEST_CASE("quantum distance never exceeds the classical minimum for hgp") {
    CssCode c = hgp(repetition_code(5), repetition_code(5));
    CHECK(c.n == 41);
    uint32_t d = quantum_distance_upper(c, 200, 3);
    CHECK(d <= 5);
    CHECK(d >= 1);
}

TEST_CASE("best biregular candidate scoring") {
    ClassicalCode c = best_biregular_code(16, 8, 123);
    CHECK(c.n == 16);
    CHECK(c.girth >= 6);
    CHECK(c.d_certified);
    CHECK(c.k == 16 - c.h.rank());
}
