#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qforge/gf2.hpp"

namespace qforge {

struct TannerGraph {
    uint32_t n_bits = 0;
    uint32_t n_checks = 0;
    std::vector<std::pair<uint32_t, uint32_t>> edges;  // (check, bit)

    BinaryMatrix check_matrix() const;
    // Length of the shortest cycle, or 0 when the graph is acyclic.
    uint32_t girth() const;
    std::vector<uint32_t> bit_degrees() const;
    std::vector<uint32_t> check_degrees() const;
};

struct ClassicalCode {
    BinaryMatrix h;
    uint32_t n = 0;
    uint32_t k = 0;
    uint32_t d_estimate = 0;
    bool d_certified = false;
    uint32_t girth = 0;
    double spectral_gap = 0.0;

    TannerGraph tanner() const;
};

// Matrix over F2[x]/(x^l - 1); each entry is a set of exponents in [0, l).
class RingMatrix {
  public:
    RingMatrix() = default;
    RingMatrix(uint32_t rows, uint32_t cols, uint32_t lift)
        : rows_(rows), cols_(cols), lift_(lift), entries_(size_t(rows) * cols) {}

    static RingMatrix from_exponents(uint32_t lift, const std::vector<std::vector<int>>& monomials);
    static RingMatrix ring_identity(uint32_t n, uint32_t lift);

    uint32_t rows() const { return rows_; }
    uint32_t cols() const { return cols_; }
    uint32_t lift() const { return lift_; }

    const std::vector<uint32_t>& entry(uint32_t r, uint32_t c) const { return entries_[size_t(r) * cols_ + c]; }
    void add_term(uint32_t r, uint32_t c, uint32_t exponent);

    // Transpose over the ring: entries transpose and exponents negate mod l,
    // so that lift(A.transpose()) == lift(A).transpose().
    RingMatrix transpose() const;
    RingMatrix operator*(const RingMatrix& other) const;
    RingMatrix operator+(const RingMatrix& other) const;
    RingMatrix kron(const RingMatrix& other) const;

    BinaryMatrix lifted() const;

  private:
    uint32_t rows_ = 0, cols_ = 0, lift_ = 0;
    std::vector<std::vector<uint32_t>> entries_;  // sorted exponent sets
};

BinaryMatrix circulant(const std::vector<uint32_t>& exponents, uint32_t l);

enum class CodeFamily { Generic, Hgp, Lp };

// Factor metadata retained by the product constructions; the syndrome-circuit
// generators need it to recover the grid structure.
struct HgpStructure {
    BinaryMatrix h1;  // vertical factor, r1 x n1
    BinaryMatrix h2;  // horizontal factor, r2 x n2
};

struct LpStructure {
    RingMatrix b1;
    RingMatrix b2;
};

struct CssCode {
    BinaryMatrix hx;
    BinaryMatrix hz;
    uint32_t n = 0;
    uint32_t k = 0;
    uint32_t d_upper = 0;
    bool d_certified = false;
    BinaryMatrix logicals_x;  // k rows
    BinaryMatrix logicals_z;  // k rows, symplectically paired
    CodeFamily family = CodeFamily::Generic;
    std::optional<HgpStructure> hgp_structure;
    std::optional<LpStructure> lp_structure;
    std::string name;

    void validate() const;  // throws when a CSS invariant is broken
};

ClassicalCode repetition_code(uint32_t d);

// (bit_deg, check_deg)-biregular simple bipartite graph with girth >= girth_min,
// by rejection sampling of the configuration model.
TannerGraph random_biregular_tanner(uint32_t n_bits, uint32_t bit_deg, uint32_t check_deg,
                                    uint32_t girth_min, uint64_t seed,
                                    uint32_t max_attempts = 100000);

double spectral_gap(const BinaryMatrix& h);

struct DistanceEstimate {
    uint32_t distance = 0;
    bool certified = false;
};

DistanceEstimate classical_distance(const ClassicalCode& code, uint64_t budget = 1u << 20);

ClassicalCode classical_code_from_graph(const TannerGraph& graph, uint64_t distance_budget = 1u << 20);

// Scored candidate search: largest certified-or-estimated distance first,
// spectral gap as the tie-break.
ClassicalCode best_biregular_code(uint32_t n_bits, uint32_t candidates, uint64_t seed,
                                  uint32_t bit_deg = 3, uint32_t check_deg = 4);

CssCode hgp(const ClassicalCode& c1, const ClassicalCode& c2);
CssCode lifted_product(const RingMatrix& b1, const RingMatrix& b2);

// The four built-in 3x5 quasi-cyclic base matrices, lifts {16, 21, 30, 42}.
const std::vector<RingMatrix>& builtin_lp_bases();
std::vector<CssCode> builtin_lp_codes();
CssCode builtin_lp_code(uint32_t size);  // size in {544, 714, 1020, 1428}

struct LogicalBasis {
    BinaryMatrix x;  // k rows
    BinaryMatrix z;  // k rows; x * z^T = I
};

LogicalBasis logical_basis(const BinaryMatrix& hx, const BinaryMatrix& hz,
                           const std::optional<HgpStructure>& structure = std::nullopt);

uint32_t quantum_distance_upper(const CssCode& code, uint32_t trials = 2000, uint64_t seed = 1);

}  // namespace qforge
