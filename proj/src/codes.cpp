#include "qforge/codes.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qforge {

BinaryMatrix TannerGraph::check_matrix() const {
    return BinaryMatrix::from_ones(n_checks, n_bits, edges);
}

std::vector<uint32_t> TannerGraph::bit_degrees() const {
    std::vector<uint32_t> deg(n_bits, 0);
    for (auto [c, b] : edges) deg[b]++;
    return deg;
}

std::vector<uint32_t> TannerGraph::check_degrees() const {
    std::vector<uint32_t> deg(n_checks, 0);
    for (auto [c, b] : edges) deg[c]++;
    return deg;
}

uint32_t TannerGraph::girth() const {
    // Vertices: bits then checks. BFS from every vertex; the shortest cycle
    // through the BFS root is found exactly, so the min over roots is the girth.
    uint32_t n = n_bits + n_checks;
    std::vector<std::vector<uint32_t>> adj(n);
    for (auto [c, b] : edges) {
        adj[b].push_back(n_bits + c);
        adj[n_bits + c].push_back(b);
    }
    uint32_t best = 0;
    std::vector<int32_t> dist(n), parent(n);
    std::vector<uint32_t> queue;
    for (uint32_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        queue.clear();
        queue.push_back(s);
        dist[s] = 0;
        parent[s] = -1;
        for (size_t head = 0; head < queue.size(); ++head) {
            uint32_t u = queue[head];
            if (best && dist[u] * 2 >= static_cast<int32_t>(best)) break;
            for (uint32_t w : adj[u]) {
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    parent[w] = static_cast<int32_t>(u);
                    queue.push_back(w);
                } else if (static_cast<int32_t>(w) != parent[u]) {
                    uint32_t cycle = static_cast<uint32_t>(dist[u] + dist[w] + 1);
                    if (!best || cycle < best) best = cycle;
                }
            }
        }
    }
    return best;
}

TannerGraph ClassicalCode::tanner() const {
    TannerGraph g;
    g.n_bits = static_cast<uint32_t>(h.cols());
    g.n_checks = static_cast<uint32_t>(h.rows());
    g.edges = h.ones();
    return g;
}

ClassicalCode repetition_code(uint32_t d) {
    if (d < 2) throw std::invalid_argument("repetition code needs d >= 2");
    BinaryMatrix h(d - 1, d);
    for (uint32_t i = 0; i + 1 < d; ++i) {
        h.set(i, i, true);
        h.set(i, i + 1, true);
    }
    ClassicalCode code;
    code.h = h;
    code.n = d;
    code.k = 1;
    code.d_estimate = d;
    code.d_certified = true;
    code.girth = 0;  // the repetition Tanner graph is a path
    code.spectral_gap = spectral_gap(h);
    return code;
}

TannerGraph random_biregular_tanner(uint32_t n_bits, uint32_t bit_deg, uint32_t check_deg,
                                    uint32_t girth_min, uint64_t seed, uint32_t max_attempts) {
    if (n_bits == 0 || bit_deg == 0 || check_deg == 0) throw std::invalid_argument("degenerate Tanner parameters");
    uint64_t stubs = uint64_t(n_bits) * bit_deg;
    if (stubs % check_deg != 0)
        throw std::invalid_argument("n_bits * bit_deg must be divisible by check_deg");
    uint32_t n_checks = static_cast<uint32_t>(stubs / check_deg);

    // Configuration-model stubs matched one bit at a time. A draw that would
    // create a multi-edge or (for girth_min >= 6) a pair of checks sharing two
    // bits is rejected and redrawn; a stuck attempt restarts the whole graph.
    // No edge swaps.
    Rng rng(seed);
    std::vector<uint32_t> free_stubs;
    std::vector<std::vector<uint32_t>> check_bits(n_checks);
    std::vector<std::vector<uint32_t>> bit_checks(n_bits);
    const uint32_t local_tries = 64;

    for (uint32_t attempt = 1; attempt <= max_attempts; ++attempt) {
        free_stubs.clear();
        for (uint32_t c = 0; c < n_checks; ++c)
            for (uint32_t s = 0; s < check_deg; ++s) free_stubs.push_back(c);
        for (auto& v : check_bits) v.clear();
        for (auto& v : bit_checks) v.clear();

        bool ok = true;
        for (uint32_t b = 0; b < n_bits && ok; ++b) {
            for (uint32_t s = 0; s < bit_deg && ok; ++s) {
                bool placed = false;
                for (uint32_t t = 0; t < local_tries && !placed; ++t) {
                    size_t idx = static_cast<size_t>(rng.below(free_stubs.size()));
                    uint32_t c = free_stubs[idx];
                    bool bad = false;
                    for (uint32_t c2 : bit_checks[b]) {
                        if (c2 == c) { bad = true; break; }  // multi-edge
                    }
                    if (!bad && girth_min >= 6) {
                        // Two checks on this bit must not share another bit.
                        for (uint32_t c2 : bit_checks[b]) {
                            for (uint32_t b2 : check_bits[c]) {
                                for (uint32_t c3 : bit_checks[b2]) {
                                    if (c3 == c2) { bad = true; break; }
                                }
                                if (bad) break;
                            }
                            if (bad) break;
                        }
                    }
                    if (bad) continue;
                    free_stubs[idx] = free_stubs.back();
                    free_stubs.pop_back();
                    check_bits[c].push_back(b);
                    bit_checks[b].push_back(c);
                    placed = true;
                }
                if (!placed) ok = false;
            }
        }
        if (!ok) continue;

        TannerGraph g;
        g.n_bits = n_bits;
        g.n_checks = n_checks;
        for (uint32_t c = 0; c < n_checks; ++c)
            for (uint32_t b : check_bits[c]) g.edges.emplace_back(c, b);
        std::sort(g.edges.begin(), g.edges.end());
        if (girth_min > 6 && g.girth() < girth_min) continue;
        return g;
    }
    throw std::runtime_error("Tanner graph rejection budget exhausted after " +
                             std::to_string(max_attempts) + " attempts");
}

double spectral_gap(const BinaryMatrix& h) {
    size_t r = h.rows(), n = h.cols();
    if (r == 0 || n == 0 || h.is_zero()) throw std::invalid_argument("spectral_gap needs a nonzero matrix");
    // Singular values via the smaller Gram matrix.
    size_t m = std::min(r, n);
    Eigen::MatrixXd gram(m, m);
    if (r <= n) {
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j <= i; ++j) {
                double acc = 0;
                for (size_t c = 0; c < n; ++c) acc += (h.get(i, c) && h.get(j, c)) ? 1.0 : 0.0;
                gram(i, j) = gram(j, i) = acc;
            }
    } else {
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j <= i; ++j) {
                double acc = 0;
                for (size_t c = 0; c < r; ++c) acc += (h.get(c, i) && h.get(c, j)) ? 1.0 : 0.0;
                gram(i, j) = gram(j, i) = acc;
            }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    Eigen::VectorXd ev = solver.eigenvalues();  // ascending
    double s1 = std::sqrt(std::max(0.0, ev(m - 1)));
    double s2 = m >= 2 ? std::sqrt(std::max(0.0, ev(m - 2))) : 0.0;
    return s1 - s2;
}

DistanceEstimate classical_distance(const ClassicalCode& code, uint64_t budget) {
    BinaryMatrix basis = code.h.kernel_basis();
    size_t k = basis.rows();
    if (k == 0) return {0, true};

    if (k < 63 && (uint64_t(1) << k) <= budget) {
        // Gray-code walk over all nonzero codewords.
        BinaryVector current(code.h.cols());
        uint64_t prev_gray = 0;
        size_t best = code.h.cols() + 1;
        for (uint64_t i = 1; i < (uint64_t(1) << k); ++i) {
            uint64_t gray = i ^ (i >> 1);
            uint64_t changed = gray ^ prev_gray;
            prev_gray = gray;
            int bit = std::countr_zero(changed);
            current.xor_in(basis.row(bit));
            best = std::min(best, current.weight());
        }
        return {static_cast<uint32_t>(best), true};
    }

    // Randomized information-set search: repeatedly re-systematize the kernel
    // basis on a random column order and score rows and row pairs.
    Rng rng(0x5eedu ^ (uint64_t(code.n) * 0x9e37u));
    size_t best = code.h.cols() + 1;
    for (size_t r = 0; r < k; ++r) best = std::min(best, basis.row_weight(r));
    uint32_t iters = static_cast<uint32_t>(std::max<uint64_t>(10, budget >> 12));
    std::vector<uint32_t> perm(code.h.cols());
    std::iota(perm.begin(), perm.end(), 0);
    for (uint32_t it = 0; it < iters; ++it) {
        rng.shuffle(perm.data(), perm.size());
        BinaryMatrix permuted = basis.select_columns(perm);
        BinaryMatrix reduced = permuted.row_reduce().reduced;
        for (size_t a = 0; a < reduced.rows(); ++a) {
            size_t wa = reduced.row_weight(a);
            if (wa > 0) best = std::min(best, wa);
            for (size_t b = a + 1; b < reduced.rows(); ++b) {
                BinaryVector sum = reduced.row(a);
                sum.xor_in(reduced.row(b));
                size_t w = sum.weight();
                if (w > 0) best = std::min(best, w);
            }
        }
    }
    return {static_cast<uint32_t>(best), false};
}

ClassicalCode classical_code_from_graph(const TannerGraph& graph, uint64_t distance_budget) {
    ClassicalCode code;
    code.h = graph.check_matrix();
    code.n = graph.n_bits;
    code.k = static_cast<uint32_t>(code.n - code.h.rank());
    code.girth = graph.girth();
    code.spectral_gap = spectral_gap(code.h);
    auto d = classical_distance(code, distance_budget);
    code.d_estimate = d.distance;
    code.d_certified = d.certified;
    return code;
}

ClassicalCode best_biregular_code(uint32_t n_bits, uint32_t candidates, uint64_t seed,
                                  uint32_t bit_deg, uint32_t check_deg) {
    if (candidates == 0) throw std::invalid_argument("need at least one candidate");
    std::optional<ClassicalCode> best;
    uint64_t sm = seed;
    for (uint32_t c = 0; c < candidates; ++c) {
        uint64_t sub_seed = splitmix64(sm);
        TannerGraph g = random_biregular_tanner(n_bits, bit_deg, check_deg, 6, sub_seed);
        ClassicalCode code = classical_code_from_graph(g);
        if (!best || code.d_estimate > best->d_estimate ||
            (code.d_estimate == best->d_estimate && code.spectral_gap > best->spectral_gap)) {
            best = std::move(code);
        }
    }
    return *best;
}

void CssCode::validate() const {
    if (!(hx * hz.transpose()).is_zero()) throw std::runtime_error("CSS violation: Hx * Hz^T != 0");
    if (hx.cols() != n || hz.cols() != n) throw std::runtime_error("CSS column count mismatch");
    size_t expect_k = n - hx.rank() - hz.rank();
    if (k != expect_k) throw std::runtime_error("CSS k does not match rank formula");
    if (logicals_x.rows() != k || logicals_z.rows() != k) throw std::runtime_error("logical basis size mismatch");
    if (k > 0) {
        if (!(hz * logicals_x.transpose()).is_zero() || !(hx * logicals_z.transpose()).is_zero())
            throw std::runtime_error("logicals do not commute with checks");
        if (logicals_x * logicals_z.transpose() != BinaryMatrix::identity(k))
            throw std::runtime_error("logical pairing is not symplectic");
    }
}

namespace {

std::vector<uint32_t> complement_columns(const std::vector<uint32_t>& pivots, size_t n) {
    std::vector<bool> is_pivot(n, false);
    for (uint32_t p : pivots) is_pivot[p] = true;
    std::vector<uint32_t> out;
    for (size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) out.push_back(static_cast<uint32_t>(c));
    return out;
}

// Reduce v against an rref basis; result is the canonical coset representative.
BinaryVector reduce_by_rref(const BinaryMatrix& rref, const std::vector<uint32_t>& pivots, BinaryVector v) {
    for (size_t p = 0; p < pivots.size(); ++p)
        if (v.get(pivots[p])) v.xor_in(rref.row(p));
    return v;
}

// Coset representatives of the kernel modulo the stabilizer row space: the
// logical operators of one CSS sector.
BinaryMatrix coset_representatives(const BinaryMatrix& kernel, const RowReduceResult& stab_rref) {
    std::vector<BinaryVector> reps;
    BinaryMatrix span(0, kernel.cols());
    for (size_t r = 0; r < kernel.rows(); ++r) {
        BinaryVector v = reduce_by_rref(stab_rref.reduced, stab_rref.pivot_cols, kernel.row(r));
        if (v.is_zero()) continue;
        BinaryMatrix trial(span.rows() + 1, kernel.cols());
        for (size_t i = 0; i < span.rows(); ++i) trial.set_row(i, span.row(i));
        trial.set_row(span.rows(), v);
        if (trial.rank() == trial.rows()) {
            span = std::move(trial);
            reps.push_back(v);
        }
    }
    BinaryMatrix out(reps.size(), kernel.cols());
    for (size_t i = 0; i < reps.size(); ++i) out.set_row(i, reps[i]);
    return out;
}

LogicalBasis paired_generic_basis(const BinaryMatrix& hx, const BinaryMatrix& hz) {
    auto rrx = hx.row_reduce();
    auto rrz = hz.row_reduce();
    BinaryMatrix lx = coset_representatives(hz.kernel_basis(), rrx);
    BinaryMatrix lz = coset_representatives(hx.kernel_basis(), rrz);
    if (lx.rows() != lz.rows()) throw std::runtime_error("logical sector dimension mismatch");
    size_t k = lx.rows();
    if (k == 0) return {lx, lz};
    BinaryMatrix pairing = lx * lz.transpose();
    auto rr = pairing.row_reduce();
    if (rr.pivot_cols.size() != k) throw std::runtime_error("logical pairing failure (rank bug?)");
    // transform = pairing^-1; lz' = transform^T * lz gives lx * lz'^T = I.
    return {lx, rr.transform.transpose() * lz};
}

struct SectorBasis {
    BinaryMatrix patterns;        // kernel basis, systematic on the free columns
    std::vector<uint32_t> frees;  // patterns[:, frees] = identity
};

SectorBasis kernel_sector(const BinaryMatrix& m) {
    SectorBasis s;
    s.patterns = m.kernel_basis();
    s.frees = complement_columns(m.row_reduce().pivot_cols, m.cols());
    return s;
}

}  // namespace

LogicalBasis logical_basis(const BinaryMatrix& hx, const BinaryMatrix& hz,
                           const std::optional<HgpStructure>& structure) {
    if (!structure) return paired_generic_basis(hx, hz);

    const BinaryMatrix& h1 = structure->h1;
    const BinaryMatrix& h2 = structure->h2;
    size_t n1 = h1.cols(), r1 = h1.rows();
    size_t n2 = h2.cols(), r2 = h2.rows();
    size_t n = n1 * n2 + r1 * r2;

    SectorBasis u1 = kernel_sector(h1);
    SectorBasis u2 = kernel_sector(h2);
    SectorBasis w1 = kernel_sector(h1.transpose());
    SectorBasis w2 = kernel_sector(h2.transpose());
    size_t k1 = u1.patterns.rows(), k2 = u2.patterns.rows();
    size_t k1t = w1.patterns.rows(), k2t = w2.patterns.rows();
    size_t k = k1 * k2 + k1t * k2t;

    BinaryMatrix lx(k, n), lz(k, n);
    // VV sector: X on a single column with a ker(H1) pattern, Z on a single row
    // with a ker(H2) pattern.
    for (size_t s = 0; s < k1; ++s)
        for (size_t t = 0; t < k2; ++t) {
            size_t idx = s * k2 + t;
            for (size_t i = 0; i < n1; ++i)
                if (u1.patterns.get(s, i)) lx.set(idx, i * n2 + u2.frees[t], true);
            for (size_t j = 0; j < n2; ++j)
                if (u2.patterns.get(t, j)) lz.set(idx, size_t(u1.frees[s]) * n2 + j, true);
        }
    // CC sector: X on a single CC row with a ker(H2^T) pattern, Z on a single CC
    // column with a ker(H1^T) pattern.
    for (size_t s = 0; s < k1t; ++s)
        for (size_t t = 0; t < k2t; ++t) {
            size_t idx = k1 * k2 + s * k2t + t;
            for (size_t j = 0; j < r2; ++j)
                if (w2.patterns.get(t, j)) lx.set(idx, n1 * n2 + size_t(w1.frees[s]) * r2 + j, true);
            for (size_t i = 0; i < r1; ++i)
                if (w1.patterns.get(s, i)) lz.set(idx, n1 * n2 + i * r2 + w2.frees[t], true);
        }

    if (!(hz * lx.transpose()).is_zero() || !(hx * lz.transpose()).is_zero() ||
        lx * lz.transpose() != BinaryMatrix::identity(k))
        throw std::runtime_error("structured HGP logical basis failed verification");
    return {lx, lz};
}

CssCode hgp(const ClassicalCode& c1, const ClassicalCode& c2) {
    size_t n1 = c1.h.cols(), r1 = c1.h.rows();
    size_t n2 = c2.h.cols(), r2 = c2.h.rows();
    BinaryMatrix in1 = BinaryMatrix::identity(n1);
    BinaryMatrix in2 = BinaryMatrix::identity(n2);
    BinaryMatrix ir1 = BinaryMatrix::identity(r1);
    BinaryMatrix ir2 = BinaryMatrix::identity(r2);

    CssCode code;
    // Qubit order: VV block (n1*n2, row-major) then CC block (r1*r2).
    code.hx = in1.kron(c2.h).hstack(c1.h.transpose().kron(ir2));
    code.hz = c1.h.kron(in2).hstack(ir1.kron(c2.h.transpose()));
    code.n = static_cast<uint32_t>(n1 * n2 + r1 * r2);
    code.k = static_cast<uint32_t>(code.n - code.hx.rank() - code.hz.rank());
    code.family = CodeFamily::Hgp;
    code.hgp_structure = HgpStructure{c1.h, c2.h};
    code.d_upper = std::min(c1.d_estimate, c2.d_estimate);
    code.d_certified = false;
    auto basis = logical_basis(code.hx, code.hz, code.hgp_structure);
    code.logicals_x = basis.x;
    code.logicals_z = basis.z;
    code.name = "hgp-" + std::to_string(code.n);
    code.validate();
    return code;
}

RingMatrix RingMatrix::from_exponents(uint32_t lift, const std::vector<std::vector<int>>& monomials) {
    if (monomials.empty()) return {};
    RingMatrix m(static_cast<uint32_t>(monomials.size()), static_cast<uint32_t>(monomials[0].size()), lift);
    for (uint32_t r = 0; r < m.rows_; ++r) {
        if (monomials[r].size() != m.cols_) throw std::invalid_argument("ragged ring matrix");
        for (uint32_t c = 0; c < m.cols_; ++c) {
            int e = monomials[r][c];
            if (e >= 0) m.add_term(r, c, static_cast<uint32_t>(e));  // -1 encodes a zero entry
        }
    }
    return m;
}

RingMatrix RingMatrix::ring_identity(uint32_t n, uint32_t lift) {
    RingMatrix m(n, n, lift);
    for (uint32_t i = 0; i < n; ++i) m.add_term(i, i, 0);
    return m;
}

void RingMatrix::add_term(uint32_t r, uint32_t c, uint32_t exponent) {
    if (exponent >= lift_) throw std::invalid_argument("ring exponent out of range");
    auto& e = entries_[size_t(r) * cols_ + c];
    auto it = std::lower_bound(e.begin(), e.end(), exponent);
    if (it != e.end() && *it == exponent)
        e.erase(it);  // characteristic 2
    else
        e.insert(it, exponent);
}

RingMatrix RingMatrix::transpose() const {
    RingMatrix t(cols_, rows_, lift_);
    for (uint32_t r = 0; r < rows_; ++r)
        for (uint32_t c = 0; c < cols_; ++c)
            for (uint32_t e : entry(r, c)) t.add_term(c, r, (lift_ - e) % lift_);
    return t;
}

RingMatrix RingMatrix::operator*(const RingMatrix& other) const {
    if (cols_ != other.rows_ || lift_ != other.lift_) throw std::invalid_argument("ring matmul mismatch");
    RingMatrix out(rows_, other.cols_, lift_);
    for (uint32_t r = 0; r < rows_; ++r)
        for (uint32_t k = 0; k < cols_; ++k) {
            const auto& a = entry(r, k);
            if (a.empty()) continue;
            for (uint32_t c = 0; c < other.cols_; ++c)
                for (uint32_t ea : a)
                    for (uint32_t eb : other.entry(k, c)) out.add_term(r, c, (ea + eb) % lift_);
        }
    return out;
}

RingMatrix RingMatrix::operator+(const RingMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_ || lift_ != other.lift_)
        throw std::invalid_argument("ring add mismatch");
    RingMatrix out = *this;
    for (uint32_t r = 0; r < rows_; ++r)
        for (uint32_t c = 0; c < cols_; ++c)
            for (uint32_t e : other.entry(r, c)) out.add_term(r, c, e);
    return out;
}

RingMatrix RingMatrix::kron(const RingMatrix& other) const {
    if (lift_ != other.lift_) throw std::invalid_argument("ring kron lift mismatch");
    RingMatrix out(rows_ * other.rows_, cols_ * other.cols_, lift_);
    for (uint32_t r1 = 0; r1 < rows_; ++r1)
        for (uint32_t c1 = 0; c1 < cols_; ++c1) {
            const auto& a = entry(r1, c1);
            if (a.empty()) continue;
            for (uint32_t r2 = 0; r2 < other.rows_; ++r2)
                for (uint32_t c2 = 0; c2 < other.cols_; ++c2)
                    for (uint32_t ea : a)
                        for (uint32_t eb : other.entry(r2, c2))
                            out.add_term(r1 * other.rows_ + r2, c1 * other.cols_ + c2, (ea + eb) % lift_);
        }
    return out;
}

BinaryMatrix circulant(const std::vector<uint32_t>& exponents, uint32_t l) {
    BinaryMatrix m(l, l);
    for (uint32_t a : exponents) {
        if (a >= l) throw std::invalid_argument("circulant exponent out of range");
        for (uint32_t i = 0; i < l; ++i) m.flip(i, (i + a) % l);
    }
    return m;
}

BinaryMatrix RingMatrix::lifted() const {
    BinaryMatrix out(size_t(rows_) * lift_, size_t(cols_) * lift_);
    for (uint32_t r = 0; r < rows_; ++r)
        for (uint32_t c = 0; c < cols_; ++c)
            for (uint32_t a : entry(r, c))
                for (uint32_t u = 0; u < lift_; ++u)
                    out.set(size_t(r) * lift_ + u, size_t(c) * lift_ + (u + a) % lift_, true);
    return out;
}

CssCode lifted_product(const RingMatrix& b1, const RingMatrix& b2) {
    if (b1.lift() != b2.lift()) throw std::invalid_argument("lifted product requires equal lift sizes");
    uint32_t l = b1.lift();
    RingMatrix in1 = RingMatrix::ring_identity(b1.cols(), l);
    RingMatrix in2 = RingMatrix::ring_identity(b2.cols(), l);
    RingMatrix im1 = RingMatrix::ring_identity(b1.rows(), l);
    RingMatrix im2 = RingMatrix::ring_identity(b2.rows(), l);

    CssCode code;
    code.hx = in1.kron(b2).lifted().hstack(b1.transpose().kron(im2).lifted());
    code.hz = b1.kron(in2).lifted().hstack(im1.kron(b2.transpose()).lifted());
    code.n = static_cast<uint32_t>(l * (size_t(b1.cols()) * b2.cols() + size_t(b1.rows()) * b2.rows()));
    code.k = static_cast<uint32_t>(code.n - code.hx.rank() - code.hz.rank());
    code.family = CodeFamily::Lp;
    code.lp_structure = LpStructure{b1, b2};
    code.d_upper = code.n;
    code.d_certified = false;
    auto basis = paired_generic_basis(code.hx, code.hz);
    code.logicals_x = basis.x;
    code.logicals_z = basis.z;
    code.name = "lp-" + std::to_string(code.n);
    code.validate();
    return code;
}

const std::vector<RingMatrix>& builtin_lp_bases() {
    static const std::vector<RingMatrix> bases = [] {
        std::vector<RingMatrix> out;
        out.push_back(RingMatrix::from_exponents(
            16, {{0, 0, 0, 0, 0}, {0, 2, 4, 7, 11}, {0, 3, 10, 14, 15}}));
        out.push_back(RingMatrix::from_exponents(
            21, {{0, 0, 0, 0, 0}, {0, 4, 5, 7, 17}, {0, 14, 18, 12, 11}}));
        out.push_back(RingMatrix::from_exponents(
            30, {{0, 0, 0, 0, 0}, {0, 2, 14, 24, 25}, {0, 16, 11, 14, 13}}));
        out.push_back(RingMatrix::from_exponents(
            42, {{0, 0, 0, 0, 0}, {0, 6, 7, 9, 30}, {0, 40, 15, 31, 35}}));
        return out;
    }();
    return bases;
}

std::vector<CssCode> builtin_lp_codes() {
    static const uint32_t designed_distance[4] = {12, 16, 20, 24};
    std::vector<CssCode> codes;
    const auto& bases = builtin_lp_bases();
    for (size_t i = 0; i < bases.size(); ++i) {
        CssCode code = lifted_product(bases[i], bases[i]);
        code.d_upper = designed_distance[i];
        codes.push_back(std::move(code));
    }
    return codes;
}

CssCode builtin_lp_code(uint32_t size) {
    for (auto& code : builtin_lp_codes())
        if (code.n == size) return code;
    throw std::invalid_argument("no built-in LP code of size " + std::to_string(size) +
                                " (choose 544, 714, 1020 or 1428)");
}

namespace {

// Smallest weight <= max_weight at which the sector contains a logical
// operator: in the kernel of the opposite-type checks but outside the
// same-type stabilizer row space.
std::optional<uint32_t> sector_min_logical_exhaustive(const BinaryMatrix& checks,
                                                      const RowReduceResult& stab, uint32_t max_weight) {
    size_t n = checks.cols();
    std::vector<uint32_t> support;
    for (uint32_t w = 1; w <= max_weight; ++w) {
        support.assign(w, 0);
        std::iota(support.begin(), support.end(), 0);
        for (;;) {
            BinaryVector v(n);
            for (uint32_t idx : support) v.set(idx, true);
            if ((checks * v).is_zero()) {
                BinaryVector reduced = reduce_by_rref(stab.reduced, stab.pivot_cols, v);
                if (!reduced.is_zero()) return w;
            }
            int i = static_cast<int>(w) - 1;
            while (i >= 0 && support[i] == n - w + i) --i;
            if (i < 0) break;
            ++support[i];
            for (size_t j = i + 1; j < w; ++j) support[j] = support[j - 1] + 1;
        }
    }
    return std::nullopt;
}

uint32_t sector_min_logical_randomized(const BinaryMatrix& checks, const BinaryMatrix& stab,
                                       const BinaryMatrix& seed_logicals, uint32_t trials, Rng& rng) {
    BinaryMatrix kernel = checks.kernel_basis();
    auto stab_rref = stab.row_reduce();
    size_t n = checks.cols();
    size_t best = n;
    auto consider = [&](const BinaryVector& v) {
        if (v.is_zero()) return;
        BinaryVector reduced = reduce_by_rref(stab_rref.reduced, stab_rref.pivot_cols, v);
        if (!reduced.is_zero()) best = std::min(best, v.weight());
    };
    for (size_t r = 0; r < seed_logicals.rows(); ++r) consider(seed_logicals.row(r));

    std::vector<uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<uint32_t> inverse(n);
    for (uint32_t it = 0; it < trials; ++it) {
        rng.shuffle(perm.data(), perm.size());
        for (size_t i = 0; i < n; ++i) inverse[perm[i]] = static_cast<uint32_t>(i);
        BinaryMatrix reduced = kernel.select_columns(perm).row_reduce().reduced;
        BinaryMatrix back = reduced.select_columns(inverse);
        for (size_t a = 0; a < back.rows(); ++a) {
            consider(back.row(a));
            for (size_t b = a + 1; b < back.rows(); ++b) {
                BinaryVector sum = back.row(a);
                sum.xor_in(back.row(b));
                consider(sum);
            }
        }
    }
    return static_cast<uint32_t>(best);
}

}  // namespace

uint32_t quantum_distance_upper(const CssCode& code, uint32_t trials, uint64_t seed) {
    if (code.k == 0) return 0;
    if (code.n <= 20) {
        auto rrx = code.hx.row_reduce();
        auto rrz = code.hz.row_reduce();
        uint32_t dx = sector_min_logical_exhaustive(code.hz, rrx, code.n).value_or(code.n);
        uint32_t dz = sector_min_logical_exhaustive(code.hx, rrz, code.n).value_or(code.n);
        return std::min(dx, dz);
    }
    Rng rng(seed);
    uint32_t dx = sector_min_logical_randomized(code.hz, code.hx, code.logicals_x, trials, rng);
    uint32_t dz = sector_min_logical_randomized(code.hx, code.hz, code.logicals_z, trials, rng);
    return std::min(dx, dz);
}

}  // namespace qforge
