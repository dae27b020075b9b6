#include "qforge/decode.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace qforge {

BpConfig bp_hgp_defaults() { return {0.9, 5.0}; }
BpConfig bp_lp_defaults() { return {1.0, 20.0}; }
WindowConfig window_hgp_defaults() { return {3, 5.0}; }
WindowConfig window_lp_defaults() { return {3, 1.0}; }

BinaryMatrix DecodingGraph::check_matrix() const {
    BinaryMatrix m(n_detectors, columns.size());
    for (size_t f = 0; f < columns.size(); ++f)
        for (uint32_t d : columns[f].detectors) m.set(d, f, true);
    return m;
}

BinaryMatrix DecodingGraph::obs_matrix() const {
    BinaryMatrix m(n_observables, columns.size());
    for (size_t f = 0; f < columns.size(); ++f)
        for (uint32_t o : columns[f].observables) m.set(o, f, true);
    return m;
}

namespace {

double combine_priors(double a, double b) { return a * (1.0 - b) + b * (1.0 - a); }

// Merge identical signatures within a segment; empty columns are dropped.
std::vector<FaultColumn> merge_columns(std::vector<FaultColumn> raw,
                                       const std::vector<uint32_t>& segment) {
    std::map<std::tuple<uint32_t, std::vector<uint32_t>, std::vector<uint32_t>>, size_t> index;
    std::vector<FaultColumn> merged;
    for (size_t f = 0; f < raw.size(); ++f) {
        if (raw[f].detectors.empty() && raw[f].observables.empty()) continue;
        auto key = std::make_tuple(segment[f], raw[f].detectors, raw[f].observables);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(std::move(key), merged.size());
            merged.push_back(std::move(raw[f]));
        } else {
            FaultColumn& dst = merged[it->second];
            dst.prior = combine_priors(dst.prior, raw[f].prior);
            dst.cycle = std::min(dst.cycle, raw[f].cycle);
        }
    }
    return merged;
}

}  // namespace

DecodingGraph build_decoding_graph(const Circuit& noisy, uint32_t window) {
    auto raw = analyze_faults(noisy);
    uint32_t noisy_cycles = noisy.n_cycles() > 0 ? noisy.n_cycles() - 1 : 0;
    std::vector<uint32_t> segment(raw.size(), 0);
    if (window > 0) {
        for (size_t f = 0; f < raw.size(); ++f) {
            uint32_t cyc = raw[f].cycle < 0 ? 0 : static_cast<uint32_t>(raw[f].cycle);
            segment[f] = cyc >= noisy_cycles ? noisy_cycles / window + 1 : cyc / window;
        }
    }
    DecodingGraph g;
    g.n_detectors = noisy.n_detectors();
    g.n_observables = noisy.n_observables();
    g.n_cycles = noisy.n_cycles();
    g.detector_cycle = noisy.detector_cycle;
    g.columns = merge_columns(std::move(raw), segment);
    return g;
}

void add_residual_layer(const Circuit& noisy, DecodingGraph& g, double p_res, uint32_t cycle) {
    if (p_res <= 0) return;
    if (p_res >= 0.5) throw std::invalid_argument("residual prior must be below 0.5");
    std::vector<VirtualDepol> virtuals;
    for (uint32_t q : noisy.data_qubits) virtuals.push_back({cycle, q, p_res});
    auto all = analyze_faults(noisy, virtuals);
    std::vector<FaultColumn> fresh;
    for (auto& col : all)
        if (col.site == UINT32_MAX) fresh.push_back(std::move(col));
    std::vector<uint32_t> segment(fresh.size(), 0);
    for (auto& col : merge_columns(std::move(fresh), segment)) g.columns.push_back(std::move(col));
}

BpGraph BpGraph::from_graph(const DecodingGraph& g) {
    BpGraph b;
    b.n_rows = g.n_detectors;
    b.cols.reserve(g.columns.size());
    b.priors.reserve(g.columns.size());
    for (const auto& col : g.columns) {
        b.cols.push_back(col.detectors);
        b.priors.push_back(col.prior);
    }
    return b;
}

BpResult bp_decode(const BpGraph& g, const std::vector<uint8_t>& syndrome, const BpConfig& cfg) {
    if (syndrome.size() != g.n_rows) throw std::invalid_argument("syndrome length mismatch");
    size_t n = g.cols.size();
    BpResult result;
    result.estimate.assign(n, 0);
    result.llrs.assign(n, 0.0);

    // Edge arrays in row-major order.
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> row_edges(g.n_rows);  // (col, edge)
    std::vector<std::vector<uint32_t>> col_edges(n);
    uint32_t n_edges = 0;
    for (uint32_t v = 0; v < n; ++v)
        for (uint32_t r : g.cols[v]) {
            row_edges[r].emplace_back(v, n_edges);
            col_edges[v].push_back(n_edges);
            ++n_edges;
        }

    std::vector<double> lambda(n);
    for (size_t v = 0; v < n; ++v) {
        double p = std::clamp(g.priors[v], 1e-12, 0.499999);
        lambda[v] = std::log((1.0 - p) / p);
    }
    std::vector<double> nu(n_edges, 0.0);
    std::vector<double> total(n);
    std::vector<double> mu(n_edges, 0.0);

    uint32_t max_iters = std::max<uint32_t>(1, static_cast<uint32_t>(std::ceil(double(n) / cfg.iter_ratio)));
    for (uint32_t iter = 1; iter <= max_iters; ++iter) {
        result.iterations = iter;
        for (size_t v = 0; v < n; ++v) {
            double t = lambda[v];
            for (uint32_t e : col_edges[v]) t += nu[e];
            total[v] = t;
            for (uint32_t e : col_edges[v]) mu[e] = t - nu[e];
        }
        for (uint32_t r = 0; r < g.n_rows; ++r) {
            const auto& edges = row_edges[r];
            if (edges.empty()) continue;
            double min1 = HUGE_VAL, min2 = HUGE_VAL;
            size_t argmin = 0;
            bool sign_all = syndrome[r] != 0;
            for (size_t i = 0; i < edges.size(); ++i) {
                double m = mu[edges[i].second];
                if (m < 0) sign_all = !sign_all;
                double a = std::fabs(m);
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    argmin = i;
                } else if (a < min2) {
                    min2 = a;
                }
            }
            for (size_t i = 0; i < edges.size(); ++i) {
                double m = mu[edges[i].second];
                bool out_negative = sign_all ^ (m < 0);
                double mag = (i == argmin) ? min2 : min1;
                if (edges.size() == 1) mag = min1;  // degree-1 check: no exclusion
                if (!std::isfinite(mag)) mag = min1;
                nu[edges[i].second] = cfg.scale * (out_negative ? -mag : mag);
            }
        }
        for (size_t v = 0; v < n; ++v) {
            double t = lambda[v];
            for (uint32_t e : col_edges[v]) t += nu[e];
            result.llrs[v] = t;
            result.estimate[v] = t < 0 ? 1 : 0;
        }
        bool ok = true;
        for (uint32_t r = 0; r < g.n_rows && ok; ++r) {
            uint8_t parity = 0;
            for (auto [v, e] : row_edges[r]) parity ^= result.estimate[v];
            ok = parity == syndrome[r];
        }
        if (ok) {
            result.converged = true;
            break;
        }
    }
    return result;
}

BpResult bp_decode(const DecodingGraph& g, const std::vector<uint8_t>& syndrome, const BpConfig& cfg) {
    return bp_decode(BpGraph::from_graph(g), syndrome, cfg);
}

std::vector<uint8_t> osd_postprocess(const BpGraph& g, const std::vector<double>& llrs,
                                     const std::vector<uint8_t>& syndrome, const OsdConfig& cfg) {
    size_t n = g.cols.size();
    if (llrs.size() != n) throw std::invalid_argument("llr length mismatch");

    std::vector<double> weight(n);
    for (size_t v = 0; v < n; ++v) weight[v] = std::clamp(llrs[v], -50.0, 50.0);

    // Reliability order: most error-likely (lowest llr) first, index tie-break.
    std::vector<uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](uint32_t a, uint32_t b) { return weight[a] < weight[b]; });

    BinaryMatrix h(g.n_rows, n);
    for (size_t i = 0; i < n; ++i)
        for (uint32_t r : g.cols[perm[i]]) h.set(r, i, true);
    auto rr = h.row_reduce();
    size_t rank = rr.pivot_cols.size();

    BinaryVector s(g.n_rows);
    for (uint32_t r = 0; r < g.n_rows; ++r)
        if (syndrome[r]) s.set(r, true);
    BinaryVector ts = rr.transform * s;
    for (size_t r = rank; r < g.n_rows; ++r)
        if (ts.get(r)) throw std::runtime_error("inconsistent syndrome in OSD");

    std::vector<bool> is_pivot(n, false);
    for (uint32_t p : rr.pivot_cols) is_pivot[p] = true;
    std::vector<uint32_t> frees;
    for (uint32_t i = 0; i < n; ++i)
        if (!is_pivot[i]) frees.push_back(i);
    uint32_t order = std::min<uint32_t>(cfg.order, static_cast<uint32_t>(frees.size()));

    // Pivot assignment as a function of flipped free columns.
    BinaryVector base(rank);
    for (size_t i = 0; i < rank; ++i)
        if (ts.get(i)) base.set(i, true);
    std::vector<BinaryVector> flip_effect(order, BinaryVector(rank));
    for (uint32_t j = 0; j < order; ++j)
        for (size_t i = 0; i < rank; ++i)
            if (rr.reduced.get(i, frees[j])) flip_effect[j].set(i, true);

    double best_cost = HUGE_VAL;
    uint64_t best_mask = 0;
    BinaryVector best_pivots = base;
    BinaryVector pivots(rank);
    for (uint64_t mask = 0; mask < (uint64_t(1) << order); ++mask) {
        pivots = base;
        double cost = 0;
        for (uint32_t j = 0; j < order; ++j)
            if ((mask >> j) & 1) {
                pivots.xor_in(flip_effect[j]);
                cost += weight[perm[frees[j]]];
            }
        for (size_t i = 0; i < rank; ++i)
            if (pivots.get(i)) cost += weight[perm[rr.pivot_cols[i]]];
        if (cost < best_cost) {
            best_cost = cost;
            best_mask = mask;
            best_pivots = pivots;
        }
    }

    std::vector<uint8_t> estimate(n, 0);
    for (size_t i = 0; i < rank; ++i)
        if (best_pivots.get(i)) estimate[perm[rr.pivot_cols[i]]] = 1;
    for (uint32_t j = 0; j < order; ++j)
        if ((best_mask >> j) & 1) estimate[perm[frees[j]]] = 1;

    // The solution must reproduce the syndrome exactly.
    std::vector<uint8_t> check(g.n_rows, 0);
    for (size_t v = 0; v < n; ++v)
        if (estimate[v])
            for (uint32_t r : g.cols[v]) check[r] ^= 1;
    for (uint32_t r = 0; r < g.n_rows; ++r)
        if (check[r] != syndrome[r]) throw std::runtime_error("OSD produced a non-solution");
    return estimate;
}

std::vector<uint8_t> osd_postprocess(const DecodingGraph& g, const std::vector<double>& llrs,
                                     const std::vector<uint8_t>& syndrome, const OsdConfig& cfg) {
    return osd_postprocess(BpGraph::from_graph(g), llrs, syndrome, cfg);
}

WindowedDecoder::WindowedDecoder(const Circuit& noisy, double p_gate, WindowConfig wcfg, BpConfig bp,
                                 OsdConfig osd)
    : bp_cfg_(bp), osd_cfg_(osd) {
    if (wcfg.window < 1) throw std::invalid_argument("window must be at least 1");
    n_detectors_ = noisy.n_detectors();
    n_observables_ = noisy.n_observables();
    uint32_t n_cycles = noisy.n_cycles();
    if (n_cycles < 2) throw std::invalid_argument("circuit lacks cycle metadata for windowed decoding");
    uint32_t noisy_cycles = n_cycles - 1;  // the last cycle is the readout
    uint32_t n_windows = (noisy_cycles + wcfg.window - 1) / wcfg.window;

    double p_res = std::min(0.499, wcfg.residual_prior_ratio * p_gate);
    std::vector<VirtualDepol> virtuals;
    if (p_res > 0) {
        for (uint32_t w = 0; w < n_windows; ++w)
            for (uint32_t q : noisy.data_qubits) virtuals.push_back({w * wcfg.window, q, p_res});
        for (uint32_t q : noisy.data_qubits) virtuals.push_back({noisy_cycles, q, p_res});
    }
    auto raw = analyze_faults(noisy, virtuals);

    std::vector<uint32_t> segment(raw.size());
    for (size_t f = 0; f < raw.size(); ++f) {
        uint32_t cyc = raw[f].cycle < 0 ? 0 : static_cast<uint32_t>(raw[f].cycle);
        segment[f] = cyc >= noisy_cycles ? n_windows : cyc / wcfg.window;
    }
    faults_ = merge_columns(std::move(raw), segment);

    // Slack columns for the readout: one per final detector, so the final OSD
    // system stays solvable when a last-round measurement flip goes
    // uncommitted. No observable effect.
    std::vector<int32_t> final_rows;
    for (uint32_t d = 0; d < n_detectors_; ++d)
        if (noisy.detector_cycle[d] >= static_cast<int32_t>(noisy_cycles))
            final_rows.push_back(static_cast<int32_t>(d));
    for (int32_t d : final_rows) {
        FaultColumn slack;
        slack.detectors = {static_cast<uint32_t>(d)};
        slack.prior = std::clamp(p_gate, 1e-9, 0.499);
        slack.cycle = static_cast<int32_t>(noisy_cycles);
        slack.component = 2;
        faults_.push_back(std::move(slack));
    }

    auto build = [&](uint32_t seg_lo, uint32_t seg_hi, uint32_t cyc_lo, uint32_t cyc_hi) {
        Window w;
        w.detector_local.assign(n_detectors_, -1);
        for (uint32_t d = 0; d < n_detectors_; ++d) {
            int32_t c = noisy.detector_cycle[d];
            if (c >= static_cast<int32_t>(cyc_lo) && c < static_cast<int32_t>(cyc_hi)) {
                w.detector_local[d] = static_cast<int32_t>(w.row_detectors.size());
                w.row_detectors.push_back(d);
            }
        }
        w.bp.n_rows = static_cast<uint32_t>(w.row_detectors.size());
        for (uint32_t f = 0; f < faults_.size(); ++f) {
            uint32_t cyc = faults_[f].cycle < 0 ? 0 : static_cast<uint32_t>(faults_[f].cycle);
            uint32_t seg = cyc >= noisy_cycles ? n_windows : cyc / wcfg.window;
            if (seg < seg_lo || seg >= seg_hi) continue;
            std::vector<uint32_t> local;
            for (uint32_t d : faults_[f].detectors)
                if (w.detector_local[d] >= 0) local.push_back(static_cast<uint32_t>(w.detector_local[d]));
            if (local.empty()) continue;
            w.fault_ids.push_back(f);
            w.local_det.push_back(local);
            w.bp.cols.push_back(std::move(local));
            w.bp.priors.push_back(faults_[f].prior);
        }
        return w;
    };

    for (uint32_t w = 0; w < n_windows; ++w)
        windows_.push_back(build(w, w + 1, w * wcfg.window, std::min(noisy_cycles, (w + 1) * wcfg.window)));
    final_ = build(n_windows, n_windows + 1, noisy_cycles, n_cycles);
}

void WindowedDecoder::commit(const FaultColumn& fault, std::vector<uint64_t>& dets,
                             std::vector<uint8_t>& obs) const {
    for (uint32_t d : fault.detectors) dets[d >> 6] ^= uint64_t(1) << (d & 63);
    for (uint32_t o : fault.observables) obs[o] ^= 1;
}

std::vector<uint8_t> WindowedDecoder::decode(const std::vector<uint32_t>& detector_ones) const {
    std::vector<uint64_t> dets((n_detectors_ + 63) / 64, 0);
    for (uint32_t d : detector_ones) dets[d >> 6] ^= uint64_t(1) << (d & 63);
    std::vector<uint8_t> prediction(n_observables_, 0);

    std::vector<uint8_t> syndrome;
    for (const auto& w : windows_) {
        syndrome.assign(w.bp.n_rows, 0);
        bool any = false;
        for (uint32_t i = 0; i < w.bp.n_rows; ++i) {
            uint32_t d = w.row_detectors[i];
            syndrome[i] = (dets[d >> 6] >> (d & 63)) & 1;
            any |= syndrome[i] != 0;
        }
        if (!any) continue;
        BpResult bp = bp_decode(w.bp, syndrome, bp_cfg_);
        for (size_t v = 0; v < bp.estimate.size(); ++v)
            if (bp.estimate[v]) commit(faults_[w.fault_ids[v]], dets, prediction);
    }

    syndrome.assign(final_.bp.n_rows, 0);
    bool any = false;
    for (uint32_t i = 0; i < final_.bp.n_rows; ++i) {
        uint32_t d = final_.row_detectors[i];
        syndrome[i] = (dets[d >> 6] >> (d & 63)) & 1;
        any |= syndrome[i] != 0;
    }
    if (any) {
        BpResult bp = bp_decode(final_.bp, syndrome, bp_cfg_);
        std::vector<uint8_t> estimate = bp.estimate;
        if (!bp.converged) estimate = osd_postprocess(final_.bp, bp.llrs, syndrome, osd_cfg_);
        for (size_t v = 0; v < estimate.size(); ++v)
            if (estimate[v]) commit(faults_[final_.fault_ids[v]], dets, prediction);
    }
    return prediction;
}

std::vector<uint8_t> WindowedDecoder::predict_all(const ShotBatch& batch) const {
    std::vector<uint8_t> out(size_t(batch.shots) * n_observables_, 0);
    for (uint32_t s = 0; s < batch.shots; ++s) {
        auto pred = decode(batch.detector_ones(s));
        std::copy(pred.begin(), pred.end(), out.begin() + size_t(s) * n_observables_);
    }
    return out;
}

uint64_t WindowedDecoder::count_failures(const ShotBatch& batch) const {
    return logical_failure(predict_all(batch), batch);
}

uint64_t logical_failure(const std::vector<uint8_t>& predictions, const ShotBatch& batch) {
    uint32_t k = batch.n_observables;
    if (predictions.size() != size_t(batch.shots) * k)
        throw std::invalid_argument("prediction shape mismatch");
    uint64_t failures = 0;
    for (uint32_t s = 0; s < batch.shots; ++s) {
        bool bad = false;
        for (uint32_t o = 0; o < k && !bad; ++o) bad = predictions[size_t(s) * k + o] != batch.obs(s, o);
        failures += bad ? 1 : 0;
    }
    return failures;
}

GreedyResult greedy_flip_decode(const BinaryMatrix& checks, const BinaryVector& syndrome, uint32_t c) {
    if (syndrome.size() != checks.rows()) throw std::invalid_argument("syndrome length mismatch");
    if (c < 1 || c > 2) throw std::invalid_argument("flip-set size must be 1 or 2");
    GreedyResult res;
    res.correction = BinaryVector(checks.cols());
    BinaryVector s = syndrome;
    BinaryMatrix ct = checks.transpose();  // row q = syndrome pattern of qubit q

    auto weight_after = [&](const BinaryVector& sy, uint32_t q) {
        BinaryVector t = sy;
        t.xor_in(ct.row(q));
        return t;
    };

    while (!s.is_zero()) {
        size_t current = s.weight();
        size_t best_weight = current;
        int best_a = -1, best_b = -1;
        for (uint32_t a = 0; a < checks.cols(); ++a) {
            BinaryVector sa = weight_after(s, a);
            if (sa.weight() < best_weight) {
                best_weight = sa.weight();
                best_a = static_cast<int>(a);
                best_b = -1;
            }
            if (c >= 2) {
                for (uint32_t b = a + 1; b < checks.cols(); ++b) {
                    BinaryVector sab = sa;
                    sab.xor_in(ct.row(b));
                    if (sab.weight() < best_weight) {
                        best_weight = sab.weight();
                        best_a = static_cast<int>(a);
                        best_b = static_cast<int>(b);
                    }
                }
            }
        }
        if (best_a < 0) break;  // local minimum
        s.xor_in(ct.row(static_cast<uint32_t>(best_a)));
        res.correction.flip(static_cast<uint32_t>(best_a));
        if (best_b >= 0) {
            s.xor_in(ct.row(static_cast<uint32_t>(best_b)));
            res.correction.flip(static_cast<uint32_t>(best_b));
        }
        ++res.steps;
    }
    res.success = s.is_zero();
    res.residual_syndrome_weight = static_cast<uint32_t>(s.weight());
    return res;
}

std::vector<ConfinementRow> confinement_probe(const CssCode& code, uint32_t max_weight, int sector,
                                              uint64_t budget) {
    const BinaryMatrix& checks = sector == 0 ? code.hz : code.hx;
    const BinaryMatrix& stab = sector == 0 ? code.hx : code.hz;
    auto stab_rr = stab.row_reduce();
    size_t rank = stab_rr.pivot_cols.size();
    uint32_t n = code.n;

    uint64_t n_errors = 1;
    uint64_t binom = 1;
    for (uint32_t w = 1; w <= max_weight; ++w) {
        binom = binom * (n - w + 1) / w;
        n_errors += binom;
    }
    if (rank >= 62 || n_errors * (uint64_t(1) << rank) > budget)
        throw std::runtime_error("confinement probe budget exceeded");

    // Reduced weight: min weight over the stabilizer coset, by a Gray walk.
    auto reduced_weight = [&](const BinaryVector& e) {
        size_t best = e.weight();
        BinaryVector cur = e;
        uint64_t prev = 0;
        for (uint64_t i = 1; i < (uint64_t(1) << rank); ++i) {
            uint64_t gray = i ^ (i >> 1);
            int bit = std::countr_zero(gray ^ prev);
            prev = gray;
            cur.xor_in(stab_rr.reduced.row(bit));
            best = std::min(best, cur.weight());
        }
        return static_cast<uint32_t>(best);
    };

    std::vector<uint32_t> table(max_weight + 1, UINT32_MAX);
    table[0] = 0;
    std::vector<uint32_t> support;
    for (uint32_t w = 1; w <= max_weight; ++w) {
        support.assign(w, 0);
        std::iota(support.begin(), support.end(), 0);
        for (;;) {
            BinaryVector e(n);
            for (uint32_t idx : support) e.set(idx, true);
            uint32_t rw = reduced_weight(e);
            if (rw <= max_weight && rw > 0) {
                uint32_t sw = static_cast<uint32_t>((checks * e).weight());
                table[rw] = std::min(table[rw], sw);
            }
            int i = static_cast<int>(w) - 1;
            while (i >= 0 && support[i] == n - w + i) --i;
            if (i < 0) break;
            ++support[i];
            for (size_t j = i + 1; j < w; ++j) support[j] = support[j - 1] + 1;
        }
    }

    std::vector<ConfinementRow> rows;
    for (uint32_t rw = 0; rw <= max_weight; ++rw)
        if (table[rw] != UINT32_MAX) rows.push_back({rw, table[rw]});
    return rows;
}

}  // namespace qforge
