#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qforge/codes.hpp"
#include "qforge/sim.hpp"

namespace qforge {

// Fault-class graph: merged fault columns against detectors and observables.
struct DecodingGraph {
    uint32_t n_detectors = 0;
    uint32_t n_observables = 0;
    uint32_t n_cycles = 0;                // includes the readout cycle
    std::vector<FaultColumn> columns;     // merged; prior in (0, 0.5]
    std::vector<int32_t> detector_cycle;  // per detector

    size_t n_faults() const { return columns.size(); }
    BinaryMatrix check_matrix() const;
    BinaryMatrix obs_matrix() const;
};

// Merge faults with identical (detectors, observables) signatures within the
// same window segment; columns empty on both matrices are dropped.
DecodingGraph build_decoding_graph(const Circuit& noisy, uint32_t window = 0);

// Per-data-qubit X and Z columns ahead of the given cycle with prior p_res.
void add_residual_layer(const Circuit& noisy, DecodingGraph& g, double p_res, uint32_t cycle = 0);

struct BpConfig {
    double scale = 0.9;       // min-sum normalization s
    double iter_ratio = 5.0;  // max iterations = ceil(n_faults / iter_ratio)
};

struct OsdConfig {
    uint32_t order = 10;
};

struct WindowConfig {
    uint32_t window = 3;
    double residual_prior_ratio = 5.0;  // p_r, in units of p_gate
};

// Decoder parameter presets reported for the two code families.
BpConfig bp_hgp_defaults();
BpConfig bp_lp_defaults();
WindowConfig window_hgp_defaults();
WindowConfig window_lp_defaults();

struct BpResult {
    std::vector<uint8_t> estimate;
    std::vector<double> llrs;
    bool converged = false;
    uint32_t iterations = 0;
};

// Sparse bipartite system for message passing; rows hold column ids.
struct BpGraph {
    uint32_t n_rows = 0;
    std::vector<std::vector<uint32_t>> cols;  // per column: incident rows
    std::vector<double> priors;

    static BpGraph from_graph(const DecodingGraph& g);
};

BpResult bp_decode(const BpGraph& g, const std::vector<uint8_t>& syndrome, const BpConfig& cfg);
BpResult bp_decode(const DecodingGraph& g, const std::vector<uint8_t>& syndrome, const BpConfig& cfg);

// Reliability-ordered exhaustive reprocessing of the `order` least reliable
// non-pivot columns; the result always satisfies the syndrome exactly.
std::vector<uint8_t> osd_postprocess(const BpGraph& g, const std::vector<double>& llrs,
                                     const std::vector<uint8_t>& syndrome, const OsdConfig& cfg);
std::vector<uint8_t> osd_postprocess(const DecodingGraph& g, const std::vector<double>& llrs,
                                     const std::vector<uint8_t>& syndrome, const OsdConfig& cfg);

// Space-time decoder: BP over non-overlapping windows of noisy cycles with
// committed corrections carried forward, BP+OSD on the final readout against
// a residual data-error graph.
class WindowedDecoder {
  public:
    WindowedDecoder(const Circuit& noisy, double p_gate, WindowConfig wcfg, BpConfig bp, OsdConfig osd);

    std::vector<uint8_t> decode(const std::vector<uint32_t>& detector_ones) const;
    uint64_t count_failures(const ShotBatch& batch) const;
    // Per-shot predictions, bit-packed like the batch's observables.
    std::vector<uint8_t> predict_all(const ShotBatch& batch) const;

    uint32_t n_windows() const { return static_cast<uint32_t>(windows_.size()); }

  private:
    struct Window {
        std::vector<uint32_t> fault_ids;              // into faults_
        std::vector<std::vector<uint32_t>> local_det; // per local fault: local rows
        std::vector<uint32_t> row_detectors;          // local row -> global detector
        std::vector<int32_t> detector_local;          // global detector -> local row or -1
        BpGraph bp;
    };

    void commit(const FaultColumn& fault, std::vector<uint64_t>& dets, std::vector<uint8_t>& obs) const;

    uint32_t n_detectors_ = 0;
    uint32_t n_observables_ = 0;
    std::vector<FaultColumn> faults_;
    std::vector<Window> windows_;
    Window final_;
    BpConfig bp_cfg_;
    OsdConfig osd_cfg_;
};

// Counts shots whose predicted observables differ from the sampled ones in
// any position.
uint64_t logical_failure(const std::vector<uint8_t>& predictions, const ShotBatch& batch);

struct GreedyResult {
    bool success = false;
    BinaryVector correction;
    uint32_t residual_syndrome_weight = 0;
    uint32_t steps = 0;
};

// Local greedy decoder: repeatedly applies the <=c-qubit flip that strictly
// decreases the syndrome weight the most; stops at zero or a local minimum.
GreedyResult greedy_flip_decode(const BinaryMatrix& checks, const BinaryVector& syndrome, uint32_t c);

struct ConfinementRow {
    uint32_t reduced_weight = 0;
    uint32_t min_syndrome_weight = 0;
};

// Brute-force confinement table for one CSS sector: X errors against Z checks
// when sector == 0, Z errors against X checks when sector == 1.
std::vector<ConfinementRow> confinement_probe(const CssCode& code, uint32_t max_weight, int sector = 0,
                                              uint64_t budget = 1ull << 26);

}  // namespace qforge
