#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qforge/circuit.hpp"
#include "qforge/gf2.hpp"

namespace qforge {

// Detector/observable outcomes for a batch of Monte Carlo shots, bit-packed
// shot-major. Reproducible for fixed (circuit, seed, shots).
struct ShotBatch {
    uint32_t shots = 0;
    uint32_t n_detectors = 0;
    uint32_t n_observables = 0;
    size_t det_stride = 0;
    size_t obs_stride = 0;
    std::vector<uint64_t> det_bits;
    std::vector<uint64_t> obs_bits;
    uint64_t seed = 0;

    bool det(uint32_t shot, uint32_t d) const {
        return (det_bits[shot * det_stride + (d >> 6)] >> (d & 63)) & 1;
    }
    bool obs(uint32_t shot, uint32_t o) const {
        return (obs_bits[shot * obs_stride + (o >> 6)] >> (o & 63)) & 1;
    }
    std::vector<uint32_t> detector_ones(uint32_t shot) const;

    void write_b8(const std::string& path) const;  // raw detector rows, 8 per byte
    void write_csv(const std::string& path) const;
    static ShotBatch read_b8(const std::string& path, uint32_t n_detectors);
};

// Pauli-frame Monte Carlo sampling of a noisy Clifford circuit.
ShotBatch sample(const Circuit& c, uint32_t shots, uint64_t seed);

// One elementary noise location. Depol1 sites take Pauli masks 1..3 (x|z<<1),
// Depol2 sites 1..15 (xa | za<<1 | xb<<2 | zb<<3), FlipMeas sites flip their
// record unconditionally.
struct NoiseSite {
    size_t inst = 0;    // instruction index (the measurement itself for FlipMeas)
    uint32_t slot = 0;  // qubit slot, pair slot, or record slot
    Op kind = Op::Depol1;
};

std::vector<NoiseSite> noise_sites(const Circuit& c);

struct FaultEffect {
    std::vector<uint32_t> detectors;
    std::vector<uint32_t> observables;
};

// Deterministic propagation of exactly one fault through the noiseless
// circuit; the independent oracle for decoding-graph columns.
FaultEffect inject(const Circuit& c, size_t site_index, uint32_t pauli);

// Elementary fault component with its full detector/observable signature.
// Virtual residual entries carry site == UINT32_MAX.
struct FaultColumn {
    std::vector<uint32_t> detectors;
    std::vector<uint32_t> observables;
    double prior = 0.0;
    int32_t cycle = 0;
    uint32_t site = 0;
    uint32_t qubit = 0;     // target qubit, or record index for flips
    uint8_t component = 0;  // 0: X, 1: Z, 2: record flip
};

// Residual data-error entry inserted at the start of a cycle.
struct VirtualDepol {
    uint32_t cycle = 0;
    uint32_t qubit = 0;
    double prior = 0.0;  // per X/Z component
};

// Symbolic single-pass fault propagation: one column per elementary fault
// component of every noise annotation (plus the virtual entries), with priors
// from the depolarizing decomposition (2p/3 per 1q component, 8p/15 per 2q
// component, p per measurement flip).
std::vector<FaultColumn> analyze_faults(const Circuit& c,
                                        const std::vector<VirtualDepol>& virtuals = {});

// Measurement outcome as an affine form over gauge bits, one gauge bit per
// intrinsically random measurement in the reference run.
struct OutcomeForm {
    bool constant = false;
    std::vector<uint64_t> gauge;

    bool gauge_free() const {
        for (uint64_t w : gauge)
            if (w) return false;
        return true;
    }
    void xor_in(const OutcomeForm& other);
};

struct FlowResult {
    std::vector<OutcomeForm> records;
    uint32_t n_gauge = 0;
    std::vector<uint8_t> detector_gauge_free;
    std::vector<uint8_t> detector_value;  // reference value where gauge-free
    std::vector<uint8_t> observable_gauge_free;
    std::vector<uint8_t> observable_value;

    bool all_deterministic() const;
};

// Stabilizer-tableau simulation of the noiseless circuit with symbolic
// outcomes. Detectors and observables of a well-formed circuit must come out
// gauge-free; anything else signals a generator bug.
FlowResult stabilizer_flow(const Circuit& c);

// Gauge-zero measurement record of the noiseless circuit. Throws when any
// detector or observable parity depends on a random outcome.
std::vector<uint8_t> reference_run(const Circuit& c);

// Absolute record indices referenced by each detector / observable.
struct RecordRefs {
    std::vector<std::vector<uint32_t>> detectors;
    std::vector<std::vector<uint32_t>> observables;
    uint32_t n_records = 0;
};
RecordRefs record_refs(const Circuit& c);

}  // namespace qforge
