#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qforge/codes.hpp"

namespace qforge {

enum class Op : uint8_t {
    ResetZ,
    ResetX,
    H,
    Cnot,  // targets are (control, target) pairs
    Cz,
    MeasureZ,
    MeasureX,
    Tick,
    Depol1,
    Depol2,    // targets are pairs
    FlipMeas,  // applies to the next measurement instruction
    Detector,
    Observable,
};

struct Instruction {
    Op op;
    double param = 0.0;            // noise probability
    int32_t id = 0;                // observable id
    std::vector<int32_t> targets;  // qubits, or negative record offsets for Detector/Observable
};

struct Circuit {
    uint32_t n_qubits = 0;
    std::vector<Instruction> instructions;

    // Generator metadata. data_qubits drive residual-noise layers; cycle_starts
    // mark the first instruction of each noisy cycle; detector_cycle maps each
    // detector to its cycle (n_cycles() = readout layer).
    std::vector<uint32_t> data_qubits;
    std::vector<size_t> cycle_starts;
    std::vector<int32_t> detector_cycle;

    uint32_t n_cycles() const { return static_cast<uint32_t>(cycle_starts.size()); }

    void reset_z(const std::vector<int32_t>& qubits) { push(Op::ResetZ, qubits); }
    void reset_x(const std::vector<int32_t>& qubits) { push(Op::ResetX, qubits); }
    void h(const std::vector<int32_t>& qubits) { push(Op::H, qubits); }
    void cnot(const std::vector<int32_t>& pairs) { push(Op::Cnot, pairs); }
    void cz(const std::vector<int32_t>& pairs) { push(Op::Cz, pairs); }
    void measure_z(const std::vector<int32_t>& qubits) { push(Op::MeasureZ, qubits); }
    void measure_x(const std::vector<int32_t>& qubits) { push(Op::MeasureX, qubits); }
    void tick() { push(Op::Tick, {}); }
    void detector(const std::vector<int32_t>& rec_offsets);
    void observable(int32_t id, const std::vector<int32_t>& rec_offsets);
    void mark_cycle() { cycle_starts.push_back(instructions.size()); }

    void append(const Circuit& other);  // concatenate, merging metadata

    uint32_t n_measurements() const;
    uint32_t n_detectors() const { return static_cast<uint32_t>(detector_cycle.size()); }
    uint32_t n_observables() const;
    uint32_t entangling_depth() const;

    // Throws when a qubit is touched twice between TICKs or a record reference
    // is out of range. Noise annotations are exempt from layer disjointness.
    void validate() const;

    std::string to_text() const;
    static Circuit from_text(const std::string& text);

  private:
    void push(Op op, const std::vector<int32_t>& targets, double param = 0.0, int32_t id = 0);
};

struct EdgeColoring {
    TannerGraph graph;
    std::vector<uint32_t> color_of;  // indexed like graph.edges
    uint32_t n_colors = 0;

    void check_proper() const;  // throws on an improper coloring
};

// Proper edge coloring of a bipartite graph with exactly max-degree colors.
EdgeColoring bipartite_edge_coloring(const TannerGraph& g);

enum class GateBasis { Cnot, CzH };
enum class MemBasis { Z, X };

// One layer of simultaneous ancilla-data gates for one check type.
struct GateLayer {
    std::vector<std::pair<uint32_t, uint32_t>> pairs;  // (check index, data qubit)
};

// Ancilla-data interaction layers for a full syndrome round: X-check layers in
// time order, then Z-check layers.
struct SyndromeSchedule {
    std::vector<GateLayer> x_layers;
    std::vector<GateLayer> z_layers;
    uint32_t n_data = 0;
    uint32_t n_x = 0;
    uint32_t n_z = 0;
};

SyndromeSchedule product_coloration_schedule(const CssCode& code, const EdgeColoring& col_h,
                                             const EdgeColoring& col_v);
SyndromeSchedule lp_schedule(const CssCode& code);
// Internally picks the right schedule for the code family.
SyndromeSchedule syndrome_schedule(const CssCode& code);

// One full syndrome-extraction round (Alg. 2 ordering: X half then Z half).
Circuit product_coloration_circuit(const CssCode& code, const EdgeColoring& col_h,
                                   const EdgeColoring& col_v, GateBasis basis = GateBasis::Cnot);
Circuit lp_syndrome_circuit(const CssCode& code, GateBasis basis = GateBasis::Cnot);

// Multi-round pipelined schedule: X and Z rounds share directional passes,
// giving (2d+2) * n_colors entangling layers for d rounds.
Circuit pipelined_circuit(const CssCode& code, uint32_t d_rounds);

// Memory experiment: reset in `basis`, m syndrome rounds, transversal readout,
// detectors on consecutive same-check outcomes, one observable per logical.
Circuit memory_experiment(const CssCode& code, uint32_t rounds, MemBasis basis,
                          GateBasis gate_basis = GateBasis::Cnot);

// DEPOL2(p_gate) after every entangling gate, FLIPM(p_gate) on every
// measurement, DEPOL1(p_idle) on qubits idling through an entangling layer.
Circuit add_noise(const Circuit& c, double p_gate, double p_idle);

}  // namespace qforge
