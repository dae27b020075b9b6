#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qforge/circuit.hpp"
#include "qforge/codes.hpp"

namespace qforge {

struct Move {
    uint32_t atom = 0;
    uint32_t from = 0;
    uint32_t to = 0;
};

// Layered trap assignments on a 1D line. Within a layer the moved atoms keep
// their relative order and never land on a stationary atom.
struct MoveSchedule {
    uint32_t n_traps = 0;
    std::vector<uint32_t> initial_positions;  // per atom, strictly increasing
    std::vector<std::vector<Move>> layers;
    uint32_t scale_levels = 0;

    std::vector<uint32_t> final_positions() const;
};

struct MotionParams {
    double tau_t_us = 50.0;     // trap transfer time
    double a_p = 0.02;          // peak acceleration, um/us^2
    double spacing_um = 5.0;    // grid spacing d
    double coherence_s = 10.0;  // T_c
};

inline MotionParams paper_motion_params() { return {}; }

// Divide-and-conquer rearrangement: order[i] is the final rank of the atom
// initially at initial_positions[i]; rank r ends at trap r. Needs
// n_traps >= ceil(3N/2).
MoveSchedule plan_1d(const std::vector<uint32_t>& order, const std::vector<uint32_t>& initial_positions,
                     uint32_t n_traps);

// Minimal workspace the planner needs for n atoms (<= ceil(3n/2)).
uint32_t planner_workspace(uint32_t n);

struct ValidationReport {
    bool ok = true;
    std::string message;
    size_t layer = 0;
};

ValidationReport validate_schedule(const MoveSchedule& s);

double move_time_us(double distance_um, const MotionParams& p);

struct RearrangementTime {
    double transfer_us = 0.0;
    double movement_us = 0.0;
    double total_us() const { return transfer_us + movement_us; }
};

// Per-layer rearrangement time bound for a length-L line:
// 2*tau_t*log2(L) + (3+2*sqrt(2))*sqrt(6*L*d/a_p).
RearrangementTime rearrangement_time_bound(double line_length, const MotionParams& p);

// Summed per-layer movement time of a planned schedule (distance = max move).
double schedule_movement_time_us(const MoveSchedule& s, const MotionParams& p);

// Idling error per rearrangement layer: t_rearrange(L(n)) / T_c * p_g / 0.005,
// with L = sqrt(total qubits) for HGP and L = n/8 for LP.
double idling_rate(uint32_t n_data, double p_gate, const MotionParams& p, CodeFamily family);

inline double rescaled_gate_error(double p_gate, double p_idle) { return p_gate + 3.0 * p_idle; }

// Batched per-row schedules for one color layer: the paired endpoints of every
// edge of that color end up on adjacent traps. In the product layout every
// grid row shares the same line permutation, which is what lets a single AOD
// waveform move all rows at once.
struct ColorMotion {
    uint32_t color = 0;
    std::vector<std::pair<uint32_t, uint32_t>> pair_traps;  // final (data, ancilla) traps per edge
    std::vector<MoveSchedule> row_schedules;                // one per grid row, equal layer counts
};

std::vector<ColorMotion> schedule_for_coloring(const CssCode& code, const EdgeColoring& coloring,
                                               bool horizontal);

}  // namespace qforge
