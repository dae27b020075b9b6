#include "qforge/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qforge {

std::vector<uint32_t> MoveSchedule::final_positions() const {
    std::vector<uint32_t> pos = initial_positions;
    for (const auto& layer : layers)
        for (const Move& m : layer) pos[m.atom] = m.to;
    return pos;
}

namespace {

uint32_t levels_for(uint32_t n) {
    uint32_t lv = 0;
    while ((1u << lv) < n) ++lv;
    return lv;
}

// Minimal zone capacity handled within ceil(log2 n) levels. The binding
// constraints: the split-right step needs n + nR traps, and the two sub-zones
// need g(nL) + g(nR).
const std::vector<uint32_t>& g_table(uint32_t upto) {
    static std::vector<uint32_t> g{0, 1};
    while (g.size() <= upto) {
        uint32_t n = static_cast<uint32_t>(g.size());
        uint32_t half_cap = 1u << (levels_for(n) - 1);
        uint32_t best = UINT32_MAX;
        for (uint32_t nl = n > half_cap ? n - half_cap : 1; nl < n && nl <= half_cap; ++nl) {
            uint32_t nr = n - nl;
            uint32_t need = std::max(n + nr, g[nl] + g[nr]);
            best = std::min(best, need);
        }
        g.push_back(best);
    }
    return g;
}

struct Planner {
    const std::vector<uint32_t>& order;  // atom -> final rank
    std::vector<uint32_t> pos;           // atom -> current trap
    std::vector<std::vector<Move>> layers;

    void move(size_t layer, uint32_t atom, uint32_t to) {
        if (pos[atom] == to) return;
        if (layers.size() <= layer) layers.resize(layer + 1);
        layers[layer].push_back({atom, pos[atom], to});
        pos[atom] = to;
    }

    // atoms sorted by current position; their ranks form [rank0, rank0+n).
    // The zone uses exactly g(n) traps from lo, keeping per-level move
    // distances within the rearrangement time bound.
    void plan_zone(std::vector<uint32_t> atoms, uint32_t lo, size_t layer_base) {
        uint32_t n = static_cast<uint32_t>(atoms.size());
        if (n <= 1) return;
        bool ordered = true;
        for (size_t i = 1; i < n && ordered; ++i) ordered = order[atoms[i - 1]] < order[atoms[i]];
        if (ordered) return;

        // Compact into the zone start so the split-right targets are free.
        for (uint32_t i = 0; i < n; ++i) move(layer_base, atoms[i], lo + i);

        const auto& g = g_table(n);
        uint32_t cap = g[n];
        uint32_t half_cap = 1u << (levels_for(n) - 1);
        uint32_t rank0 = UINT32_MAX;
        for (uint32_t a : atoms) rank0 = std::min(rank0, order[a]);

        uint32_t nl = 0;
        bool found = false;
        for (uint32_t delta = 0; delta <= n && !found; ++delta) {
            for (int sign = 0; sign < 2 && !found; ++sign) {
                if (sign == 1 && delta == 0) continue;
                int32_t cand = static_cast<int32_t>(n / 2) + (sign ? -1 : 1) * static_cast<int32_t>(delta);
                if (cand < 1 || cand >= static_cast<int32_t>(n)) continue;
                uint32_t cl = static_cast<uint32_t>(cand), cr = n - cl;
                if (cl > half_cap || cr > half_cap) continue;
                if (std::max(n + cr, g[cl] + g[cr]) <= cap) {
                    nl = cl;
                    found = true;
                }
            }
        }
        if (!found) throw std::runtime_error("insufficient workspace for rearrangement");
        uint32_t nr = n - nl;

        // Split-right: atoms bound for the right half park at the far right of
        // the zone, then both halves compact onto their sub-zones.
        std::vector<uint32_t> left, right;
        for (uint32_t a : atoms)
            (order[a] < rank0 + nl ? left : right).push_back(a);
        for (uint32_t r = 0; r < nr; ++r) move(layer_base + 1, right[r], lo + cap - nr + r);
        uint32_t x = g[nl];
        for (uint32_t i = 0; i < nl; ++i) move(layer_base + 2, left[i], lo + i);
        for (uint32_t r = 0; r < nr; ++r) move(layer_base + 2, right[r], lo + x + r);

        plan_zone(std::move(left), lo, layer_base + 3);
        plan_zone(std::move(right), lo + x, layer_base + 3);
    }
};

}  // namespace

uint32_t planner_workspace(uint32_t n) { return n ? g_table(n)[n] : 0; }

MoveSchedule plan_1d(const std::vector<uint32_t>& order, const std::vector<uint32_t>& initial_positions,
                     uint32_t n_traps) {
    uint32_t n = static_cast<uint32_t>(order.size());
    if (initial_positions.size() != n) throw std::invalid_argument("order/position size mismatch");
    if (n_traps < (3 * n + 1) / 2) throw std::invalid_argument("insufficient workspace: need ceil(3N/2) traps");
    std::vector<uint8_t> seen(n, 0);
    for (uint32_t r : order) {
        if (r >= n || seen[r]) throw std::invalid_argument("order is not a permutation");
        seen[r] = 1;
    }
    for (size_t i = 1; i < initial_positions.size(); ++i)
        if (initial_positions[i - 1] >= initial_positions[i])
            throw std::invalid_argument("initial positions must be strictly increasing");
    if (n && initial_positions.back() >= n_traps) throw std::invalid_argument("initial position out of range");

    MoveSchedule s;
    s.n_traps = n_traps;
    s.initial_positions = initial_positions;
    s.scale_levels = levels_for(n);
    if (n == 0) return s;

    Planner planner{order, initial_positions, {}};
    std::vector<uint32_t> atoms(n);
    std::iota(atoms.begin(), atoms.end(), 0);
    planner.plan_zone(std::move(atoms), 0, 0);

    // Final compaction: rank r settles at trap r. Positions are distinct and
    // ascending in rank order, so every move here is leftward and collision
    // free within one layer.
    size_t final_layer = planner.layers.size();
    for (uint32_t a = 0; a < n; ++a) planner.move(final_layer, a, order[a]);

    for (auto& layer : planner.layers)
        if (!layer.empty()) s.layers.push_back(std::move(layer));
    return s;
}

ValidationReport validate_schedule(const MoveSchedule& s) {
    auto fail = [&](size_t layer, const std::string& msg) {
        return ValidationReport{false, msg, layer};
    };
    size_t n = s.initial_positions.size();
    std::vector<uint32_t> pos = s.initial_positions;
    for (size_t i = 1; i < n; ++i)
        if (pos[i - 1] >= pos[i]) return fail(0, "initial positions not increasing");

    for (size_t l = 0; l < s.layers.size(); ++l) {
        const auto& layer = s.layers[l];
        std::vector<std::pair<uint32_t, uint32_t>> from_to;  // (from, to) of moving atoms
        std::vector<uint32_t> targets;
        std::vector<uint8_t> moving(n, 0);
        for (const Move& m : layer) {
            if (m.atom >= n) return fail(l, "unknown atom id");
            if (moving[m.atom]) return fail(l, "atom moved twice in one layer");
            moving[m.atom] = 1;
            if (m.from != pos[m.atom]) return fail(l, "move source does not match current position");
            if (m.to >= s.n_traps) return fail(l, "target trap out of range");
            from_to.emplace_back(m.from, m.to);
            targets.push_back(m.to);
        }
        std::sort(targets.begin(), targets.end());
        if (std::adjacent_find(targets.begin(), targets.end()) != targets.end())
            return fail(l, "duplicate target trap");
        for (size_t a = 0; a < n; ++a) {
            if (moving[a]) continue;
            if (std::binary_search(targets.begin(), targets.end(), pos[a]))
                return fail(l, "target trap occupied by a stationary atom");
        }
        std::sort(from_to.begin(), from_to.end());
        for (size_t i = 1; i < from_to.size(); ++i)
            if (from_to[i - 1].second >= from_to[i].second) return fail(l, "crossing moves in one layer");
        for (const Move& m : layer) pos[m.atom] = m.to;
        std::vector<uint32_t> sorted = pos;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            return fail(l, "two atoms share a trap after the layer");
    }
    return {};
}

double move_time_us(double distance_um, const MotionParams& p) {
    if (distance_um < 0) throw std::invalid_argument("negative distance");
    return std::sqrt(6.0 * distance_um / p.a_p);
}

RearrangementTime rearrangement_time_bound(double line_length, const MotionParams& p) {
    if (line_length < 2) throw std::invalid_argument("line length must be at least 2");
    RearrangementTime t;
    t.transfer_us = 2.0 * p.tau_t_us * std::log2(line_length);
    t.movement_us = (3.0 + 2.0 * std::sqrt(2.0)) * std::sqrt(6.0 * line_length * p.spacing_um / p.a_p);
    return t;
}

double schedule_movement_time_us(const MoveSchedule& s, const MotionParams& p) {
    double total = 0.0;
    for (const auto& layer : s.layers) {
        uint32_t max_dist = 0;
        for (const Move& m : layer)
            max_dist = std::max(max_dist, m.to > m.from ? m.to - m.from : m.from - m.to);
        if (max_dist) total += move_time_us(max_dist * p.spacing_um, p);
    }
    return total;
}

double idling_rate(uint32_t n_data, double p_gate, const MotionParams& p, CodeFamily family) {
    if (n_data < 4) throw std::invalid_argument("idling model needs n >= 4");
    double line;
    if (family == CodeFamily::Lp) {
        line = n_data / 8.0;
    } else {
        // Total qubit count for the (3,4)-biregular HGP family: data plus one
        // ancilla per check is 49/25 of the data count.
        line = std::ceil(std::sqrt(n_data * 49.0 / 25.0));
    }
    RearrangementTime t = rearrangement_time_bound(line, p);
    return t.total_us() * 1e-6 / p.coherence_s * (p_gate / 0.005);
}

std::vector<ColorMotion> schedule_for_coloring(const CssCode& code, const EdgeColoring& coloring,
                                               bool horizontal) {
    if (!code.hgp_structure) throw std::invalid_argument("schedule_for_coloring needs HGP metadata");
    const BinaryMatrix& h1 = code.hgp_structure->h1;
    const BinaryMatrix& h2 = code.hgp_structure->h2;
    uint32_t n1 = static_cast<uint32_t>(h1.cols()), r1 = static_cast<uint32_t>(h1.rows());
    uint32_t n2 = static_cast<uint32_t>(h2.cols()), r2 = static_cast<uint32_t>(h2.rows());

    // A horizontal pass reorders within each grid row: positions 0..n2-1 hold
    // the bit-column sites, n2..n2+r2-1 the check-column sites. Every row pairs
    // position t with position n2+j exactly when (j, t) is a factor-2 edge, so
    // one line permutation serves all n1+r1 rows. Vertical is the transpose.
    uint32_t nb = horizontal ? n2 : n1;
    uint32_t nc = horizontal ? r2 : r1;
    uint32_t rows = horizontal ? n1 + r1 : n2 + r2;
    uint32_t line = nb + nc;
    if (coloring.graph.n_bits != nb || coloring.graph.n_checks != nc)
        throw std::invalid_argument("coloring does not match the requested direction");

    uint32_t n_traps = (3 * line + 1) / 2;
    std::vector<uint32_t> initial(line);
    std::iota(initial.begin(), initial.end(), 0);

    std::vector<ColorMotion> out;
    for (uint32_t c = 0; c < coloring.n_colors; ++c) {
        std::vector<std::pair<uint32_t, uint32_t>> pairs;  // (bit position, check position)
        for (size_t e = 0; e < coloring.graph.edges.size(); ++e) {
            if (coloring.color_of[e] != c) continue;
            auto [chk, bit] = coloring.graph.edges[e];
            pairs.emplace_back(bit, nb + chk);
        }
        std::sort(pairs.begin(), pairs.end());

        std::vector<uint32_t> order(line, UINT32_MAX);
        ColorMotion cm;
        cm.color = c;
        uint32_t rank = 0;
        for (auto [bpos, cpos] : pairs) {
            order[bpos] = rank;
            order[cpos] = rank + 1;
            cm.pair_traps.emplace_back(rank, rank + 1);
            rank += 2;
        }
        for (uint32_t p = 0; p < line; ++p)
            if (order[p] == UINT32_MAX) order[p] = rank++;

        MoveSchedule line_schedule = plan_1d(order, initial, n_traps);
        cm.row_schedules.assign(rows, line_schedule);
        out.push_back(std::move(cm));
    }
    return out;
}

}  // namespace qforge
