#include "qforge/circuit.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qforge {

void Circuit::push(Op op, const std::vector<int32_t>& targets, double param, int32_t id) {
    Instruction inst;
    inst.op = op;
    inst.param = param;
    inst.id = id;
    inst.targets = targets;
    for (int32_t t : inst.targets) {
        if (op == Op::Detector || op == Op::Observable) continue;
        if (t < 0) throw std::invalid_argument("negative qubit target");
        n_qubits = std::max(n_qubits, static_cast<uint32_t>(t) + 1);
    }
    instructions.push_back(std::move(inst));
}

void Circuit::detector(const std::vector<int32_t>& rec_offsets) {
    push(Op::Detector, rec_offsets);
    detector_cycle.push_back(cycle_starts.empty() ? 0 : static_cast<int32_t>(cycle_starts.size()) - 1);
}

void Circuit::observable(int32_t id, const std::vector<int32_t>& rec_offsets) {
    push(Op::Observable, rec_offsets, 0.0, id);
}

void Circuit::append(const Circuit& other) {
    size_t base = instructions.size();
    int32_t cycle_shift = static_cast<int32_t>(cycle_starts.size());
    for (size_t s : other.cycle_starts) cycle_starts.push_back(base + s);
    for (int32_t c : other.detector_cycle) detector_cycle.push_back(c + cycle_shift);
    for (const auto& inst : other.instructions) instructions.push_back(inst);
    n_qubits = std::max(n_qubits, other.n_qubits);
    for (uint32_t q : other.data_qubits)
        if (std::find(data_qubits.begin(), data_qubits.end(), q) == data_qubits.end()) data_qubits.push_back(q);
}

uint32_t Circuit::n_measurements() const {
    uint32_t n = 0;
    for (const auto& inst : instructions)
        if (inst.op == Op::MeasureZ || inst.op == Op::MeasureX) n += static_cast<uint32_t>(inst.targets.size());
    return n;
}

uint32_t Circuit::n_observables() const {
    int32_t max_id = -1;
    for (const auto& inst : instructions)
        if (inst.op == Op::Observable) max_id = std::max(max_id, inst.id);
    return static_cast<uint32_t>(max_id + 1);
}

uint32_t Circuit::entangling_depth() const {
    uint32_t depth = 0;
    bool layer_has_gate = false;
    for (const auto& inst : instructions) {
        if (inst.op == Op::Tick) {
            if (layer_has_gate) ++depth;
            layer_has_gate = false;
        } else if (inst.op == Op::Cnot || inst.op == Op::Cz) {
            layer_has_gate = true;
        }
    }
    if (layer_has_gate) ++depth;
    return depth;
}

void Circuit::validate() const {
    std::vector<uint32_t> seen(n_qubits, 0);
    uint32_t layer = 1;
    int64_t records = 0;
    bool pending_flip = false;
    for (const auto& inst : instructions) {
        switch (inst.op) {
            case Op::Tick:
                ++layer;
                break;
            case Op::Depol1:
            case Op::Depol2:
                break;
            case Op::FlipMeas:
                pending_flip = true;
                break;
            case Op::Detector:
            case Op::Observable:
                for (int32_t off : inst.targets)
                    if (off >= 0 || -static_cast<int64_t>(off) > records)
                        throw std::runtime_error("record reference out of range");
                break;
            case Op::MeasureZ:
            case Op::MeasureX:
                records += static_cast<int64_t>(inst.targets.size());
                pending_flip = false;
                [[fallthrough]];
            default:
                for (int32_t t : inst.targets) {
                    if (seen[t] == layer) throw std::runtime_error("qubit targeted twice in one layer");
                    seen[t] = layer;
                }
                if (inst.op == Op::Cnot || inst.op == Op::Cz) {
                    if (inst.targets.size() % 2) throw std::runtime_error("odd target count for two-qubit gate");
                }
                break;
        }
    }
    if (pending_flip) throw std::runtime_error("dangling FLIPM annotation");
}

namespace {

const char* op_name(Op op) {
    switch (op) {
        case Op::ResetZ: return "RZ";
        case Op::ResetX: return "RX";
        case Op::H: return "H";
        case Op::Cnot: return "CNOT";
        case Op::Cz: return "CZ";
        case Op::MeasureZ: return "MZ";
        case Op::MeasureX: return "MX";
        case Op::Tick: return "TICK";
        case Op::Depol1: return "DEPOL1";
        case Op::Depol2: return "DEPOL2";
        case Op::FlipMeas: return "FLIPM";
        case Op::Detector: return "DETECTOR";
        case Op::Observable: return "OBSERVABLE";
    }
    return "?";
}

}  // namespace

std::string Circuit::to_text() const {
    std::ostringstream out;
    out << "# qubits " << n_qubits << "\n";
    if (!data_qubits.empty()) {
        out << "# data";
        for (uint32_t q : data_qubits) out << ' ' << q;
        out << "\n";
    }
    size_t next_cycle = 0;
    for (size_t i = 0; i < instructions.size(); ++i) {
        while (next_cycle < cycle_starts.size() && cycle_starts[next_cycle] == i) {
            out << "# cycle " << next_cycle << "\n";
            ++next_cycle;
        }
        const auto& inst = instructions[i];
        out << op_name(inst.op);
        if (inst.op == Op::Depol1 || inst.op == Op::Depol2 || inst.op == Op::FlipMeas)
            out << '(' << inst.param << ')';
        if (inst.op == Op::Observable) out << ' ' << inst.id;
        if (inst.op == Op::Detector || inst.op == Op::Observable) {
            for (int32_t off : inst.targets) out << " rec[" << off << "]";
        } else {
            for (int32_t t : inst.targets) out << ' ' << t;
        }
        out << "\n";
    }
    return out.str();
}

Circuit Circuit::from_text(const std::string& text) {
    Circuit c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "#") {
            std::string kind;
            ls >> kind;
            if (kind == "cycle") {
                c.cycle_starts.push_back(c.instructions.size());
            } else if (kind == "data") {
                uint32_t q;
                while (ls >> q) c.data_qubits.push_back(q);
            } else if (kind == "qubits") {
                uint32_t n;
                if (ls >> n) c.n_qubits = std::max(c.n_qubits, n);
            }
            continue;
        }
        double param = 0.0;
        auto paren = word.find('(');
        if (paren != std::string::npos) {
            param = std::stod(word.substr(paren + 1, word.size() - paren - 2));
            word = word.substr(0, paren);
        }
        Op op;
        if (word == "RZ") op = Op::ResetZ;
        else if (word == "RX") op = Op::ResetX;
        else if (word == "H") op = Op::H;
        else if (word == "CNOT" || word == "CX") op = Op::Cnot;
        else if (word == "CZ") op = Op::Cz;
        else if (word == "MZ") op = Op::MeasureZ;
        else if (word == "MX") op = Op::MeasureX;
        else if (word == "TICK") op = Op::Tick;
        else if (word == "DEPOL1") op = Op::Depol1;
        else if (word == "DEPOL2") op = Op::Depol2;
        else if (word == "FLIPM") op = Op::FlipMeas;
        else if (word == "DETECTOR") op = Op::Detector;
        else if (word == "OBSERVABLE") op = Op::Observable;
        else throw std::invalid_argument("unknown instruction: " + word);

        Instruction inst;
        inst.op = op;
        inst.param = param;
        if (op == Op::Observable) ls >> inst.id;
        if (op == Op::Detector || op == Op::Observable) {
            std::string ref;
            while (ls >> ref) {
                if (ref.rfind("rec[", 0) != 0) throw std::invalid_argument("bad record reference: " + ref);
                inst.targets.push_back(std::stoi(ref.substr(4, ref.size() - 5)));
            }
            if (op == Op::Detector)
                c.detector_cycle.push_back(c.cycle_starts.empty() ? 0
                                                                  : static_cast<int32_t>(c.cycle_starts.size()) - 1);
        } else {
            int32_t t;
            while (ls >> t) {
                c.n_qubits = std::max(c.n_qubits, static_cast<uint32_t>(t) + 1);
                inst.targets.push_back(t);
            }
        }
        c.instructions.push_back(std::move(inst));
    }
    return c;
}

void EdgeColoring::check_proper() const {
    if (color_of.size() != graph.edges.size()) throw std::runtime_error("coloring size mismatch");
    std::map<std::pair<uint32_t, uint32_t>, int> seen;  // (vertex key, color) -> used
    for (size_t e = 0; e < graph.edges.size(); ++e) {
        auto [c, b] = graph.edges[e];
        uint32_t col = color_of[e];
        if (col >= n_colors) throw std::runtime_error("color id out of range");
        if (!seen.emplace(std::make_pair(b * 2, col), 1).second)
            throw std::runtime_error("improper coloring at a bit vertex");
        if (!seen.emplace(std::make_pair(c * 2 + 1, col), 1).second)
            throw std::runtime_error("improper coloring at a check vertex");
    }
}

EdgeColoring bipartite_edge_coloring(const TannerGraph& g) {
    uint32_t delta = 0;
    for (uint32_t d : g.bit_degrees()) delta = std::max(delta, d);
    for (uint32_t d : g.check_degrees()) delta = std::max(delta, d);

    // at_check[c][color] / at_bit[b][color]: edge currently holding `color`.
    std::vector<std::vector<int64_t>> at_check(g.n_checks, std::vector<int64_t>(delta, -1));
    std::vector<std::vector<int64_t>> at_bit(g.n_bits, std::vector<int64_t>(delta, -1));
    std::vector<int64_t> color_of(g.edges.size(), -1);

    auto free_color = [&](const std::vector<int64_t>& slots) {
        for (uint32_t c = 0; c < slots.size(); ++c)
            if (slots[c] < 0) return c;
        throw std::runtime_error("no free color (degree accounting bug)");
    };

    for (size_t e = 0; e < g.edges.size(); ++e) {
        auto [cv, bv] = g.edges[e];
        uint32_t alpha = free_color(at_check[cv]);
        uint32_t beta = free_color(at_bit[bv]);
        if (alpha != beta) {
            // Swap colors along the maximal alternating alpha/beta path from
            // the bit; it cannot reach the check (Konig), so alpha frees up at
            // both endpoints.
            std::vector<size_t> path;
            uint32_t color = alpha;
            uint32_t vertex = bv;
            bool bit_side = true;
            for (;;) {
                int64_t pe = bit_side ? at_bit[vertex][color] : at_check[vertex][color];
                if (pe < 0) break;
                path.push_back(static_cast<size_t>(pe));
                auto [pc, pb] = g.edges[static_cast<size_t>(pe)];
                vertex = bit_side ? pc : pb;
                bit_side = !bit_side;
                color = color == alpha ? beta : alpha;
            }
            for (size_t pe : path) {
                auto [pc, pb] = g.edges[pe];
                uint32_t old_c = static_cast<uint32_t>(color_of[pe]);
                at_check[pc][old_c] = -1;
                at_bit[pb][old_c] = -1;
                color_of[pe] = old_c == alpha ? beta : alpha;
            }
            for (size_t pe : path) {
                auto [pc, pb] = g.edges[pe];
                at_check[pc][static_cast<size_t>(color_of[pe])] = static_cast<int64_t>(pe);
                at_bit[pb][static_cast<size_t>(color_of[pe])] = static_cast<int64_t>(pe);
            }
        }
        color_of[e] = alpha;
        at_check[cv][alpha] = static_cast<int64_t>(e);
        at_bit[bv][alpha] = static_cast<int64_t>(e);
    }

    EdgeColoring coloring;
    coloring.graph = g;
    coloring.n_colors = delta;
    coloring.color_of.assign(color_of.begin(), color_of.end());
    coloring.check_proper();
    return coloring;
}

namespace {

void verify_schedule_against_code(const SyndromeSchedule& s, const CssCode& code) {
    auto covered = [&](const std::vector<GateLayer>& layers, const BinaryMatrix& h) {
        std::vector<std::vector<uint32_t>> touched(h.rows());
        for (const auto& layer : layers)
            for (auto [chk, q] : layer.pairs) touched[chk].push_back(q);
        for (size_t r = 0; r < h.rows(); ++r) {
            std::sort(touched[r].begin(), touched[r].end());
            if (std::adjacent_find(touched[r].begin(), touched[r].end()) != touched[r].end())
                throw std::runtime_error("schedule touches a data qubit twice for one check");
            if (touched[r] != h.row(r).ones())
                throw std::runtime_error("schedule does not realize the check matrix");
        }
    };
    covered(s.x_layers, code.hx);
    covered(s.z_layers, code.hz);
}

}  // namespace

SyndromeSchedule product_coloration_schedule(const CssCode& code, const EdgeColoring& col_h,
                                             const EdgeColoring& col_v) {
    if (!code.hgp_structure) throw std::invalid_argument("code lacks HGP factor metadata");
    const BinaryMatrix& h1 = code.hgp_structure->h1;  // vertical factor
    const BinaryMatrix& h2 = code.hgp_structure->h2;  // horizontal factor
    uint32_t n1 = static_cast<uint32_t>(h1.cols()), r1 = static_cast<uint32_t>(h1.rows());
    uint32_t n2 = static_cast<uint32_t>(h2.cols()), r2 = static_cast<uint32_t>(h2.rows());
    if (col_v.graph.n_bits != n1 || col_v.graph.n_checks != r1)
        throw std::invalid_argument("vertical coloring does not match factor 1");
    if (col_h.graph.n_bits != n2 || col_h.graph.n_checks != r2)
        throw std::invalid_argument("horizontal coloring does not match factor 2");
    col_v.check_proper();
    col_h.check_proper();

    auto vv = [&](uint32_t i, uint32_t t) { return i * n2 + t; };
    auto cc = [&](uint32_t s, uint32_t j) { return n1 * n2 + s * r2 + j; };
    auto xchk = [&](uint32_t i, uint32_t j) { return i * r2 + j; };
    auto zchk = [&](uint32_t s, uint32_t t) { return s * n2 + t; };

    SyndromeSchedule sched;
    sched.n_data = code.n;
    sched.n_x = n1 * r2;
    sched.n_z = r1 * n2;
    // X half: horizontal color layers (X-check to VV via H2), then vertical
    // (X-check to CC via H1). Z half: horizontal (Z to CC via H2), then
    // vertical (Z to VV via H1).
    for (uint32_t c = 0; c < col_h.n_colors; ++c) {
        GateLayer layer;
        for (size_t e = 0; e < col_h.graph.edges.size(); ++e) {
            if (col_h.color_of[e] != c) continue;
            auto [j, t] = col_h.graph.edges[e];
            for (uint32_t i = 0; i < n1; ++i) layer.pairs.emplace_back(xchk(i, j), vv(i, t));
        }
        sched.x_layers.push_back(std::move(layer));
    }
    for (uint32_t c = 0; c < col_v.n_colors; ++c) {
        GateLayer layer;
        for (size_t e = 0; e < col_v.graph.edges.size(); ++e) {
            if (col_v.color_of[e] != c) continue;
            auto [s, i] = col_v.graph.edges[e];
            for (uint32_t j = 0; j < r2; ++j) layer.pairs.emplace_back(xchk(i, j), cc(s, j));
        }
        sched.x_layers.push_back(std::move(layer));
    }
    for (uint32_t c = 0; c < col_h.n_colors; ++c) {
        GateLayer layer;
        for (size_t e = 0; e < col_h.graph.edges.size(); ++e) {
            if (col_h.color_of[e] != c) continue;
            auto [j, t] = col_h.graph.edges[e];
            for (uint32_t s = 0; s < r1; ++s) layer.pairs.emplace_back(zchk(s, t), cc(s, j));
        }
        sched.z_layers.push_back(std::move(layer));
    }
    for (uint32_t c = 0; c < col_v.n_colors; ++c) {
        GateLayer layer;
        for (size_t e = 0; e < col_v.graph.edges.size(); ++e) {
            if (col_v.color_of[e] != c) continue;
            auto [s, i] = col_v.graph.edges[e];
            for (uint32_t t = 0; t < n2; ++t) layer.pairs.emplace_back(zchk(s, t), vv(i, t));
        }
        sched.z_layers.push_back(std::move(layer));
    }
    verify_schedule_against_code(sched, code);
    return sched;
}

SyndromeSchedule lp_schedule(const CssCode& code) {
    if (!code.lp_structure) throw std::invalid_argument("code lacks LP factor metadata");
    const RingMatrix& b1 = code.lp_structure->b1;
    const RingMatrix& b2 = code.lp_structure->b2;
    uint32_t l = b1.lift();
    uint32_t m1 = b1.rows(), n1 = b1.cols();
    uint32_t m2 = b2.rows(), n2 = b2.cols();
    uint32_t n_colors = std::max({m1, n1, m2, n2});

    // Flattened index helpers; qubit order matches lifted_product.
    auto vv = [&](uint32_t j, uint32_t t, uint32_t v) { return (j * n2 + t) * l + v; };
    auto cc = [&](uint32_t s, uint32_t i, uint32_t v) { return n1 * n2 * l + (s * m2 + i) * l + v; };
    auto xchk = [&](uint32_t j, uint32_t i, uint32_t u) { return (j * m2 + i) * l + u; };
    auto zchk = [&](uint32_t s, uint32_t t, uint32_t u) { return (s * n2 + t) * l + u; };

    SyndromeSchedule sched;
    sched.n_data = code.n;
    sched.n_x = n1 * m2 * l;
    sched.n_z = m1 * n2 * l;

    // X half. Horizontal: X-check (j,i,u) to VV (j,t,u+e) per term e of
    // B2[i,t], colored (i+t). Vertical: to CC (s,i,u-e) per term e of B1[s,j],
    // colored (s+j).
    for (uint32_t c = 0; c < n_colors; ++c) {
        GateLayer layer;
        for (uint32_t i = 0; i < m2; ++i)
            for (uint32_t t = 0; t < n2; ++t) {
                if ((i + t) % n_colors != c) continue;
                for (uint32_t e : b2.entry(i, t))
                    for (uint32_t j = 0; j < n1; ++j)
                        for (uint32_t u = 0; u < l; ++u)
                            layer.pairs.emplace_back(xchk(j, i, u), vv(j, t, (u + e) % l));
            }
        if (!layer.pairs.empty()) sched.x_layers.push_back(std::move(layer));
    }
    for (uint32_t c = 0; c < n_colors; ++c) {
        GateLayer layer;
        for (uint32_t s = 0; s < m1; ++s)
            for (uint32_t j = 0; j < n1; ++j) {
                if ((s + j) % n_colors != c) continue;
                for (uint32_t e : b1.entry(s, j))
                    for (uint32_t i = 0; i < m2; ++i)
                        for (uint32_t u = 0; u < l; ++u)
                            layer.pairs.emplace_back(xchk(j, i, u), cc(s, i, (u + l - e) % l));
            }
        if (!layer.pairs.empty()) sched.x_layers.push_back(std::move(layer));
    }
    // Z half. Horizontal: Z-check (s,t,u) to CC (s,i,u-e) per term e of
    // B2[i,t]. Vertical: to VV (j,t,u+e) per term e of B1[s,j].
    for (uint32_t c = 0; c < n_colors; ++c) {
        GateLayer layer;
        for (uint32_t i = 0; i < m2; ++i)
            for (uint32_t t = 0; t < n2; ++t) {
                if ((i + t) % n_colors != c) continue;
                for (uint32_t e : b2.entry(i, t))
                    for (uint32_t s = 0; s < m1; ++s)
                        for (uint32_t u = 0; u < l; ++u)
                            layer.pairs.emplace_back(zchk(s, t, u), cc(s, i, (u + l - e) % l));
            }
        if (!layer.pairs.empty()) sched.z_layers.push_back(std::move(layer));
    }
    for (uint32_t c = 0; c < n_colors; ++c) {
        GateLayer layer;
        for (uint32_t s = 0; s < m1; ++s)
            for (uint32_t j = 0; j < n1; ++j) {
                if ((s + j) % n_colors != c) continue;
                for (uint32_t e : b1.entry(s, j))
                    for (uint32_t t = 0; t < n2; ++t)
                        for (uint32_t u = 0; u < l; ++u)
                            layer.pairs.emplace_back(zchk(s, t, u), vv(j, t, (u + e) % l));
            }
        if (!layer.pairs.empty()) sched.z_layers.push_back(std::move(layer));
    }
    verify_schedule_against_code(sched, code);
    return sched;
}

SyndromeSchedule syndrome_schedule(const CssCode& code) {
    if (code.family == CodeFamily::Lp) return lp_schedule(code);
    if (code.family == CodeFamily::Hgp && code.hgp_structure) {
        ClassicalCode c1, c2;
        c1.h = code.hgp_structure->h1;
        c2.h = code.hgp_structure->h2;
        EdgeColoring col_v = bipartite_edge_coloring(c1.tanner());
        EdgeColoring col_h = bipartite_edge_coloring(c2.tanner());
        return product_coloration_schedule(code, col_h, col_v);
    }
    throw std::invalid_argument("no syndrome schedule for this code family");
}

namespace {

// Appends one syndrome round. Ancilla numbering: X ancillas at
// [n_data, n_data+n_x), Z ancillas after them. Record order per round:
// X checks (ancilla order) then Z checks.
void append_round(Circuit& c, const SyndromeSchedule& s, GateBasis basis) {
    uint32_t x0 = s.n_data;
    uint32_t z0 = s.n_data + s.n_x;
    std::vector<int32_t> xanc(s.n_x), zanc(s.n_z), data(s.n_data);
    for (uint32_t i = 0; i < s.n_x; ++i) xanc[i] = static_cast<int32_t>(x0 + i);
    for (uint32_t i = 0; i < s.n_z; ++i) zanc[i] = static_cast<int32_t>(z0 + i);
    for (uint32_t i = 0; i < s.n_data; ++i) data[i] = static_cast<int32_t>(i);

    auto emit_layers = [&](const std::vector<GateLayer>& layers, uint32_t anc0, bool anc_is_control,
                           bool cz) {
        for (const auto& layer : layers) {
            std::vector<int32_t> pairs;
            pairs.reserve(layer.pairs.size() * 2);
            for (auto [chk, q] : layer.pairs) {
                int32_t anc = static_cast<int32_t>(anc0 + chk);
                if (cz || anc_is_control) {
                    pairs.push_back(anc);
                    pairs.push_back(static_cast<int32_t>(q));
                } else {
                    pairs.push_back(static_cast<int32_t>(q));
                    pairs.push_back(anc);
                }
            }
            if (cz)
                c.cz(pairs);
            else
                c.cnot(pairs);
            c.tick();
        }
    };

    if (basis == GateBasis::Cnot) {
        if (s.n_x) {
            c.reset_x(xanc);
            c.tick();
            emit_layers(s.x_layers, x0, true, false);
            c.measure_x(xanc);
            c.tick();
        }
        if (s.n_z) {
            c.reset_z(zanc);
            c.tick();
            emit_layers(s.z_layers, z0, false, false);
            c.measure_z(zanc);
            c.tick();
        }
    } else {
        // CZ gates with Hadamard sandwiches on the data for the X half; the Z
        // half reads Z parities directly with |+> ancillas measured in X.
        if (s.n_x) {
            c.reset_x(xanc);
            c.h(data);
            c.tick();
            emit_layers(s.x_layers, x0, true, true);
            c.h(data);
            c.tick();
            c.measure_x(xanc);
            c.tick();
        }
        if (s.n_z) {
            c.reset_x(zanc);
            c.tick();
            emit_layers(s.z_layers, z0, false, true);
            c.measure_x(zanc);
            c.tick();
        }
    }
}

}  // namespace

Circuit product_coloration_circuit(const CssCode& code, const EdgeColoring& col_h,
                                   const EdgeColoring& col_v, GateBasis basis) {
    SyndromeSchedule s = product_coloration_schedule(code, col_h, col_v);
    Circuit c;
    c.mark_cycle();
    append_round(c, s, basis);
    for (uint32_t q = 0; q < code.n; ++q) c.data_qubits.push_back(q);
    c.validate();
    return c;
}

Circuit lp_syndrome_circuit(const CssCode& code, GateBasis basis) {
    SyndromeSchedule s = lp_schedule(code);
    Circuit c;
    c.mark_cycle();
    append_round(c, s, basis);
    for (uint32_t q = 0; q < code.n; ++q) c.data_qubits.push_back(q);
    c.validate();
    return c;
}

Circuit memory_experiment(const CssCode& code, uint32_t rounds, MemBasis basis, GateBasis gate_basis) {
    if (rounds < 1) throw std::invalid_argument("memory experiment needs at least one round");
    SyndromeSchedule s = syndrome_schedule(code);
    Circuit c;
    std::vector<int32_t> data(s.n_data);
    for (uint32_t i = 0; i < s.n_data; ++i) data[i] = static_cast<int32_t>(i);
    for (uint32_t q = 0; q < code.n; ++q) c.data_qubits.push_back(q);

    if (basis == MemBasis::Z)
        c.reset_z(data);
    else
        c.reset_x(data);
    c.tick();

    std::vector<int64_t> x_rec(s.n_x, -1), z_rec(s.n_z, -1);
    int64_t records = 0;
    for (uint32_t t = 0; t < rounds; ++t) {
        c.mark_cycle();
        append_round(c, s, gate_basis);
        int64_t x_base = records;
        int64_t z_base = records + s.n_x;
        records += s.n_x + s.n_z;
        // Deterministic-type checks get a first-round detector; the opposite
        // type starts comparing at round 2.
        for (uint32_t i = 0; i < s.n_x; ++i) {
            int64_t now = x_base + i;
            if (t == 0) {
                if (basis == MemBasis::X) c.detector({static_cast<int32_t>(now - records)});
            } else {
                c.detector({static_cast<int32_t>(now - records), static_cast<int32_t>(x_rec[i] - records)});
            }
            x_rec[i] = now;
        }
        for (uint32_t i = 0; i < s.n_z; ++i) {
            int64_t now = z_base + i;
            if (t == 0) {
                if (basis == MemBasis::Z) c.detector({static_cast<int32_t>(now - records)});
            } else {
                c.detector({static_cast<int32_t>(now - records), static_cast<int32_t>(z_rec[i] - records)});
            }
            z_rec[i] = now;
        }
    }

    // Transversal readout; reconstructed checks close the detector timeline.
    c.mark_cycle();
    if (basis == MemBasis::Z)
        c.measure_z(data);
    else
        c.measure_x(data);
    int64_t data_base = records;
    records += s.n_data;
    const BinaryMatrix& checks = basis == MemBasis::Z ? code.hz : code.hx;
    const std::vector<int64_t>& last_rec = basis == MemBasis::Z ? z_rec : x_rec;
    for (size_t r = 0; r < checks.rows(); ++r) {
        std::vector<int32_t> refs;
        for (uint32_t q : checks.row(r).ones()) refs.push_back(static_cast<int32_t>(data_base + q - records));
        refs.push_back(static_cast<int32_t>(last_rec[r] - records));
        c.detector(refs);
    }
    const BinaryMatrix& logicals = basis == MemBasis::Z ? code.logicals_z : code.logicals_x;
    for (size_t j = 0; j < logicals.rows(); ++j) {
        std::vector<int32_t> refs;
        for (uint32_t q : logicals.row(j).ones()) refs.push_back(static_cast<int32_t>(data_base + q - records));
        c.observable(static_cast<int32_t>(j), refs);
    }
    c.validate();
    return c;
}

Circuit pipelined_circuit(const CssCode& code, uint32_t d_rounds) {
    if (d_rounds < 1) throw std::invalid_argument("pipelined circuit needs d >= 1");
    SyndromeSchedule s = syndrome_schedule(code);
    // Each check type's layer list splits into its two directional passes; the
    // product schedules emit the horizontal half first.
    size_t xh = s.x_layers.size() / 2, zh = s.z_layers.size() / 2;
    std::vector<GateLayer> x_h(s.x_layers.begin(), s.x_layers.begin() + xh);
    std::vector<GateLayer> x_v(s.x_layers.begin() + xh, s.x_layers.end());
    std::vector<GateLayer> z_h(s.z_layers.begin(), s.z_layers.begin() + zh);
    std::vector<GateLayer> z_v(s.z_layers.begin() + zh, s.z_layers.end());

    Circuit c;
    uint32_t x0 = s.n_data, z0 = s.n_data + s.n_x;
    std::vector<int32_t> data(s.n_data), xanc(s.n_x), zanc(s.n_z);
    for (uint32_t i = 0; i < s.n_data; ++i) data[i] = static_cast<int32_t>(i);
    for (uint32_t i = 0; i < s.n_x; ++i) xanc[i] = static_cast<int32_t>(x0 + i);
    for (uint32_t i = 0; i < s.n_z; ++i) zanc[i] = static_cast<int32_t>(z0 + i);
    for (uint32_t q = 0; q < code.n; ++q) c.data_qubits.push_back(q);

    // A pass emits the layers of up to two check types simultaneously; their
    // target sets are disjoint (X gates touch one sector, Z gates the other).
    auto emit_pass = [&](const std::vector<GateLayer>* a, uint32_t a0, bool a_ctrl,
                         const std::vector<GateLayer>* b, uint32_t b0, bool b_ctrl) {
        size_t n_layers = std::max(a ? a->size() : 0, b ? b->size() : 0);
        for (size_t i = 0; i < n_layers; ++i) {
            std::vector<int32_t> pairs;
            auto add = [&](const std::vector<GateLayer>& layers, uint32_t anc0, bool ctrl) {
                if (i >= layers.size()) return;
                for (auto [chk, q] : layers[i].pairs) {
                    int32_t anc = static_cast<int32_t>(anc0 + chk);
                    if (ctrl) {
                        pairs.push_back(anc);
                        pairs.push_back(static_cast<int32_t>(q));
                    } else {
                        pairs.push_back(static_cast<int32_t>(q));
                        pairs.push_back(anc);
                    }
                }
            };
            if (a) add(*a, a0, a_ctrl);
            if (b) add(*b, b0, b_ctrl);
            c.cnot(pairs);
            c.tick();
        }
    };

    std::vector<int64_t> x_rec(s.n_x, -1), z_rec(s.n_z, -1);
    int64_t records = 0;
    auto measure_x_anc = [&]() {
        c.measure_x(xanc);
        int64_t base = records;
        records += s.n_x;
        for (uint32_t i = 0; i < s.n_x; ++i) {
            if (x_rec[i] >= 0)
                c.detector({static_cast<int32_t>(base + i - records), static_cast<int32_t>(x_rec[i] - records)});
            x_rec[i] = base + i;
        }
        c.tick();
    };
    auto measure_z_anc = [&]() {
        c.measure_z(zanc);
        int64_t base = records;
        records += s.n_z;
        for (uint32_t i = 0; i < s.n_z; ++i) {
            if (z_rec[i] >= 0)
                c.detector({static_cast<int32_t>(base + i - records), static_cast<int32_t>(z_rec[i] - records)});
            else
                c.detector({static_cast<int32_t>(base + i - records)});
            z_rec[i] = base + i;
        }
        c.tick();
    };

    c.reset_z(data);
    c.tick();

    // Round 1 runs X horizontal, X vertical, Z vertical as separate passes.
    // Each later round shares passes: old-Z horizontal with new-X horizontal,
    // then new-X vertical with new-Z vertical. A trailing Z horizontal closes
    // round d, for (2d+2) directional passes in total.
    c.mark_cycle();
    c.reset_x(xanc);
    c.tick();
    emit_pass(&x_h, x0, true, nullptr, 0, false);
    emit_pass(&x_v, x0, true, nullptr, 0, false);
    c.reset_z(zanc);
    c.tick();
    emit_pass(&z_v, z0, false, nullptr, 0, false);

    for (uint32_t r = 2; r <= d_rounds; ++r) {
        measure_x_anc();
        c.mark_cycle();
        c.reset_x(xanc);
        c.tick();
        emit_pass(&z_h, z0, false, &x_h, x0, true);
        measure_z_anc();
        c.reset_z(zanc);
        c.tick();
        emit_pass(&x_v, x0, true, &z_v, z0, false);
    }
    measure_x_anc();
    emit_pass(&z_h, z0, false, nullptr, 0, false);
    measure_z_anc();

    c.validate();
    return c;
}

Circuit add_noise(const Circuit& c, double p_gate, double p_idle) {
    if (p_gate < 0 || p_gate > 15.0 / 16.0) throw std::invalid_argument("p_gate out of range [0, 15/16]");
    if (p_idle < 0 || p_idle > 0.75) throw std::invalid_argument("p_idle out of range [0, 0.75]");
    if (p_gate == 0 && p_idle == 0) return c;

    Circuit out;
    out.n_qubits = c.n_qubits;
    out.data_qubits = c.data_qubits;

    size_t i = 0;
    size_t next_cycle = 0;
    size_t detectors_copied = 0;
    while (i < c.instructions.size()) {
        size_t layer_end = i;
        while (layer_end < c.instructions.size() && c.instructions[layer_end].op != Op::Tick) ++layer_end;

        bool entangling = false;
        std::vector<bool> busy(c.n_qubits, false);
        for (size_t j = i; j < layer_end; ++j) {
            const auto& inst = c.instructions[j];
            if (inst.op == Op::Cnot || inst.op == Op::Cz) entangling = true;
            if (inst.op == Op::Detector || inst.op == Op::Observable) continue;
            for (int32_t t : inst.targets) busy[t] = true;
        }

        for (size_t j = i; j <= layer_end && j < c.instructions.size(); ++j) {
            while (next_cycle < c.cycle_starts.size() && c.cycle_starts[next_cycle] == j) {
                out.mark_cycle();
                ++next_cycle;
            }
            const auto& inst = c.instructions[j];
            if ((inst.op == Op::MeasureZ || inst.op == Op::MeasureX) && p_gate > 0) {
                Instruction flip;
                flip.op = Op::FlipMeas;
                flip.param = p_gate;
                out.instructions.push_back(flip);
            }
            if (inst.op == Op::Tick && entangling && p_idle > 0) {
                Instruction idle;
                idle.op = Op::Depol1;
                idle.param = p_idle;
                for (uint32_t q = 0; q < c.n_qubits; ++q)
                    if (!busy[q]) idle.targets.push_back(static_cast<int32_t>(q));
                if (!idle.targets.empty()) out.instructions.push_back(idle);
            }
            out.instructions.push_back(inst);
            if (inst.op == Op::Detector) {
                out.detector_cycle.push_back(c.detector_cycle[detectors_copied++]);
            }
            if ((inst.op == Op::Cnot || inst.op == Op::Cz) && p_gate > 0) {
                Instruction noise;
                noise.op = Op::Depol2;
                noise.param = p_gate;
                noise.targets = inst.targets;
                out.instructions.push_back(noise);
            }
        }
        i = layer_end + 1;
    }
    return out;
}

}  // namespace qforge
