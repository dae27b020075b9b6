#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qforge/circuit.hpp"

using namespace qforge;

namespace {

CssCode surface13() { return hgp(repetition_code(3), repetition_code(3)); }

CssCode hgp34(uint64_t seed) {
    ClassicalCode c = classical_code_from_graph(random_biregular_tanner(16, 3, 4, 6, seed));
    return hgp(c, c);
}

}  // namespace

TEST_CASE("bipartite edge coloring") {
    TannerGraph rep3 = repetition_code(3).tanner();
    EdgeColoring col = bipartite_edge_coloring(rep3);
    CHECK(col.n_colors == 2);
    col.check_proper();

    TannerGraph big = random_biregular_tanner(16, 3, 4, 6, 31);
    EdgeColoring col4 = bipartite_edge_coloring(big);
    CHECK(col4.n_colors == 4);
    col4.check_proper();

    for (uint64_t seed : {1, 2, 3, 4, 5}) {
        TannerGraph g = random_biregular_tanner(20, 3, 4, 6, seed);
        bipartite_edge_coloring(g).check_proper();
    }
}

TEST_CASE("product coloration depth") {
    CssCode surf = surface13();
    Circuit round = product_coloration_circuit(
        surf, bipartite_edge_coloring(repetition_code(3).tanner()),
        bipartite_edge_coloring(repetition_code(3).tanner()));
    CHECK(round.entangling_depth() == 8);  // 4 * Delta_C with Delta_C = 2

    CssCode q = hgp34(12);
    ClassicalCode f1, f2;
    f1.h = q.hgp_structure->h1;
    f2.h = q.hgp_structure->h2;
    Circuit big = product_coloration_circuit(q, bipartite_edge_coloring(f2.tanner()),
                                             bipartite_edge_coloring(f1.tanner()));
    CHECK(big.entangling_depth() == 16);

    Circuit czh = product_coloration_circuit(q, bipartite_edge_coloring(f2.tanner()),
                                             bipartite_edge_coloring(f1.tanner()), GateBasis::CzH);
    CHECK(czh.entangling_depth() == 16);
}

TEST_CASE("lp syndrome circuit depth") {
    CssCode lp = builtin_lp_code(544);
    Circuit round = lp_syndrome_circuit(lp);
    CHECK(round.entangling_depth() == 20);

    // Every check is touched by exactly its weight in entangling gates.
    std::vector<uint32_t> gate_count(round.n_qubits, 0);
    for (const auto& inst : round.instructions)
        if (inst.op == Op::Cnot)
            for (int32_t t : inst.targets) gate_count[t]++;
    for (size_t r = 0; r < lp.hx.rows(); ++r) CHECK(gate_count[lp.n + r] == lp.hx.row_weight(r));
    for (size_t r = 0; r < lp.hz.rows(); ++r)
        CHECK(gate_count[lp.n + lp.hx.rows() + r] == lp.hz.row_weight(r));
}

TEST_CASE("pipelined depth formula") {
    CssCode surf = surface13();
    CHECK(pipelined_circuit(surf, 1).entangling_depth() == 4 * 2);
    CHECK(pipelined_circuit(surf, 3).entangling_depth() == (2 * 3 + 2) * 2);

    CssCode q = hgp34(21);
    CHECK(pipelined_circuit(q, 3).entangling_depth() == (2 * 3 + 2) * 4);
    CHECK(pipelined_circuit(q, 1).entangling_depth() == 4 * 4);
}

TEST_CASE("memory experiment structure") {
    CssCode surf = surface13();
    Circuit mem = memory_experiment(surf, 3, MemBasis::Z);
    // m * checks + final Z checks, minus suppressed first-round X detectors.
    CHECK(mem.n_detectors() == 3 * 12 + 6 - 6);
    CHECK(mem.n_observables() == 1);
    CHECK(mem.n_cycles() == 4);
    mem.validate();

    Circuit memx = memory_experiment(surf, 2, MemBasis::X);
    CHECK(memx.n_detectors() == 2 * 12 + 6 - 6);
}

TEST_CASE("round ordering validity") {
    // Within one round every ancilla touches each of its data qubits once.
    CssCode q = hgp34(5);
    Circuit round = syndrome_schedule(q).n_x ? Circuit{} : Circuit{};
    round = memory_experiment(q, 1, MemBasis::Z);
    round.validate();
    std::vector<std::vector<int32_t>> touched(round.n_qubits);
    for (const auto& inst : round.instructions)
        if (inst.op == Op::Cnot)
            for (size_t t = 0; t + 1 < inst.targets.size(); t += 2) {
                int32_t a = inst.targets[t], b = inst.targets[t + 1];
                int32_t anc = static_cast<uint32_t>(a) >= q.n ? a : b;
                int32_t data = anc == a ? b : a;
                touched[anc].push_back(data);
            }
    for (uint32_t chk = 0; chk < q.hx.rows(); ++chk) {
        auto& v = touched[q.n + chk];
        std::sort(v.begin(), v.end());
        CHECK(std::adjacent_find(v.begin(), v.end()) == v.end());
        CHECK(v.size() == q.hx.row_weight(chk));
    }
}

TEST_CASE("add noise") {
    CssCode surf = surface13();
    Circuit mem = memory_experiment(surf, 2, MemBasis::Z);

    Circuit same = add_noise(mem, 0.0, 0.0);
    CHECK(same.instructions.size() == mem.instructions.size());

    Circuit noisy = add_noise(mem, 1e-3, 0.0);
    size_t gates = 0, depol2 = 0, flips = 0, measures = 0;
    for (const auto& inst : noisy.instructions) {
        if (inst.op == Op::Cnot) gates += inst.targets.size() / 2;
        if (inst.op == Op::Depol2) depol2 += inst.targets.size() / 2;
        if (inst.op == Op::FlipMeas) flips++;
        if (inst.op == Op::MeasureZ || inst.op == Op::MeasureX) measures++;
    }
    CHECK(depol2 == gates);
    CHECK(flips == measures);
    CHECK(noisy.n_detectors() == mem.n_detectors());
    noisy.validate();

    Circuit idling = add_noise(mem, 1e-3, 1e-4);
    // Idle annotations cover exactly the complement of each entangling layer.
    size_t i = 0;
    auto& insts = idling.instructions;
    while (i < insts.size()) {
        size_t end = i;
        bool entangling = false;
        std::vector<bool> busy(idling.n_qubits, false);
        std::vector<bool> idle(idling.n_qubits, false);
        bool has_idle = false;
        while (end < insts.size() && insts[end].op != Op::Tick) {
            if (insts[end].op == Op::Cnot || insts[end].op == Op::Cz) {
                entangling = true;
                for (int32_t t : insts[end].targets) busy[t] = true;
            }
            if (insts[end].op == Op::Depol1) {
                has_idle = true;
                for (int32_t t : insts[end].targets) idle[t] = true;
            }
            ++end;
        }
        if (entangling) {
            REQUIRE(has_idle);
            for (uint32_t q = 0; q < idling.n_qubits; ++q) CHECK(idle[q] == !busy[q]);
        }
        i = end + 1;
    }

    CHECK_THROWS_AS(add_noise(mem, 0.95, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(add_noise(mem, 0.0, 0.8), std::invalid_argument);
}

TEST_CASE("entangling depth basics") {
    Circuit empty;
    CHECK(empty.entangling_depth() == 0);

    Circuit a;
    a.cnot({0, 1});
    a.tick();
    a.cnot({2, 3});
    a.tick();
    Circuit b;
    b.cz({0, 2});
    b.tick();
    uint32_t da = a.entangling_depth(), db = b.entangling_depth();
    a.append(b);
    CHECK(a.entangling_depth() == da + db);
}

TEST_CASE("text round trip") {
    CssCode surf = surface13();
    Circuit mem = add_noise(memory_experiment(surf, 2, MemBasis::Z), 1e-3, 1e-4);
    std::string text = mem.to_text();
    Circuit parsed = Circuit::from_text(text);
    REQUIRE(parsed.instructions.size() == mem.instructions.size());
    for (size_t i = 0; i < mem.instructions.size(); ++i) {
        CHECK(parsed.instructions[i].op == mem.instructions[i].op);
        CHECK(parsed.instructions[i].targets == mem.instructions[i].targets);
        CHECK(parsed.instructions[i].param == doctest::Approx(mem.instructions[i].param));
    }
    CHECK(parsed.cycle_starts == mem.cycle_starts);
    CHECK(parsed.detector_cycle == mem.detector_cycle);
    CHECK(parsed.data_qubits == mem.data_qubits);
}
