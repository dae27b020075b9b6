#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qforge/motion.hpp"

using namespace qforge;

namespace {

std::vector<uint32_t> compact_positions(uint32_t n) {
    std::vector<uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

// Oracle: the schedule must land every atom on the trap named by its rank.
void check_realizes(const MoveSchedule& s, const std::vector<uint32_t>& order) {
    auto report = validate_schedule(s);
    INFO(report.message, " at layer ", report.layer);
    REQUIRE(report.ok);
    auto fin = s.final_positions();
    for (size_t i = 0; i < order.size(); ++i) REQUIRE(fin[i] == order[i]);
}

}  // namespace

TEST_CASE("identity permutation is a no-op") {
    std::vector<uint32_t> order = {0, 1, 2, 3, 4, 5, 6, 7};
    MoveSchedule s = plan_1d(order, compact_positions(8), 12);
    CHECK(s.layers.size() <= 1);
    check_realizes(s, order);
}

TEST_CASE("full reversal of 8 atoms") {
    std::vector<uint32_t> order = {7, 6, 5, 4, 3, 2, 1, 0};
    MoveSchedule s = plan_1d(order, compact_positions(8), 12);
    CHECK(s.scale_levels == 3);
    check_realizes(s, order);
}

TEST_CASE("exhaustive correctness for N <= 6") {
    for (uint32_t n = 1; n <= 6; ++n) {
        std::vector<uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        do {
            MoveSchedule s = plan_1d(order, compact_positions(n), (3 * n + 1) / 2);
            check_realizes(s, order);
        } while (std::next_permutation(order.begin(), order.end()));
    }
}

TEST_CASE("random permutations up to 256 atoms") {
    Rng rng(97);
    for (int trial = 0; trial < 500; ++trial) {
        uint32_t n = 2 + static_cast<uint32_t>(rng.below(255));
        std::vector<uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order.data(), order.size());
        // Scattered initial positions exercise the top-level compaction.
        uint32_t m = (3 * n + 1) / 2;
        std::vector<uint32_t> traps(m);
        std::iota(traps.begin(), traps.end(), 0);
        rng.shuffle(traps.data(), traps.size());
        std::vector<uint32_t> pos(traps.begin(), traps.begin() + n);
        std::sort(pos.begin(), pos.end());
        MoveSchedule s = plan_1d(order, pos, m);
        check_realizes(s, order);
        CHECK(s.scale_levels <= static_cast<uint32_t>(std::ceil(std::log2(std::max(2u, n)))));
    }
}

TEST_CASE("planner workspace never exceeds the 3N/2 bound") {
    for (uint32_t n = 1; n <= 4096; ++n) CHECK(planner_workspace(n) <= (3 * n + 1) / 2);
}

TEST_CASE("validator flags violations") {
    MoveSchedule s;
    s.n_traps = 6;
    s.initial_positions = {0, 1, 2};
    s.layers = {{{0, 0, 3}, {1, 1, 2}}};  // lands on stationary atom 2
    CHECK(!validate_schedule(s).ok);

    MoveSchedule cross;
    cross.n_traps = 6;
    cross.initial_positions = {0, 1, 2};
    cross.layers = {{{0, 0, 5}, {1, 1, 4}}};  // order inverted
    auto rep = validate_schedule(cross);
    CHECK(!rep.ok);
    CHECK(rep.message.find("crossing") != std::string::npos);

    MoveSchedule dup;
    dup.n_traps = 6;
    dup.initial_positions = {0, 1, 2};
    dup.layers = {{{0, 0, 4}, {1, 1, 4}}};
    CHECK(!validate_schedule(dup).ok);
}

TEST_CASE("move time formula") {
    MotionParams p = paper_motion_params();
    CHECK(move_time_us(0, p) == 0);
    CHECK(move_time_us(500, p) == doctest::Approx(std::sqrt(150000.0)));
    CHECK(move_time_us(100, p) < move_time_us(200, p));
}

TEST_CASE("rearrangement time bound at paper parameters") {
    MotionParams p = paper_motion_params();
    RearrangementTime t = rearrangement_time_bound(100, p);
    CHECK(std::abs(t.transfer_us - 700.0) / 700.0 < 0.05);
    CHECK(std::abs(t.movement_us - 2300.0) / 2300.0 < 0.05);

    RearrangementTime t4 = rearrangement_time_bound(4, p);
    CHECK(t4.transfer_us == doctest::Approx(4 * p.tau_t_us));

    double r = rearrangement_time_bound(400, p).movement_us / rearrangement_time_bound(100, p).movement_us;
    CHECK(r == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("planned schedules stay under the movement bound") {
    MotionParams p = paper_motion_params();
    Rng rng(3);
    for (uint32_t n : {16u, 64u, 128u, 256u}) {
        std::vector<uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order.data(), order.size());
        MoveSchedule s = plan_1d(order, compact_positions(n), (3 * n + 1) / 2);
        REQUIRE(validate_schedule(s).ok);
        double planned = schedule_movement_time_us(s, p);
        double bound = rearrangement_time_bound(n, p).movement_us;
        CHECK(planned <= bound);
    }
}

TEST_CASE("idling rate") {
    MotionParams p = paper_motion_params();
    CHECK(idling_rate(5102, 0.0, p, CodeFamily::Hgp) == 0.0);

    // 5102 data qubits -> about 10000 total -> L near 100 -> p_i near 3.0e-4
    // at p_g = 5e-3.
    double pi = idling_rate(5102, 5e-3, p, CodeFamily::Hgp);
    CHECK(std::abs(pi - 3.0e-4) / 3.0e-4 < 0.05);

    // Movement-dominated scaling: n^(1/4) for HGP, n^(1/2) for LP.
    double h1 = idling_rate(100000, 1e-3, p, CodeFamily::Hgp);
    double h2 = idling_rate(1600000, 1e-3, p, CodeFamily::Hgp);
    CHECK(h2 / h1 == doctest::Approx(2.0).epsilon(0.15));
    double l1 = idling_rate(100000, 1e-3, p, CodeFamily::Lp);
    double l2 = idling_rate(400000, 1e-3, p, CodeFamily::Lp);
    CHECK(l2 / l1 == doctest::Approx(2.0).epsilon(0.15));

    CHECK(rescaled_gate_error(1e-3, 0.0) == 1e-3);
    CHECK(rescaled_gate_error(1e-3, 1e-4) == doctest::Approx(1.3e-3));
}

TEST_CASE("schedules for a coloring bring pairs adjacent") {
    CssCode surf = hgp(repetition_code(3), repetition_code(3));
    EdgeColoring col = bipartite_edge_coloring(repetition_code(3).tanner());
    auto motions = schedule_for_coloring(surf, col, true);
    REQUIRE(motions.size() == 2);
    for (const auto& cm : motions) {
        REQUIRE(!cm.row_schedules.empty());
        size_t layer_count = cm.row_schedules[0].layers.size();
        for (const auto& row : cm.row_schedules) {
            CHECK(row.layers.size() == layer_count);
            REQUIRE(validate_schedule(row).ok);
            CHECK(row.scale_levels <= 3);
        }
        // Applying the row schedule puts each colored pair on adjacent traps.
        auto fin = cm.row_schedules[0].final_positions();
        size_t e = 0;
        for (size_t ei = 0; ei < col.graph.edges.size(); ++ei) {
            if (col.color_of[ei] != cm.color) continue;
            auto [chk, bit] = col.graph.edges[ei];
            uint32_t pb = fin[bit];
            uint32_t pc = fin[3 + chk];  // check sites sit after the 3 bit sites
            CHECK((pb + 1 == pc || pc + 1 == pb));
            ++e;
        }
        CHECK(e == cm.pair_traps.size());
    }
}
