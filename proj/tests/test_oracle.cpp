#include <gtest/gtest.h>

#include <cmath>

#include "mhb/oracle.hpp"
#include "mhb/second_best.hpp"
#include "support/generators.hpp"

using namespace mhb;
using namespace mhb::testing;

namespace {

Distribution d(std::vector<double> p) { return Distribution(std::move(p)); }

ProblemInstance log_example() {
    std::vector<ActionSpec> acts{{"H", 1.0, d({0.25, 0.75}), d({0.25, 0.75})},
                                 {"L", 0.0, d({0.75, 0.25}), d({0.75, 0.25})}};
    return ProblemInstance({1, 6}, acts, 0.0, UtilityModel::log());
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an mhb::Error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Oracle, HomogeneousFirstBest) {
    std::vector<ActionSpec> acts{{"a", 0.5, d({0.3, 0.3, 0.4}), d({0.3, 0.3, 0.4})}};
    const ProblemInstance inst({1, 2, 3}, acts, 0.5, UtilityModel::log());
    const GridSpec grid{0.0, 2.0, 201};
    const auto res = brute_force_min(inst, "a", grid, OracleMode::FirstBest);
    const double target = std::exp(1.0);
    const double cell = cell_variation(inst, "a", {1.0, 1.0, 1.0}, grid.step());
    EXPECT_GE(res.cost, target - 1e-12);
    EXPECT_LE(res.cost, target + cell);
}

TEST(Oracle, LogTwoStateSecondBest) {
    const auto inst = log_example();
    const double exact = 0.25 * std::exp(-0.5) + 0.75 * std::exp(1.5);
    const GridSpec grid{-1.5, 2.5, 200};
    const auto res = brute_force_min(inst, "H", grid, OracleMode::SecondBest);
    const double cell = cell_variation(inst, "H", {-0.5, 1.5}, grid.step());
    EXPECT_NEAR(res.cost, exact, cell);
    EXPECT_GT(res.feasible, 0u);
    EXPECT_GE(res.evaluated, res.feasible);
}

TEST(Oracle, AcceptedPointsAreFeasible) {
    Rng rng(51);
    for (int i = 0; i < 30; ++i) {
        const auto inst = random_two_action_instance(rng, 2 + i % 2, Family::Log);
        const auto sol = solve_second_best(inst, "H");
        const auto grid = grid_around(inst.utility(), sol.utilities, 80);
        const auto res = brute_force_min(inst, "H", grid, OracleMode::SecondBest);
        const auto& h = inst.action("H");
        const auto& l = inst.action("L");
        double ir = 0.0, ic = 0.0;
        for (std::size_t s = 0; s < inst.states(); ++s) {
            ir += h.agent_beliefs[s] * res.utilities[s];
            ic += (h.agent_beliefs[s] - l.agent_beliefs[s]) * res.utilities[s];
        }
        const double k = inst.reservation_utility() + h.cost;
        EXPECT_GE(ir, k - 1e-12);
        EXPECT_LE(ir, k + res.constraint_tol + 1e-12);
        EXPECT_GE(ic, h.cost - l.cost - 1e-12);
        // Feasible for the exact program up to the band, so never far below it.
        EXPECT_GE(res.cost, sol.expected_cost_principal -
                                cell_variation(inst, "H", sol.utilities, grid.step()));
    }
}

TEST(Oracle, RefinementDoesNotRaiseCostBeyondOneCell) {
    const auto inst = log_example();
    const auto coarse = brute_force_min(inst, "H", GridSpec{-1.5, 2.5, 101}, OracleMode::SecondBest);
    const GridSpec fine_grid{-1.5, 2.5, 201};
    const auto fine = brute_force_min(inst, "H", fine_grid, OracleMode::SecondBest);
    EXPECT_LE(fine.cost, coarse.cost + cell_variation(inst, "H", {-0.5, 1.5}, fine_grid.step()));
}

TEST(Oracle, Errors) {
    const auto inst = log_example();
    EXPECT_EQ(code_of([&] { brute_force_min(inst, "H", GridSpec{3.0, 4.0, 50}, OracleMode::SecondBest); }),
              ErrorCode::NoFeasiblePoint);
    EXPECT_EQ(code_of([&] { brute_force_min(inst, "H", GridSpec{1.0, 0.0, 50}, OracleMode::SecondBest); }),
              ErrorCode::InvalidArgument);
    std::vector<ActionSpec> five{{"a", 0.0, d({0.2, 0.2, 0.2, 0.2, 0.2}), d({0.2, 0.2, 0.2, 0.2, 0.2})}};
    const ProblemInstance big({1, 2, 3, 4, 5}, five, 0.0, UtilityModel::log());
    EXPECT_EQ(code_of([&] { brute_force_min(big, "a", GridSpec{-1.0, 1.0, 10}, OracleMode::FirstBest); }),
              ErrorCode::DimensionError);
    const auto cara = ProblemInstance({1, 2}, inst.actions(), -2.0, UtilityModel::cara(1.0));
    EXPECT_EQ(code_of([&] { brute_force_min(cara, "H", GridSpec{-2.0, 0.5, 10}, OracleMode::FirstBest); }),
              ErrorCode::InvalidArgument);
}
