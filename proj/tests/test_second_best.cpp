#include <gtest/gtest.h>

#include <cmath>

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

// Principal much more optimistic about state 1 than the agent: the first-best
// contract is already steep enough to satisfy incentives.
ProblemInstance red_line(double revenue_gap) {
    std::vector<ActionSpec> acts{{"H", 0.2, d({0.7, 0.3}), d({0.4, 0.6})},
                                 {"L", 0.0, d({0.75, 0.25}), d({0.6, 0.4})}};
    return ProblemInstance({1.0, 1.0 + revenue_gap}, acts, 0.0, UtilityModel::log());
}

}  // namespace

TEST(SecondBest, LogTwoStateExample) {
    const auto inst = log_example();
    const auto sol = solve_second_best(inst, "H");
    EXPECT_NEAR(sol.utilities[0], -0.5, 1e-10);
    EXPECT_NEAR(sol.utilities[1], 1.5, 1e-10);
    EXPECT_NEAR(sol.wages[0], std::exp(-0.5), 1e-10);
    EXPECT_NEAR(sol.wages[1], std::exp(1.5), 1e-10);
    ASSERT_EQ(sol.mu.size(), 1u);
    EXPECT_GT(sol.mu[0], 0.0);
    EXPECT_TRUE(sol.ic_binding[0]);
    EXPECT_FALSE(sol.coincides_with_first_best);
    EXPECT_NEAR(recover_ic_multiplier(inst, sol), sol.mu[0], 1e-9);
    EXPECT_TRUE(check_kkt(inst, sol).passed(1e-8));
}

TEST(SecondBest, FirstBestReturnedWhenIncentiveCompatible) {
    const auto inst = red_line(0.1);
    const auto sol = solve_second_best(inst, "H");
    const auto fb = solve_first_best(inst, "H");
    EXPECT_TRUE(sol.coincides_with_first_best);
    EXPECT_EQ(sol.mu[0], 0.0);
    for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(sol.wages[s], fb.wages[s], 1e-12);
    EXPECT_GT(sol.ic_slacks[0], 0.0);
}

TEST(SecondBest, HomogeneousBenchmarkIsIncreasing) {
    Rng rng(21);
    for (int i = 0; i < 60; ++i) {
        auto draw = random_two_action_beliefs(rng, 2 + i % 3);
        draw.principal_high = draw.agent_high;
        draw.principal_low = draw.agent_low;
        const auto inst = make_instance(rng, random_family(rng), draw);
        const auto sol = solve_second_best(inst, "H");
        EXPECT_GT(sol.mu[0], 0.0);
        EXPECT_TRUE(strictly_increasing(sol.wages, 1e-10));
        EXPECT_EQ(monotonicity_report(sol, inst, "H").trend, Trend::Increasing);
    }
}

TEST(SecondBest, CostDominatesFirstBestAndPassesKkt) {
    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        const auto inst = random_two_action_instance(rng, 2 + i % 3);
        SecondBestSolution sol;
        try {
            sol = solve_second_best(inst, "H");
        } catch (const Error& e) {
            // Positive-range families can put the optimum on v_s = 0.
            EXPECT_EQ(e.code(), ErrorCode::KKTDegeneracy) << e.what();
            continue;
        }
        const auto fb = solve_first_best(inst, "H");
        EXPECT_GE(sol.expected_cost_principal, fb.expected_cost_principal - 1e-10);
        if (sol.coincides_with_first_best) {
            EXPECT_NEAR(sol.expected_cost_principal, fb.expected_cost_principal, 1e-10);
        } else {
            EXPECT_GT(sol.expected_cost_principal, fb.expected_cost_principal);
        }
        EXPECT_TRUE(check_kkt(inst, sol).passed(1e-8));
    }
}

TEST(SecondBest, TwoStateBindingContractIgnoresSmallPrincipalTilts) {
    const auto inst = log_example();
    const auto base = solve_second_best(inst, "H");
    const auto& h = inst.action("H");
    for (double eps : {1e-3, -1e-3}) {
        const auto tilted = eps > 0 ? h.principal_beliefs.shifted(0, 1, eps)
                                    : h.principal_beliefs.shifted(1, 0, -eps);
        const auto sol = solve_second_best(inst.with_beliefs(0, tilted, h.agent_beliefs), "H");
        for (std::size_t s = 0; s < 2; ++s) EXPECT_NEAR(sol.wages[s], base.wages[s], 1e-8);
    }
}

TEST(SecondBest, IndependentOfPrincipalBeliefsAboutOtherAction) {
    Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        const auto inst = random_two_action_instance(rng, 3, Family::Cara);
        const auto base = solve_second_best(inst, "H");
        const auto& l = inst.action("L");
        const auto other = inst.with_beliefs(1, random_distribution(rng, 3), l.agent_beliefs);
        const auto sol = solve_second_best(other, "H");
        EXPECT_EQ(sol.wages, base.wages);
    }
}

TEST(SecondBest, AgentMoreOptimisticGivesIncreasingWages) {
    Rng rng(24);
    for (int i = 0; i < 60; ++i) {
        auto draw = random_two_action_beliefs(rng, 2 + i % 3);
        draw.principal_high = mlrp_below(rng, draw.agent_high);
        const auto inst = make_instance(rng, random_family(rng), draw);
        SecondBestSolution sol;
        try {
            sol = solve_second_best(inst, "H");
        } catch (const Error&) {
            continue;
        }
        const auto rep = monotonicity_report(sol, inst, "H");
        EXPECT_TRUE(rep.agent_dominates_principal_strict);
        ASSERT_TRUE(rep.asserted.has_value());
        EXPECT_EQ(rep.trend, Trend::Increasing);
        EXPECT_TRUE(rep.consistent);
    }
}

TEST(SecondBest, PrincipalMoreOptimisticCanBeNonMonotone) {
    Rng rng(25);
    bool found = false;
    for (int i = 0; i < 2000 && !found; ++i) {
        auto draw = random_two_action_beliefs(rng, 3);
        draw.principal_high = mlrp_above(rng, draw.agent_high, 0.5, 3.0);
        const auto inst = make_instance(rng, Family::Log, draw);
        SecondBestSolution sol;
        try {
            sol = solve_second_best(inst, "H");
        } catch (const Error&) {
            continue;
        }
        const auto rep = monotonicity_report(sol, inst, "H");
        EXPECT_TRUE(rep.consistent);
        EXPECT_FALSE(rep.asserted.has_value());
        found = rep.trend == Trend::NonMonotone;
    }
    EXPECT_TRUE(found);
}

TEST(SecondBest, PrincipalPayoffTrend) {
    const auto inst = log_example();
    auto sol = solve_second_best(inst, "H");
    sol.wages = {1.0, 1.0};
    EXPECT_EQ(principal_payoff_monotonicity(sol, inst), Trend::Increasing);
    sol.wages = {1.0, 3.0};
    EXPECT_EQ(principal_payoff_monotonicity(sol, inst), Trend::Increasing);

    // Steep pay in the top state with a small output step.
    const auto tight = red_line(0.1);
    auto s2 = solve_second_best(tight, "H");
    EXPECT_GT(s2.wages[1] - s2.wages[0], 0.1);
    EXPECT_EQ(principal_payoff_monotonicity(s2, tight), Trend::Decreasing);
}

TEST(ChooseAction, Examples) {
    const auto steep = log_example();
    std::vector<ActionSpec> acts = steep.actions();
    const ProblemInstance big({1.0, 500.0}, acts, 0.0, UtilityModel::log());
    EXPECT_EQ(choose_action(big).chosen, "H");

    // Outputs must be strictly increasing, so "identical" means a negligible step.
    const ProblemInstance flat({2.0, 2.0 + 1e-9}, acts, 0.0, UtilityModel::log());
    EXPECT_EQ(choose_action(flat).chosen, "L");

    const auto red = choose_action(red_line(0.1));
    EXPECT_EQ(red.chosen, "L");
    for (const auto& a : red.actions) EXPECT_TRUE(a.coincides_with_first_best);
    EXPECT_EQ(red.chosen, red.first_best_choice);
    ASSERT_TRUE(red.low_action_necessary_condition.has_value());
}

TEST(ChooseAction, ThreeActions) {
    std::vector<ActionSpec> acts{{"low", 0.0, d({0.5, 0.3, 0.2}), d({0.5, 0.3, 0.2})},
                                 {"mid", 0.1, d({0.3, 0.4, 0.3}), d({0.3, 0.35, 0.35})},
                                 {"high", 0.25, d({0.2, 0.3, 0.5}), d({0.15, 0.3, 0.55})}};
    const ProblemInstance inst({0, 2, 5}, acts, 1.0, UtilityModel::sqrt());
    const auto choice = choose_action(inst);
    ASSERT_EQ(choice.actions.size(), 3u);
    for (const auto& a : choice.actions) EXPECT_GE(a.second_best_cost, a.first_best_cost - 1e-10);
    const auto sol = solve_second_best(inst, "high");
    EXPECT_EQ(sol.mu.size(), 2u);
    EXPECT_TRUE(check_kkt(inst, sol).passed(1e-8));
}

TEST(SecondBest, RejectsSingleAction) {
    std::vector<ActionSpec> acts{{"a", 0.0, d({0.5, 0.5}), d({0.5, 0.5})}};
    const ProblemInstance inst({1, 2}, acts, 0.0, UtilityModel::log());
    EXPECT_THROW(solve_second_best(inst, "a"), Error);
}

TEST(FigureData, HomogeneousContractAtIntersection) {
    const auto inst = log_example();
    const auto fig = figure_data(inst, 11);
    ASSERT_TRUE(fig.corner_exists);
    EXPECT_TRUE(fig.ic_binding);
    EXPECT_NEAR(fig.contract_w1, fig.corner_w1, 1e-9);
    EXPECT_NEAR(fig.contract_w2, fig.corner_w2, 1e-9);
    ASSERT_EQ(fig.curves.size(), 4u);
    for (const auto& c : fig.curves) EXPECT_EQ(c.w1.size(), 11u);
}

TEST(FigureData, RedLineContractOffTheIntersection) {
    const auto inst = red_line(0.1);
    const auto fig = figure_data(inst, 21);
    EXPECT_FALSE(fig.ic_binding);
    ASSERT_TRUE(fig.corner_exists);
    EXPECT_GT(std::hypot(fig.contract_w1 - fig.corner_w1, fig.contract_w2 - fig.corner_w2), 1e-3);
    // On the high action's indifference curve.
    const auto& u = inst.utility();
    const auto& h = inst.action("H");
    EXPECT_NEAR(h.agent_beliefs[0] * u.value(fig.contract_w1) + h.agent_beliefs[1] * u.value(fig.contract_w2),
                inst.reservation_utility() + h.cost, 1e-9);
}

TEST(FigureData, GridOfTwoGivesEndpoints) {
    const auto fig = figure_data(log_example(), 2);
    for (const auto& c : fig.curves) {
        ASSERT_EQ(c.w1.size(), 2u);
        EXPECT_LT(c.w1[0], c.w1[1]);
    }
    EXPECT_THROW(figure_data(log_example(), 1), Error);
}
