#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mhb/first_best.hpp"
#include "mhb/problem.hpp"
#include "mhb/promised_utility.hpp"
#include "mhb/trend.hpp"

namespace mhb {

/// Incentive constraints count as satisfied at slack >= -kIcSlackTol.
inline constexpr double kIcSlackTol = 1e-9;

/// Optimal contract implementing `target` when the action is hidden.
struct SecondBestSolution {
    std::string target;
    std::vector<double> wages;
    std::vector<double> utilities;  // v_s = u(w_s)
    double lambda = 0.0;
    /// One entry per non-target action, in instance order.
    std::vector<std::string> ic_actions;
    std::vector<double> mu;
    std::vector<double> ic_slacks;
    std::vector<bool> ic_binding;
    /// Multipliers of wage-box rows, (lower, upper) per state; empty without a box.
    std::vector<double> box_lower_multipliers;
    std::vector<double> box_upper_multipliers;
    double ir_residual = 0.0;
    double expected_cost_principal = 0.0;
    bool coincides_with_first_best = false;
    /// pi^P_s - (lambda pi^A_s + sum_a' mu_a' [pi^A_s - pi^A_s(a')]) u'(w_s), box terms included.
    std::vector<double> foc_residuals;
    double tol = kDefaultTol;
};

/// Stage 1 tries the first-best contract; if every incentive constraint
/// holds it is optimal (mu = 0). Otherwise the promised-utility program
/// (v_s = u(w_s), linear constraints, convex cost) is solved with an
/// active set over the incentive constraints.
SecondBestSolution solve_second_best(const ProblemInstance& inst, const std::string& target,
                                     double tol = kDefaultTol);

/// The v-space program for `target`: participation as an equality,
/// one incentive row per other action, and wage-box rows when present.
PromisedUtilityProgram second_best_program(const ProblemInstance& inst, std::size_t target);

struct KktReport {
    double stationarity = 0.0;          // max_s |FOC residual|
    double primal_feasibility = 0.0;    // max(|IR residual|, max(-slack, 0))
    double dual_feasibility = 0.0;      // max(-lambda, -mu, 0)
    double complementary_slackness = 0.0;  // max |mu * slack|
    bool interior = true;               // every coefficient lambda pi + mu Delta > 0
    bool passed(double tol) const {
        return interior && stationarity <= tol && primal_feasibility <= tol &&
               dual_feasibility <= tol && complementary_slackness <= tol;
    }
};

/// Recomputes the optimality conditions from instance data alone.
KktReport check_kkt(const ProblemInstance& inst, const SecondBestSolution& sol);

/// Two-action IC multiplier read off the first-order condition at the state
/// with the largest |Delta_s|, given lambda.
double recover_ic_multiplier(const ProblemInstance& inst, const SecondBestSolution& sol);

struct ActionReport {
    std::string action;
    double revenue = 0.0;  // sum_s pi^P_s(a) y_s
    double second_best_cost = 0.0;
    double first_best_cost = 0.0;
    double profit = 0.0;
    double first_best_profit = 0.0;
    bool coincides_with_first_best = false;
};

struct ActionChoice {
    std::string chosen;
    std::string first_best_choice;
    std::vector<ActionReport> actions;
    /// For the costliest action H against each cheaper L:
    /// C^FB(H; pi^P(H)) > C^FB(L; pi^P(L)), a necessary condition for L to win
    /// when incentives are slack. Empty for single-action instances.
    std::optional<bool> low_action_necessary_condition;
};

/// Picks the action maximizing expected revenue minus second-best cost
/// (principal beliefs); ties go to the cheaper action.
ActionChoice choose_action(const ProblemInstance& inst, double tol = kDefaultTol);

struct SecondBestMonotonicity {
    Trend trend = Trend::Flat;
    bool agent_dominates_principal = false;      // pi^A(H) >=MLRP pi^P(H)
    bool agent_dominates_principal_strict = false;
    bool principal_dominates_agent = false;      // pi^P(H) >=MLRP pi^A(H)
    bool high_dominates_low = false;             // pi^A(H) >=MLRP pi^A(L)
    /// Increasing is asserted only when the agent dominates the principal.
    std::optional<Trend> asserted;
    bool consistent = true;
};

SecondBestMonotonicity monotonicity_report(const SecondBestSolution& sol,
                                           const ProblemInstance& inst,
                                           const std::string& target,
                                           double tol = kFlatWageTol);

/// Trend of the principal's ex-post payoff y_s - w_s across states.
Trend principal_payoff_monotonicity(const SecondBestSolution& sol, const ProblemInstance& inst,
                                    double tol = kFlatWageTol);

/// Geometry of the two-state, two-action picture in wage space (w_1, w_2).
struct FigureBundle {
    struct Curve {
        std::string name;
        std::vector<double> w1;
        std::vector<double> w2;
    };
    std::vector<Curve> curves;
    double corner_w1 = 0.0, corner_w2 = 0.0;      // both indifference curves meet
    double contract_w1 = 0.0, contract_w2 = 0.0;  // solved second-best point
    bool corner_exists = false;
    bool ic_binding = false;
};

/// Samples `grid` points on each curve: indifference curves of both actions
/// through their certainty equivalents, the principal's iso-cost line through
/// the contract, and the 45-degree line.
FigureBundle figure_data(const ProblemInstance& inst, std::size_t grid,
                         const std::string& target = {}, double tol = kDefaultTol);

}  // namespace mhb
