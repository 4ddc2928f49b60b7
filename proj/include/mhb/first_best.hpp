#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mhb/belief.hpp"
#include "mhb/problem.hpp"
#include "mhb/trend.hpp"
#include "mhb/utility.hpp"

namespace mhb {

inline constexpr double kDefaultTol = 1e-9;
/// Adjacent wage differences below this are treated as flat.
inline constexpr double kFlatWageTol = 1e-8;

/// Optimal contract when the action is contractible: pure risk sharing
/// between a risk-neutral principal and the agent, under their own beliefs.
struct FirstBestSolution {
    std::vector<double> wages;
    double lambda = 0.0;
    double expected_cost_principal = 0.0;     // sum_s pi^P_s w_s
    double expected_cost_agent_beliefs = 0.0;  // sum_s pi^A_s w_s
    double constant_wage = 0.0;                // h(ubar + c(a))
    double ir_residual = 0.0;
    /// (pi^P_s - lambda pi^A_s u'(w_s)) / pi^P_s
    std::vector<double> foc_residuals;
};

/// Solves on raw data: for a multiplier lambda the first-order condition
/// gives w_s = (u')^-1(pi^P_s / (lambda pi^A_s)); lambda is then bracketed
/// and bisected on the (increasing) participation residual, and polished
/// with Newton steps.
FirstBestSolution solve_first_best(const Distribution& principal, const Distribution& agent,
                                   double cost, double reservation_utility,
                                   const UtilityModel& utility, double tol = kDefaultTol);

FirstBestSolution solve_first_best(const ProblemInstance& inst, const std::string& action,
                                   double tol = kDefaultTol);

struct MonotonicityVerdict {
    Trend trend = Trend::Flat;
    /// The ordering premise implies a direction (principal dominates ->
    /// decreasing, agent dominates -> increasing).
    std::optional<Trend> implied;
    bool consistent = true;
};

/// `order` compares principal (f) with agent (g) beliefs for the action.
MonotonicityVerdict classify_monotonicity(const FirstBestSolution& sol, MlrpOrder order,
                                          double tol = kFlatWageTol);

struct FirstBestShiftReport {
    FirstBestSolution base;
    FirstBestSolution perturbed;
    std::size_t s = 0;
    std::size_t s_prime = 0;
    double eps = 0.0;
    /// w_s <= w~_s
    bool own_state_weakly_lower = false;
    /// w_t >= w~_t for every t != s
    bool others_weakly_higher = false;
    std::size_t strict_count = 0;
    /// Full pattern: both of the above and at least two strict.
    bool full_pattern = false;
    /// Pairwise pattern: w_s <= w~_s and w_s' >= w~_s'.
    bool pair_pattern = false;
    double lambda_change = 0.0;  // lambda~ - lambda
};

/// Compares the contract at pi^P (which carries the extra eps on state s)
/// with the one at pi~^P = (pi_s - eps, pi_s' + eps). Indices are 0-based.
FirstBestShiftReport first_best_compstat(const ProblemInstance& inst, const std::string& action,
                                         std::size_t s, std::size_t s_prime, double eps,
                                         double tol = kDefaultTol);

}  // namespace mhb
