#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mhb/utility.hpp"

namespace mhb {

/// One linear constraint on promised utilities: coef . v (>= or ==) rhs.
struct LinearConstraint {
    std::vector<double> coef;
    double rhs = 0.0;
    bool equality = false;
    std::string label;
};

/// min sum_s weight_s h(v_s) subject to linear constraints on v, where
/// h = u^-1. Costs are convex in v and the constraints linear, which is
/// what makes the wage problem tractable after the change of variables.
struct PromisedUtilityProgram {
    std::vector<double> weights;  // principal probabilities, all > 0
    std::vector<LinearConstraint> constraints;
};

struct ProgramOptions {
    /// Constraint residual target of the Newton iteration (utils).
    double residual_tol = 1e-13;
    /// Inequalities count as satisfied at slack >= -slack_tol.
    double slack_tol = 1e-9;
    /// Multipliers of active inequalities may dip to -multiplier_tol.
    double multiplier_tol = 1e-10;
    int max_newton_iterations = 200;
    int max_active_set_iterations = 64;
};

struct ProgramSolution {
    std::vector<double> utilities;    // v_s
    std::vector<double> wages;        // h(v_s)
    std::vector<double> multipliers;  // one per constraint, 0 when inactive
    std::vector<double> slacks;       // coef . v - rhs
    std::vector<bool> active;
    double cost = 0.0;  // sum_s weight_s w_s
    int newton_iterations = 0;
    int active_set_iterations = 0;
};

/// Solves the program with an active-set loop over the inequality rows.
/// Each working set is an equality-constrained problem handled by Newton's
/// method on the multipliers: for given multipliers nu the stationarity
/// condition weight_s = (A^T nu)_s u'(w_s) pins every wage in closed form,
/// and Newton drives A v(nu) = b. Equalities are always in the working set.
///
/// `warm_multipliers`, when non-empty, must have one entry per constraint;
/// positive entries seed both the working set and the Newton start.
///
/// Errors: Infeasible, KKTDegeneracy (some coefficient (A^T nu)_s collapses
/// to zero, i.e. the optimum sits on the edge of the utility domain),
/// NegativeMultiplier (active set exhausted), InvalidArgument.
ProgramSolution solve_program(const PromisedUtilityProgram& program, const UtilityModel& utility,
                              const ProgramOptions& options = {},
                              std::span<const double> warm_multipliers = {});

/// Wage implied by the stationarity condition for coefficient `coef` > 0.
double stationary_wage(const UtilityModel& utility, double weight, double coef);

}  // namespace mhb
