#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mhb/problem.hpp"
#include "mhb/trend.hpp"

namespace mhb {

enum class Party { Principal, Agent };
enum class SolverKind { FirstBest, SecondBest };

/// Wage movements below this per grid step count as flat.
inline constexpr double kVerdictTol = 1e-9;

/// Moves eps of probability onto state s from state s_prime in one belief
/// vector of one action. Negative eps moves mass the other way.
struct BeliefTilt {
    Party party = Party::Principal;
    std::string which_action;
    std::size_t s = 0;
    std::size_t s_prime = 0;
};

/// Throws EpsilonTooLarge unless the tilted vector stays in the open simplex.
ProblemInstance apply_tilt(const ProblemInstance& inst, const BeliefTilt& tilt, double eps);

struct SweepResult {
    std::vector<double> eps_values;
    std::vector<std::vector<double>> wage_paths;  // [row][state]; NaN on failed rows
    std::vector<double> lambda_path;
    std::vector<double> mu_path;  // first incentive multiplier; 0 for first best
    std::vector<double> power_path;            // wage variance, agent beliefs (target)
    std::vector<double> power_principal_path;  // wage variance, principal beliefs (target)
    std::vector<double> cost_path;             // principal's expected wage bill
    std::vector<bool> coincides_with_first_best;
    std::vector<bool> failed;
    std::vector<std::string> errors;
    std::vector<Trend> verdicts;  // per state, failed rows skipped
    /// Grid values at which coincides_with_first_best differs from the previous row.
    std::vector<double> regime_changes;
};

/// Re-solves `target` for each eps of the grid. Row failures are recorded,
/// not thrown; an eps leaving the simplex throws EpsilonTooLarge up front.
SweepResult sweep(const ProblemInstance& inst, const std::string& target, const BeliefTilt& tilt,
                  const std::vector<double>& eps_grid, SolverKind solver, double tol = 1e-9);

struct RegimeChange {
    double eps_star = 0.0;
    double lo = 0.0;  // bracket after bisection
    double hi = 0.0;
    bool coincides_at_lo = false;
    bool coincides_at_hi = false;
};

/// Bisection on eps in [eps_lo, eps_hi] for the point where the
/// second-best contract starts or stops coinciding with the first best.
/// Throws NoFlipInRange when both ends agree.
RegimeChange detect_regime_change(const ProblemInstance& inst, const std::string& target,
                                  const BeliefTilt& tilt, double eps_lo, double eps_hi,
                                  double eps_tol = 1e-7, double tol = 1e-9);

}  // namespace mhb
