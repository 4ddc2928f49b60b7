#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mhb/belief.hpp"
#include "mhb/problem.hpp"
#include "mhb/trend.hpp"

namespace mhb {

/// Two actions, three states, u(w) = -exp(-w).
///
/// `ubar` absorbs the low action's cost (ubar = reservation + c(L)) and
/// `cost` is the gap c(H) - c(L), so the system reads with c(L) = 0.
/// Other risk aversions enter through `r`: with x' = r x utilities are
/// unchanged, so the algebra runs at r = 1 and wages are divided by r on
/// the way out.
class CaraSystem {
public:
    CaraSystem(Distribution pi_high, Distribution pi_low, Distribution principal_high,
               double cost, double ubar, double r = 1.0);

    /// Reads a validated 3-state, two-action CARA instance.
    static CaraSystem from_instance(const ProblemInstance& inst, const std::string& high,
                                    const std::string& low);

    const Distribution& pi_high() const noexcept { return pi_h_; }
    const Distribution& pi_low() const noexcept { return pi_l_; }
    const Distribution& principal_high() const noexcept { return pp_; }
    double cost() const noexcept { return cost_; }
    double ubar() const noexcept { return ubar_; }
    double r() const noexcept { return r_; }

    const DeltaVector& delta() const noexcept { return delta_; }
    double kappa21() const noexcept { return k21_; }
    double kappa31() const noexcept { return k31_; }
    double kappa32() const noexcept { return k32_; }
    double gamma2() const noexcept { return gamma2_; }
    /// -Delta_3 ubar + c pi_3(L) and -Delta_2 ubar + c pi_2(L).
    double d3() const noexcept { return d3_; }
    double d2() const noexcept { return d2_; }

    /// Open interval of normalized w_1 on which both w_2(w_1) and w_3(w_1)
    /// exist; the upper end is +inf when d2 <= 0.
    std::pair<double, double> branch() const;

    CaraSystem with_principal(Distribution principal_high) const;

private:
    Distribution pi_h_, pi_l_, pp_;
    double cost_, ubar_, r_;
    DeltaVector delta_;
    double k21_ = 0, k31_ = 0, k32_ = 0, gamma2_ = 0, d3_ = 0, d2_ = 0;
};

// The following work in normalized units (r = 1).

/// From the participation and incentive rows with w_3 eliminated.
double w2_from_w1(const CaraSystem& sys, double w1);
/// From the same rows with w_2 eliminated.
double w3_from_w1(const CaraSystem& sys, double w1);

/// Scalar condition left after eliminating lambda and mu from the three
/// first-order conditions; strictly decreasing in w_1 on the branch.
double w1_condition(const CaraSystem& sys, double w1);

/// Root of w1_condition on the branch by bisection.
double solve_w1(const CaraSystem& sys, double tol = 1e-12);

struct CaraMultipliers {
    double lambda;
    double mu;
};

/// lambda = sum_s pi^P_s e^{w_s}, mu = (pi^P_1 e^{w_1} - lambda pi_1(H)) / Delta_1.
/// Throws NegativeMu when mu < -tol: incentives are slack at these beliefs.
CaraMultipliers multipliers(const CaraSystem& sys, const std::array<double, 3>& wages,
                            double tol = 1e-9);

struct CaraResiduals {
    std::array<double, 3> foc;  // pi^P_s - (lambda pi_s + mu Delta_s) e^{-w_s}
    double ir;
    double ic;
    double max_abs() const;
};

CaraResiduals cara_residuals(const CaraSystem& sys, const std::array<double, 3>& wages,
                             const CaraMultipliers& m);

/// Closed-form second-best contract, in the system's original money units.
struct CaraSolution {
    std::array<double, 3> wages;
    double lambda;
    double mu;
    CaraResiduals residuals;  // evaluated in normalized units
};

CaraSolution solve_cara(const CaraSystem& sys, double tol = 1e-9);

struct CaraSweepRow {
    double eps;
    std::optional<CaraSolution> solution;
    std::string error;  // set when the row failed
    double variance_agent = 0.0;
    double variance_principal = 0.0;
};

struct CaraSweep {
    std::size_t s = 0, s_prime = 0;
    std::vector<CaraSweepRow> rows;
    /// w_s path non-increasing and w_s' non-decreasing, each with a strict
    /// step when the grid has more than one point.
    bool direction_holds = false;
    Trend trend_s = Trend::Flat;
    Trend trend_s_prime = Trend::Flat;
    /// Direction of the remaining wage; reported, not asserted.
    Trend trend_other = Trend::Flat;
};

/// Re-solves at principal beliefs (pi^P_s + eps, pi^P_s' - eps), 0-based.
CaraSweep cara_compstat(const CaraSystem& sys, std::size_t s, std::size_t s_prime,
                        const std::vector<double>& eps_grid, double trend_tol = 1e-9);

}  // namespace mhb
