#pragma once

#include <array>
#include <string>
#include <vector>

#include "mhb/belief.hpp"
#include "mhb/problem.hpp"
#include "mhb/second_best.hpp"

namespace mhb {

/// Four-outcome, two-action problem split on the top spread
/// m = u(w_4) - u(w_3): an inner three-wage problem at fixed m and an outer
/// scalar search over m.
class SpreadProblem {
public:
    SpreadProblem(ProblemInstance base, std::string high, std::string low);

    const ProblemInstance& base() const noexcept { return base_; }
    /// Three-state instance with states 3 and 4 lumped for every belief.
    const ProblemInstance& reduced() const noexcept { return reduced_; }
    const std::string& high() const noexcept { return high_; }
    const std::string& low() const noexcept { return low_; }

    const Distribution& agent_high() const { return base_.action(high_).agent_beliefs; }
    const Distribution& agent_low() const { return base_.action(low_).agent_beliefs; }
    const Distribution& principal_high() const { return base_.action(high_).principal_beliefs; }

    /// The top state carries no probability for anyone; m is then irrelevant.
    bool degenerate() const noexcept { return degenerate_; }
    /// agent_high >=MLRP principal_high >=MLRP agent_low.
    bool appendix_ordering() const;

private:
    ProblemInstance base_;
    ProblemInstance reduced_;
    std::string high_, low_;
    bool degenerate_ = false;
};

/// M(m) = h(u(w_3) + m) - w_3, the extra wage buying spread m on top of w_3.
double payment_gap(const UtilityModel& u, double w3, double m);

enum class InnerMode {
    /// Minimizes delta'.w over all four wages with v_4 - v_3 = m imposed,
    /// so the gap payment delta'_4 M is priced inside. Exact decomposition.
    Coupled,
    /// Minimizes delta.w over three wages with the spread terms moved to the
    /// right-hand sides; M is added afterwards at the resulting w_3.
    Reduced,
};

struct InnerSolution {
    double m = 0.0;
    double cost = 0.0;  // delta_1 w_1 + delta_2 w_2 + delta_3 w_3, lumped delta
    std::array<double, 3> wages{};
    double lambda = 0.0;
    double mu = 0.0;
    double gap = 0.0;       // M(m) at w_3
    double gap_cost = 0.0;  // delta'_4 M
    double total = 0.0;     // cost + gap_cost
    /// -(lambda pi'_4 + mu Delta'_4): dC/dm in reduced mode.
    double envelope = 0.0;
    /// Multiplier of the spread row (coupled mode): d total / dm.
    double spread_multiplier = 0.0;
};

InnerSolution inner_cost(const SpreadProblem& sp, double m, InnerMode mode = InnerMode::Coupled,
                         double tol = kDefaultTol);

struct SpreadTracePoint {
    double m;
    double inner_cost;
    double gap_cost;
    double total;
};

struct SpreadSolution {
    InnerMode mode = InnerMode::Coupled;
    double m = 0.0;
    std::array<double, 4> wages{};
    double lambda = 0.0;
    double mu = 0.0;
    double total_cost = 0.0;
    /// |delta'_4 M'(m) - (lambda pi'_4 + mu Delta'_4)|
    double foc_residual = 0.0;
    InnerSolution inner;
    std::vector<SpreadTracePoint> trace;
};

/// Golden-section search on the convex total cost, started at m = 0 and
/// extended in whichever direction the cost falls; in coupled mode the
/// result is polished on the spread multiplier. Degenerate problems
/// return m = 0.
SpreadSolution outer_minimize(const SpreadProblem& sp, InnerMode mode = InnerMode::Coupled,
                              double tol = kDefaultTol);

struct SpreadComparison {
    SpreadSolution iterative;
    SecondBestSolution direct;
    double cost_delta = 0.0;  // |iterative - direct|
    double max_wage_delta = 0.0;
    double lambda_delta = 0.0;
    double mu_delta = 0.0;
};

SpreadComparison compare_with_direct(const SpreadProblem& sp, InnerMode mode = InnerMode::Coupled,
                                     double tol = kDefaultTol);

}  // namespace mhb
