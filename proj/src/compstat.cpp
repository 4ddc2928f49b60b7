#include "mhb/compstat.hpp"

#include <cmath>
#include <limits>

#include "mhb/error.hpp"
#include "mhb/first_best.hpp"
#include "mhb/second_best.hpp"

namespace mhb {

ProblemInstance apply_tilt(const ProblemInstance& inst, const BeliefTilt& tilt, double eps) {
    const std::size_t idx = inst.index_of(tilt.which_action);
    const auto& a = inst.action(idx);
    if (tilt.s >= inst.states() || tilt.s_prime >= inst.states() || tilt.s == tilt.s_prime) {
        fail(ErrorCode::InvalidArgument, "tilt: need two distinct states");
    }
    const Distribution& base = tilt.party == Party::Principal ? a.principal_beliefs : a.agent_beliefs;
    if (eps == 0.0) return inst;
    const Distribution tilted = eps > 0.0 ? base.shifted(tilt.s, tilt.s_prime, eps)
                                          : base.shifted(tilt.s_prime, tilt.s, -eps);
    return tilt.party == Party::Principal ? inst.with_beliefs(idx, tilted, a.agent_beliefs)
                                          : inst.with_beliefs(idx, a.principal_beliefs, tilted);
}

SweepResult sweep(const ProblemInstance& inst, const std::string& target, const BeliefTilt& tilt,
                  const std::vector<double>& eps_grid, SolverKind solver, double tol) {
    std::vector<ProblemInstance> tilted;
    tilted.reserve(eps_grid.size());
    for (double eps : eps_grid) tilted.push_back(apply_tilt(inst, tilt, eps));

    const std::size_t n = inst.states();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SweepResult r;
    r.eps_values = eps_grid;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const auto& pi = tilted[i];
        const auto& a = pi.action(target);
        std::vector<double> wages(n, nan);
        double lambda = nan, mu = nan, cost = nan;
        bool coincides = false;
        std::string err;
        try {
            if (solver == SolverKind::FirstBest) {
                const auto fb = solve_first_best(pi, target, tol);
                wages = fb.wages;
                lambda = fb.lambda;
                mu = 0.0;
                cost = fb.expected_cost_principal;
                coincides = true;
            } else {
                const auto sb = solve_second_best(pi, target, tol);
                wages = sb.wages;
                lambda = sb.lambda;
                mu = sb.mu.empty() ? 0.0 : sb.mu[0];
                cost = sb.expected_cost_principal;
                coincides = sb.coincides_with_first_best;
            }
        } catch (const Error& e) {
            err = std::string(to_string(e.code())) + ": " + e.what();
        }
        const bool failed = !err.empty();
        r.wage_paths.push_back(wages);
        r.lambda_path.push_back(lambda);
        r.mu_path.push_back(mu);
        r.cost_path.push_back(cost);
        r.power_path.push_back(failed ? nan : variance(a.agent_beliefs, wages));
        r.power_principal_path.push_back(failed ? nan : variance(a.principal_beliefs, wages));
        r.coincides_with_first_best.push_back(coincides);
        r.failed.push_back(failed);
        r.errors.push_back(err);
    }

    r.verdicts.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> path;
        for (std::size_t i = 0; i < eps_grid.size(); ++i) {
            if (!r.failed[i]) path.push_back(r.wage_paths[i][s]);
        }
        r.verdicts[s] = classify_trend(path, kVerdictTol);
    }
    int prev = -1;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (r.failed[i]) continue;
        const int cur = r.coincides_with_first_best[i] ? 1 : 0;
        if (prev >= 0 && cur != prev) r.regime_changes.push_back(eps_grid[i]);
        prev = cur;
    }
    return r;
}

RegimeChange detect_regime_change(const ProblemInstance& inst, const std::string& target,
                                  const BeliefTilt& tilt, double eps_lo, double eps_hi,
                                  double eps_tol, double tol) {
    if (!(eps_lo < eps_hi)) fail(ErrorCode::InvalidArgument, "regime change: need eps_lo < eps_hi");
    auto coincides = [&](double eps) {
        return solve_second_best(apply_tilt(inst, tilt, eps), target, tol).coincides_with_first_best;
    };
    RegimeChange r;
    r.lo = eps_lo;
    r.hi = eps_hi;
    r.coincides_at_lo = coincides(eps_lo);
    r.coincides_at_hi = coincides(eps_hi);
    if (r.coincides_at_lo == r.coincides_at_hi) {
        fail(ErrorCode::NoFlipInRange, "regime change: both ends are in the same regime");
    }
    while (r.hi - r.lo > eps_tol) {
        const double mid = 0.5 * (r.lo + r.hi);
        if (coincides(mid) == r.coincides_at_lo) r.lo = mid;
        else r.hi = mid;
    }
    r.eps_star = 0.5 * (r.lo + r.hi);
    return r;
}

}  // namespace mhb
