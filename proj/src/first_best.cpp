#include "mhb/first_best.hpp"

#include <cmath>
#include <sstream>

#include "mhb/error.hpp"

namespace mhb {

namespace {

std::vector<double> wages_at(const Distribution& principal, const Distribution& agent,
                             const UtilityModel& u, double lambda) {
    std::vector<double> w(principal.size());
    for (std::size_t s = 0; s < w.size(); ++s) {
        w[s] = u.inverse_marginal(principal[s] / (lambda * agent[s]));
    }
    return w;
}

double ir_residual(const Distribution& agent, const UtilityModel& u,
                   const std::vector<double>& w, double required) {
    double eu = 0.0;
    for (std::size_t s = 0; s < w.size(); ++s) eu += agent[s] * u.value(w[s]);
    return eu - required;
}

}  // namespace

FirstBestSolution solve_first_best(const Distribution& principal, const Distribution& agent,
                                   double cost, double reservation_utility,
                                   const UtilityModel& utility, double tol) {
    if (principal.size() != agent.size()) {
        fail(ErrorCode::LengthMismatch, "first best: belief vectors differ in length");
    }
    if (!principal.strictly_positive() || !agent.strictly_positive()) {
        fail(ErrorCode::ValidationError, "first best: beliefs must be strictly positive");
    }
    const double required = reservation_utility + cost;
    if (!utility.in_range(required)) {
        fail(ErrorCode::NoBracket, "first best: required utility outside the range of u");
    }

    auto residual = [&](double lambda) {
        try {
            return ir_residual(agent, utility, wages_at(principal, agent, utility, lambda), required);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DomainError) throw;
            // Out of the wage domain: report which side so bracketing can
            // still make progress when a tightened domain is in use.
            return std::nan("");
        }
    };

    const double constant = utility.inverse(required);
    double lo = 1.0 / utility.marginal(constant);
    double hi = lo;
    double r_lo = residual(lo);
    if (std::isnan(r_lo)) fail(ErrorCode::NoBracket, "first best: start outside the wage domain");
    double r_hi = r_lo;
    int guard = 0;
    while (r_hi < 0.0) {
        if (++guard > 400) fail(ErrorCode::NoBracket, "first best: IR residual never turns positive");
        lo = hi;
        r_lo = r_hi;
        hi *= 2.0;
        r_hi = residual(hi);
        if (std::isnan(r_hi)) fail(ErrorCode::NoBracket, "first best: bracket leaves the wage domain");
    }
    while (r_lo > 0.0) {
        if (++guard > 400) fail(ErrorCode::NoBracket, "first best: IR residual never turns negative");
        hi = lo;
        r_hi = r_lo;
        lo *= 0.5;
        r_lo = residual(lo);
        if (std::isnan(r_lo)) fail(ErrorCode::NoBracket, "first best: bracket leaves the wage domain");
    }

    // Geometric bisection: lambda spans orders of magnitude across families.
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double r = residual(mid);
        if (std::isnan(r)) fail(ErrorCode::NoBracket, "first best: bisection left the wage domain");
        (r < 0.0 ? lo : hi) = mid;
    }
    double lambda = 0.5 * (lo + hi);

    // Newton polish: dw_s/dlambda = -q_s / (lambda^2 u''(w_s)), q_s = pi^P_s / pi^A_s.
    for (int it = 0; it < 3; ++it) {
        const auto w = wages_at(principal, agent, utility, lambda);
        const double r = ir_residual(agent, utility, w, required);
        if (std::abs(r) <= 1e-15 * std::max(1.0, std::abs(required))) break;
        double slope = 0.0;
        for (std::size_t s = 0; s < w.size(); ++s) {
            const double q = principal[s] / agent[s];
            slope += agent[s] * utility.marginal(w[s]) * (-q / (lambda * lambda * utility.curvature(w[s])));
        }
        const double next = lambda - r / slope;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        const double r_next = residual(next);
        if (std::isnan(r_next) || std::abs(r_next) >= std::abs(r)) break;
        lambda = next;
    }

    FirstBestSolution out;
    out.lambda = lambda;
    out.wages = wages_at(principal, agent, utility, lambda);
    out.ir_residual = ir_residual(agent, utility, out.wages, required);
    out.constant_wage = constant;
    out.foc_residuals.resize(out.wages.size());
    for (std::size_t s = 0; s < out.wages.size(); ++s) {
        out.expected_cost_principal += principal[s] * out.wages[s];
        out.expected_cost_agent_beliefs += agent[s] * out.wages[s];
        out.foc_residuals[s] =
            (principal[s] - lambda * agent[s] * utility.marginal(out.wages[s])) / principal[s];
    }
    if (std::abs(out.ir_residual) > tol) {
        std::ostringstream msg;
        msg << "first best: IR residual " << out.ir_residual << " above tolerance " << tol;
        fail(ErrorCode::NoBracket, msg.str());
    }
    return out;
}

FirstBestSolution solve_first_best(const ProblemInstance& inst, const std::string& action,
                                   double tol) {
    const auto& a = inst.action(action);
    return solve_first_best(a.principal_beliefs, a.agent_beliefs, a.cost,
                            inst.reservation_utility(), inst.utility(), tol);
}

MonotonicityVerdict classify_monotonicity(const FirstBestSolution& sol, MlrpOrder order,
                                          double tol) {
    MonotonicityVerdict v;
    v.trend = classify_trend(sol.wages, tol);
    switch (order) {
        case MlrpOrder::FDominatesG: v.implied = Trend::Decreasing; break;
        case MlrpOrder::GDominatesF: v.implied = Trend::Increasing; break;
        case MlrpOrder::Equal: v.implied = Trend::Flat; break;
        case MlrpOrder::Incomparable: break;
    }
    if (v.implied) v.consistent = v.trend == *v.implied || v.trend == Trend::Flat;
    return v;
}

FirstBestShiftReport first_best_compstat(const ProblemInstance& inst, const std::string& action,
                                         std::size_t s, std::size_t s_prime, double eps,
                                         double tol) {
    const auto& a = inst.action(action);
    const auto& base = a.principal_beliefs;
    if (s >= base.size() || s_prime >= base.size() || s == s_prime) {
        fail(ErrorCode::InvalidArgument, "first-best compstat: need two distinct states");
    }
    if (eps < 0.0) fail(ErrorCode::InvalidArgument, "first-best compstat: eps must be >= 0");
    if (eps > 0.0 && !(eps < std::min(base[s], base[s_prime]))) {
        fail(ErrorCode::EpsilonTooLarge, "first-best compstat: eps must be below min(pi_s, pi_s')");
    }
    FirstBestShiftReport r;
    r.s = s;
    r.s_prime = s_prime;
    r.eps = eps;
    r.base = solve_first_best(base, a.agent_beliefs, a.cost, inst.reservation_utility(),
                              inst.utility(), tol);
    const Distribution tilde = eps > 0.0 ? base.shifted(s_prime, s, eps) : base;
    r.perturbed = solve_first_best(tilde, a.agent_beliefs, a.cost, inst.reservation_utility(),
                                   inst.utility(), tol);

    const double cmp_tol = 10 * tol;
    const auto& w = r.base.wages;
    const auto& wt = r.perturbed.wages;
    r.own_state_weakly_lower = w[s] <= wt[s] + cmp_tol;
    r.others_weakly_higher = true;
    for (std::size_t t = 0; t < w.size(); ++t) {
        const double diff = t == s ? wt[t] - w[t] : w[t] - wt[t];
        if (diff > cmp_tol) ++r.strict_count;
        if (t != s && w[t] < wt[t] - cmp_tol) r.others_weakly_higher = false;
    }
    r.full_pattern = r.own_state_weakly_lower && r.others_weakly_higher && r.strict_count >= 2;
    r.pair_pattern = r.own_state_weakly_lower && w[s_prime] >= wt[s_prime] - cmp_tol;
    r.lambda_change = r.perturbed.lambda - r.base.lambda;
    return r;
}

}  // namespace mhb
