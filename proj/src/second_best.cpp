#include "mhb/second_best.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mhb/error.hpp"

namespace mhb {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Coefficient lambda pi^A_s + sum mu [pi^A_s - pi^A_s(a')] (+ box terms).
std::vector<double> foc_coefficients(const ProblemInstance& inst, std::size_t target,
                                     const SecondBestSolution& sol) {
    const std::size_t n = inst.states();
    const auto& high = inst.action(target).agent_beliefs;
    std::vector<double> t(n);
    for (std::size_t s = 0; s < n; ++s) t[s] = sol.lambda * high[s];
    for (std::size_t k = 0; k < sol.ic_actions.size(); ++k) {
        const auto& low = inst.action(sol.ic_actions[k]).agent_beliefs;
        for (std::size_t s = 0; s < n; ++s) t[s] += sol.mu[k] * (high[s] - low[s]);
    }
    for (std::size_t s = 0; s < sol.box_lower_multipliers.size(); ++s) {
        t[s] += sol.box_lower_multipliers[s] - sol.box_upper_multipliers[s];
    }
    return t;
}

void fill_diagnostics(const ProblemInstance& inst, std::size_t target, SecondBestSolution& sol) {
    const auto& u = inst.utility();
    const auto& a = inst.action(target);
    const std::size_t n = inst.states();
    sol.utilities.resize(n);
    for (std::size_t s = 0; s < n; ++s) sol.utilities[s] = u.value(sol.wages[s]);
    sol.ir_residual =
        dot(a.agent_beliefs.values(), sol.utilities) - a.cost - inst.reservation_utility();
    sol.expected_cost_principal = dot(a.principal_beliefs.values(), sol.wages);
    sol.ic_slacks.clear();
    sol.ic_binding.clear();
    for (std::size_t k = 0; k < sol.ic_actions.size(); ++k) {
        const auto& other = inst.action(sol.ic_actions[k]);
        const double slack = dot(a.agent_beliefs.values(), sol.utilities) - a.cost -
                             (dot(other.agent_beliefs.values(), sol.utilities) - other.cost);
        sol.ic_slacks.push_back(slack);
        sol.ic_binding.push_back(sol.mu[k] > 0.0 || std::abs(slack) <= sol.tol);
    }
    const auto t = foc_coefficients(inst, target, sol);
    sol.foc_residuals.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        sol.foc_residuals[s] = a.principal_beliefs[s] - t[s] * u.marginal(sol.wages[s]);
    }
}

bool inside_box(const ProblemInstance& inst, const std::vector<double>& wages) {
    if (!inst.wage_box()) return true;
    return std::all_of(wages.begin(), wages.end(), [&](double w) {
        return w >= inst.wage_box()->min - kIcSlackTol && w <= inst.wage_box()->max + kIcSlackTol;
    });
}

}  // namespace

PromisedUtilityProgram second_best_program(const ProblemInstance& inst, std::size_t target) {
    const auto& a = inst.action(target);
    const std::size_t n = inst.states();
    PromisedUtilityProgram prog;
    prog.weights = a.principal_beliefs.vector();
    prog.constraints.push_back(
        {a.agent_beliefs.vector(), inst.reservation_utility() + a.cost, true, "IR"});
    for (std::size_t i = 0; i < inst.actions().size(); ++i) {
        if (i == target) continue;
        const auto& other = inst.action(i);
        std::vector<double> coef(n);
        for (std::size_t s = 0; s < n; ++s) coef[s] = a.agent_beliefs[s] - other.agent_beliefs[s];
        prog.constraints.push_back({std::move(coef), a.cost - other.cost, false, "IC:" + other.name});
    }
    if (const auto& box = inst.wage_box()) {
        const double v_lo = inst.utility().value(box->min);
        const double v_hi = inst.utility().value(box->max);
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<double> e(n, 0.0);
            e[s] = 1.0;
            prog.constraints.push_back({e, v_lo, false, "box_lower:" + std::to_string(s)});
            e[s] = -1.0;
            prog.constraints.push_back({e, -v_hi, false, "box_upper:" + std::to_string(s)});
        }
    }
    return prog;
}

SecondBestSolution solve_second_best(const ProblemInstance& inst, const std::string& target_name,
                                     double tol) {
    if (inst.actions().size() < 2) {
        fail(ErrorCode::InvalidArgument, "second best needs at least two actions");
    }
    inst.require_positive_beliefs();
    const std::size_t target = inst.index_of(target_name);
    const auto& a = inst.action(target);

    SecondBestSolution sol;
    sol.target = target_name;
    sol.tol = tol;
    for (const auto& other : inst.actions()) {
        if (other.name != target_name) sol.ic_actions.push_back(other.name);
    }
    sol.mu.assign(sol.ic_actions.size(), 0.0);
    if (inst.wage_box()) {
        sol.box_lower_multipliers.assign(inst.states(), 0.0);
        sol.box_upper_multipliers.assign(inst.states(), 0.0);
    }

    // Stage 1: the first-best contract, if incentive compatible, is optimal.
    std::optional<FirstBestSolution> fb;
    try {
        fb = solve_first_best(a.principal_beliefs, a.agent_beliefs, a.cost,
                              inst.reservation_utility(), inst.utility(), tol);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoBracket && e.code() != ErrorCode::DomainError) throw;
    }
    if (fb) {
        sol.wages = fb->wages;
        sol.lambda = fb->lambda;
        fill_diagnostics(inst, target, sol);
        const bool ic_ok = std::all_of(sol.ic_slacks.begin(), sol.ic_slacks.end(),
                                       [](double s) { return s >= -kIcSlackTol; });
        if (ic_ok && inside_box(inst, sol.wages)) {
            sol.coincides_with_first_best = true;
            return sol;
        }
    }

    // Stages 2 and 3: binding incentive constraints via the active set.
    const auto prog = second_best_program(inst, target);
    std::vector<double> warm(prog.constraints.size(), 0.0);
    if (fb) warm[0] = fb->lambda;
    ProgramOptions opts;
    opts.slack_tol = kIcSlackTol;
    const auto res = solve_program(prog, inst.utility(), opts, warm);

    sol.wages = res.wages;
    sol.lambda = res.multipliers[0];
    const std::size_t n_ic = sol.ic_actions.size();
    for (std::size_t k = 0; k < n_ic; ++k) sol.mu[k] = std::max(0.0, res.multipliers[1 + k]);
    if (inst.wage_box()) {
        for (std::size_t s = 0; s < inst.states(); ++s) {
            sol.box_lower_multipliers[s] = std::max(0.0, res.multipliers[1 + n_ic + 2 * s]);
            sol.box_upper_multipliers[s] = std::max(0.0, res.multipliers[2 + n_ic + 2 * s]);
        }
    }
    fill_diagnostics(inst, target, sol);
    sol.coincides_with_first_best =
        std::all_of(sol.mu.begin(), sol.mu.end(), [](double m) { return m == 0.0; }) &&
        std::all_of(sol.box_lower_multipliers.begin(), sol.box_lower_multipliers.end(),
                    [](double m) { return m == 0.0; }) &&
        std::all_of(sol.box_upper_multipliers.begin(), sol.box_upper_multipliers.end(),
                    [](double m) { return m == 0.0; });
    return sol;
}

KktReport check_kkt(const ProblemInstance& inst, const SecondBestSolution& sol) {
    const std::size_t target = inst.index_of(sol.target);
    const auto& a = inst.action(target);
    const auto& u = inst.utility();
    const std::size_t n = inst.states();
    KktReport r;

    std::vector<double> v(n);
    for (std::size_t s = 0; s < n; ++s) v[s] = u.value(sol.wages[s]);
    const double agent_value = dot(a.agent_beliefs.values(), v) - a.cost;
    r.primal_feasibility = std::abs(agent_value - inst.reservation_utility());
    r.dual_feasibility = std::max(0.0, -sol.lambda);

    const auto t = foc_coefficients(inst, target, sol);
    for (std::size_t s = 0; s < n; ++s) {
        if (!(t[s] > 0.0)) r.interior = false;
        r.stationarity = std::max(r.stationarity,
                                  std::abs(a.principal_beliefs[s] - t[s] * u.marginal(sol.wages[s])));
    }
    for (std::size_t k = 0; k < sol.ic_actions.size(); ++k) {
        const auto& other = inst.action(sol.ic_actions[k]);
        const double slack = agent_value - (dot(other.agent_beliefs.values(), v) - other.cost);
        r.primal_feasibility = std::max(r.primal_feasibility, -slack);
        r.dual_feasibility = std::max(r.dual_feasibility, -sol.mu[k]);
        r.complementary_slackness = std::max(r.complementary_slackness, std::abs(sol.mu[k] * slack));
    }
    if (const auto& box = inst.wage_box()) {
        for (std::size_t s = 0; s < n; ++s) {
            const double lo_slack = sol.wages[s] - box->min;
            const double hi_slack = box->max - sol.wages[s];
            r.primal_feasibility = std::max({r.primal_feasibility, -lo_slack, -hi_slack});
            r.complementary_slackness =
                std::max({r.complementary_slackness,
                          std::abs(sol.box_lower_multipliers[s] * (v[s] - u.value(box->min))),
                          std::abs(sol.box_upper_multipliers[s] * (u.value(box->max) - v[s]))});
        }
    }
    return r;
}

double recover_ic_multiplier(const ProblemInstance& inst, const SecondBestSolution& sol) {
    if (sol.ic_actions.size() != 1) {
        fail(ErrorCode::InvalidArgument, "multiplier recovery is defined for two actions");
    }
    const auto& high = inst.action(sol.target);
    const auto& low = inst.action(sol.ic_actions[0]);
    const auto delta = delta_vector(high, low);
    std::size_t best = 0;
    for (std::size_t s = 1; s < delta.size(); ++s) {
        if (std::abs(delta[s]) > std::abs(delta[best])) best = s;
    }
    if (delta[best] == 0.0) return 0.0;
    const double coef = high.principal_beliefs[best] / inst.utility().marginal(sol.wages[best]);
    return (coef - sol.lambda * high.agent_beliefs[best]) / delta[best];
}

ActionChoice choose_action(const ProblemInstance& inst, double tol) {
    ActionChoice out;
    const auto& acts = inst.actions();
    for (const auto& a : acts) {
        ActionReport rep;
        rep.action = a.name;
        rep.revenue = dot(a.principal_beliefs.values(), inst.outputs());
        const auto fb = solve_first_best(inst, a.name, tol);
        rep.first_best_cost = fb.expected_cost_principal;
        if (acts.size() > 1) {
            const auto sb = solve_second_best(inst, a.name, tol);
            rep.second_best_cost = sb.expected_cost_principal;
            rep.coincides_with_first_best = sb.coincides_with_first_best;
        } else {
            rep.second_best_cost = rep.first_best_cost;
            rep.coincides_with_first_best = true;
        }
        rep.profit = rep.revenue - rep.second_best_cost;
        rep.first_best_profit = rep.revenue - rep.first_best_cost;
        out.actions.push_back(rep);
    }

    auto pick = [&](auto profit_of) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < acts.size(); ++i) {
            const double gap = profit_of(out.actions[i]) - profit_of(out.actions[best]);
            const double scale = 1e-12 * std::max(1.0, std::abs(profit_of(out.actions[best])));
            if (gap > scale || (std::abs(gap) <= scale && acts[i].cost < acts[best].cost)) best = i;
        }
        return acts[best].name;
    };
    out.chosen = pick([](const ActionReport& r) { return r.profit; });
    out.first_best_choice = pick([](const ActionReport& r) { return r.first_best_profit; });

    if (acts.size() > 1) {
        std::size_t hi = 0;
        for (std::size_t i = 1; i < acts.size(); ++i) {
            if (acts[i].cost > acts[hi].cost) hi = i;
        }
        bool condition = true;
        for (std::size_t i = 0; i < acts.size(); ++i) {
            if (i == hi) continue;
            condition = condition && out.actions[hi].first_best_cost > out.actions[i].first_best_cost;
        }
        out.low_action_necessary_condition = condition;
    }
    return out;
}

SecondBestMonotonicity monotonicity_report(const SecondBestSolution& sol,
                                           const ProblemInstance& inst,
                                           const std::string& target, double tol) {
    const auto& high = inst.action(target);
    SecondBestMonotonicity r;
    r.trend = classify_trend(sol.wages, tol);
    const auto cmp = mlrp_compare(high.agent_beliefs, high.principal_beliefs);
    r.agent_dominates_principal =
        cmp.order == MlrpOrder::FDominatesG || cmp.order == MlrpOrder::Equal;
    r.agent_dominates_principal_strict = cmp.order == MlrpOrder::FDominatesG && cmp.all_strict;
    r.principal_dominates_agent =
        cmp.order == MlrpOrder::GDominatesF || cmp.order == MlrpOrder::Equal;
    r.high_dominates_low = true;
    for (const auto& other : inst.actions()) {
        if (other.name == target) continue;
        r.high_dominates_low =
            r.high_dominates_low && mlrp_dominates(high.agent_beliefs, other.agent_beliefs);
    }
    if (r.agent_dominates_principal && r.high_dominates_low) {
        r.asserted = Trend::Increasing;
        r.consistent = r.trend == Trend::Increasing || r.trend == Trend::Flat;
    }
    return r;
}

Trend principal_payoff_monotonicity(const SecondBestSolution& sol, const ProblemInstance& inst,
                                    double tol) {
    std::vector<double> payoff(inst.states());
    for (std::size_t s = 0; s < payoff.size(); ++s) payoff[s] = inst.outputs()[s] - sol.wages[s];
    return classify_trend(payoff, tol);
}

}  // namespace mhb
