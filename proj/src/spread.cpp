#include "mhb/spread.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mhb/error.hpp"
#include "mhb/promised_utility.hpp"

namespace mhb {

namespace {

constexpr double kGolden = 0.6180339887498949;

ProblemInstance lump_top_states(const ProblemInstance& base) {
    if (base.states() != 4) fail(ErrorCode::DimensionError, "spread problem needs four states");
    std::vector<ActionSpec> acts;
    for (const auto& a : base.actions()) {
        acts.push_back({a.name, a.cost, reduce_distribution(a.principal_beliefs, 3),
                        reduce_distribution(a.agent_beliefs, 3)});
    }
    const auto& y = base.outputs();
    return ProblemInstance({y[0], y[1], y[2]}, std::move(acts), base.reservation_utility(),
                           base.utility(), base.wage_box());
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

SpreadProblem::SpreadProblem(ProblemInstance base, std::string high, std::string low)
    : base_(std::move(base)), reduced_(lump_top_states(base_)), high_(std::move(high)),
      low_(std::move(low)) {
    if (base_.actions().size() != 2) {
        fail(ErrorCode::InvalidArgument, "spread problem needs exactly two actions");
    }
    if (base_.index_of(high_) == base_.index_of(low_)) {
        fail(ErrorCode::InvalidArgument, "spread problem: high and low actions coincide");
    }
    const double tops[] = {agent_high()[3], agent_low()[3], principal_high()[3]};
    degenerate_ = std::all_of(std::begin(tops), std::end(tops), [](double p) { return p == 0.0; });
    if (degenerate_) {
        reduced_.require_positive_beliefs();
    } else {
        base_.require_positive_beliefs();
    }
}

bool SpreadProblem::appendix_ordering() const {
    return mlrp_dominates(agent_high(), principal_high()) &&
           mlrp_dominates(principal_high(), agent_low());
}

double payment_gap(const UtilityModel& u, double w3, double m) {
    const double v = u.value(w3) + m;
    if (!u.in_range(v)) fail(ErrorCode::RangeError, "payment gap: u(w3) + m outside the range of u");
    return u.inverse(v) - w3;
}

InnerSolution inner_cost(const SpreadProblem& sp, double m, InnerMode mode, double /*tol*/) {
    const auto& base = sp.base();
    const auto& high = base.action(sp.high());
    const auto& low = base.action(sp.low());
    const auto& u = base.utility();
    const auto delta4 = delta_vector(high, low);
    const double ir_rhs = base.reservation_utility() + high.cost;
    const double ic_rhs = high.cost - low.cost;

    InnerSolution out;
    out.m = m;
    const auto& red_high = sp.reduced().action(sp.high());
    const auto& red_low = sp.reduced().action(sp.low());
    const auto& dp = sp.principal_high();
    ProgramOptions opts;
    opts.slack_tol = kIcSlackTol;

    if (mode == InnerMode::Coupled && !sp.degenerate()) {
        PromisedUtilityProgram prog;
        prog.weights = dp.vector();
        prog.constraints.push_back({high.agent_beliefs.vector(), ir_rhs, true, "IR"});
        prog.constraints.push_back(
            {std::vector<double>(delta4.values().begin(), delta4.values().end()), ic_rhs, false,
             "IC"});
        prog.constraints.push_back({{0.0, 0.0, -1.0, 1.0}, m, true, "spread"});
        const auto res = solve_program(prog, u, opts);
        std::copy_n(res.wages.begin(), 3, out.wages.begin());
        out.lambda = res.multipliers[0];
        out.mu = std::max(0.0, res.multipliers[1]);
        out.spread_multiplier = res.multipliers[2];
        out.gap = res.wages[3] - res.wages[2];
    } else {
        const auto red_delta = delta_vector(red_high, red_low);
        PromisedUtilityProgram prog;
        prog.weights = red_high.principal_beliefs.vector();
        prog.constraints.push_back(
            {red_high.agent_beliefs.vector(), ir_rhs - sp.agent_high()[3] * m, true, "IR"});
        prog.constraints.push_back(
            {std::vector<double>(red_delta.values().begin(), red_delta.values().end()),
             ic_rhs - delta4[3] * m, false, "IC"});
        const auto res = solve_program(prog, u, opts);
        std::copy_n(res.wages.begin(), 3, out.wages.begin());
        out.lambda = res.multipliers[0];
        out.mu = std::max(0.0, res.multipliers[1]);
        out.gap = payment_gap(u, out.wages[2], m);
    }
    out.cost = dot(red_high.principal_beliefs.values(), out.wages);
    out.gap_cost = dp[3] * out.gap;
    out.total = out.cost + out.gap_cost;
    out.envelope = -(out.lambda * sp.agent_high()[3] + out.mu * delta4[3]);
    return out;
}

SpreadSolution outer_minimize(const SpreadProblem& sp, InnerMode mode, double tol) {
    SpreadSolution out;
    out.mode = mode;
    auto finish = [&](const InnerSolution& in) {
        const auto& u = sp.base().utility();
        out.m = in.m;
        out.inner = in;
        std::copy(in.wages.begin(), in.wages.end(), out.wages.begin());
        out.wages[3] = in.wages[2] + in.gap;
        out.lambda = in.lambda;
        out.mu = in.mu;
        out.total_cost = in.total;
        out.foc_residual = std::abs(sp.principal_high()[3] / u.marginal(out.wages[3]) + in.envelope);
        return out;
    };
    if (sp.degenerate()) {
        const auto in = inner_cost(sp, 0.0, mode, tol);
        out.trace.push_back({0.0, in.cost, in.gap_cost, in.total});
        return finish(in);
    }

    auto total = [&](double m) {
        try {
            const auto in = inner_cost(sp, m, mode, tol);
            out.trace.push_back({m, in.cost, in.gap_cost, in.total});
            return in.total;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::InvalidArgument) throw;
            out.trace.push_back({m, NAN, NAN, NAN});
            return std::numeric_limits<double>::infinity();
        }
    };

    // Bracket: walk downhill from m = 0 with growing steps, either sign.
    const double ubar_h = sp.base().reservation_utility() + sp.base().action(sp.high()).cost;
    const double step = 0.05 * std::max(std::abs(ubar_h), 0.1);
    double a = 0.0, b = step;
    double fa = total(a), fb = total(b);
    if (!std::isfinite(fa)) fail(ErrorCode::NoBracket, "outer search: inner problem fails at m = 0");
    if (fb > fa) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = b + (b - a) / kGolden;
    double fc = total(c);
    for (int it = 0; fc < fb; ++it) {
        if (it > 200) fail(ErrorCode::NoBracket, "outer search: cost keeps falling in m");
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + (b - a) / kGolden;
        fc = total(c);
    }
    double lo = std::min(a, c), hi = std::max(a, c);

    // Golden section.
    double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    double f1 = total(x1), f2 = total(x2);
    const double width_tol = 1e-10 * std::max(step, std::abs(b));
    for (int it = 0; it < 200 && hi - lo > width_tol; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = total(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = total(x2);
        }
    }
    double m_star = 0.5 * (lo + hi);

    if (mode == InnerMode::Coupled) {
        // The spread multiplier is dJ/dm and increasing; regula falsi
        // (Illinois) on it pins m* to working precision.
        auto slope = [&](double m) { return inner_cost(sp, m, mode, tol).spread_multiplier; };
        double width = std::max(hi - lo, 1e-12 * std::max(step, std::abs(m_star)));
        double l = m_star - width, r = m_star + width;
        double gl = slope(l), gr = slope(r);
        for (int it = 0; it < 60 && gl > 0.0; ++it) {
            l -= (r - l);
            gl = slope(l);
        }
        for (int it = 0; it < 60 && gr < 0.0; ++it) {
            r += (r - l);
            gr = slope(r);
        }
        if (gl <= 0.0 && gr >= 0.0) {
            int side = 0;
            for (int it = 0; it < 100 && r - l > 1e-15 * std::max(1.0, std::abs(l)); ++it) {
                const double x = gr == gl ? 0.5 * (l + r) : (l * gr - r * gl) / (gr - gl);
                const double gx = slope(x);
                if (gx == 0.0) {
                    l = r = x;
                    break;
                }
                if (gx < 0.0) {
                    l = x;
                    gl = gx;
                    if (side == -1) gr *= 0.5;
                    side = -1;
                } else {
                    r = x;
                    gr = gx;
                    if (side == 1) gl *= 0.5;
                    side = 1;
                }
            }
            m_star = 0.5 * (l + r);
        }
    }
    const auto in = inner_cost(sp, m_star, mode, tol);
    out.trace.push_back({m_star, in.cost, in.gap_cost, in.total});
    return finish(in);
}

SpreadComparison compare_with_direct(const SpreadProblem& sp, InnerMode mode, double tol) {
    SpreadComparison out;
    out.iterative = outer_minimize(sp, mode, tol);
    std::vector<double> direct_wages;
    if (sp.degenerate()) {
        out.direct = solve_second_best(sp.reduced(), sp.high(), tol);
        direct_wages = out.direct.wages;
        direct_wages.push_back(direct_wages.back());
    } else {
        out.direct = solve_second_best(sp.base(), sp.high(), tol);
        direct_wages = out.direct.wages;
    }
    out.cost_delta = std::abs(out.iterative.total_cost - out.direct.expected_cost_principal);
    for (std::size_t s = 0; s < 4; ++s) {
        out.max_wage_delta =
            std::max(out.max_wage_delta, std::abs(out.iterative.wages[s] - direct_wages[s]));
    }
    out.lambda_delta = std::abs(out.iterative.lambda - out.direct.lambda);
    out.mu_delta = std::abs(out.iterative.mu - (out.direct.mu.empty() ? 0.0 : out.direct.mu[0]));
    return out;
}

}  // namespace mhb
