#include <algorithm>
#include <cmath>
#include <limits>

#include "mhb/error.hpp"
#include "mhb/second_best.hpp"

namespace mhb {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    xs.back() = hi;
    return xs;
}

// Wage interval of w_1 on which the indifference curve p1 u(w1) + p2 u(w2) = k
// has a solution w_2, intersected with [lo, hi]. Ends are pulled inwards by a
// relative margin so both wages stay strictly inside the domain.
std::pair<double, double> valid_w1(const UtilityModel& u, double p1, double p2, double k,
                                   double lo, double hi) {
    const Interval r = u.utility_range();
    double v_lo = std::max(r.lo, (k - p2 * r.hi) / p1);
    double v_hi = std::min(r.hi, (k - p2 * r.lo) / p1);
    auto shrink = [](double a, double b) {
        const double m = 1e-6 * std::max(1.0, std::abs(b - a));
        return std::pair{a + m, b - m};
    };
    if (std::isfinite(v_lo) && std::isfinite(v_hi)) std::tie(v_lo, v_hi) = shrink(v_lo, v_hi);
    else if (std::isfinite(v_lo)) v_lo += 1e-6 * std::max(1.0, std::abs(v_lo));
    else if (std::isfinite(v_hi)) v_hi -= 1e-6 * std::max(1.0, std::abs(v_hi));
    double w_lo = lo, w_hi = hi;
    if (std::isfinite(v_lo)) w_lo = std::max(w_lo, u.inverse(v_lo));
    if (std::isfinite(v_hi)) w_hi = std::min(w_hi, u.inverse(v_hi));
    return {w_lo, w_hi};
}

}  // namespace

FigureBundle figure_data(const ProblemInstance& inst, std::size_t grid, const std::string& target,
                         double tol) {
    if (inst.states() != 2 || inst.actions().size() != 2) {
        fail(ErrorCode::DimensionError, "figure data needs two states and two actions");
    }
    if (grid < 2) fail(ErrorCode::InvalidArgument, "figure data needs a grid of at least 2");
    const auto& acts = inst.actions();
    const std::size_t hi = target.empty() ? (acts[1].cost > acts[0].cost ? 1 : 0)
                                          : inst.index_of(target);
    const std::size_t lo = 1 - hi;
    const auto& u = inst.utility();
    const double ubar = inst.reservation_utility();

    FigureBundle out;
    const auto sol = solve_second_best(inst, acts[hi].name, tol);
    out.contract_w1 = sol.wages[0];
    out.contract_w2 = sol.wages[1];
    out.ic_binding = !sol.mu.empty() && sol.mu[0] > 0.0;

    // Both participation constraints binding: a 2x2 linear system in v.
    const auto& ph = acts[hi].agent_beliefs;
    const auto& pl = acts[lo].agent_beliefs;
    const double det = ph[0] * pl[1] - ph[1] * pl[0];
    if (std::abs(det) > 1e-14) {
        const double kh = ubar + acts[hi].cost, kl = ubar + acts[lo].cost;
        const double v1 = (kh * pl[1] - ph[1] * kl) / det;
        const double v2 = (ph[0] * kl - pl[0] * kh) / det;
        if (u.in_range(v1) && u.in_range(v2)) {
            out.corner_exists = true;
            out.corner_w1 = u.inverse(v1);
            out.corner_w2 = u.inverse(v2);
        }
    }

    std::vector<double> anchors{u.inverse(ubar + acts[hi].cost), u.inverse(ubar + acts[lo].cost),
                                out.contract_w1, out.contract_w2};
    if (out.corner_exists) {
        anchors.push_back(out.corner_w1);
        anchors.push_back(out.corner_w2);
    }
    const auto [amin, amax] = std::minmax_element(anchors.begin(), anchors.end());
    const double pad = std::max(0.5, 0.5 * (*amax - *amin));
    const Interval dom = u.wage_domain();
    double w_lo = *amin - pad, w_hi = *amax + pad;
    if (std::isfinite(dom.lo)) w_lo = std::max(w_lo, dom.lo + 0.25 * (*amin - dom.lo));
    if (std::isfinite(dom.hi)) w_hi = std::min(w_hi, dom.hi - 0.25 * (dom.hi - *amax));

    for (std::size_t a : {hi, lo}) {
        const auto& p = acts[a].agent_beliefs;
        const double k = ubar + acts[a].cost;
        const auto [a_lo, a_hi] = valid_w1(u, p[0], p[1], k, w_lo, w_hi);
        FigureBundle::Curve c{"indifference:" + acts[a].name, linspace(a_lo, a_hi, grid), {}};
        for (double w1 : c.w1) c.w2.push_back(u.inverse((k - p[0] * u.value(w1)) / p[1]));
        out.curves.push_back(std::move(c));
    }

    const auto& pp = acts[hi].principal_beliefs;
    FigureBundle::Curve iso{"isocost:" + acts[hi].name, linspace(w_lo, w_hi, grid), {}};
    for (double w1 : iso.w1) iso.w2.push_back((sol.expected_cost_principal - pp[0] * w1) / pp[1]);
    out.curves.push_back(std::move(iso));

    FigureBundle::Curve diag{"diagonal", linspace(w_lo, w_hi, grid), {}};
    diag.w2 = diag.w1;
    out.curves.push_back(std::move(diag));
    return out;
}

}  // namespace mhb
