#include "mhb/cara.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "mhb/error.hpp"

namespace mhb {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::ValidationError, "CARA system: " + what);
}

}  // namespace

CaraSystem::CaraSystem(Distribution pi_high, Distribution pi_low, Distribution principal_high,
                       double cost, double ubar, double r)
    : pi_h_(std::move(pi_high)),
      pi_l_(std::move(pi_low)),
      pp_(std::move(principal_high)),
      cost_(cost),
      ubar_(ubar),
      r_(r) {
    require(pi_h_.size() == 3 && pi_l_.size() == 3 && pp_.size() == 3, "three states required");
    require(pi_h_.strictly_positive() && pi_l_.strictly_positive() && pp_.strictly_positive(),
            "beliefs must be strictly positive");
    require(r_ > 0.0 && std::isfinite(r_), "r must be positive");
    require(cost_ > 0.0, "cost gap must be positive");
    require(ubar_ + cost_ < 0.0, "ubar + c must lie in the CARA utility range (< 0)");
    const auto cmp = mlrp_compare(pi_h_, pi_l_);
    require(cmp.order == MlrpOrder::FDominatesG && cmp.all_strict,
            "pi(H) must strictly MLRP-dominate pi(L)");

    delta_ = delta_vector(pi_h_, pi_l_);
    k21_ = kappa(delta_, pi_h_, 1, 0);
    k31_ = kappa(delta_, pi_h_, 2, 0);
    k32_ = kappa(delta_, pi_h_, 2, 1);
    require(k21_ > 0.0 && k31_ > 0.0 && k32_ > 0.0, "kappa coefficients must be positive");
    gamma2_ = -k21_ / delta_[0];
    require(gamma2_ > 0.0 && gamma2_ <= pi_h_[1] * (1 + 1e-12), "gamma_2 outside (0, pi_2(H)]");
    require(gamma2_ + delta_[1] / delta_[0] > 0.0, "gamma_2 + Delta_2/Delta_1 must be positive");
    d3_ = -delta_[2] * ubar_ + cost_ * pi_l_[2];
    d2_ = -delta_[1] * ubar_ + cost_ * pi_l_[1];
}

CaraSystem CaraSystem::from_instance(const ProblemInstance& inst, const std::string& high,
                                     const std::string& low) {
    if (inst.states() != 3) fail(ErrorCode::DimensionError, "CARA system needs three states");
    const auto* cara = std::get_if<Cara>(&inst.utility().family());
    if (!cara) fail(ErrorCode::InvalidArgument, "CARA system needs CARA utility");
    const auto& h = inst.action(high);
    const auto& l = inst.action(low);
    return CaraSystem(h.agent_beliefs, l.agent_beliefs, h.principal_beliefs, h.cost - l.cost,
                      inst.reservation_utility() + l.cost, cara->r);
}

std::pair<double, double> CaraSystem::branch() const {
    const double lo = d3_ > 0.0 ? std::log(k31_ / d3_) : std::numeric_limits<double>::infinity();
    const double hi = d2_ > 0.0 ? std::log(k21_ / d2_) : std::numeric_limits<double>::infinity();
    return {lo, hi};
}

CaraSystem CaraSystem::with_principal(Distribution principal_high) const {
    return CaraSystem(pi_h_, pi_l_, std::move(principal_high), cost_, ubar_, r_);
}

double w2_from_w1(const CaraSystem& sys, double w1) {
    const double den = sys.d3() - sys.kappa31() * std::exp(-w1);
    if (!(den > 0.0)) fail(ErrorCode::OutOfBranch, "w2(w1): w1 below the branch");
    return std::log(sys.kappa32() / den);
}

double w3_from_w1(const CaraSystem& sys, double w1) {
    const double den = sys.kappa21() * std::exp(-w1) - sys.d2();
    if (!(den > 0.0)) fail(ErrorCode::OutOfBranch, "w3(w1): w1 above the branch");
    return std::log(sys.kappa32() / den);
}

double w1_condition(const CaraSystem& sys, double w1) {
    const auto& pp = sys.principal_high();
    const auto& d = sys.delta();
    const double g = sys.gamma2();
    const double lhs = pp[1] * (1.0 - g);
    const double den2 = sys.d3() - sys.kappa31() * std::exp(-w1);
    const double den3 = sys.kappa21() * std::exp(-w1) - sys.d2();
    // Limits at the two branch ends: e^{w_2} -> inf below, e^{w_3} -> inf above.
    if (!(den2 > 0.0)) return lhs;
    if (!(den3 > 0.0)) return -std::numeric_limits<double>::infinity();
    const double e_w2 = sys.kappa32() / den2;
    const double e_w3 = sys.kappa32() / den3;
    return lhs - (pp[0] * std::exp(w1) * (g + d[1] / d[0]) + pp[2] * g * e_w3) / e_w2;
}

double solve_w1(const CaraSystem& sys, double tol) {
    auto [lo, hi] = sys.branch();
    if (!std::isfinite(lo) || !(lo < hi)) {
        fail(ErrorCode::NoRootInBranch, "solve_w1: the branch for w1 is empty");
    }
    if (!std::isfinite(hi)) {
        double step = 1.0;
        hi = lo + step;
        while (w1_condition(sys, hi) > 0.0) {
            step *= 2.0;
            hi = lo + step;
            if (step > 1e6) fail(ErrorCode::NoRootInBranch, "solve_w1: no sign change above the branch");
        }
    }
    double a = lo, b = hi;
    for (int it = 0; it < 400 && b - a > tol * std::max(1.0, std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        (w1_condition(sys, mid) > 0.0 ? a : b) = mid;
    }
    const double root = 0.5 * (a + b);
    if (!(root > lo) || !(root < sys.branch().second)) {
        fail(ErrorCode::NoRootInBranch, "solve_w1: root collapsed onto the branch boundary");
    }
    return root;
}

CaraMultipliers multipliers(const CaraSystem& sys, const std::array<double, 3>& wages, double tol) {
    for (double w : wages) {
        if (!std::isfinite(w)) fail(ErrorCode::InvalidArgument, "multipliers: wages must be finite");
    }
    const auto& pp = sys.principal_high();
    CaraMultipliers m{};
    for (std::size_t s = 0; s < 3; ++s) m.lambda += pp[s] * std::exp(wages[s]);
    m.mu = (pp[0] * std::exp(wages[0]) - m.lambda * sys.pi_high()[0]) / sys.delta()[0];
    if (m.mu < -tol) {
        std::ostringstream msg;
        msg << "multipliers: mu = " << m.mu << " < 0, incentives are slack";
        fail(ErrorCode::NegativeMu, msg.str());
    }
    return m;
}

double CaraResiduals::max_abs() const {
    double m = std::max(std::abs(ir), std::abs(ic));
    for (double f : foc) m = std::max(m, std::abs(f));
    return m;
}

CaraResiduals cara_residuals(const CaraSystem& sys, const std::array<double, 3>& wages,
                             const CaraMultipliers& m) {
    CaraResiduals r{};
    const auto& ph = sys.pi_high();
    const auto& d = sys.delta();
    r.ir = -(sys.ubar() + sys.cost());
    r.ic = -sys.cost();
    for (std::size_t s = 0; s < 3; ++s) {
        const double x = std::exp(-wages[s]);
        r.foc[s] = sys.principal_high()[s] - (m.lambda * ph[s] + m.mu * d[s]) * x;
        r.ir -= ph[s] * x;
        r.ic -= d[s] * x;
    }
    return r;
}

CaraSolution solve_cara(const CaraSystem& sys, double tol) {
    const double w1 = solve_w1(sys);
    const std::array<double, 3> w{w1, w2_from_w1(sys, w1), w3_from_w1(sys, w1)};
    const auto m = multipliers(sys, w, tol);
    CaraSolution out;
    out.residuals = cara_residuals(sys, w, m);
    for (std::size_t s = 0; s < 3; ++s) out.wages[s] = w[s] / sys.r();
    out.lambda = m.lambda / sys.r();
    out.mu = m.mu / sys.r();
    return out;
}

CaraSweep cara_compstat(const CaraSystem& sys, std::size_t s, std::size_t s_prime,
                        const std::vector<double>& eps_grid, double trend_tol) {
    if (s >= 3 || s_prime >= 3 || s == s_prime) {
        fail(ErrorCode::InvalidArgument, "cara_compstat: need two distinct states in 0..2");
    }
    const auto& pp = sys.principal_high();
    for (double eps : eps_grid) {
        if (eps < 0.0) fail(ErrorCode::InvalidArgument, "cara_compstat: eps must be >= 0");
        if (eps > 0.0 && !(eps < std::min(pp[s], pp[s_prime]))) {
            fail(ErrorCode::EpsilonTooLarge, "cara_compstat: eps must be below min(pi_s, pi_s')");
        }
    }
    CaraSweep out;
    out.s = s;
    out.s_prime = s_prime;
    const std::size_t other = 3 - s - s_prime;
    std::vector<double> ws, wsp, wo;
    bool all_ok = true;
    for (double eps : eps_grid) {
        CaraSweepRow row{eps, std::nullopt, {}};
        try {
            const auto tilted = eps > 0.0 ? pp.shifted(s, s_prime, eps) : pp;
            auto sol = solve_cara(sys.with_principal(tilted));
            row.variance_agent = variance(sys.pi_high(), sol.wages);
            row.variance_principal = variance(tilted, sol.wages);
            ws.push_back(sol.wages[s]);
            wsp.push_back(sol.wages[s_prime]);
            wo.push_back(sol.wages[other]);
            row.solution = std::move(sol);
        } catch (const Error& e) {
            row.error = std::string(to_string(e.code())) + ": " + e.what();
            all_ok = false;
        }
        out.rows.push_back(std::move(row));
    }
    out.trend_s = classify_trend(ws, trend_tol);
    out.trend_s_prime = classify_trend(wsp, trend_tol);
    out.trend_other = classify_trend(wo, trend_tol);
    out.direction_holds =
        all_ok && (eps_grid.size() <= 1 ||
                   (out.trend_s == Trend::Decreasing && out.trend_s_prime == Trend::Increasing));
    return out;
}

}  // namespace mhb
