#include "mhb/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mhb/error.hpp"

namespace mhb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void domain_error(const char* op, double x, const std::string& why) {
    std::ostringstream msg;
    msg.precision(17);
    msg << op << "(" << x << "): " << why;
    fail(ErrorCode::DomainError, msg.str());
}

// --- tabulated pieces --------------------------------------------------

struct Piece {
    std::size_t i;
    double h;
    double t;
};

Piece locate(const Tabulated& tab, double w) {
    const auto& x = tab.wages;
    auto it = std::upper_bound(x.begin(), x.end(), w);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    i = std::min(i, x.size() - 2);
    const double h = x[i + 1] - x[i];
    return {i, h, (w - x[i]) / h};
}

double tab_value(const Tabulated& tab, double w) {
    const auto [i, h, t] = locate(tab, w);
    const auto& y = tab.utilities;
    const auto& d = tab.slopes;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + t) * h * d[i] +
           (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * h * d[i + 1];
}

double tab_marginal(const Tabulated& tab, double w) {
    const auto [i, h, t] = locate(tab, w);
    const auto& y = tab.utilities;
    const auto& d = tab.slopes;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y[i] + (3 * t2 - 4 * t + 1) * h * d[i] +
            (-6 * t2 + 6 * t) * y[i + 1] + (3 * t2 - 2 * t) * h * d[i + 1]) /
           h;
}

double tab_curvature(const Tabulated& tab, double w) {
    const auto [i, h, t] = locate(tab, w);
    const auto& y = tab.utilities;
    const auto& d = tab.slopes;
    return ((12 * t - 6) * y[i] + (6 * t - 4) * h * d[i] + (-12 * t + 6) * y[i + 1] +
            (6 * t - 2) * h * d[i + 1]) /
           (h * h);
}

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), del(n - 1), d(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        del[k] = (y[k + 1] - y[k]) / h[k];
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (del[k - 1] * del[k] <= 0.0) continue;
        const double w1 = 2 * h[k] + h[k - 1];
        const double w2 = h[k] + 2 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(s) > 3 * std::abs(d0)) return 3 * d0;
        return s;
    };
    if (n == 2) {
        d[0] = d[1] = del[0];
    } else {
        d[0] = end_slope(h[0], h[1], del[0], del[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }
    return d;
}

// Bisection on a monotone function over [lo, hi]; `increasing` gives the
// direction. Used only by the tabulated family.
template <class F>
double monotone_solve(F f, double target, double lo, double hi, bool increasing) {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < target) == increasing) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

bool Interval::contains(double x) const {
    if (!(x == x)) return false;
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

UtilityModel UtilityModel::cara(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::ValidationError, "CARA requires r > 0");
    return UtilityModel(Cara{r}, Interval{-kInf, kInf});
}

UtilityModel UtilityModel::log() { return UtilityModel(LogUtility{}, Interval{0.0, kInf}); }

UtilityModel UtilityModel::crra(double gamma) {
    if (!(gamma > 0.0) || gamma == 1.0 || !std::isfinite(gamma)) {
        fail(ErrorCode::ValidationError, "CRRA requires gamma > 0 and gamma != 1");
    }
    return UtilityModel(Crra{gamma}, Interval{0.0, kInf});
}

UtilityModel UtilityModel::sqrt() { return UtilityModel(SqrtUtility{}, Interval{0.0, kInf}); }

UtilityModel UtilityModel::tabulated(std::vector<double> wages, std::vector<double> utilities) {
    if (wages.size() != utilities.size() || wages.size() < 3) {
        fail(ErrorCode::ValidationError, "tabulated utility needs >= 3 (wage, utility) pairs");
    }
    for (std::size_t k = 0; k + 1 < wages.size(); ++k) {
        if (!(wages[k + 1] > wages[k]) || !(utilities[k + 1] > utilities[k])) {
            fail(ErrorCode::ValidationError, "tabulated utility must be strictly increasing");
        }
    }
    Tabulated tab{wages, utilities, pchip_slopes(wages, utilities)};
    // The interpolant must itself be increasing and strictly concave.
    for (std::size_t k = 0; k + 1 < wages.size(); ++k) {
        for (int j = 0; j <= 8; ++j) {
            const double w = wages[k] + (wages[k + 1] - wages[k]) * (j / 8.0) * (1 - 1e-12) +
                             (j == 0 ? 1e-12 * (wages[k + 1] - wages[k]) : 0.0);
            if (!(tab_marginal(tab, w) > 0.0) || !(tab_curvature(tab, w) < 0.0)) {
                fail(ErrorCode::ValidationError,
                     "tabulated utility is not increasing and strictly concave once interpolated");
            }
        }
    }
    Interval dom{wages.front(), wages.back(), true, true};
    return UtilityModel(std::move(tab), dom);
}

UtilityModel UtilityModel::with_domain(double lo, double hi) const {
    if (!(lo < hi)) fail(ErrorCode::ValidationError, "wage domain needs lo < hi");
    const bool lo_ok = domain_.lo_closed ? lo >= domain_.lo : lo > domain_.lo;
    const bool hi_ok = domain_.hi_closed ? hi <= domain_.hi : hi < domain_.hi;
    if (!lo_ok || !hi_ok) {
        fail(ErrorCode::ValidationError, "wage domain may be tightened but not widened");
    }
    UtilityModel out = *this;
    out.domain_ = Interval{lo, hi, true, true};
    out.restricted_ = true;
    return out;
}

void UtilityModel::check_wage(double w, const char* op) const {
    if (!domain_.contains(w)) domain_error(op, w, "wage outside the utility domain");
}

double UtilityModel::value(double w) const {
    check_wage(w, "u");
    return std::visit(
        overloaded{[&](const Cara& c) { return -std::exp(-c.r * w); },
                   [&](const LogUtility&) { return std::log(w); },
                   [&](const Crra& c) { return std::pow(w, 1.0 - c.gamma) / (1.0 - c.gamma); },
                   [&](const SqrtUtility&) { return std::sqrt(w); },
                   [&](const Tabulated& t) { return tab_value(t, w); }},
        family_);
}

double UtilityModel::marginal(double w) const {
    check_wage(w, "u'");
    return std::visit(overloaded{[&](const Cara& c) { return c.r * std::exp(-c.r * w); },
                                 [&](const LogUtility&) { return 1.0 / w; },
                                 [&](const Crra& c) { return std::pow(w, -c.gamma); },
                                 [&](const SqrtUtility&) { return 0.5 / std::sqrt(w); },
                                 [&](const Tabulated& t) { return tab_marginal(t, w); }},
                      family_);
}

double UtilityModel::curvature(double w) const {
    check_wage(w, "u''");
    return std::visit(
        overloaded{[&](const Cara& c) { return -c.r * c.r * std::exp(-c.r * w); },
                   [&](const LogUtility&) { return -1.0 / (w * w); },
                   [&](const Crra& c) { return -c.gamma * std::pow(w, -c.gamma - 1.0); },
                   [&](const SqrtUtility&) { return -0.25 / (w * std::sqrt(w)); },
                   [&](const Tabulated& t) { return tab_curvature(t, w); }},
        family_);
}

double UtilityModel::inverse_marginal(double m) const {
    if (!(m > 0.0) || !std::isfinite(m)) {
        domain_error("(u')^-1", m, "marginal utility must be positive and finite");
    }
    const double w = std::visit(
        overloaded{[&](const Cara& c) { return -std::log(m / c.r) / c.r; },
                   [&](const LogUtility&) { return 1.0 / m; },
                   [&](const Crra& c) { return std::pow(m, -1.0 / c.gamma); },
                   [&](const SqrtUtility&) { return 0.25 / (m * m); },
                   [&](const Tabulated& t) {
                       const double top = tab_marginal(t, t.wages.front());
                       const double bottom = tab_marginal(t, t.wages.back());
                       if (m > top || m < bottom) {
                           domain_error("(u')^-1", m, "outside the tabulated marginal range");
                       }
                       return monotone_solve([&](double x) { return tab_marginal(t, x); }, m,
                                             t.wages.front(), t.wages.back(), false);
                   }},
        family_);
    if (!domain_.contains(w)) domain_error("(u')^-1", m, "implied wage outside the domain");
    return w;
}

Interval UtilityModel::utility_range() const {
    if (restricted_ || std::holds_alternative<Tabulated>(family_)) {
        // value() is only defined on the domain; closed ends map directly.
        return Interval{value(domain_.lo), value(domain_.hi), true, true};
    }
    return std::visit(overloaded{[](const Cara&) { return Interval{-kInf, 0.0}; },
                                 [](const LogUtility&) { return Interval{-kInf, kInf}; },
                                 [](const Crra& c) {
                                     return c.gamma < 1.0 ? Interval{0.0, kInf}
                                                          : Interval{-kInf, 0.0};
                                 },
                                 [](const SqrtUtility&) { return Interval{0.0, kInf}; },
                                 [](const Tabulated&) { return Interval{0.0, 0.0}; }},
                      family_);
}

double UtilityModel::inverse(double v) const {
    if (!in_range(v)) domain_error("h", v, "utility outside the range of u");
    const double w = std::visit(
        overloaded{[&](const Cara& c) { return -std::log(-v) / c.r; },
                   [&](const LogUtility&) { return std::exp(v); },
                   [&](const Crra& c) {
                       return std::pow((1.0 - c.gamma) * v, 1.0 / (1.0 - c.gamma));
                   },
                   [&](const SqrtUtility&) { return v * v; },
                   [&](const Tabulated& t) {
                       return monotone_solve([&](double x) { return tab_value(t, x); }, v,
                                             t.wages.front(), t.wages.back(), true);
                   }},
        family_);
    return std::clamp(w, domain_.lo, domain_.hi);
}

double UtilityModel::inverse_derivative(double v) const {
    if (!in_range(v)) domain_error("h'", v, "utility outside the range of u");
    return std::visit(
        overloaded{[&](const Cara& c) { return -1.0 / (c.r * v); },
                   [&](const LogUtility&) { return std::exp(v); },
                   [&](const Crra& c) {
                       return std::pow((1.0 - c.gamma) * v, c.gamma / (1.0 - c.gamma));
                   },
                   [&](const SqrtUtility&) { return 2.0 * v; },
                   [&](const Tabulated& t) { return 1.0 / tab_marginal(t, inverse(v)); }},
        family_);
}

std::string UtilityModel::family_name() const {
    return std::visit(overloaded{[](const Cara&) { return std::string("cara"); },
                                 [](const LogUtility&) { return std::string("log"); },
                                 [](const Crra&) { return std::string("crra"); },
                                 [](const SqrtUtility&) { return std::string("sqrt"); },
                                 [](const Tabulated&) { return std::string("tabulated"); }},
                      family_);
}

std::string UtilityModel::describe() const {
    std::ostringstream out;
    out << family_name();
    if (const auto* c = std::get_if<Cara>(&family_)) out << "(r=" << c->r << ")";
    if (const auto* c = std::get_if<Crra>(&family_)) out << "(gamma=" << c->gamma << ")";
    if (restricted_) out << " on [" << domain_.lo << ", " << domain_.hi << "]";
    return out.str();
}

bool UtilityModel::operator==(const UtilityModel& other) const {
    if (family_.index() != other.family_.index() || restricted_ != other.restricted_) return false;
    if (restricted_ && (domain_.lo != other.domain_.lo || domain_.hi != other.domain_.hi)) {
        return false;
    }
    return std::visit(
        overloaded{[&](const Cara& c) { return c.r == std::get<Cara>(other.family_).r; },
                   [&](const Crra& c) { return c.gamma == std::get<Crra>(other.family_).gamma; },
                   [&](const Tabulated& t) {
                       const auto& o = std::get<Tabulated>(other.family_);
                       return t.wages == o.wages && t.utilities == o.utilities;
                   },
                   [](const auto&) { return true; }},
        family_);
}

}  // namespace mhb
