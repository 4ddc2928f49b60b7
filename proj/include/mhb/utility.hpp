#pragma once

#include <string>
#include <variant>
#include <vector>

namespace mhb {

/// u(x) = -exp(-r x), r > 0. Utility range is (-inf, 0).
struct Cara {
    double r = 1.0;
};

/// u(x) = ln x on x > 0.
struct LogUtility {};

/// u(x) = x^(1-g) / (1-g), g > 0 and g != 1.
struct Crra {
    double gamma = 2.0;
};

/// u(x) = sqrt(x) on x > 0.
struct SqrtUtility {};

/// Experimental: u sampled on an increasing wage grid, joined by monotone
/// cubic Hermite (Fritsch-Carlson) pieces. Not bit-reproducible against any
/// closed form, so acceptance runs never use it.
struct Tabulated {
    std::vector<double> wages;
    std::vector<double> utilities;
    std::vector<double> slopes;  // filled on construction
};

/// Open or closed interval; infinite ends are always open.
struct Interval {
    double lo;
    double hi;
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(double x) const;
};

/// Risk-averse agent utility with exact inverse and derivatives.
///
/// Every solver talks to the agent's preferences only through this type:
/// u, u', u'', (u')^-1, h = u^-1 and h'. Arguments outside the wage domain
/// (or outside the utility range for the inverse) raise DomainError.
class UtilityModel {
public:
    using Family = std::variant<Cara, LogUtility, Crra, SqrtUtility, Tabulated>;

    static UtilityModel cara(double r = 1.0);
    static UtilityModel log();
    static UtilityModel crra(double gamma);
    static UtilityModel sqrt();
    static UtilityModel tabulated(std::vector<double> wages, std::vector<double> utilities);

    /// Restrict the wage domain to [lo, hi]. Widening is rejected.
    UtilityModel with_domain(double lo, double hi) const;

    double value(double w) const;
    double marginal(double w) const;
    double curvature(double w) const;  // u''(w)
    double inverse_marginal(double m) const;
    double inverse(double v) const;
    double inverse_derivative(double v) const;

    const Interval& wage_domain() const noexcept { return domain_; }
    /// Image of the wage domain under u.
    Interval utility_range() const;
    bool in_range(double v) const { return utility_range().contains(v); }
    bool domain_restricted() const noexcept { return restricted_; }

    const Family& family() const noexcept { return family_; }
    /// "cara", "log", "crra", "sqrt" or "tabulated".
    std::string family_name() const;
    std::string describe() const;

    bool operator==(const UtilityModel& other) const;

private:
    UtilityModel(Family family, Interval domain) : family_(std::move(family)), domain_(domain) {}
    void check_wage(double w, const char* op) const;

    Family family_;
    Interval domain_;
    bool restricted_ = false;
};

}  // namespace mhb
