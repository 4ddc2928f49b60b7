#pragma once

// Random instance generators shared by the unit tests and the acceptance
// runner. Every draw is a deterministic function of the engine state.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mhb/belief.hpp"
#include "mhb/cara.hpp"
#include "mhb/error.hpp"
#include "mhb/problem.hpp"
#include "mhb/utility.hpp"

namespace mhb::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Flat Dirichlet draw mixed with a uniform floor on every entry.
inline Distribution random_distribution(Rng& rng, std::size_t n, double floor = 0.02) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& x : p) sum += (x = g(rng));
    for (auto& x : p) x = floor + (1.0 - floor * static_cast<double>(n)) * x / sum;
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < n; ++s) total += p[s];
    p[n - 1] = 1.0 - total;
    return Distribution(std::move(p));
}

/// Normalizes positive weights onto the simplex, fixing the last entry so
/// the sum is exact.
inline Distribution normalized(std::vector<double> w) {
    double sum = 0.0;
    for (double x : w) sum += x;
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < w.size(); ++s) total += (w[s] /= sum);
    w.back() = 1.0 - total;
    return Distribution(std::move(w));
}

/// Returns f with f strictly MLRP-dominating g: f is proportional to g times
/// a strictly increasing likelihood ratio.
inline Distribution mlrp_above(Rng& rng, const Distribution& g, double min_growth = 0.1,
                               double max_growth = 1.5) {
    std::vector<double> w(g.size());
    double ratio = 1.0;
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (s > 0) ratio *= 1.0 + uniform(rng, min_growth, max_growth);
        w[s] = g[s] * ratio;
    }
    return normalized(std::move(w));
}

/// g with f strictly MLRP-dominating it.
inline Distribution mlrp_below(Rng& rng, const Distribution& f, double min_growth = 0.1,
                               double max_growth = 1.5) {
    std::vector<double> w(f.size());
    double ratio = 1.0;
    for (std::size_t s = f.size(); s-- > 0;) {
        if (s + 1 < f.size()) ratio *= 1.0 + uniform(rng, min_growth, max_growth);
        w[s] = f[s] * ratio;
    }
    return normalized(std::move(w));
}

inline bool all_at_least(const Distribution& p, double floor) { return p.min() >= floor; }

enum class Family { Cara, Log, CrraLow, CrraHigh, Sqrt };

inline UtilityModel utility_of(Family f, Rng& rng) {
    switch (f) {
        case Family::Cara: return UtilityModel::cara(uniform(rng, 0.5, 2.0));
        case Family::Log: return UtilityModel::log();
        case Family::CrraLow: return UtilityModel::crra(uniform(rng, 0.3, 0.8));
        case Family::CrraHigh: return UtilityModel::crra(uniform(rng, 1.5, 3.0));
        case Family::Sqrt: return UtilityModel::sqrt();
    }
    return UtilityModel::log();
}

inline Family random_family(Rng& rng) {
    return static_cast<Family>(std::uniform_int_distribution<int>(0, 4)(rng));
}

/// Sign of the utility range: -1 for (-inf, 0), +1 for (0, inf), 0 for R.
inline int range_sign(Family f) {
    switch (f) {
        case Family::Cara:
        case Family::CrraHigh: return -1;
        case Family::CrraLow:
        case Family::Sqrt: return 1;
        case Family::Log: return 0;
    }
    return 0;
}

inline std::vector<double> increasing_outputs(Rng& rng, std::size_t n) {
    std::vector<double> y(n);
    double v = uniform(rng, 0.0, 1.0);
    for (auto& x : y) x = (v += uniform(rng, 0.5, 2.0));
    return y;
}

/// Reservation utility ubar and cost gap c for which participation at
/// ubar + c and incentives against `low` are jointly satisfiable inside the
/// utility range, with room to spare.
struct Levels {
    double ubar;
    double cost;
};

inline Levels feasible_levels(Rng& rng, Family f, const Distribution& high, const Distribution& low) {
    double r_max = 0.0, r_min = INFINITY;
    for (std::size_t s = 0; s < high.size(); ++s) {
        r_max = std::max(r_max, low[s] / high[s]);
        r_min = std::min(r_min, low[s] / high[s]);
    }
    const int sign = range_sign(f);
    if (sign == 0) {
        // Keeps the utility spread needed for incentives of order one.
        double tv = 0.0;
        for (std::size_t s = 0; s < high.size(); ++s) tv += std::max(0.0, high[s] - low[s]);
        return {uniform(rng, -1.0, 1.0), uniform(rng, 0.2, 1.5) * tv};
    }
    if (sign < 0) {
        const double k = -uniform(rng, 0.5, 2.0);
        const double c = uniform(rng, 0.1, 0.5) * std::abs(k) * (r_max - 1.0);
        return {k - c, c};
    }
    const double k = uniform(rng, 1.0, 3.0);
    const double c = uniform(rng, 0.05, 0.25) * k * (1.0 - r_min);
    return {k - c, c};
}

/// Two actions H (costly) and L (free); pi^A(H) strictly MLRP-dominates
/// pi^A(L). Principal beliefs are independent draws unless supplied.
struct TwoActionDraw {
    Distribution agent_high, agent_low, principal_high, principal_low;
};

inline TwoActionDraw random_two_action_beliefs(Rng& rng, std::size_t n, double floor = 0.03) {
    for (;;) {
        TwoActionDraw d;
        d.agent_low = random_distribution(rng, n, floor);
        d.agent_high = mlrp_above(rng, d.agent_low);
        d.principal_high = random_distribution(rng, n, floor);
        d.principal_low = random_distribution(rng, n, floor);
        if (all_at_least(d.agent_high, floor / 2)) return d;
    }
}

inline ProblemInstance make_instance(Rng& rng, Family f, const TwoActionDraw& d) {
    const auto lv = feasible_levels(rng, f, d.agent_high, d.agent_low);
    std::vector<ActionSpec> acts{{"H", lv.cost, d.principal_high, d.agent_high},
                                 {"L", 0.0, d.principal_low, d.agent_low}};
    return ProblemInstance(increasing_outputs(rng, d.agent_high.size()), std::move(acts), lv.ubar,
                           utility_of(f, rng));
}

inline ProblemInstance random_two_action_instance(Rng& rng, std::size_t n,
                                                  std::optional<Family> family = std::nullopt) {
    const Family f = family ? *family : random_family(rng);
    return make_instance(rng, f, random_two_action_beliefs(rng, n));
}

/// A CARA system in the incentive-binding regime (solve_cara succeeds).
inline CaraSystem random_cara_system(Rng& rng, double floor = 0.05) {
    for (;;) {
        const auto low = random_distribution(rng, 3, floor);
        const auto high = mlrp_above(rng, low);
        const auto principal = random_distribution(rng, 3, floor);
        if (!all_at_least(high, floor / 2)) continue;
        const auto lv = feasible_levels(rng, Family::Cara, high, low);
        try {
            CaraSystem sys(high, low, principal, lv.cost, lv.ubar);
            solve_cara(sys);
            return sys;
        } catch (const Error&) {
        }
    }
}

inline ProblemInstance cara_instance(const CaraSystem& sys, const Distribution& principal_low) {
    std::vector<ActionSpec> acts{{"H", sys.cost(), sys.principal_high(), sys.pi_high()},
                                 {"L", 0.0, principal_low, sys.pi_low()}};
    return ProblemInstance({1.0, 2.0, 3.0}, std::move(acts), sys.ubar(), UtilityModel::cara(sys.r()));
}

}  // namespace mhb::testing
