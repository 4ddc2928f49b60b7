#include "mhb/belief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mhb/error.hpp"

namespace mhb {

namespace {

// Cross-products are compared with a small absolute slack so that exact
// ties survive the rounding introduced by lumping.
constexpr double kCrossTol = 1e-15;

}  // namespace

std::string simplex_violation(std::span<const double> probs, double tol) {
    std::ostringstream msg;
    if (probs.size() < 2) {
        msg << "distribution needs at least 2 entries, got " << probs.size();
        return msg.str();
    }
    for (std::size_t s = 0; s < probs.size(); ++s) {
        if (!std::isfinite(probs[s]) || probs[s] < 0.0) {
            msg << "entry " << s << " is negative or not finite (" << probs[s] << ")";
            return msg.str();
        }
    }
    const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(sum - 1.0) > tol) {
        msg.precision(17);
        msg << "entries sum to " << sum << ", not 1";
        return msg.str();
    }
    return {};
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (auto why = simplex_violation(probs_); !why.empty()) {
        fail(ErrorCode::ValidationError, "invalid distribution: " + why);
    }
}

double Distribution::min() const {
    return *std::min_element(probs_.begin(), probs_.end());
}

bool Distribution::strictly_positive(double floor) const { return min() >= floor; }

Distribution Distribution::shifted(std::size_t to, std::size_t from, double eps) const {
    if (to >= size() || from >= size() || to == from) {
        fail(ErrorCode::InvalidArgument, "shift needs two distinct valid state indices");
    }
    if (eps < 0.0) fail(ErrorCode::InvalidArgument, "shift amount must be non-negative");
    if (eps > 0.0 && (eps >= probs_[from] || probs_[to] + eps >= 1.0)) {
        std::ostringstream msg;
        msg << "eps=" << eps << " leaves the open simplex (p[" << from << "]=" << probs_[from] << ")";
        fail(ErrorCode::EpsilonTooLarge, msg.str());
    }
    auto p = probs_;
    p[to] += eps;
    p[from] -= eps;
    return Distribution(std::move(p));
}

std::string to_string(MlrpOrder order) {
    switch (order) {
        case MlrpOrder::FDominatesG: return "FDominatesG";
        case MlrpOrder::GDominatesF: return "GDominatesF";
        case MlrpOrder::Equal: return "Equal";
        case MlrpOrder::Incomparable: return "Incomparable";
    }
    return "Incomparable";
}

MlrpComparison mlrp_compare(const Distribution& f, const Distribution& g) {
    if (f.size() != g.size()) {
        fail(ErrorCode::LengthMismatch, "mlrp_compare: distributions differ in length");
    }
    bool f_dom = true, g_dom = true;
    bool f_strict = false, g_strict = false;
    bool f_all = true, g_all = true;
    for (std::size_t hi = 1; hi < f.size(); ++hi) {
        for (std::size_t lo = 0; lo < hi; ++lo) {
            const double cross = f[hi] * g[lo] - f[lo] * g[hi];
            if (cross < -kCrossTol) f_dom = false;
            if (cross > kCrossTol) g_dom = false;
            if (cross > kCrossTol) f_strict = true; else f_all = false;
            if (cross < -kCrossTol) g_strict = true; else g_all = false;
        }
    }
    MlrpComparison out;
    if (f_dom && g_dom) {
        out.order = MlrpOrder::Equal;
    } else if (f_dom) {
        out.order = MlrpOrder::FDominatesG;
        out.strict = f_strict;
        out.all_strict = f_all;
    } else if (g_dom) {
        out.order = MlrpOrder::GDominatesF;
        out.strict = g_strict;
        out.all_strict = g_all;
    }
    return out;
}

bool mlrp_dominates(const Distribution& f, const Distribution& g) {
    const auto order = mlrp_compare(f, g).order;
    return order == MlrpOrder::FDominatesG || order == MlrpOrder::Equal;
}

bool fosd_dominates(const Distribution& f, const Distribution& g, double tol) {
    if (f.size() != g.size()) {
        fail(ErrorCode::LengthMismatch, "fosd_dominates: distributions differ in length");
    }
    double cf = 0.0, cg = 0.0;
    for (std::size_t s = 0; s + 1 < f.size(); ++s) {
        cf += f[s];
        cg += g[s];
        if (cf > cg + tol) return false;
    }
    return true;
}

double expectation(const Distribution& p, std::span<const double> x) {
    if (x.size() != p.size()) fail(ErrorCode::LengthMismatch, "expectation: length mismatch");
    double m = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s) m += p[s] * x[s];
    return m;
}

double variance(const Distribution& p, std::span<const double> x) {
    const double m = expectation(p, x);
    double v = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s) v += p[s] * (x[s] - m) * (x[s] - m);
    return v;
}

Distribution reduce_distribution(const Distribution& p, std::size_t keep) {
    if (keep < 2 || keep > p.size()) {
        std::ostringstream msg;
        msg << "cannot reduce a " << p.size() << "-state distribution to " << keep << " states";
        fail(ErrorCode::InvalidReduction, msg.str());
    }
    std::vector<double> out(p.values().begin(), p.values().begin() + (keep - 1));
    double tail = 0.0;
    for (std::size_t s = keep - 1; s < p.size(); ++s) tail += p[s];
    out.push_back(tail);
    return Distribution(std::move(out));
}

DeltaVector delta_vector(const Distribution& agent_high, const Distribution& agent_low) {
    if (agent_high.size() != agent_low.size()) {
        fail(ErrorCode::LengthMismatch, "delta_vector: distributions differ in length");
    }
    std::vector<double> d(agent_high.size());
    for (std::size_t s = 0; s < d.size(); ++s) d[s] = agent_high[s] - agent_low[s];
    return DeltaVector(std::move(d));
}

double kappa(const DeltaVector& delta, const Distribution& agent_high, std::size_t s_hi,
             std::size_t s_lo) {
    if (delta.size() != agent_high.size()) {
        fail(ErrorCode::LengthMismatch, "kappa: delta and beliefs differ in length");
    }
    if (s_hi <= s_lo || s_hi >= delta.size()) {
        fail(ErrorCode::IndexOrder, "kappa: requires s_lo < s_hi < S");
    }
    return delta[s_hi] * agent_high[s_lo] - delta[s_lo] * agent_high[s_hi];
}

}  // namespace mhb
