#include "mhb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mhb/error.hpp"

namespace mhb {

OracleResult brute_force_min(const ProblemInstance& inst, const std::string& target,
                             const GridSpec& grid, OracleMode mode) {
    const std::size_t n = inst.states();
    if (n > 4) fail(ErrorCode::DimensionError, "oracle: at most four states");
    if (!(grid.v_lo < grid.v_hi) || grid.points_per_dim < 3) {
        fail(ErrorCode::InvalidArgument, "oracle: need v_lo < v_hi and at least 3 points");
    }
    const auto& u = inst.utility();
    if (!u.in_range(grid.v_lo) || !u.in_range(grid.v_hi)) {
        fail(ErrorCode::InvalidArgument, "oracle: grid must lie inside the utility range");
    }
    const auto& a = inst.action(target);
    const std::size_t k = grid.points_per_dim;
    const double step = grid.step();
    const auto& pa = a.agent_beliefs;
    const auto& pp = a.principal_beliefs;
    const double max_pa = *std::max_element(pa.values().begin(), pa.values().end());
    const double tol = grid.constraint_tol > 0.0 ? grid.constraint_tol : 2.0 * max_pa * step;
    if (!(pa[n - 1] > 0.0)) fail(ErrorCode::InvalidArgument, "oracle: last state needs agent mass");

    std::vector<double> vs(k), hs(k);
    for (std::size_t i = 0; i < k; ++i) {
        vs[i] = i + 1 == k ? grid.v_hi : grid.v_lo + step * static_cast<double>(i);
        hs[i] = u.inverse(vs[i]);
    }

    struct Row {
        std::vector<double> coef;
        double rhs;
    };
    std::vector<Row> ics;
    if (mode == OracleMode::SecondBest) {
        for (const auto& other : inst.actions()) {
            if (other.name == target) continue;
            Row r{std::vector<double>(n), a.cost - other.cost};
            for (std::size_t s = 0; s < n; ++s) r.coef[s] = pa[s] - other.agent_beliefs[s];
            ics.push_back(std::move(r));
        }
    }
    const double ir_rhs = inst.reservation_utility() + a.cost;

    OracleResult best;
    best.cost = std::numeric_limits<double>::infinity();
    best.constraint_tol = tol;
    std::vector<std::size_t> idx(n - 1, 0);
    std::vector<double> ic_partial(ics.size());
    for (;;) {
        double ir_partial = 0.0, cost_partial = 0.0;
        for (std::size_t s = 0; s + 1 < n; ++s) {
            ir_partial += pa[s] * vs[idx[s]];
            cost_partial += pp[s] * hs[idx[s]];
        }
        for (std::size_t r = 0; r < ics.size(); ++r) {
            ic_partial[r] = 0.0;
            for (std::size_t s = 0; s + 1 < n; ++s) ic_partial[r] += ics[r].coef[s] * vs[idx[s]];
        }
        // Grid indices of the last coordinate inside the participation band.
        const double last_lo = (ir_rhs - ir_partial) / pa[n - 1];
        const double last_hi = (ir_rhs + tol - ir_partial) / pa[n - 1];
        const double j_lo = std::ceil((last_lo - grid.v_lo) / step - 1e-9);
        const double j_hi = std::floor((last_hi - grid.v_lo) / step + 1e-9);
        for (double jd = std::max(0.0, j_lo); jd <= std::min(j_hi, double(k - 1)); jd += 1.0) {
            const auto j = static_cast<std::size_t>(jd);
            const double v_last = vs[j];
            const double ir = ir_partial + pa[n - 1] * v_last - ir_rhs;
            ++best.evaluated;
            if (ir > tol || ir < 0.0) continue;
            bool ok = true;
            for (std::size_t r = 0; r < ics.size() && ok; ++r) {
                ok = ic_partial[r] + ics[r].coef[n - 1] * v_last - ics[r].rhs >= -grid.ic_tol;
            }
            if (!ok) continue;
            ++best.feasible;
            const double cost = cost_partial + pp[n - 1] * hs[j];
            if (cost < best.cost) {
                best.cost = cost;
                best.utilities.assign(n, 0.0);
                for (std::size_t s = 0; s + 1 < n; ++s) best.utilities[s] = vs[idx[s]];
                best.utilities[n - 1] = v_last;
            }
            break;  // cost increases along the last coordinate
        }
        std::size_t d = 0;
        while (d < idx.size() && ++idx[d] == k) idx[d++] = 0;
        if (d == idx.size()) break;
    }
    if (best.feasible == 0) fail(ErrorCode::NoFeasiblePoint, "oracle: no grid point satisfies the constraints");
    best.wages.resize(n);
    for (std::size_t s = 0; s < n; ++s) best.wages[s] = u.inverse(best.utilities[s]);
    return best;
}

GridSpec grid_around(const UtilityModel& u, const std::vector<double>& v, std::size_t points) {
    if (v.empty()) fail(ErrorCode::InvalidArgument, "grid_around: no utilities given");
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    double lo = *mn, hi = *mx;
    const double pad = 0.25 * (hi - lo) + 0.1;
    lo -= pad;
    hi += pad;
    const Interval r = u.utility_range();
    if (std::isfinite(r.hi) && hi >= r.hi) hi = r.hi - 1e-3 * (r.hi - lo);
    if (std::isfinite(r.lo) && lo <= r.lo) lo = r.lo + 1e-3 * (hi - r.lo);
    return GridSpec{lo, hi, points, 0.0, 0.0};
}

double cell_variation(const ProblemInstance& inst, const std::string& target,
                      const std::vector<double>& v, double step) {
    const auto& u = inst.utility();
    const auto& pp = inst.action(target).principal_beliefs;
    double total = 0.0;
    for (std::size_t s = 0; s < v.size(); ++s) {
        const double h0 = u.inverse(v[s]);
        double d = 0.0;
        for (double dv : {step, -step}) {
            if (u.in_range(v[s] + dv)) d = std::max(d, std::abs(u.inverse(v[s] + dv) - h0));
        }
        total += pp[s] * d;
    }
    return total;
}

}  // namespace mhb
