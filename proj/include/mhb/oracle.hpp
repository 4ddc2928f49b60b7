#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mhb/problem.hpp"

namespace mhb {

/// A uniform grid in promised-utility space, shared by every coordinate.
struct GridSpec {
    double v_lo = 0.0;
    double v_hi = 0.0;
    std::size_t points_per_dim = 0;
    /// Participation is accepted on [ubar + c, ubar + c + constraint_tol].
    /// Zero selects twice the largest change of the participation row over
    /// one grid step.
    double constraint_tol = 0.0;
    /// Incentive rows must hold with slack >= -ic_tol.
    double ic_tol = 0.0;

    double step() const { return (v_hi - v_lo) / static_cast<double>(points_per_dim - 1); }
};

enum class OracleMode { FirstBest, SecondBest };

struct OracleResult {
    double cost = 0.0;
    std::vector<double> utilities;
    std::vector<double> wages;
    double constraint_tol = 0.0;
    std::size_t evaluated = 0;
    std::size_t feasible = 0;
};

/// Exhaustive search for up to four states. The first S-1 coordinates run
/// over the grid; the last is limited to grid points inside the
/// participation band, scanned upwards so the first point passing the
/// incentive rows is the cheapest for that prefix. With the default
/// ic_tol every accepted point is feasible, so the result bounds the true
/// optimum from above.
///
/// Errors: NoFeasiblePoint, DimensionError (S > 4), InvalidArgument.
OracleResult brute_force_min(const ProblemInstance& inst, const std::string& target,
                             const GridSpec& grid, OracleMode mode);

/// Grid centred on the promised utilities `v`, padded by a quarter of their
/// spread plus 0.1 and kept strictly inside the utility range.
GridSpec grid_around(const UtilityModel& u, const std::vector<double>& v, std::size_t points);

/// Cost change from moving each coordinate of `v` one grid step:
/// sum_s p_s max(|h(v_s + step) - h(v_s)|, |h(v_s - step) - h(v_s)|).
double cell_variation(const ProblemInstance& inst, const std::string& target,
                      const std::vector<double>& v, double step);

}  // namespace mhb
