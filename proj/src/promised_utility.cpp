#include "mhb/promised_utility.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "mhb/error.hpp"

namespace mhb {

namespace {

constexpr double kAcceptableResidual = 1e-10;

struct DualPoint {
    std::vector<double> coef;  // t = A^T nu
    std::vector<double> wages;
    std::vector<double> utils;
    double value = 0.0;  // dual objective g(nu)
};

class WorkingSetSolver {
public:
    WorkingSetSolver(const PromisedUtilityProgram& program, const UtilityModel& utility,
                     const ProgramOptions& options)
        : program_(program), utility_(utility), options_(options), n_(program.weights.size()) {}

    // Evaluates the dual at nu; nullopt outside the dual domain.
    std::optional<DualPoint> evaluate(const std::vector<std::size_t>& rows,
                                      const Eigen::VectorXd& nu) const {
        DualPoint p;
        p.coef.assign(n_, 0.0);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto& a = program_.constraints[rows[k]].coef;
            for (std::size_t s = 0; s < n_; ++s) p.coef[s] += nu[k] * a[s];
        }
        p.wages.resize(n_);
        p.utils.resize(n_);
        double g = 0.0;
        try {
            for (std::size_t s = 0; s < n_; ++s) {
                if (!(p.coef[s] > 0.0) || !std::isfinite(p.coef[s])) return std::nullopt;
                p.wages[s] = stationary_wage(utility_, program_.weights[s], p.coef[s]);
                p.utils[s] = utility_.value(p.wages[s]);
                if (!std::isfinite(p.utils[s])) return std::nullopt;
                g += program_.weights[s] * p.wages[s] - p.coef[s] * p.utils[s];
            }
        } catch (const Error&) {
            return std::nullopt;
        }
        for (std::size_t k = 0; k < rows.size(); ++k) g += nu[k] * program_.constraints[rows[k]].rhs;
        p.value = g;
        return p;
    }

    Eigen::VectorXd residual(const std::vector<std::size_t>& rows, const DualPoint& p) const {
        Eigen::VectorXd r(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto& c = program_.constraints[rows[k]];
            double lhs = 0.0;
            for (std::size_t s = 0; s < n_; ++s) lhs += c.coef[s] * p.utils[s];
            r[k] = c.rhs - lhs;
        }
        return r;
    }

    // Newton on the multipliers of `rows` treated as equalities.
    std::pair<Eigen::VectorXd, DualPoint> solve(const std::vector<std::size_t>& rows,
                                                Eigen::VectorXd nu, int& iterations) const {
        const std::size_t k = rows.size();
        double scale = 1.0;
        for (auto r : rows) scale = std::max(scale, std::abs(program_.constraints[r].rhs));

        if (k == n_) return vertex(rows);

        auto point = evaluate(rows, nu);
        if (!point) fail(ErrorCode::InvalidArgument, "Newton start outside the dual domain");

        for (int it = 0; it < options_.max_newton_iterations; ++it) {
            const Eigen::VectorXd r = residual(rows, *point);
            if (r.lpNorm<Eigen::Infinity>() <= options_.residual_tol * scale) {
                iterations += it;
                return {nu, *point};
            }
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
            for (std::size_t s = 0; s < n_; ++s) {
                const double w = point->wages[s];
                const double up = utility_.marginal(w);
                const double dv = -up * up * up / (program_.weights[s] * utility_.curvature(w));
                for (std::size_t i = 0; i < k; ++i) {
                    const double ai = program_.constraints[rows[i]].coef[s];
                    if (ai == 0.0) continue;
                    for (std::size_t j = 0; j < k; ++j) {
                        m(i, j) += ai * dv * program_.constraints[rows[j]].coef[s];
                    }
                }
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
            if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                ldlt.rcond() < 1e-15) {
                fail(ErrorCode::Infeasible, "active constraints are linearly dependent");
            }
            const Eigen::VectorXd step = ldlt.solve(r);
            const double slope = r.dot(step);

            double alpha = 1.0;
            bool accepted = false;
            const double rnorm = r.lpNorm<Eigen::Infinity>();
            for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
                const Eigen::VectorXd trial = nu + alpha * step;
                auto cand = evaluate(rows, trial);
                if (!cand) continue;
                const bool armijo = cand->value >= point->value + 1e-4 * alpha * slope -
                                                       1e-14 * (1.0 + std::abs(point->value));
                const bool closer = residual(rows, *cand).lpNorm<Eigen::Infinity>() < rnorm;
                if (armijo || (alpha == 1.0 && closer)) {
                    nu = trial;
                    point = std::move(cand);
                    accepted = true;
                    break;
                }
            }
            if (!accepted && rnorm <= kAcceptableResidual * scale) {
                // Stalled at the rounding floor.
                iterations += it;
                return {nu, *point};
            }
            if (!accepted || nu.lpNorm<Eigen::Infinity>() > 1e15) {
                classify_failure(*point, nu);
            }
        }
        if (residual(rows, *point).lpNorm<Eigen::Infinity>() <= kAcceptableResidual * scale) {
            iterations += options_.max_newton_iterations;
            return {nu, *point};
        }
        classify_failure(*point, nu);
    }

    // As many independent rows as states: v is pinned by the constraints
    // alone and the multipliers follow from stationarity, A^T nu = t.
    std::pair<Eigen::VectorXd, DualPoint> vertex(const std::vector<std::size_t>& rows) const {
        Eigen::MatrixXd a(n_, n_);
        Eigen::VectorXd b(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            for (std::size_t s = 0; s < n_; ++s) a(k, s) = program_.constraints[rows[k]].coef[s];
            b[k] = program_.constraints[rows[k]].rhs;
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) fail(ErrorCode::Infeasible, "active constraints are linearly dependent");
        const Eigen::VectorXd v = lu.solve(b);
        DualPoint p;
        p.coef.resize(n_);
        p.wages.resize(n_);
        p.utils.resize(n_);
        Eigen::VectorXd t(n_);
        for (std::size_t s = 0; s < n_; ++s) {
            if (!utility_.in_range(v[s])) {
                fail(ErrorCode::Infeasible, "active constraints pin a utility outside the range of u");
            }
            p.utils[s] = v[s];
            p.wages[s] = utility_.inverse(v[s]);
            t[s] = p.coef[s] = program_.weights[s] / utility_.marginal(p.wages[s]);
        }
        const Eigen::VectorXd nu = a.transpose().fullPivLu().solve(t);
        return {nu, p};
    }

    [[noreturn]] void classify_failure(const DualPoint& p, const Eigen::VectorXd& nu) const {
        const double tmin = *std::min_element(p.coef.begin(), p.coef.end());
        const double tmax = *std::max_element(p.coef.begin(), p.coef.end());
        std::ostringstream msg;
        if (nu.lpNorm<Eigen::Infinity>() < 1e12 && tmin < 1e-8 * tmax) {
            msg << "coefficient lambda*pi_s + mu*Delta_s collapses to " << tmin
                << "; optimum lies on the edge of the utility domain";
            fail(ErrorCode::KKTDegeneracy, msg.str());
        }
        fail(ErrorCode::Infeasible, "no promised-utility vector satisfies the active constraints");
    }

    double initial_scale(const LinearConstraint& row) const {
        double sum = 0.0;
        for (double a : row.coef) sum += a;
        const double level = row.rhs / sum;
        try {
            if (utility_.in_range(level)) return 1.0 / utility_.marginal(utility_.inverse(level));
        } catch (const Error&) {
        }
        return 1.0;
    }

private:
    const PromisedUtilityProgram& program_;
    const UtilityModel& utility_;
    const ProgramOptions& options_;
    std::size_t n_;
};

bool all_positive(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

int rank_of(const PromisedUtilityProgram& program, const std::vector<std::size_t>& rows) {
    if (rows.empty()) return 0;
    const std::size_t n = program.weights.size();
    Eigen::MatrixXd a(rows.size(), n);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t s = 0; s < n; ++s) a(k, s) = program.constraints[rows[k]].coef[s];
    }
    Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    return static_cast<int>(qr.rank());
}

}  // namespace

double stationary_wage(const UtilityModel& utility, double weight, double coef) {
    return utility.inverse_marginal(weight / coef);
}

ProgramSolution solve_program(const PromisedUtilityProgram& program, const UtilityModel& utility,
                              const ProgramOptions& options,
                              std::span<const double> warm_multipliers) {
    const std::size_t n = program.weights.size();
    const std::size_t m = program.constraints.size();
    if (n == 0) fail(ErrorCode::InvalidArgument, "program has no states");
    for (double w : program.weights) {
        if (!(w > 0.0)) fail(ErrorCode::InvalidArgument, "program weights must be positive");
    }
    for (const auto& c : program.constraints) {
        if (c.coef.size() != n) fail(ErrorCode::LengthMismatch, "constraint length differs");
    }
    if (!warm_multipliers.empty() && warm_multipliers.size() != m) {
        fail(ErrorCode::LengthMismatch, "warm start needs one multiplier per constraint");
    }

    // Rows with (numerically) zero coefficients are either vacuous or fatal.
    std::vector<bool> vacuous(m, false);
    for (std::size_t k = 0; k < m; ++k) {
        const auto& c = program.constraints[k];
        double norm = 0.0;
        for (double a : c.coef) norm = std::max(norm, std::abs(a));
        if (norm > 1e-14) continue;
        const bool ok = c.equality ? std::abs(c.rhs) <= options.slack_tol
                                   : c.rhs <= options.slack_tol;
        if (!ok) fail(ErrorCode::Infeasible, "constraint '" + c.label + "' cannot be met by any contract");
        vacuous[k] = true;
    }

    WorkingSetSolver solver(program, utility, options);
    ProgramSolution out;

    std::vector<std::size_t> working;
    for (std::size_t k = 0; k < m; ++k) {
        if (vacuous[k]) continue;
        if (program.constraints[k].equality) working.push_back(k);
        else if (!warm_multipliers.empty() && warm_multipliers[k] > options.multiplier_tol) {
            working.push_back(k);
        }
    }
    if (rank_of(program, working) < static_cast<int>(working.size())) {
        fail(ErrorCode::Infeasible, "equality constraints are linearly dependent");
    }

    auto start_for = [&](const std::vector<std::size_t>& rows,
                         const std::vector<double>& previous) {
        Eigen::VectorXd nu = Eigen::VectorXd::Zero(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) nu[k] = previous[rows[k]];
        if (solver.evaluate(rows, nu)) return nu;
        nu.setZero();
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (all_positive(program.constraints[rows[k]].coef)) {
                nu[k] = solver.initial_scale(program.constraints[rows[k]]);
                return nu;
            }
        }
        fail(ErrorCode::InvalidArgument,
             "no working constraint has all-positive coefficients to start from");
    };

    std::vector<double> multipliers(m, 0.0);
    if (!warm_multipliers.empty()) multipliers.assign(warm_multipliers.begin(), warm_multipliers.end());

    auto finish = [&](const std::vector<std::size_t>& rows, const Eigen::VectorXd& nu,
                      const DualPoint& p) {
        out.utilities = p.utils;
        out.wages = p.wages;
        out.multipliers.assign(m, 0.0);
        out.active.assign(m, false);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            out.multipliers[rows[k]] = nu[k];
            out.active[rows[k]] = true;
        }
        out.slacks.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            double lhs = 0.0;
            for (std::size_t s = 0; s < n; ++s) lhs += program.constraints[k].coef[s] * p.utils[s];
            out.slacks[k] = lhs - program.constraints[k].rhs;
        }
        out.cost = 0.0;
        for (std::size_t s = 0; s < n; ++s) out.cost += program.weights[s] * p.wages[s];
        return out;
    };

    // Returns true when (rows, nu, p) satisfies KKT for the full program.
    auto kkt_ok = [&](const std::vector<std::size_t>& rows, const Eigen::VectorXd& nu,
                      const DualPoint& p) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (!program.constraints[rows[k]].equality && nu[k] < -options.multiplier_tol) {
                return false;
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            if (vacuous[k] || program.constraints[k].equality) continue;
            if (std::find(rows.begin(), rows.end(), k) != rows.end()) continue;
            double lhs = 0.0;
            for (std::size_t s = 0; s < n; ++s) lhs += program.constraints[k].coef[s] * p.utils[s];
            if (lhs - program.constraints[k].rhs < -options.slack_tol) return false;
        }
        return true;
    };

    for (int iter = 0; iter < options.max_active_set_iterations; ++iter) {
        out.active_set_iterations = iter + 1;
        Eigen::VectorXd nu = start_for(working, multipliers);
        auto [nu_star, point] = solver.solve(working, nu, out.newton_iterations);
        for (std::size_t k = 0; k < working.size(); ++k) multipliers[working[k]] = nu_star[k];

        // Drop the most negative inequality multiplier first.
        std::ptrdiff_t drop = -1;
        double most_negative = -options.multiplier_tol;
        for (std::size_t k = 0; k < working.size(); ++k) {
            if (program.constraints[working[k]].equality) continue;
            if (nu_star[k] < most_negative) {
                most_negative = nu_star[k];
                drop = static_cast<std::ptrdiff_t>(k);
            }
        }
        if (drop >= 0) {
            multipliers[working[drop]] = 0.0;
            working.erase(working.begin() + drop);
            continue;
        }

        // Otherwise add the most violated inactive inequality.
        std::ptrdiff_t add = -1;
        double worst = -options.slack_tol;
        for (std::size_t k = 0; k < m; ++k) {
            if (vacuous[k] || program.constraints[k].equality) continue;
            if (std::find(working.begin(), working.end(), k) != working.end()) continue;
            const auto& c = program.constraints[k];
            double lhs = 0.0, norm = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                lhs += c.coef[s] * point.utils[s];
                norm = std::max(norm, std::abs(c.coef[s]));
            }
            const double slack = (lhs - c.rhs) / std::max(norm, 1e-300);
            if (lhs - c.rhs < -options.slack_tol && slack < worst) {
                worst = slack;
                add = static_cast<std::ptrdiff_t>(k);
            }
        }
        if (add < 0) return finish(working, nu_star, point);

        auto candidate = working;
        candidate.push_back(static_cast<std::size_t>(add));
        if (rank_of(program, candidate) < static_cast<int>(candidate.size())) {
            fail(ErrorCode::Infeasible, "constraint '" + program.constraints[add].label +
                                            "' is violated and dependent on the binding set");
        }
        multipliers[add] = 0.0;
        working = std::move(candidate);
    }

    // Cycling guard: enumerate working sets over the inequality rows.
    std::vector<std::size_t> equalities, inequalities;
    for (std::size_t k = 0; k < m; ++k) {
        if (vacuous[k]) continue;
        (program.constraints[k].equality ? equalities : inequalities).push_back(k);
    }
    if (inequalities.size() <= 12) {
        const std::size_t combos = std::size_t{1} << inequalities.size();
        for (std::size_t mask = 0; mask < combos; ++mask) {
            auto rows = equalities;
            for (std::size_t j = 0; j < inequalities.size(); ++j) {
                if (mask & (std::size_t{1} << j)) rows.push_back(inequalities[j]);
            }
            if (rank_of(program, rows) < static_cast<int>(rows.size())) continue;
            try {
                std::vector<double> zero(m, 0.0);
                auto [nu_star, point] = solver.solve(rows, start_for(rows, zero), out.newton_iterations);
                if (kkt_ok(rows, nu_star, point)) return finish(rows, nu_star, point);
            } catch (const Error&) {
            }
        }
    }
    fail(ErrorCode::NegativeMultiplier, "active-set search exhausted without a KKT point");
}

}  // namespace mhb
