#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mhb {

inline constexpr double kSimplexTol = 1e-12;
/// Solvers divide by beliefs, so they require every entry to be at least this.
inline constexpr double kMinSolverProbability = 1e-9;

/// A point of the probability simplex over the S outcomes.
///
/// Construction validates non-negativity and the unit sum (within
/// kSimplexTol); invalid input is rejected, never renormalized.
class Distribution {
public:
    Distribution() = default;
    explicit Distribution(std::vector<double> probs);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t s) const { return probs_[s]; }
    std::span<const double> values() const noexcept { return probs_; }
    const std::vector<double>& vector() const noexcept { return probs_; }

    double min() const;
    bool strictly_positive(double floor = kMinSolverProbability) const;

    /// Mass shifted onto `to` from `from`: (p_to + eps, p_from - eps).
    /// Throws EpsilonTooLarge unless the result stays in the open simplex.
    Distribution shifted(std::size_t to, std::size_t from, double eps) const;

    bool operator==(const Distribution&) const = default;

private:
    std::vector<double> probs_;
};

/// Validation without throwing; returns an empty string when `probs` is a
/// valid distribution, otherwise a description of the violated invariant.
std::string simplex_violation(std::span<const double> probs, double tol = kSimplexTol);

enum class MlrpOrder { FDominatesG, GDominatesF, Equal, Incomparable };

std::string to_string(MlrpOrder order);

struct MlrpComparison {
    MlrpOrder order = MlrpOrder::Incomparable;
    /// At least one cross-product inequality is strict.
    bool strict = false;
    /// Every cross-product inequality (all s > s') is strict.
    bool all_strict = false;
};

/// Likelihood-ratio comparison in cross-product form, so zeros are legal.
/// f dominates g iff f_s g_t >= f_t g_s for all s > t.
MlrpComparison mlrp_compare(const Distribution& f, const Distribution& g);

/// True iff f dominates g in the MLRP order (weakly).
bool mlrp_dominates(const Distribution& f, const Distribution& g);

/// True iff the cumulative mass of f never exceeds that of g.
bool fosd_dominates(const Distribution& f, const Distribution& g, double tol = 1e-12);

double expectation(const Distribution& p, std::span<const double> x);
/// Variance of x under p; the "power" of a wage schedule.
double variance(const Distribution& p, std::span<const double> x);

/// Lumps the tail of `p` into index k-1: (p_1, ..., p_{k-1}, sum_{s>=k} p_s).
Distribution reduce_distribution(const Distribution& p, std::size_t keep);

/// Differences of agent beliefs between a high and a low action.
class DeltaVector {
public:
    DeltaVector() = default;
    explicit DeltaVector(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t s) const { return values_[s]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

DeltaVector delta_vector(const Distribution& agent_high, const Distribution& agent_low);

/// kappa_{hi,lo} = Delta_hi * pi_lo(H) - Delta_lo * pi_hi(H), indices 0-based.
double kappa(const DeltaVector& delta, const Distribution& agent_high,
             std::size_t s_hi, std::size_t s_lo);

}  // namespace mhb
