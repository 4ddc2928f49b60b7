#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mhb/belief.hpp"
#include "mhb/utility.hpp"

namespace mhb {

struct ActionSpec {
    std::string name;
    double cost = 0.0;  // utils
    Distribution principal_beliefs;
    Distribution agent_beliefs;

    bool operator==(const ActionSpec&) const = default;
};

/// Optional explicit limits on wages. Never applied unless supplied.
struct WageBox {
    double min;
    double max;

    bool operator==(const WageBox&) const = default;
};

/// A finite-outcome contracting problem: outputs, actions with costs and
/// the two parties' beliefs, the agent's reservation utility and utility.
class ProblemInstance {
public:
    ProblemInstance(std::vector<double> outputs, std::vector<ActionSpec> actions,
                    double reservation_utility, UtilityModel utility,
                    std::optional<WageBox> wage_box = std::nullopt);

    std::size_t states() const noexcept { return outputs_.size(); }
    const std::vector<double>& outputs() const noexcept { return outputs_; }
    const std::vector<ActionSpec>& actions() const noexcept { return actions_; }
    const ActionSpec& action(std::size_t i) const { return actions_.at(i); }
    const ActionSpec& action(const std::string& name) const { return actions_[index_of(name)]; }
    std::size_t index_of(const std::string& name) const;
    double reservation_utility() const noexcept { return reservation_utility_; }
    const UtilityModel& utility() const noexcept { return utility_; }
    const std::optional<WageBox>& wage_box() const noexcept { return wage_box_; }

    /// Non-fatal findings from validation (e.g. tied action costs).
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Throws ValidationError unless all beliefs are >= kMinSolverProbability.
    void require_positive_beliefs() const;

    /// Copy with one action's beliefs replaced.
    ProblemInstance with_beliefs(std::size_t action, Distribution principal,
                                 Distribution agent) const;

    bool operator==(const ProblemInstance& other) const;

private:
    void validate();

    std::vector<double> outputs_;
    std::vector<ActionSpec> actions_;
    double reservation_utility_;
    UtilityModel utility_;
    std::optional<WageBox> wage_box_;
    std::vector<std::string> warnings_;
};

DeltaVector delta_vector(const ActionSpec& high, const ActionSpec& low);

}  // namespace mhb
