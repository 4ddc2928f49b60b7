#include "mhb/problem.hpp"

#include <cmath>
#include <sstream>

#include "mhb/error.hpp"

namespace mhb {

ProblemInstance::ProblemInstance(std::vector<double> outputs, std::vector<ActionSpec> actions,
                                 double reservation_utility, UtilityModel utility,
                                 std::optional<WageBox> wage_box)
    : outputs_(std::move(outputs)),
      actions_(std::move(actions)),
      reservation_utility_(reservation_utility),
      utility_(std::move(utility)),
      wage_box_(wage_box) {
    validate();
}

void ProblemInstance::validate() {
    auto invalid = [](const std::string& path, const std::string& why) {
        fail(ErrorCode::ValidationError, path + ": " + why);
    };
    if (outputs_.size() < 2) invalid("outputs", "need at least 2 outcomes");
    for (std::size_t s = 0; s < outputs_.size(); ++s) {
        if (!std::isfinite(outputs_[s])) invalid("outputs", "entries must be finite");
        if (s > 0 && !(outputs_[s] > outputs_[s - 1])) {
            invalid("outputs", "must be strictly increasing");
        }
    }
    if (actions_.empty()) invalid("actions", "need at least one action");
    if (!std::isfinite(reservation_utility_)) invalid("reservation_utility", "must be finite");

    const auto range = utility_.utility_range();
    for (std::size_t i = 0; i < actions_.size(); ++i) {
        const auto& a = actions_[i];
        const std::string path = "actions[" + std::to_string(i) + "]";
        if (a.name.empty()) invalid(path + ".name", "must be non-empty");
        for (std::size_t j = 0; j < i; ++j) {
            if (actions_[j].name == a.name) invalid(path + ".name", "duplicate name '" + a.name + "'");
        }
        if (!std::isfinite(a.cost)) invalid(path + ".cost", "must be finite");
        if (a.principal_beliefs.size() != outputs_.size()) {
            invalid(path + ".principal_beliefs", "length differs from outputs");
        }
        if (a.agent_beliefs.size() != outputs_.size()) {
            invalid(path + ".agent_beliefs", "length differs from outputs");
        }
        if (!range.contains(reservation_utility_ + a.cost)) {
            std::ostringstream why;
            why << "reservation utility + cost = " << reservation_utility_ + a.cost
                << " is outside the range of the " << utility_.family_name() << " utility";
            invalid(path + ".cost", why.str());
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (actions_[j].cost == a.cost) {
                warnings_.push_back("actions '" + actions_[j].name + "' and '" + a.name +
                                    "' have equal cost; incentive constraints may be degenerate");
            }
        }
    }
    if (wage_box_) {
        if (!(wage_box_->min < wage_box_->max)) invalid("wage_box", "needs min < max");
        if (!utility_.wage_domain().contains(wage_box_->min) ||
            !utility_.wage_domain().contains(wage_box_->max)) {
            invalid("wage_box", "bounds must lie inside the wage domain");
        }
    }
}

std::size_t ProblemInstance::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < actions_.size(); ++i) {
        if (actions_[i].name == name) return i;
    }
    fail(ErrorCode::InvalidArgument, "unknown action '" + name + "'");
}

void ProblemInstance::require_positive_beliefs() const {
    for (const auto& a : actions_) {
        if (!a.principal_beliefs.strictly_positive() || !a.agent_beliefs.strictly_positive()) {
            fail(ErrorCode::ValidationError,
                 "action '" + a.name + "': solvers need every belief >= 1e-9");
        }
    }
}

ProblemInstance ProblemInstance::with_beliefs(std::size_t action, Distribution principal,
                                              Distribution agent) const {
    auto actions = actions_;
    actions.at(action).principal_beliefs = std::move(principal);
    actions.at(action).agent_beliefs = std::move(agent);
    return ProblemInstance(outputs_, std::move(actions), reservation_utility_, utility_, wage_box_);
}

bool ProblemInstance::operator==(const ProblemInstance& other) const {
    return outputs_ == other.outputs_ && actions_ == other.actions_ &&
           reservation_utility_ == other.reservation_utility_ && utility_ == other.utility_ &&
           wage_box_ == other.wage_box_;
}

DeltaVector delta_vector(const ActionSpec& high, const ActionSpec& low) {
    return delta_vector(high.agent_beliefs, low.agent_beliefs);
}

}  // namespace mhb
