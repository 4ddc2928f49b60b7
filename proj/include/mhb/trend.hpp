#pragma once

#include <span>
#include <string>

namespace mhb {

enum class Trend { Increasing, Decreasing, Flat, NonMonotone };

std::string to_string(Trend trend);

/// Direction of a sequence; steps within `tol` count as flat.
Trend classify_trend(std::span<const double> values, double tol);

/// Every adjacent step exceeds `tol`.
bool strictly_increasing(std::span<const double> values, double tol);
bool strictly_decreasing(std::span<const double> values, double tol);

}  // namespace mhb
