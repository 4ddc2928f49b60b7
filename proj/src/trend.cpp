#include "mhb/trend.hpp"

namespace mhb {

std::string to_string(Trend trend) {
    switch (trend) {
        case Trend::Increasing: return "Increasing";
        case Trend::Decreasing: return "Decreasing";
        case Trend::Flat: return "Flat";
        case Trend::NonMonotone: return "NonMonotone";
    }
    return "NonMonotone";
}

Trend classify_trend(std::span<const double> values, double tol) {
    bool up = false, down = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double step = values[i] - values[i - 1];
        if (step > tol) up = true;
        if (step < -tol) down = true;
    }
    if (up && down) return Trend::NonMonotone;
    if (up) return Trend::Increasing;
    if (down) return Trend::Decreasing;
    return Trend::Flat;
}

bool strictly_increasing(std::span<const double> values, double tol) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] - values[i - 1] > tol)) return false;
    }
    return true;
}

bool strictly_decreasing(std::span<const double> values, double tol) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i - 1] - values[i] > tol)) return false;
    }
    return true;
}

}  // namespace mhb
