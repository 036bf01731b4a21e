#pragma once

#include "lipnorm/rational.hpp"

#include <limits>
#include <optional>
#include <string>

namespace lipnorm {

enum class BoundStatus { exact, lower, upper, interval };

inline const char* status_str(BoundStatus s) {
    switch (s) {
        case BoundStatus::exact: return "exact";
        case BoundStatus::lower: return "lower";
        case BoundStatus::upper: return "upper";
        case BoundStatus::interval: return "interval";
    }
    return "?";
}

// A computed norm. `power`, when present, is the exact rational value of the
// norm raised to its governing exponent.
struct NormValue {
    double value = 0.0;
    std::optional<Rat> power;
    BoundStatus status = BoundStatus::exact;
    double lo = 0.0;
    double hi = 0.0;
    std::string method;

    static NormValue exact(double v, std::optional<Rat> pw, std::string method) {
        return {v, std::move(pw), BoundStatus::exact, v, v, std::move(method)};
    }
    static NormValue lower(double v, std::string method) {
        return {v, std::nullopt, BoundStatus::lower, v,
                std::numeric_limits<double>::infinity(), std::move(method)};
    }
    static NormValue upper(double v, std::string method) {
        return {v, std::nullopt, BoundStatus::upper, 0.0, v, std::move(method)};
    }
    static NormValue interval(double lo, double hi, std::string method) {
        return {(lo + hi) / 2, std::nullopt, BoundStatus::interval, lo, hi, std::move(method)};
    }

    bool is_exact() const { return status == BoundStatus::exact; }
    double width() const { return hi - lo; }
};

} // namespace lipnorm
