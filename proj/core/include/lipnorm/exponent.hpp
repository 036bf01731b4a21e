#pragma once

#include "lipnorm/rational.hpp"

#include <limits>
#include <optional>

namespace lipnorm {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Exponent on the extended half-line (0, inf]. Kept rational so conjugate
// arithmetic like s'(q) = 1/(1/q - 1/s) stays exact.
class Exponent {
public:
    Exponent() : inf_(true) {}
    Exponent(const Rat& v) : inf_(false), v_(v) {
        if (v <= 0) throw InvalidArgument("exponent must be positive");
    }
    Exponent(long v) : Exponent(Rat(v)) {}
    Exponent(int v) : Exponent(Rat(v)) {}
    static Exponent infinity() { return Exponent(); }

    bool is_inf() const { return inf_; }
    const Rat& value() const {
        if (inf_) throw std::logic_error("value() of infinite exponent");
        return v_;
    }
    double to_double() const {
        return inf_ ? std::numeric_limits<double>::infinity() : lipnorm::to_double(v_);
    }
    bool is_integer() const { return !inf_ && denominator(v_) == 1; }
    long as_long() const { return numerator(value()).convert_to<long>(); }

    // 1/p, with 1/inf = 0.
    Rat reciprocal() const { return inf_ ? Rat(0) : Rat(1) / v_; }

    friend bool operator==(const Exponent& a, const Exponent& b) {
        if (a.inf_ != b.inf_) return false;
        return a.inf_ || a.v_ == b.v_;
    }
    friend bool operator<=(const Exponent& a, const Exponent& b) {
        if (b.inf_) return true;
        if (a.inf_) return false;
        return a.v_ <= b.v_;
    }
    friend bool operator<(const Exponent& a, const Exponent& b) {
        return a <= b && !(a == b);
    }

private:
    bool inf_;
    Rat v_{1};
};

// s'(q) from 1/s'(q) + 1/s = 1/q, for 0 < q <= s <= inf.
inline Exponent conjugate_index(const Exponent& s, const Exponent& q) {
    if (q.is_inf() && !s.is_inf()) throw InvalidArgument("conjugate_index: q > s");
    if (!(q <= s)) throw InvalidArgument("conjugate_index: q > s");
    if (s == q) return Exponent::infinity();
    if (s.is_inf()) return q;
    Rat inv = q.reciprocal() - s.reciprocal();
    return Exponent(Rat(1) / inv);
}

// Parses "inf", "2", "3/2", "1.5".
inline Exponent parse_exponent(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF") return Exponent::infinity();
    return Exponent(parse_rat(s));
}

inline std::string exponent_str(const Exponent& e) {
    return e.is_inf() ? "inf" : rat_str(e.value());
}

} // namespace lipnorm
