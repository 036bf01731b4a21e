#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lipnorm {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Rat rat_pow(const Rat& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("rat_pow: 0^negative");
        return Rat(1) / rat_pow(base, -e);
    }
    Rat acc(1), b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// Accepts "3", "-7/2", and plain decimals like "1.25".
inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + s + "'");
        return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(Int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    bool neg = !digits.empty() && digits[0] == '-';
    Int num(digits);
    Int den(1);
    for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    (void)neg;
    return Rat(num, den);
}

inline std::string rat_str(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

} // namespace lipnorm
