#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace diophlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Structured errors shared across modules.  Enumerations and experiment
// drivers throw these instead of silently truncating.
struct BudgetExceeded : std::runtime_error {
    double lambda1_lower_bound = 0.0;  // proven bound when a minima search aborts
    explicit BudgetExceeded(const std::string& what, double lb = 0.0)
        : std::runtime_error(what), lambda1_lower_bound(lb) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// Parses "p", "p/q" or a plain decimal like "0.25" into an exact rational.
inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw ConfigError("rational with zero denominator: " + s);
        return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(Int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    bool neg = false;
    if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
        neg = digits[0] == '-';
        digits = digits.substr(1);
    }
    if (digits.empty()) throw ConfigError("malformed rational: " + s);
    Int num(digits);
    Int den = 1;
    for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    Rat r(num, den);
    return neg ? Rat(-r) : r;
}

inline std::string rat_str(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Int rat_floor(const Rat& r) {
    Int q = numerator(r) / denominator(r);
    if (r < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

inline Int rat_ceil(const Rat& r) { return -rat_floor(Rat(-r)); }

// Nearest integer, ties resolved toward the even integer.
inline Int round_half_even(const Rat& r) {
    Int f = rat_floor(r);
    Rat frac = r - Rat(f);
    if (frac < Rat(1, 2)) return f;
    if (frac > Rat(1, 2)) return f + 1;
    return (f % 2 == 0) ? f : f + 1;
}

inline double round_half_even(double x) {
    double f = std::floor(x);
    double frac = x - f;
    if (frac < 0.5) return f;
    if (frac > 0.5) return f + 1.0;
    return (std::fmod(f, 2.0) == 0.0) ? f : f + 1.0;
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("0^negative");
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

// Distance from r to the nearest integer.
inline Rat dist_to_int(const Rat& r) {
    Rat frac = r - Rat(rat_floor(r));
    return frac <= Rat(1, 2) ? frac : Rat(1) - frac;
}

inline double dist_to_int(double x) {
    double d = std::fabs(x - std::nearbyint(x));
    return d;
}

}  // namespace diophlab
