#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace orb {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational rat(long n, long d = 1) { return Rational(n, d); }

// Parses "p", "-p", "p/q". Throws std::invalid_argument on malformed input.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument("bad rational literal '" + s + "'");
    }
}

inline std::string rational_str(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline long to_long(const Rational& r) {
    if (!is_integer(r)) throw std::invalid_argument("not an integer: " + rational_str(r));
    return static_cast<long>(numerator(r));
}

// min over "rational with +infinity" (nullopt = +infinity)
inline std::optional<Rational> opt_min(const std::optional<Rational>& a,
                                       const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

inline std::optional<Rational> opt_add(const std::optional<Rational>& a, const Rational& b) {
    if (!a) return std::nullopt;
    return *a + b;
}

}  // namespace orb
