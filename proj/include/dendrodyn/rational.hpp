#ifndef DENDRODYN_RATIONAL_HPP
#define DENDRODYN_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "dendrodyn/error.hpp"

namespace dendrodyn {

// Exact rational scalar used for every length, position and distance.
// Expression templates are off so `auto` and lambdas capture values.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

// Parses "n/d" or "n" (optional leading minus). Zero denominators and stray
// characters are rejected.
inline Rational parse_rational(std::string_view text) {
    auto bad = [&](const char* why) {
        return Error(ErrorCode::ParseError,
                     "invalid rational '" + std::string(text) + "': " + why);
    };
    auto digits_ok = [](std::string_view s, bool allow_sign) {
        if (allow_sign && !s.empty() && s.front() == '-') s.remove_prefix(1);
        if (s.empty()) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    };
    const auto slash = text.find('/');
    const std::string_view num = text.substr(0, slash);
    const std::string_view den =
        slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!digits_ok(num, true)) throw bad("numerator is not an integer");
    if (!digits_ok(den, false)) throw bad("denominator is not a non-negative integer");
    Integer n{std::string(num)};
    Integer d{std::string(den)};
    if (d == 0) throw bad("zero denominator");
    return Rational(n, d);
}

// Canonical "n/d" form in lowest terms; the denominator is always written.
inline std::string format_rational(const Rational& q) {
    return boost::multiprecision::numerator(q).str() + "/" +
           boost::multiprecision::denominator(q).str();
}

inline Integer floor_of(const Rational& q) {
    Integer n = boost::multiprecision::numerator(q);
    Integer d = boost::multiprecision::denominator(q);
    Integer f = n / d;
    if (n < 0 && f * d != n) f -= 1;
    return f;
}

inline Integer ceil_of(const Rational& q) {
    Integer f = floor_of(q);
    return Rational(f) == q ? f : f + 1;
}

// x mod m in [0, m) for m > 0.
inline Rational mod_positive(const Rational& x, const Rational& m) {
    return x - Rational(floor_of(x / m)) * m;
}

inline Rational abs_of(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace dendrodyn

#endif  // DENDRODYN_RATIONAL_HPP
