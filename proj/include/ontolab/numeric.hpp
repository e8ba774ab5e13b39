#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

#include "ontolab/errors.hpp"

namespace ontolab {

// Arbitrary-precision rational, the value type of the exact backend.
// Expression templates are off so arithmetic yields plain values and the
// same generic code instantiates for double and Rational alike.
using Rational =
    boost::multiprecision::number<boost::multiprecision::backends::gmp_rational, boost::multiprecision::et_off>;
using BigInt =
    boost::multiprecision::number<boost::multiprecision::backends::gmp_int, boost::multiprecision::et_off>;

// Normalization slack accepted when building float-backend tables.
inline constexpr double kFloatNormTolerance = 1e-9;

// Dense tables are capped at this many entries.
inline constexpr std::size_t kTableCap = 10'000'000;

// Default pass threshold for float-backend checks.
inline constexpr double kDefaultFloatTolerance = 1e-9;

template <class Num>
struct numeric_traits;

template <>
struct numeric_traits<double> {
    static constexpr bool is_exact = false;
    static constexpr const char* backend_name() { return "float"; }
    static double from_double(double x) { return x; }
    static double to_double(double x) { return x; }
};

template <>
struct numeric_traits<Rational> {
    static constexpr bool is_exact = true;
    static constexpr const char* backend_name() { return "exact"; }
    // Every finite double is a dyadic rational; this conversion is exact.
    static Rational from_double(double x) { return Rational(x); }
    static double to_double(const Rational& x) { return x.template convert_to<double>(); }
};

template <class Num>
Num num_abs(const Num& x) {
    return x < Num(0) ? Num(-x) : x;
}

namespace detail {

inline Rational pow10(long e) {
    Rational r(1);
    BigInt p(10);
    long n = e < 0 ? -e : e;
    BigInt acc(1);
    for (long i = 0; i < n; ++i) acc *= p;
    return e >= 0 ? Rational(acc) : Rational(BigInt(1), acc);
}

// GMP's string reader treats a leading 0 as an octal prefix; strip leading
// zeros (keeping the sign) so "025" reads as twenty-five.
inline BigInt parse_integer(std::string s) {
    std::string sign;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        if (s[0] == '-') sign = "-";
        s.erase(0, 1);
    }
    std::size_t nz = s.find_first_not_of('0');
    s = nz == std::string::npos ? "0" : s.substr(nz);
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) throw InvalidProbability("bad integer literal");
    if (s.empty()) throw InvalidProbability("bad integer literal");
    return BigInt(sign + s);
}

} // namespace detail

// Parses "p/q", integer, plain decimal ("0.25") or scientific ("2.5e-3")
// strings into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto bad = [&] { throw InvalidProbability("not a valid rational literal: '" + std::string(text) + "'"); };
    std::string s(text);
    if (s.empty()) bad();

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (num.empty() || den.empty()) bad();
        try {
            Rational r{detail::parse_integer(num), detail::parse_integer(den)};
            return r;
        } catch (const std::exception&) {
            bad();
        }
    }

    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_len = 0;
    bool seen_dot = false, seen_digit = false;
    long exponent = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            seen_digit = true;
            if (seen_dot) ++frac_len;
        } else if (c == '.') {
            if (seen_dot) bad();
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            std::string etail = s.substr(i + 1);
            if (etail.empty()) bad();
            std::size_t pos = 0;
            try {
                exponent = std::stol(etail, &pos);
            } catch (const std::exception&) {
                bad();
            }
            if (pos != etail.size()) bad();
            break;
        } else {
            bad();
        }
    }
    if (!seen_digit) bad();
    Rational r{detail::parse_integer(digits)};
    r *= detail::pow10(exponent - frac_len);
    return neg ? Rational(-r) : r;
}

template <class Num>
Num parse_number(std::string_view text);

template <>
inline Rational parse_number<Rational>(std::string_view text) {
    return parse_rational(text);
}

template <>
inline double parse_number<double>(std::string_view text) {
    // Parse through the rational grammar so the two backends accept the
    // same literals ("1/3" included).
    return numeric_traits<Rational>::to_double(parse_rational(text));
}

// 12 significant digits, the report dialect for floats.
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string format_number(double x) { return format_double(x); }

inline std::string format_number(const Rational& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

} // namespace ontolab
