#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace gevrey {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shape/invariant violations: mismatched variable counts, bad indices, ...
struct structure_error : error {
    using error::error;
};

// a request that the finite truncation cannot answer
struct truncation_error : error {
    using error::error;
};

// non-invertible series, quadrature failure, divergent direction, ...
struct numeric_error : error {
    using error::error;
};

struct parse_error : error {
    std::size_t position;
    parse_error(const std::string& msg, std::size_t pos)
        : error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

inline Integer factorial(unsigned n) {
    Integer r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

inline Integer binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    Integer r = 1;
    for (unsigned i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

inline Rational pow_rational(const Rational& base, unsigned e) {
    Rational r = 1, b = base;
    while (e) {
        if (e & 1u) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// canonical "p" / "p/q" rendering; the sign lives on the numerator
inline std::string to_string(const Rational& q) {
    const Integer num = boost::multiprecision::numerator(q);
    const Integer den = boost::multiprecision::denominator(q);
    std::string s = num.str();
    if (den != 1) s += "/" + den.str();
    return s;
}

inline Rational rational_from_string(const std::string& s) {
    if (s.empty()) throw parse_error("empty rational literal", 0);
    try {
        const auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(Integer(s));
        const Integer num(s.substr(0, slash));
        const Integer den(s.substr(slash + 1));
        if (den <= 0) throw parse_error("denominator must be positive: " + s, slash + 1);
        return Rational(num, den);
    } catch (const std::exception&) {
        throw parse_error("malformed rational literal: " + s, 0);
    }
}

// natural log of a huge positive integer via mantissa + bit-shift split
inline double log_integer(const Integer& n) {
    if (n <= 0) throw numeric_error("log of non-positive integer");
    const auto bits = boost::multiprecision::msb(n);
    if (bits <= 900) return std::log(n.convert_to<double>());
    const unsigned shift = static_cast<unsigned>(bits) - 512;
    const Integer top = n >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

inline double log_rational(const Rational& q) {
    if (q <= 0) throw numeric_error("log of non-positive rational");
    return log_integer(boost::multiprecision::numerator(q)) -
           log_integer(boost::multiprecision::denominator(q));
}

} // namespace gevrey
