#pragma once

// Exact arithmetic used throughout the library. All load and memory values
// are carried as rationals in lowest terms; doubles appear only at output
// boundaries (CSV, logs) and go through a 50-digit intermediate.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cachesim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;

inline Rational make_rational(BigInt num, BigInt den) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    return Rational(num, den);
}

inline double to_double(const Rational& r) {
    Float50 num(numerator(r));
    Float50 den(denominator(r));
    return (num / den).convert_to<double>();
}

inline double to_double(const BigInt& v) {
    return Float50(v).convert_to<double>();
}

// Accepts "p/q", integers, and plain decimal strings ("0.1" becomes 1/10 exactly).
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("rational: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        return make_rational(num, den);
    }
    bool neg = text[0] == '-';
    size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    auto dot = text.find('.');
    std::string digits = (dot == std::string::npos)
                             ? text.substr(start)
                             : text.substr(start, dot - start) + text.substr(dot + 1);
    size_t frac_len = (dot == std::string::npos) ? 0 : text.size() - dot - 1;
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("rational: bad literal '" + text + "'");
    // assemble digit by digit; the cpp_int string constructor reads a leading
    // zero as an octal prefix
    BigInt num = 0;
    for (char c : digits) num = num * 10 + (c - '0');
    if (neg) num = -num;
    BigInt den = 1;
    for (size_t i = 0; i < frac_len; ++i) den *= 10;
    return make_rational(num, den);
}

inline std::string format_rational(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

// 15 significant digits, the precision carried by all CSV float columns.
inline std::string format_g15(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return std::string(buf);
}

}  // namespace cachesim
