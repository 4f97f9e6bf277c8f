/**
 * @file rational.hpp
 * @brief Exact rational scalar used for every polynomial coefficient.
 *
 * Backed by GMP's mpq_class. Helpers here convert between the exact scalar,
 * decimal text, and IEEE doubles without ever routing through binary floating
 * point when the input is text.
 */
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace convlyap {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "12", "-3/4", "2.1", "1e-3", "2.5E2" exactly.
inline Rational parse_rational(std::string_view text)
{
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    std::string s(text);
    bool negative = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }
    if (auto slash = s.find('/', pos); slash != std::string::npos) {
        BigInt num, den;
        if (num.set_str(s.substr(pos, slash - pos), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0)
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        Rational r(num, den);
        r.canonicalize();
        return negative ? Rational(-r) : r;
    }

    std::string digits;
    long frac_digits = 0;
    bool seen_point = false, seen_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw std::invalid_argument("malformed rational literal '" + s + "'");
    long exponent = 0;
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("malformed rational literal '" + s + "'");
        std::size_t used = 0;
        try {
            exponent = std::stol(s.substr(pos + 1), &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed exponent in '" + s + "'");
        }
        if (pos + 1 + used != s.size()) throw std::invalid_argument("malformed exponent in '" + s + "'");
    }
    exponent -= frac_digits;
    BigInt num(digits, 10);
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational r = exponent < 0 ? Rational(num, scale) : Rational(num * scale);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

/// Every finite double is an exact dyadic rational; this conversion is lossless.
inline Rational from_double(double v)
{
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational form");
    Rational r;
    mpq_set_d(r.get_mpq_t(), v);
    return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline bool fits_int64(const BigInt& z)
{
    return mpz_sizeinbase(z.get_mpz_t(), 2) <= 62;
}

inline std::int64_t to_int64(const BigInt& z)
{
    if (!fits_int64(z)) throw std::overflow_error("integer does not fit in 64 bits");
    return static_cast<std::int64_t>(mpz_get_si(z.get_mpz_t()));
}

inline BigInt pow_int(unsigned long base, unsigned long exponent)
{
    BigInt z;
    mpz_ui_pow_ui(z.get_mpz_t(), base, exponent);
    return z;
}

inline Rational pow(const Rational& base, unsigned long exponent)
{
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
    return r;
}

}  // namespace convlyap
