#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "hvmforge/errors.hpp"

namespace hvmforge {

// Exact arithmetic throughout: probabilities, expectations and LP entries
// are arbitrary-precision rationals, always kept in lowest terms.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Renders "num/den", or just "num" for integers. Inverse of parse_rational.
inline std::string format_rational(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += '/';
        s += denominator(r).str();
    }
    return s;
}

// Accepts "3", "-3", "+1/2", "7/12". Denominator must be nonzero.
inline Rational parse_rational(std::string_view text) {
    const std::string input(text);
    auto fail = [&](const char* why) -> Rational {
        throw SchemaError("bad rational '" + input + "': " + why);
    };

    std::string_view rest = text;
    bool negative = false;
    if (!rest.empty() && (rest.front() == '+' || rest.front() == '-')) {
        negative = rest.front() == '-';
        rest.remove_prefix(1);
    }

    auto take_digits = [&](std::string_view& sv) -> std::string {
        std::string digits;
        while (!sv.empty() && sv.front() >= '0' && sv.front() <= '9') {
            digits += sv.front();
            sv.remove_prefix(1);
        }
        // Leading zeros would make BigInt read the digits as octal.
        const std::size_t first = digits.find_first_not_of('0');
        if (first == std::string::npos) return digits.empty() ? digits : "0";
        return digits.substr(first);
    };

    const std::string num_digits = take_digits(rest);
    if (num_digits.empty()) fail("missing numerator digits");

    BigInt num(num_digits);
    BigInt den(1);
    if (!rest.empty()) {
        if (rest.front() != '/') fail("unexpected character");
        rest.remove_prefix(1);
        const std::string den_digits = take_digits(rest);
        if (den_digits.empty()) fail("missing denominator digits");
        if (!rest.empty()) fail("trailing characters");
        den = BigInt(den_digits);
        if (den == 0) fail("zero denominator");
    }
    if (negative) num = -num;
    return Rational(num, den);
}

}  // namespace hvmforge
