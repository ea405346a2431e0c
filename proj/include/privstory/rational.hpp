#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace privstory {

/// Exact arbitrary-precision rational used for all score arithmetic.
using Rational = boost::multiprecision::cpp_rational;

[[nodiscard]] inline Rational ratio(std::int64_t num, std::int64_t den) {
    return Rational(num, den);
}

/// "n/d" (or "n" for integers).
[[nodiscard]] std::string to_string(const Rational &r);

[[nodiscard]] double to_double(const Rational &r);

/// Round half away from zero to three decimals, as reports show scores.
[[nodiscard]] double round3(const Rational &r);

/// n / d, or 0 when d == 0.
[[nodiscard]] Rational safe_div(const Rational &n, const Rational &d);

}  // namespace privstory
