#include "privstory/rational.hpp"

namespace privstory {

std::string to_string(const Rational &r) {
    return r.str();
}

double to_double(const Rational &r) {
    return r.convert_to<double>();
}

double round3(const Rational &r) {
    using boost::multiprecision::cpp_int;
    const Rational scaled = r * 1000;
    cpp_int num = boost::multiprecision::numerator(scaled);
    const cpp_int den = boost::multiprecision::denominator(scaled);
    const bool negative = num < 0;
    if (negative) {
        num = -num;
    }
    cpp_int rounded = (2 * num + den) / (2 * den);
    if (negative) {
        rounded = -rounded;
    }
    return rounded.convert_to<double>() / 1000.0;
}

Rational safe_div(const Rational &n, const Rational &d) {
    if (d == 0) {
        return Rational(0);
    }
    return n / d;
}

}  // namespace privstory
