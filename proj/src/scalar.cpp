#include "racreach/scalar.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace racreach {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

[[noreturn]] void bad_number(std::string_view text) {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
}

Scalar parse_decimal(std::string_view text, std::string_view original) {
    bool negative = false;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = text.substr(e + 1);
        text = text.substr(0, e);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
            exp_negative = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 6) bad_number(original);
        exponent = std::stol(std::string(exp_part));
        if (exp_negative) exponent = -exponent;
    }
    std::string digits;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view int_part = text.substr(0, dot);
        std::string_view frac_part = text.substr(dot + 1);
        if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
            (int_part.empty() && frac_part.empty())) {
            bad_number(original);
        }
        digits = std::string(int_part) + std::string(frac_part);
        exponent -= static_cast<long>(frac_part.size());
    } else {
        if (!all_digits(text)) bad_number(original);
        digits = std::string(text);
    }
    mpz_class mantissa(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    Scalar value = exponent >= 0 ? Scalar(mantissa * scale) : Scalar(mantissa, scale);
    value.canonicalize();
    return negative ? Scalar(-value) : value;
}

}  // namespace

Scalar parse_scalar(std::string_view text) {
    std::string_view original = text;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) bad_number(original);

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Scalar num = parse_decimal(text.substr(0, slash), original);
        Scalar den = parse_decimal(text.substr(slash + 1), original);
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(original) + "'");
        return num / den;
    }
    return parse_decimal(text, original);
}

std::string to_string(const Scalar& value) {
    return value.get_str();
}

double to_double(const Scalar& value) {
    // get_d truncates toward zero; step to the neighbour if it is closer
    const double d = value.get_d();
    if (!std::isfinite(d) || sgn(value) == 0) return d;
    const double away = std::nextafter(d, sgn(value) > 0 ? HUGE_VAL : -HUGE_VAL);
    if (!std::isfinite(away)) return d;
    const Scalar gap_d = abs(value - Scalar(d));
    const Scalar gap_away = abs(Scalar(away) - value);
    return gap_away < gap_d ? away : d;
}

Scalar from_double(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite value has no rational form");
    return Scalar(value);
}

}  // namespace racreach
