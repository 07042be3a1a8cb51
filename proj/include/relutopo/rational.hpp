#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relutopo {

// Expression templates are off so that `auto x = a + b;` holds a value.
// The two-argument constructor Rational(p, q) needs q > 0; GMP reads q as unsigned.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

/// Raised for malformed numeric text.
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline int sign(const Rational& r) {
    return r.sign();
}

/// Formats as "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) {
    return r.str();
}

/// Parses a fraction "p/q" (the "/q" part is optional) or a finite decimal such as "-0.25", exactly.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> ParseError {
        return ParseError("malformed rational '" + std::string(text) + "'");
    };
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw fail();

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    auto all_digits = [](std::string_view d) {
        for (char c : d)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };

    Rational value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (num.empty() || den.empty() || !all_digits(num) || !all_digits(den)) throw fail();
        Integer d{std::string(den)};
        if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        value = Rational(Integer(std::string(num)), d);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto whole = s.substr(0, dot);
        auto frac = s.substr(dot + 1);
        if ((whole.empty() && frac.empty()) || !all_digits(whole) || !all_digits(frac)) throw fail();
        Integer w = whole.empty() ? Integer(0) : Integer(std::string(whole));
        Integer f = frac.empty() ? Integer(0) : Integer(std::string(frac));
        Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac.size()));
        value = Rational(w * scale + f, scale);
    } else {
        if (!all_digits(s)) throw fail();
        value = Rational(Integer(std::string(s)));
    }
    return negative ? Rational(-value) : value;
}

inline double to_double(const Rational& r) {
    return r.convert_to<double>();
}

inline Rational floor(const Rational& r) {
    Integer q = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
    if (r.sign() < 0 && Rational(q) != r) q -= 1;
    return Rational(q);
}

inline Rational ceil(const Rational& r) {
    return -floor(-r);
}

} // namespace relutopo
