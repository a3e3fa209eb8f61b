#ifndef IDERIV_NUMERIC_HPP
#define IDERIV_NUMERIC_HPP

// Exact integer/rational arithmetic used throughout the library.
// Coefficients grow like factorials of the derivative order, so fixed-width
// integers are out of the question even at modest orders.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ideriv {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial: negative argument");
    Int r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

inline Int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Int r = 1;
    for (int i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;  // exact at every step
    }
    return r;
}

/// Quotient that is known to be exact; a nonzero remainder means a broken
/// invariant somewhere upstream, not bad input.
inline Int exact_div(const Int& num, const Int& den) {
    if (den == 0) throw std::logic_error("exact_div: zero divisor");
    Int q = num / den;
    if (q * den != num) throw std::logic_error("exact_div: quotient not integral");
    return q;
}

inline Int int_pow(Int base, int exp) {
    if (exp < 0) throw std::invalid_argument("int_pow: negative exponent");
    Int r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

inline Rat rat_pow(const Rat& base, int exp) {
    if (exp < 0) {
        if (base == 0) throw std::invalid_argument("rat_pow: zero to negative power");
        return 1 / rat_pow(base, -exp);
    }
    Rat r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

/// Strict base-10 integer parse.  cpp_int's own string constructor follows
/// C literal rules, so "025" would silently come back as octal 21.
inline Int parse_int_decimal(const std::string& text) {
    std::string s = text;
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s.erase(0, 1);
    }
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("parse_int_decimal: malformed integer '" + text + "'");
    auto nz = s.find_first_not_of('0');
    Int v(nz == std::string::npos ? "0" : s.substr(nz));
    return neg ? -v : v;
}

/// Parses "7", "-3/4" or a decimal like "2.5e-3" into an exact rational.
inline Rat parse_rat(const std::string& text) {
    auto fail = [&]() -> Rat {
        throw std::invalid_argument("parse_rat: malformed number '" + text + "'");
    };
    if (text.empty()) return fail();
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        if (slash == 0 || slash + 1 >= text.size()) return fail();
        Int num, den;
        try {
            num = parse_int_decimal(text.substr(0, slash));
            den = parse_int_decimal(text.substr(slash + 1));
        } catch (const std::exception&) {
            return fail();
        }
        if (den == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + text + "'");
        return Rat(num, den);
    }

    // Decimal form: sign, digits, optional fraction, optional exponent.
    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-') neg = text[pos++] == '-';
    std::string digits;
    long frac_digits = 0;
    bool any = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        digits += text[pos++];
        any = true;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            digits += text[pos++];
            ++frac_digits;
            any = true;
        }
    }
    if (!any) return fail();
    long exp10 = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) eneg = text[pos++] == '-';
        if (pos >= text.size()) return fail();
        std::string edig;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) edig += text[pos++];
        if (edig.empty() || edig.size() > 6) return fail();
        exp10 = std::atol(edig.c_str());
        if (eneg) exp10 = -exp10;
    }
    if (pos != text.size()) return fail();

    Int num = parse_int_decimal(digits.empty() ? "0" : digits);
    if (neg) num = -num;
    long shift = exp10 - frac_digits;
    Int scale = int_pow(10, static_cast<int>(shift < 0 ? -shift : shift));
    return shift >= 0 ? Rat(num * scale) : Rat(num, scale);
}

/// Renders a rational as "p" or "p/q" (q > 1).
inline std::string rat_text(const Rat& value) {
    std::string s = numerator(value).str();
    if (denominator(value) != 1) s += "/" + denominator(value).str();
    return s;
}

inline double rat_to_double(const Rat& value) {
    return value.convert_to<double>();
}

}  // namespace ideriv

#endif  // IDERIV_NUMERIC_HPP
