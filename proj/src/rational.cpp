#include "nilspec/rational.hpp"

#include <limits>
#include <stdexcept>

namespace nilspec {

namespace {

__int128 gcd_wide(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

Rational::Rational(std::int64_t num) : num_(num), den_(1) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = gcd_wide(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    constexpr auto lo = std::numeric_limits<std::int64_t>::min();
    constexpr auto hi = std::numeric_limits<std::int64_t>::max();
    if (num < lo || num > hi || den > hi) throw std::overflow_error("Rational: 64-bit overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                               static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("Rational: empty string");
    try {
        if (auto slash = text.find('/'); slash != std::string::npos) {
            std::size_t used = 0;
            std::int64_t p = std::stoll(text.substr(0, slash), &used);
            if (used != slash) throw std::invalid_argument("bad numerator");
            std::string rest = text.substr(slash + 1);
            std::int64_t q = std::stoll(rest, &used);
            if (used != rest.size()) throw std::invalid_argument("bad denominator");
            return Rational(p, q);
        }
        if (auto dot = text.find('.'); dot != std::string::npos) {
            std::string digits = text.substr(0, dot) + text.substr(dot + 1);
            std::size_t used = 0;
            std::int64_t p = std::stoll(digits, &used);
            if (used != digits.size()) throw std::invalid_argument("bad decimal");
            std::int64_t q = 1;
            for (std::size_t i = dot + 1; i < text.size(); ++i) q *= 10;
            return Rational(p, q);
        }
        std::size_t used = 0;
        std::int64_t p = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument("bad integer");
        return Rational(p);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("Rational: cannot parse '" + text + "'");
    }
}

}  // namespace nilspec
