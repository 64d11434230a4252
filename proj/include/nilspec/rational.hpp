#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace nilspec {

/// Exact rational number with 64-bit numerator and positive denominator,
/// always stored in lowest terms. Arithmetic throws std::overflow_error
/// instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num);  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_integer() const { return den_ == 1; }
    Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }

    Rational operator-() const { return Rational(-num_, den_); }
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    std::string to_string() const;

    /// Parses "p", "p/q" or a finite decimal such as "0.5".
    static Rational parse(const std::string& text);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline double to_double(const Rational& r) { return r.to_double(); }
inline double to_double(double x) { return x; }

}  // namespace nilspec
