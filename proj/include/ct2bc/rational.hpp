#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace ct2bc {

/// Exact rational number with a positive, reduced denominator. Simulated
/// timestamps and positions use it so lightcone boundaries compare exactly.
/// Arithmetic that leaves the int64 range throws std::overflow_error.
class Rational {
public:
    constexpr Rational() noexcept = default;
    Rational(std::int64_t value) noexcept : num_(value) {} // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den);

    // Accepts "3", "-7/2" and "1.25".
    static Rational parse(std::string_view text);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;

    friend bool operator==(const Rational& a, const Rational& b) noexcept = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

    std::string to_string() const;
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

Rational abs(const Rational& r);

} // namespace ct2bc
