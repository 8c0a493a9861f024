#include "ct2bc/rational.hpp"

#include "ct2bc/errors.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace ct2bc {
namespace {

using wide = __int128;

constexpr wide kMax = static_cast<wide>(INT64_MAX);
constexpr wide kMin = static_cast<wide>(INT64_MIN);

wide gcd_wide(wide a, wide b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make(wide num, wide den) {
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const wide g = gcd_wide(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num > kMax || num < kMin || den > kMax) {
        throw std::overflow_error("rational arithmetic overflow");
    }
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::int64_t parse_int(std::string_view text) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ParameterError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    wide n = num;
    wide d = den;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const wide g = gcd_wide(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (n > kMax || n < kMin || d > kMax) {
        throw std::overflow_error("rational out of range");
    }
    num_ = static_cast<std::int64_t>(n);
    den_ = static_cast<std::int64_t>(d);
}

Rational Rational::parse(std::string_view text) {
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        const bool negative = !text.empty() && text.front() == '-';
        std::string_view int_part = text.substr(0, dot);
        std::string_view frac_part = text.substr(dot + 1);
        if (frac_part.empty() || frac_part.size() > 18 || frac_part.front() == '-' || frac_part.front() == '+') {
            throw ParameterError("not a number: '" + std::string(text) + "'");
        }
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) {
            scale *= 10;
        }
        const std::int64_t whole = (int_part.empty() || int_part == "-") ? 0 : parse_int(int_part);
        const std::int64_t frac = parse_int(frac_part);
        const wide magnitude = static_cast<wide>(whole < 0 ? -whole : whole) * scale + frac;
        return make(negative ? -magnitude : magnitude, scale);
    }
    return Rational(parse_int(text));
}

Rational operator+(const Rational& a, const Rational& b) {
    return make(static_cast<wide>(a.num_) * b.den_ + static_cast<wide>(b.num_) * a.den_,
                static_cast<wide>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return make(static_cast<wide>(a.num_) * b.den_ - static_cast<wide>(b.num_) * a.den_,
                static_cast<wide>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<wide>(a.num_) * b.num_, static_cast<wide>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    return make(static_cast<wide>(a.num_) * b.den_, static_cast<wide>(a.den_) * b.num_);
}

Rational Rational::operator-() const { return make(-static_cast<wide>(num_), den_); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    const wide lhs = static_cast<wide>(a.num_) * b.den_;
    const wide rhs = static_cast<wide>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::to_string() const {
    if (den_ == 1) {
        return std::to_string(num_);
    }
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

} // namespace ct2bc
