#include "cclab/segments.hpp"

#include <cmath>
#include <stdexcept>

namespace cclab {

namespace {

using i128 = __int128;

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

std::int64_t narrow(i128 v) {
    if (v >= kMax || v < -static_cast<i128>(kMax)) throw std::overflow_error("Segments: value out of range");
    return static_cast<std::int64_t>(v);
}

// Division rounding half away from zero; den > 0.
i128 div_round(i128 num, i128 den) {
    if (num >= 0) return (num + den / 2) / den;
    return -((-num + den / 2) / den);
}

}  // namespace

Segments Segments::from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("Segments: non-finite value");
    const long double scaled = static_cast<long double>(v) * static_cast<long double>(kScale);
    if (std::fabs(scaled) >= static_cast<long double>(kMax)) throw std::overflow_error("Segments: value out of range");
    return from_raw(static_cast<raw_type>(std::llround(scaled)));
}

Segments Segments::ratio(std::int64_t num, std::int64_t den) {
    if (den <= 0) throw std::invalid_argument("Segments: ratio denominator must be positive");
    return from_raw(narrow(div_round(static_cast<i128>(num) * kScale, den)));
}

double Segments::to_double() const {
    if (is_infinite()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(raw_ / kScale) + static_cast<double>(raw_ % kScale) / static_cast<double>(kScale);
}

Segments Segments::reciprocal() const {
    if (raw_ <= 0) throw std::domain_error("Segments: reciprocal of non-positive window");
    if (is_infinite()) return Segments{};
    return from_raw(narrow(div_round(static_cast<i128>(kScale) * kScale, raw_)));
}

Segments Segments::scaled(Segments factor) const {
    if (is_infinite()) return *this;
    return from_raw(narrow(div_round(static_cast<i128>(raw_) * factor.raw_, kScale)));
}

Segments operator+(Segments a, Segments b) {
    if (a.is_infinite() || b.is_infinite()) return Segments::infinity();
    return Segments::from_raw(narrow(static_cast<i128>(a.raw_) + b.raw_));
}

Segments operator-(Segments a, Segments b) {
    if (b.is_infinite()) throw std::domain_error("Segments: subtracting infinity");
    if (a.is_infinite()) return a;
    return Segments::from_raw(narrow(static_cast<i128>(a.raw_) - b.raw_));
}

std::string Segments::to_string() const {
    if (is_infinite()) return "inf";
    const bool neg = raw_ < 0;
    const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(raw_ + 1)) + 1 : static_cast<std::uint64_t>(raw_);
    std::string out = (neg ? "-" : "") + std::to_string(mag / kScale);
    std::uint64_t frac = mag % kScale;
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, 12 - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') digits.pop_back();
        out += "." + digits;
    }
    return out;
}

}  // namespace cclab
