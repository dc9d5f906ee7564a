#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

namespace cclab {

/// Window size in segment units, stored as fixed-point with 10^-12 resolution.
///
/// Every operation rounds to the nearest ulp, so per-ACK increments such as
/// 1/cwnd accumulate identically on every platform.
class Segments {
public:
    using raw_type = std::int64_t;
    static constexpr raw_type kScale = 1'000'000'000'000;  // 1 segment
    static constexpr double kUlp = 1e-12;

    constexpr Segments() = default;
    constexpr explicit Segments(std::int64_t whole) : raw_(whole * kScale) {}

    static constexpr Segments from_raw(raw_type raw) {
        Segments s;
        s.raw_ = raw;
        return s;
    }
    static Segments from_double(double v);
    /// Exact ratio num/den rounded to the nearest ulp.
    static Segments ratio(std::int64_t num, std::int64_t den);
    static constexpr Segments infinity() { return from_raw(std::numeric_limits<raw_type>::max()); }

    constexpr raw_type raw() const { return raw_; }
    constexpr bool is_infinite() const { return raw_ == std::numeric_limits<raw_type>::max(); }
    double to_double() const;
    /// Whole segments, rounded down.
    constexpr std::int64_t floor() const { return raw_ / kScale; }

    /// 1/this, rounded to nearest.
    Segments reciprocal() const;
    /// this * factor where factor is itself fixed-point, rounded to nearest.
    Segments scaled(Segments factor) const;

    friend Segments operator+(Segments a, Segments b);
    friend Segments operator-(Segments a, Segments b);
    Segments& operator+=(Segments o) { return *this = *this + o; }

    friend constexpr auto operator<=>(Segments, Segments) = default;

    /// Decimal rendering with trailing zeros trimmed, e.g. "10.1" or "inf".
    std::string to_string() const;
    friend std::ostream& operator<<(std::ostream& os, Segments s) { return os << s.to_string(); }

private:
    raw_type raw_ = 0;
};

inline Segments max(Segments a, Segments b) { return a < b ? b : a; }
inline Segments min(Segments a, Segments b) { return a < b ? a : b; }

}  // namespace cclab
