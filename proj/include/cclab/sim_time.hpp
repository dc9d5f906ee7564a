#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cclab {

/// Nonnegative simulated time (or duration) in integer microseconds.
///
/// Arithmetic is checked: results that would wrap or go negative throw
/// std::overflow_error, since either one means the simulation logic is wrong.
class SimTime {
public:
    using rep = std::int64_t;

    constexpr SimTime() = default;

    static constexpr SimTime from_us(rep us) {
        if (us < 0) throw std::overflow_error("SimTime: negative time");
        SimTime t;
        t.us_ = us;
        return t;
    }
    static constexpr SimTime from_ms(rep ms) { return from_us(checked_mul(ms, 1000)); }
    static constexpr SimTime from_seconds(double s) {
        const double us = s * 1e6;
        if (!(us >= 0.0) || us > static_cast<double>(std::numeric_limits<rep>::max()))
            throw std::overflow_error("SimTime: seconds out of range");
        return from_us(static_cast<rep>(us + 0.5));
    }
    static constexpr SimTime max() { return from_us(std::numeric_limits<rep>::max()); }

    constexpr rep us() const { return us_; }
    constexpr double seconds() const { return static_cast<double>(us_) * 1e-6; }
    constexpr double ms() const { return static_cast<double>(us_) * 1e-3; }

    friend constexpr SimTime operator+(SimTime a, SimTime b) {
        if (a.us_ > std::numeric_limits<rep>::max() - b.us_)
            throw std::overflow_error("SimTime: addition overflow");
        return from_us(a.us_ + b.us_);
    }
    friend constexpr SimTime operator-(SimTime a, SimTime b) {
        if (b.us_ > a.us_) throw std::overflow_error("SimTime: subtraction below zero");
        return from_us(a.us_ - b.us_);
    }
    constexpr SimTime& operator+=(SimTime o) { return *this = *this + o; }
    friend constexpr SimTime operator*(SimTime a, rep k) { return from_us(checked_mul(a.us_, k)); }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;

    friend std::ostream& operator<<(std::ostream& os, SimTime t) { return os << t.us_ << "us"; }

private:
    static constexpr rep checked_mul(rep a, rep b) {
        if (a < 0 || b < 0) throw std::overflow_error("SimTime: negative factor");
        if (b != 0 && a > std::numeric_limits<rep>::max() / b)
            throw std::overflow_error("SimTime: multiplication overflow");
        return a * b;
    }

    rep us_ = 0;
};

namespace literals {
constexpr SimTime operator""_us(unsigned long long v) { return SimTime::from_us(static_cast<SimTime::rep>(v)); }
constexpr SimTime operator""_ms(unsigned long long v) { return SimTime::from_ms(static_cast<SimTime::rep>(v)); }
constexpr SimTime operator""_s(unsigned long long v) {
    return SimTime::from_ms(static_cast<SimTime::rep>(v) * 1000);
}
}  // namespace literals

}  // namespace cclab
