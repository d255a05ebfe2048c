#pragma once

#include <compare>
#include <ostream>

namespace infoplan {

/// Amount of base-2 information. Every entropy and information content in
/// this library is expressed in bits; differential entropies may be negative.
struct Bits {
    double value = 0.0;

    constexpr Bits() = default;
    constexpr explicit Bits(double v) : value(v) {}

    friend constexpr Bits operator+(Bits a, Bits b) { return Bits{a.value + b.value}; }
    friend constexpr Bits operator-(Bits a, Bits b) { return Bits{a.value - b.value}; }
    constexpr Bits& operator+=(Bits b) { value += b.value; return *this; }
    constexpr Bits operator-() const { return Bits{-value}; }
    friend constexpr Bits operator*(double s, Bits b) { return Bits{s * b.value}; }

    auto operator<=>(const Bits&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, Bits b) { return os << b.value << " bits"; }

} // namespace infoplan
