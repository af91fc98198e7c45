#pragma once

/// @file dual.hpp
/// @brief Scalar dual numbers carrying f(x) and f'(x) through an expression.

#include <cmath>
#include <limits>

#include "primitives.hpp"

namespace afevo {

struct DualValue {
    double value = 0.0;
    double deriv = 0.0;

    static constexpr DualValue variable(double x) noexcept { return {x, 1.0}; }

    /// False if either component is NaN or infinite.
    bool finite() const noexcept { return std::isfinite(value) && std::isfinite(deriv); }

    friend constexpr bool operator==(const DualValue&, const DualValue&) = default;
};

inline DualValue operator+(DualValue a, DualValue b) noexcept {
    return {a.value + b.value, a.deriv + b.deriv};
}

inline DualValue operator-(DualValue a, DualValue b) noexcept {
    return {a.value - b.value, a.deriv - b.deriv};
}

inline DualValue operator*(DualValue a, DualValue b) noexcept {
    return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
}

// true IEEE division, a zero denominator is not masked
inline DualValue operator/(DualValue a, DualValue b) noexcept {
    const double v = a.value / b.value;
    return {v, (a.deriv - v * b.deriv) / b.value};
}

/// Real power a^b.
///
/// The value is std::pow, so a negative base with a non-integer exponent is
/// NaN. For a > 0 the derivative is a^b (b' ln a + b a'/a); otherwise the
/// b' ln a term only contributes when b' != 0 and is then NaN.
inline DualValue pow(DualValue a, DualValue b) noexcept {
    const double v = std::pow(a.value, b.value);
    if (a.value > 0.0) {
        return {v, v * (b.deriv * std::log(a.value) + b.value * a.deriv / a.value)};
    }
    double d = b.value * std::pow(a.value, b.value - 1.0) * a.deriv;
    if (b.deriv != 0.0) d += v * std::log(a.value) * b.deriv;
    return {v, d};
}

namespace detail {
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

// ties pick the left operand; a NaN operand propagates
inline DualValue min(DualValue a, DualValue b) noexcept {
    if (std::isnan(a.value) || std::isnan(b.value)) return {detail::kNaN, detail::kNaN};
    return a.value <= b.value ? a : b;
}

inline DualValue max(DualValue a, DualValue b) noexcept {
    if (std::isnan(a.value) || std::isnan(b.value)) return {detail::kNaN, detail::kNaN};
    return a.value >= b.value ? a : b;
}

/// p(u) with the chain rule applied to the inner derivative.
inline DualValue apply(Primitive p, DualValue u) noexcept {
    if (std::isnan(u.value)) return {detail::kNaN, detail::kNaN};
    return {value(p, u.value), derivative(p, u.value) * u.deriv};
}

} // namespace afevo
