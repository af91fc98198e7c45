#pragma once

/// @file primitives.hpp
/// @brief The eleven closed-form candidate activation functions.
///
/// Every primitive is total over the reals. Derivatives are exact; at a kink
/// (ReLU/ELU/SeLU at 0, HardSigmoid and HardELiSH at -1 and 1) the
/// right-hand derivative is returned, the same convention that assigns x = 0
/// to the right piece of a genome.

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

namespace afevo {

enum class Primitive {
    ELiSH,
    HardELiSH,
    Swish,
    ReLU,
    ELU,
    SeLU,
    Softplus,
    HardSigmoid,
    Sigmoid,
    Sin,
    Linear,
};

inline constexpr std::size_t kPrimitiveCount = 11;

inline constexpr std::array<Primitive, kPrimitiveCount> kAllPrimitives = {
    Primitive::ELiSH,    Primitive::HardELiSH,   Primitive::Swish,   Primitive::ReLU,
    Primitive::ELU,      Primitive::SeLU,        Primitive::Softplus, Primitive::HardSigmoid,
    Primitive::Sigmoid,  Primitive::Sin,         Primitive::Linear,
};

/// SeLU scaling constants (fixed, not configurable).
struct SeluConstants {
    static constexpr double alpha = 1.6732632423543772;
    static constexpr double lambda = 1.0507009873554805;
};

constexpr std::string_view name(Primitive p) noexcept {
    switch (p) {
    case Primitive::ELiSH: return "ELiSH";
    case Primitive::HardELiSH: return "HardELiSH";
    case Primitive::Swish: return "Swish";
    case Primitive::ReLU: return "ReLU";
    case Primitive::ELU: return "ELU";
    case Primitive::SeLU: return "SeLU";
    case Primitive::Softplus: return "Softplus";
    case Primitive::HardSigmoid: return "HardSigmoid";
    case Primitive::Sigmoid: return "Sigmoid";
    case Primitive::Sin: return "Sin";
    case Primitive::Linear: return "Linear";
    }
    return {};
}

/// Case-sensitive lookup of a canonical primitive name.
constexpr std::optional<Primitive> primitive_from_name(std::string_view token) noexcept {
    for (Primitive p : kAllPrimitives) {
        if (name(p) == token) return p;
    }
    return std::nullopt;
}

namespace detail {

inline double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double hard_sigmoid(double x) noexcept {
    return std::fmax(0.0, std::fmin(1.0, (x + 1.0) / 2.0));
}

// right-hand slope: the ramp includes -1 and excludes 1
inline double hard_sigmoid_slope(double x) noexcept {
    return (x >= -1.0 && x < 1.0) ? 0.5 : 0.0;
}

inline double swish(double x) noexcept { return x * sigmoid(x); }

inline double swish_derivative(double x) noexcept {
    const double s = sigmoid(x);
    return s + x * s * (1.0 - s);
}

} // namespace detail

inline double value(Primitive p, double x) noexcept {
    using namespace detail;
    switch (p) {
    case Primitive::ELiSH:
        return x >= 0.0 ? swish(x) : std::expm1(x) * sigmoid(x);
    case Primitive::HardELiSH:
        return x >= 0.0 ? x * hard_sigmoid(x) : std::expm1(x) * hard_sigmoid(x);
    case Primitive::Swish:
        return swish(x);
    case Primitive::ReLU:
        return std::fmax(x, 0.0);
    case Primitive::ELU:
        return x >= 0.0 ? x : std::expm1(x);
    case Primitive::SeLU:
        return SeluConstants::lambda * (x >= 0.0 ? x : SeluConstants::alpha * std::expm1(x));
    case Primitive::Softplus:
        // max(x,0) + log1p(e^-|x|) never overflows
        return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
    case Primitive::HardSigmoid:
        return hard_sigmoid(x);
    case Primitive::Sigmoid:
        return sigmoid(x);
    case Primitive::Sin:
        return std::sin(x);
    case Primitive::Linear:
        return x;
    }
    return x;
}

inline double derivative(Primitive p, double x) noexcept {
    using namespace detail;
    switch (p) {
    case Primitive::ELiSH:
        if (x >= 0.0) return swish_derivative(x);
        else {
            const double s = sigmoid(x);
            return std::exp(x) * s + std::expm1(x) * s * (1.0 - s);
        }
    case Primitive::HardELiSH:
        if (x >= 0.0) return hard_sigmoid(x) + x * hard_sigmoid_slope(x);
        return std::exp(x) * hard_sigmoid(x) + std::expm1(x) * hard_sigmoid_slope(x);
    case Primitive::Swish:
        return swish_derivative(x);
    case Primitive::ReLU:
        return x >= 0.0 ? 1.0 : 0.0;
    case Primitive::ELU:
        return x >= 0.0 ? 1.0 : std::exp(x);
    case Primitive::SeLU:
        return SeluConstants::lambda * (x >= 0.0 ? 1.0 : SeluConstants::alpha * std::exp(x));
    case Primitive::Softplus:
        return sigmoid(x);
    case Primitive::HardSigmoid:
        return hard_sigmoid_slope(x);
    case Primitive::Sigmoid: {
        const double s = sigmoid(x);
        return s * (1.0 - s);
    }
    case Primitive::Sin:
        return std::cos(x);
    case Primitive::Linear:
        return 1.0;
    }
    return 1.0;
}

} // namespace afevo
