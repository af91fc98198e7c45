#pragma once

/// @file genome.hpp
/// @brief Piecewise activation functions and the genetic operators on them.
///
/// A genome has a left gene applied for x < 0 and a right gene applied for
/// x >= 0. Textual form is `left|right`, e.g. `Sin|(+:Swish:Swish)`.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include "expr.hpp"
#include "rng.hpp"

namespace afevo {

struct Genome {
    Expr left;
    Expr right;

    static Genome whole(Expr e) { return {e, e}; }

    std::size_t node_count() const noexcept { return left.node_count() + right.node_count(); }
    std::size_t depth() const noexcept { return std::max(left.depth(), right.depth()); }

    friend bool operator==(const Genome&, const Genome&) = default;
};

/// Canonical `left|right` text; doubles as the fitness-cache key.
inline std::string serialize(const Genome& g) {
    return serialize(g.left) + '|' + serialize(g.right);
}

/// Parse `left|right`. Throws SyntaxError with a position into the whole text.
inline Genome parse_genome(std::string_view text) {
    const auto bar = text.find('|');
    if (bar == std::string_view::npos) {
        throw SyntaxError(text.size(), "expected '|' separating left and right genes");
    }
    if (text.find('|', bar + 1) != std::string_view::npos) {
        throw SyntaxError(text.find('|', bar + 1), "more than one '|'");
    }
    Expr left = [&] {
        try {
            return parse(text.substr(0, bar));
        } catch (const SyntaxError& e) {
            throw SyntaxError(e.position(), "left gene: " + e.reason());
        }
    }();
    Expr right = [&] {
        try {
            return parse(text.substr(bar + 1));
        } catch (const SyntaxError& e) {
            throw SyntaxError(bar + 1 + e.position(), "right gene: " + e.reason());
        }
    }();
    return {std::move(left), std::move(right)};
}

/// Piece dispatch: x = 0 belongs to the right gene.
inline DualValue genome_value_dual(const Genome& g, double x) noexcept {
    return eval_dual(x < 0.0 ? g.left : g.right, x);
}

/// Knobs shared by the genetic operators.
struct OperatorConfig {
    double p_hybrid = 0.5;
    double p_mutate = 1.0;
    std::size_t max_depth = 8;
};

using Offspring = std::pair<Genome, Genome>;

/// Swap genes at the fixed cutoff between left and right.
inline Offspring inheritance(const Genome& mom, const Genome& dad) {
    return {Genome{mom.left, dad.right}, Genome{dad.left, mom.right}};
}

/// Hybrid crossover with explicit operators. Falls back to inheritance when
/// any offspring gene would exceed max_depth.
inline Offspring hybrid_with(const Genome& mom, const Genome& dad, Operator left_op, Operator right_op,
                             std::size_t max_depth) {
    const std::size_t left_depth = 1 + std::max(mom.left.depth(), dad.left.depth());
    const std::size_t right_depth = 1 + std::max(mom.right.depth(), dad.right.depth());
    if (left_depth > max_depth || right_depth > max_depth) return inheritance(mom, dad);
    return {
        Genome{Expr::node(left_op, mom.left, dad.left), Expr::node(right_op, mom.right, dad.right)},
        Genome{Expr::node(left_op, dad.left, mom.left), Expr::node(right_op, dad.right, mom.right)},
    };
}

/// Draws the left and right operators (two draws, always), then combines.
inline Offspring hybrid(const Genome& mom, const Genome& dad, RngStream& rng, std::size_t max_depth) {
    const Operator left_op = kAllOperators[rng.uniform_index(kOperatorCount)];
    const Operator right_op = kAllOperators[rng.uniform_index(kOperatorCount)];
    return hybrid_with(mom, dad, left_op, right_op, max_depth);
}

/// Coin toss between hybrid (probability p_hybrid) and inheritance.
inline Offspring crossover(const Genome& mom, const Genome& dad, RngStream& rng, const OperatorConfig& cfg) {
    if (rng.bernoulli(cfg.p_hybrid)) return hybrid(mom, dad, rng, cfg.max_depth);
    return inheritance(mom, dad);
}

enum class GeneSide { Left, Right };

/// Replace one gene with a primitive leaf.
inline Genome mutate_with(const Genome& g, GeneSide side, Primitive replacement) {
    if (side == GeneSide::Left) return {Expr::leaf(replacement), g.right};
    return {g.left, Expr::leaf(replacement)};
}

/// With probability p_mutate, replace a uniformly chosen gene by a uniformly
/// chosen primitive. Draws: the gate, then side and primitive only if it fires.
inline Genome mutate(const Genome& g, RngStream& rng, double p_mutate) {
    if (!rng.bernoulli(p_mutate)) return g;
    const auto side = rng.uniform_index(2) == 0 ? GeneSide::Left : GeneSide::Right;
    const Primitive p = kAllPrimitives[rng.uniform_index(kPrimitiveCount)];
    return mutate_with(g, side, p);
}

} // namespace afevo
