#pragma once

/// @file expr.hpp
/// @brief Activation-function expression trees.
///
/// An expression is either a primitive leaf or a binary operator node. Every
/// subtree is a function of the same input x, so `(comp:f:g)` is f(g(x)) and
/// `(+:f:g)` is f(x) + g(x). Nodes are immutable and shared between trees.
///
/// Textual grammar (prefix, no whitespace):
///
///     expr := PRIMITIVE | "(" OP ":" expr ":" expr ")"
///     OP   := "+" | "-" | "*" | "/" | "^" | "min" | "max" | "comp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "dual.hpp"
#include "primitives.hpp"

namespace afevo {

enum class Operator { Add, Sub, Mul, Div, Pow, Min, Max, Comp };

inline constexpr std::size_t kOperatorCount = 8;

inline constexpr std::array<Operator, kOperatorCount> kAllOperators = {
    Operator::Add, Operator::Sub, Operator::Mul, Operator::Div,
    Operator::Pow, Operator::Min, Operator::Max, Operator::Comp,
};

constexpr std::string_view token(Operator op) noexcept {
    switch (op) {
    case Operator::Add: return "+";
    case Operator::Sub: return "-";
    case Operator::Mul: return "*";
    case Operator::Div: return "/";
    case Operator::Pow: return "^";
    case Operator::Min: return "min";
    case Operator::Max: return "max";
    case Operator::Comp: return "comp";
    }
    return {};
}

constexpr std::optional<Operator> operator_from_token(std::string_view tok) noexcept {
    for (Operator op : kAllOperators) {
        if (token(op) == tok) return op;
    }
    return std::nullopt;
}

/// Malformed expression text. position() is the 0-based offset of the
/// offending character.
class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(std::size_t position, const std::string& reason)
        : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + reason),
          position_(position), reason_(reason) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& reason() const noexcept { return reason_; }

  private:
    std::size_t position_;
    std::string reason_;
};

namespace detail {
struct ExprNode;
}

class Expr {
  public:
    /// A single-primitive leaf.
    Expr(Primitive p);

    static Expr leaf(Primitive p) { return Expr(p); }
    static Expr node(Operator op, Expr left, Expr right);

    bool is_leaf() const noexcept;

    /// Precondition: is_leaf().
    Primitive primitive() const;

    /// Precondition: !is_leaf().
    Operator op() const;
    const Expr& left() const;
    const Expr& right() const;

    std::size_t node_count() const noexcept;
    std::size_t depth() const noexcept;

    /// Structural equality.
    friend bool operator==(const Expr& a, const Expr& b);

  private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}

    std::shared_ptr<const detail::ExprNode> node_;
};

namespace detail {

struct ExprBinary {
    Operator op;
    Expr left;
    Expr right;
};

struct ExprNode {
    explicit ExprNode(Primitive p) : content(p) {}
    ExprNode(Operator op, Expr l, Expr r)
        : count(1 + l.node_count() + r.node_count()),
          depth(1 + std::max(l.depth(), r.depth())),
          content(ExprBinary{op, std::move(l), std::move(r)}) {}

    std::size_t count = 1;
    std::size_t depth = 1;
    std::variant<Primitive, ExprBinary> content;
};

} // namespace detail

inline Expr::Expr(Primitive p) : node_(std::make_shared<const detail::ExprNode>(p)) {}

inline Expr Expr::node(Operator op, Expr left, Expr right) {
    return Expr(std::make_shared<const detail::ExprNode>(op, std::move(left), std::move(right)));
}

inline bool Expr::is_leaf() const noexcept { return std::holds_alternative<Primitive>(node_->content); }
inline Primitive Expr::primitive() const { return std::get<Primitive>(node_->content); }
inline Operator Expr::op() const { return std::get<detail::ExprBinary>(node_->content).op; }
inline const Expr& Expr::left() const { return std::get<detail::ExprBinary>(node_->content).left; }
inline const Expr& Expr::right() const { return std::get<detail::ExprBinary>(node_->content).right; }
inline std::size_t Expr::node_count() const noexcept { return node_->count; }
inline std::size_t Expr::depth() const noexcept { return node_->depth; }

inline bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_count() != b.node_count() || a.depth() != b.depth()) return false;
    if (a.is_leaf() != b.is_leaf()) return false;
    if (a.is_leaf()) return a.primitive() == b.primitive();
    return a.op() == b.op() && a.left() == b.left() && a.right() == b.right();
}

inline std::size_t node_count(const Expr& e) noexcept { return e.node_count(); }
inline std::size_t depth(const Expr& e) noexcept { return e.depth(); }

namespace detail {

inline void serialize_into(const Expr& e, std::string& out) {
    if (e.is_leaf()) {
        out += name(e.primitive());
        return;
    }
    out += '(';
    out += token(e.op());
    out += ':';
    serialize_into(e.left(), out);
    out += ':';
    serialize_into(e.right(), out);
    out += ')';
}

class ExprParser {
  public:
    // bounds recursion on hostile input; evolved trees are far shallower
    static constexpr std::size_t kMaxNesting = 4096;

    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr parse_all() {
        if (text_.empty()) throw SyntaxError(0, "empty expression");
        Expr e = parse_expr(0);
        if (pos_ != text_.size()) throw SyntaxError(pos_, "trailing input");
        return e;
    }

  private:
    Expr parse_expr(std::size_t nesting) {
        if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
        if (text_[pos_] == '(') {
            if (nesting >= kMaxNesting) throw SyntaxError(pos_, "nesting too deep");
            ++pos_;
            const std::size_t op_pos = pos_;
            const std::string_view tok = read_token();
            const auto op = operator_from_token(tok);
            if (!op) throw SyntaxError(op_pos, "unknown operator '" + std::string(tok) + "'");
            expect(':', "expected ':' after operator");
            Expr left = parse_expr(nesting + 1);
            if (pos_ < text_.size() && text_[pos_] == ')')
                throw SyntaxError(pos_, "operator '" + std::string(tok) + "' requires 2 operands");
            expect(':', "expected ':' between operands");
            Expr right = parse_expr(nesting + 1);
            if (pos_ < text_.size() && text_[pos_] == ':')
                throw SyntaxError(pos_, "operator '" + std::string(tok) + "' takes exactly 2 operands");
            expect(')', "expected ')'");
            return Expr::node(*op, std::move(left), std::move(right));
        }
        const std::size_t start = pos_;
        const std::string_view tok = read_token();
        if (tok.empty()) throw SyntaxError(start, std::string("unexpected '") + text_[start] + "'");
        const auto p = primitive_from_name(tok);
        if (!p) throw SyntaxError(start, "unknown primitive '" + std::string(tok) + "'");
        return Expr::leaf(*p);
    }

    std::string_view read_token() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ':' && text_[pos_] != '(' && text_[pos_] != ')') ++pos_;
        return text_.substr(start, pos_ - start);
    }

    void expect(char c, const char* reason) {
        if (pos_ >= text_.size() || text_[pos_] != c) throw SyntaxError(pos_, reason);
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parse the prefix form. Throws SyntaxError.
inline Expr parse(std::string_view text) { return detail::ExprParser(text).parse_all(); }

/// Canonical prefix form; parse(serialize(e)) == e.
inline std::string serialize(const Expr& e) {
    std::string out;
    out.reserve(e.node_count() * 8);
    detail::serialize_into(e, out);
    return out;
}

/// Value and exact derivative of e at the dual input u. Non-finite results
/// (from Div or Pow) are returned as-is.
inline DualValue eval_dual(const Expr& e, DualValue u) noexcept {
    if (e.is_leaf()) return apply(e.primitive(), u);
    if (e.op() == Operator::Comp) return eval_dual(e.left(), eval_dual(e.right(), u));
    const DualValue a = eval_dual(e.left(), u);
    const DualValue b = eval_dual(e.right(), u);
    switch (e.op()) {
    case Operator::Add: return a + b;
    case Operator::Sub: return a - b;
    case Operator::Mul: return a * b;
    case Operator::Div: return a / b;
    case Operator::Pow: return pow(a, b);
    case Operator::Min: return min(a, b);
    case Operator::Max: return max(a, b);
    case Operator::Comp: break;
    }
    return a;
}

inline DualValue eval_dual(const Expr& e, double x) noexcept {
    return eval_dual(e, DualValue::variable(x));
}

} // namespace afevo
