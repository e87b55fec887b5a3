#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace heatlab {

enum class NodeKind { Constant, Variable, Unary, Binary };
enum class UnaryOp { Neg, Exp, Log, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg), offset(offset) {}
    std::size_t offset;
};

struct EvalError : std::runtime_error {
    EvalError(const std::string& msg, double at)
        : std::runtime_error(msg), at(at) {}
    double at;
};

/// Immutable AST of a scalar function of one free variable.
/// Value-semantic handle; nodes are shared and never mutated.
class Expr {
public:
    Expr() = default;

    static Expr constant(double v);
    static Expr variable(std::string name);
    static Expr unary(UnaryOp op, Expr a);
    // Pow requires a constant right-hand side.
    static Expr binary(BinaryOp op, Expr a, Expr b);

    bool valid() const { return node_ != nullptr; }

    NodeKind kind() const;
    double value() const;              // Constant only
    const std::string& name() const;   // Variable only
    UnaryOp unary_op() const;
    BinaryOp binary_op() const;
    const Expr& child() const;         // Unary operand
    const Expr& lhs() const;
    const Expr& rhs() const;

    /// The single free-variable name, or nullopt for a closed expression.
    std::optional<std::string> free_variable() const;

    bool same_structure(const Expr& other) const;

    /// Evaluate with the free variable bound to v. Throws EvalError on
    /// domain violations (log/sqrt of a negative, division by zero, ...).
    double operator()(double v) const;

    /// Parse-stable serialization: parse(str()) reproduces the tree.
    std::string str() const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Expr parse_expr(std::string_view text);

// ---------------------------------------------------------------------------
// Canonical families

enum class CanonTag { Constant, PowerLaw, ExpLaw, PowerLogLaw, General };

/// Recognized parametric family of an expression:
///   Constant     c
///   PowerLaw     c * v^q
///   ExpLaw       c * e^{lambda v}
///   PowerLogLaw  c * v^q * log(v)^r
struct CanonicalForm {
    CanonTag tag = CanonTag::General;
    double c = 0.0;
    double q = 0.0;
    double r = 0.0;
    double lambda = 0.0;

    double eval(double v) const;
    std::string describe() const;
};

CanonicalForm canonicalize(const Expr& e);

// ---------------------------------------------------------------------------
// Shape checks

enum class Shape { Nonnegative, Positive, Nondecreasing };

struct ShapeVerdict {
    bool holds = false;
    bool numerical_only = false;       // sampled, not decided from a canonical form
    std::optional<double> witness;     // a failing point, when holds == false
};

/// Decide a pointwise/monotonicity property on the open interval (lo, hi);
/// hi may be +infinity. Exact for recognized canonical forms, otherwise
/// sampled on a dense grid and flagged numerical_only.
ShapeVerdict check_shape(const Expr& e, Shape property, double lo, double hi);

} // namespace heatlab
