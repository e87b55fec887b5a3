#include "heatlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <vector>

namespace heatlab {

struct Expr::Node {
    NodeKind kind;
    double value = 0.0;
    std::string name;
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    Expr a, b;
};

Expr Expr::constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr a) {
    // Fold negation of a literal so that "-2" and Neg(Const 2) are the
    // same tree; keeps print/parse round-trips structural.
    if (op == UnaryOp::Neg && a.kind() == NodeKind::Constant)
        return constant(-a.value());
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Unary;
    n->uop = op;
    n->a = std::move(a);
    return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr a, Expr b) {
    if (op == BinaryOp::Pow && b.kind() != NodeKind::Constant)
        throw std::invalid_argument("pow exponent must be a numeric literal");
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->bop = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
UnaryOp Expr::unary_op() const { return node_->uop; }
BinaryOp Expr::binary_op() const { return node_->bop; }
const Expr& Expr::child() const { return node_->a; }
const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }

std::optional<std::string> Expr::free_variable() const {
    switch (kind()) {
    case NodeKind::Constant: return std::nullopt;
    case NodeKind::Variable: return node_->name;
    case NodeKind::Unary: return child().free_variable();
    case NodeKind::Binary: {
        auto l = lhs().free_variable();
        auto r = rhs().free_variable();
        return l ? l : r;
    }
    }
    return std::nullopt;
}

bool Expr::same_structure(const Expr& other) const {
    if (kind() != other.kind()) return false;
    switch (kind()) {
    case NodeKind::Constant: return value() == other.value();
    case NodeKind::Variable: return name() == other.name();
    case NodeKind::Unary:
        return unary_op() == other.unary_op() && child().same_structure(other.child());
    case NodeKind::Binary:
        return binary_op() == other.binary_op() && lhs().same_structure(other.lhs()) &&
               rhs().same_structure(other.rhs());
    }
    return false;
}

double Expr::operator()(double v) const {
    switch (kind()) {
    case NodeKind::Constant: return value();
    case NodeKind::Variable: return v;
    case NodeKind::Unary: {
        double a = child()(v);
        switch (unary_op()) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Exp: return std::exp(a);
        case UnaryOp::Log:
            if (a <= 0.0) throw EvalError("log of nonpositive argument", a);
            return std::log(a);
        case UnaryOp::Sqrt:
            if (a < 0.0) throw EvalError("sqrt of negative argument", a);
            return std::sqrt(a);
        }
        break;
    }
    case NodeKind::Binary: {
        double a = lhs()(v);
        double b = rhs()(v);
        switch (binary_op()) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
            if (b == 0.0) throw EvalError("division by zero", v);
            return a / b;
        case BinaryOp::Pow: {
            if (a == 0.0 && b < 0.0) throw EvalError("zero base with negative exponent", v);
            if (a < 0.0 && b != std::floor(b))
                throw EvalError("negative base with non-integer exponent", v);
            return std::pow(a, b);
        }
        }
        break;
    }
    }
    throw std::logic_error("unreachable expr kind");
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
    switch (e.kind()) {
    case NodeKind::Constant:
        return e.value() < 0 ? 3 : 5;
    case NodeKind::Variable:
        return 5;
    case NodeKind::Unary:
        return e.unary_op() == UnaryOp::Neg ? 3 : 5;  // calls are atoms
    case NodeKind::Binary:
        switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
        }
    }
    return 5;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_rec(const Expr& e, std::string& out, int parent_prec) {
    int prec = precedence(e);
    bool parens = prec < parent_prec;
    if (parens) out += '(';
    switch (e.kind()) {
    case NodeKind::Constant:
        out += fmt_double(e.value());
        break;
    case NodeKind::Variable:
        out += e.name();
        break;
    case NodeKind::Unary:
        switch (e.unary_op()) {
        case UnaryOp::Neg:
            out += '-';
            print_rec(e.child(), out, 4);
            break;
        case UnaryOp::Exp:
            out += "exp(";
            print_rec(e.child(), out, 0);
            out += ')';
            break;
        case UnaryOp::Log:
            out += "log(";
            print_rec(e.child(), out, 0);
            out += ')';
            break;
        case UnaryOp::Sqrt:
            out += "sqrt(";
            print_rec(e.child(), out, 0);
            out += ')';
            break;
        }
        break;
    case NodeKind::Binary: {
        const char* op = nullptr;
        switch (e.binary_op()) {
        case BinaryOp::Add: op = "+"; break;
        case BinaryOp::Sub: op = "-"; break;
        case BinaryOp::Mul: op = "*"; break;
        case BinaryOp::Div: op = "/"; break;
        case BinaryOp::Pow: op = "^"; break;
        }
        if (e.binary_op() == BinaryOp::Pow) {
            print_rec(e.lhs(), out, 5);
            out += '^';
            out += fmt_double(e.rhs().value());
        } else {
            // left-assoc: right child needs one level higher
            print_rec(e.lhs(), out, prec);
            out += op;
            print_rec(e.rhs(), out, prec + 1);
        }
        break;
    }
    }
    if (parens) out += ')';
}

} // namespace

std::string Expr::str() const {
    std::string out;
    print_rec(*this, out, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over a byte cursor.
//
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := '-' factor | power
//   power    := primary ('^' exponent)?
//   exponent := signed-number ('^' exponent)?        (folded to one literal)
//   primary  := number | ident | ident '(' expr ')' | '(' expr ')'
//
// '^' binds tighter than unary minus, so "-s^2" is -(s^2).

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty expression", 0);
        Expr e = parse_sum();
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError("unexpected trailing input", pos_);
        if (vars_.size() > 1)
            throw ParseError("more than one free variable: " + vars_[0] + ", " + vars_[1], 0);
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<std::string> vars_;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_sum() {
        Expr e = parse_term();
        for (;;) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                Expr r = parse_term();
                e = Expr::binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, std::move(e), std::move(r));
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                Expr r = parse_factor();
                e = Expr::binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, std::move(e), std::move(r));
            } else {
                return e;
            }
        }
    }

    Expr parse_factor() {
        if (peek() == '-') {
            ++pos_;
            return Expr::unary(UnaryOp::Neg, parse_factor());
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (peek() == '^')
            return Expr::binary(BinaryOp::Pow, std::move(base),
                                Expr::constant(parse_exponent()));
        return base;
    }

    // signed numeric literal; a right-associative chain of literals folds
    // into a single constant exponent
    double parse_exponent() {
        char c = peek();
        if (c != '^') throw ParseError("expected '^'", pos_);
        ++pos_;
        skip_ws();
        double sign = 1.0;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            if (text_[pos_] == '-') sign = -1.0;
            ++pos_;
        }
        double v = sign * parse_number_literal();
        if (peek() == '^') v = std::pow(v, parse_exponent());
        return v;
    }

    double parse_number_literal() {
        skip_ws();
        if (pos_ >= text_.size() || !(std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            throw ParseError("expected numeric literal", pos_);
        // strtod needs a NUL-terminated buffer
        std::string buf(text_.substr(pos_, 64));
        char* end = nullptr;
        double v = std::strtod(buf.c_str(), &end);
        if (end == buf.c_str()) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - buf.c_str());
        return v;
    }

    Expr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return Expr::constant(parse_number_literal());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string ident(text_.substr(start, pos_ - start));
            if (peek() == '(') {
                ++pos_;
                Expr arg = parse_sum();
                if (peek() != ')') throw ParseError("expected ')'", pos_);
                ++pos_;
                if (ident == "exp") return Expr::unary(UnaryOp::Exp, std::move(arg));
                if (ident == "log") return Expr::unary(UnaryOp::Log, std::move(arg));
                if (ident == "sqrt") return Expr::unary(UnaryOp::Sqrt, std::move(arg));
                throw ParseError("unknown function '" + ident + "'", start);
            }
            for (const auto& v : vars_)
                if (v == ident) return Expr::variable(ident);
            vars_.push_back(ident);
            return Expr::variable(ident);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
};

} // namespace

Expr parse_expr(std::string_view text) {
    return Parser(text).run();
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

// Internal working form: PowerLogLaw c*v^q*log(v)^r subsumes Constant (q=r=0)
// and PowerLaw (r=0); ExpLaw kept separately.
struct Canon {
    enum Kind { PLL, Exp, General } kind = General;
    double c = 0, q = 0, r = 0, lam = 0;

    static Canon constant(double v) { return {PLL, v, 0, 0, 0}; }
    bool is_const() const { return kind == PLL && q == 0 && r == 0; }
};

Canon canon_general() { return {}; }

Canon canon_mul(const Canon& a, const Canon& b) {
    if (a.kind == Canon::General || b.kind == Canon::General) return canon_general();
    if (a.kind == Canon::PLL && b.kind == Canon::PLL)
        return {Canon::PLL, a.c * b.c, a.q + b.q, a.r + b.r, 0};
    if (a.kind == Canon::Exp && b.kind == Canon::Exp)
        return {Canon::Exp, a.c * b.c, 0, 0, a.lam + b.lam};
    // constant times exponential
    const Canon& e = a.kind == Canon::Exp ? a : b;
    const Canon& p = a.kind == Canon::Exp ? b : a;
    if (p.is_const()) return {Canon::Exp, e.c * p.c, 0, 0, e.lam};
    return canon_general();
}

Canon canon_pow(const Canon& a, double p) {
    if (a.kind == Canon::General) return canon_general();
    if (a.c < 0 && p != std::floor(p)) return canon_general();
    double cp = std::pow(a.c, p);
    if (!std::isfinite(cp)) return canon_general();
    if (a.kind == Canon::PLL) return {Canon::PLL, cp, a.q * p, a.r * p, 0};
    return {Canon::Exp, cp, 0, 0, a.lam * p};
}

Canon canon_of(const Expr& e) {
    switch (e.kind()) {
    case NodeKind::Constant:
        return Canon::constant(e.value());
    case NodeKind::Variable:
        return {Canon::PLL, 1, 1, 0, 0};
    case NodeKind::Unary: {
        Canon a = canon_of(e.child());
        if (a.kind == Canon::General) return canon_general();
        switch (e.unary_op()) {
        case UnaryOp::Neg:
            a.c = -a.c;
            return a;
        case UnaryOp::Exp:
            if (a.is_const()) return Canon::constant(std::exp(a.c));
            if (a.kind == Canon::PLL && a.q == 1 && a.r == 0)
                return {Canon::Exp, 1, 0, 0, a.c};
            return canon_general();
        case UnaryOp::Log:
            if (a.is_const() && a.c > 0) return Canon::constant(std::log(a.c));
            if (a.kind == Canon::PLL && a.c == 1 && a.q == 1 && a.r == 0)
                return {Canon::PLL, 1, 0, 1, 0};
            return canon_general();
        case UnaryOp::Sqrt:
            return canon_pow(a, 0.5);
        }
        return canon_general();
    }
    case NodeKind::Binary: {
        Canon a = canon_of(e.lhs());
        Canon b = canon_of(e.rhs());
        switch (e.binary_op()) {
        case BinaryOp::Add:
            if (a.is_const() && b.is_const()) return Canon::constant(a.c + b.c);
            if (a.is_const() && a.c == 0) return b;
            if (b.is_const() && b.c == 0) return a;
            return canon_general();
        case BinaryOp::Sub:
            if (a.is_const() && b.is_const()) return Canon::constant(a.c - b.c);
            if (b.is_const() && b.c == 0) return a;
            return canon_general();
        case BinaryOp::Mul:
            return canon_mul(a, b);
        case BinaryOp::Div:
            return canon_mul(a, canon_pow(b, -1.0));
        case BinaryOp::Pow:
            return canon_pow(a, e.rhs().value());
        }
        return canon_general();
    }
    }
    return canon_general();
}

} // namespace

CanonicalForm canonicalize(const Expr& e) {
    Canon c = canon_of(e);
    CanonicalForm out;
    if (c.kind == Canon::General) {
        out.tag = CanonTag::General;
    } else if (c.kind == Canon::Exp) {
        if (c.lam == 0 || c.c == 0) {
            out.tag = CanonTag::Constant;
            out.c = c.c == 0 ? 0.0 : c.c;
        } else {
            out.tag = CanonTag::ExpLaw;
            out.c = c.c;
            out.lambda = c.lam;
        }
    } else {
        if (c.c == 0 || (c.q == 0 && c.r == 0)) {
            out.tag = CanonTag::Constant;
            out.c = c.c;
        } else if (c.r == 0) {
            out.tag = CanonTag::PowerLaw;
            out.c = c.c;
            out.q = c.q;
        } else {
            out.tag = CanonTag::PowerLogLaw;
            out.c = c.c;
            out.q = c.q;
            out.r = c.r;
        }
    }
    return out;
}

double CanonicalForm::eval(double v) const {
    switch (tag) {
    case CanonTag::Constant: return c;
    case CanonTag::PowerLaw: return c * std::pow(v, q);
    case CanonTag::ExpLaw: return c * std::exp(lambda * v);
    case CanonTag::PowerLogLaw: return c * std::pow(v, q) * std::pow(std::log(v), r);
    case CanonTag::General: break;
    }
    throw std::logic_error("cannot evaluate a General canonical form");
}

std::string CanonicalForm::describe() const {
    std::ostringstream os;
    switch (tag) {
    case CanonTag::Constant: os << "Constant(" << c << ")"; break;
    case CanonTag::PowerLaw: os << "PowerLaw(c=" << c << ", q=" << q << ")"; break;
    case CanonTag::ExpLaw: os << "ExpLaw(c=" << c << ", lambda=" << lambda << ")"; break;
    case CanonTag::PowerLogLaw:
        os << "PowerLogLaw(c=" << c << ", q=" << q << ", r=" << r << ")";
        break;
    case CanonTag::General: os << "General"; break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Shape checks

namespace {

std::vector<double> shape_sample_points(double lo, double hi) {
    std::vector<double> pts;
    pts.reserve(1100);
    const bool unbounded = !std::isfinite(hi);
    if (unbounded) {
        double a = std::max(lo, 0.0) + 1e-8;
        // log-spaced from just above lo out to 1e8
        double la = std::log(a), lb = std::log(1e8);
        for (int i = 0; i <= 1000; ++i)
            pts.push_back(std::exp(la + (lb - la) * i / 1000.0));
    } else {
        double span = hi - lo;
        for (int i = 1; i < 1000; ++i) pts.push_back(lo + span * i / 1000.0);
        // extra resolution near the left endpoint
        for (int i = 1; i <= 64; ++i) pts.push_back(lo + span * std::pow(2.0, -i - 4));
        std::sort(pts.begin(), pts.end());
    }
    return pts;
}

} // namespace

ShapeVerdict check_shape(const Expr& e, Shape property, double lo, double hi) {
    CanonicalForm cf = canonicalize(e);
    ShapeVerdict v;

    auto exact_hold = [&](bool h, std::optional<double> w = std::nullopt) {
        v.holds = h;
        v.numerical_only = false;
        v.witness = w;
        return v;
    };

    const double probe = std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 1.0;
    switch (cf.tag) {
    case CanonTag::Constant:
        switch (property) {
        case Shape::Nonnegative: return exact_hold(cf.c >= 0, cf.c >= 0 ? std::nullopt : std::make_optional(probe));
        case Shape::Positive: return exact_hold(cf.c > 0, cf.c > 0 ? std::nullopt : std::make_optional(probe));
        case Shape::Nondecreasing: return exact_hold(true);
        }
        break;
    case CanonTag::PowerLaw:
        if (lo >= 0) {
            switch (property) {
            case Shape::Nonnegative: return exact_hold(cf.c >= 0, cf.c >= 0 ? std::nullopt : std::make_optional(probe));
            case Shape::Positive: return exact_hold(cf.c > 0, cf.c > 0 ? std::nullopt : std::make_optional(probe));
            case Shape::Nondecreasing:
                return exact_hold(cf.c == 0 || cf.c * cf.q >= 0,
                                  (cf.c == 0 || cf.c * cf.q >= 0) ? std::nullopt : std::make_optional(probe));
            }
        }
        break;
    case CanonTag::ExpLaw:
        switch (property) {
        case Shape::Nonnegative: return exact_hold(cf.c >= 0, cf.c >= 0 ? std::nullopt : std::make_optional(probe));
        case Shape::Positive: return exact_hold(cf.c > 0, cf.c > 0 ? std::nullopt : std::make_optional(probe));
        case Shape::Nondecreasing:
            return exact_hold(cf.c == 0 || cf.c * cf.lambda >= 0,
                              (cf.c == 0 || cf.c * cf.lambda >= 0) ? std::nullopt : std::make_optional(probe));
        }
        break;
    case CanonTag::PowerLogLaw:
        // log keeps a fixed sign only past v = 1
        if (lo >= 1 && cf.c > 0 && cf.q >= 0 && cf.r >= 0) {
            switch (property) {
            case Shape::Nonnegative: return exact_hold(true);
            case Shape::Positive: return exact_hold(true);  // open interval, v > 1
            case Shape::Nondecreasing: return exact_hold(true);
            }
        }
        break;
    case CanonTag::General:
        break;
    }

    // Sampled fallback
    v.numerical_only = true;
    v.holds = true;
    auto pts = shape_sample_points(lo, hi);
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool have_prev = false;
    for (double x : pts) {
        double y;
        try {
            y = e(x);
        } catch (const EvalError&) {
            continue;  // outside the expression's domain
        }
        if (!std::isfinite(y)) continue;
        switch (property) {
        case Shape::Nonnegative:
            if (y < 0) { v.holds = false; v.witness = x; return v; }
            break;
        case Shape::Positive:
            if (y <= 0) { v.holds = false; v.witness = x; return v; }
            break;
        case Shape::Nondecreasing:
            if (have_prev && y < prev - 1e-12 * (1 + std::abs(prev))) {
                v.holds = false;
                v.witness = x;
                return v;
            }
            prev = y;
            have_prev = true;
            break;
        }
    }
    return v;
}

} // namespace heatlab
