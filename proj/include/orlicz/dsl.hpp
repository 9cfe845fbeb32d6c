#pragma once

// Expression language for defining Young functions, kernels and Morrey
// weights in scenario files. One free variable `t`, arithmetic, ln/exp,
// min/max and a piecewise form whose guards compare t against literals:
//
//   piecewise(t<1: t^(3/2); t>=1: t*ln(e*t)^(1/2))
//
// Named constants (n, p, ...) are resolved at parse time from the caller's
// bindings, so an AST always evaluates the same way.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/common.hpp"

namespace orlicz::dsl {

class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

class EvalError : public Error {
  public:
    explicit EvalError(const std::string& what) : Error(what) {}
};

enum class NodeKind { number, var_t, add, sub, mul, div, pow, neg, ln, exp, min, max, piecewise };

enum class CmpOp { lt, le, gt, ge };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Guard {
    CmpOp op;
    double threshold;

    bool matches(double t) const {
        switch (op) {
            case CmpOp::lt: return t < threshold;
            case CmpOp::le: return t <= threshold;
            case CmpOp::gt: return t > threshold;
            case CmpOp::ge: return t >= threshold;
        }
        return false;
    }
};

struct Node {
    NodeKind kind;
    double value = 0.0;                 // number
    std::vector<NodePtr> args;          // operands / branch bodies
    std::vector<Guard> guards;          // piecewise only, one per branch
};

using Bindings = std::map<std::string, double>;

namespace detail {

struct Parser {
    const std::string& src;
    const Bindings& bindings;
    std::size_t pos = 0;

    Parser(const std::string& s, const Bindings& b) : src(s), bindings(b) {}

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        return src.substr(start, pos - start);
    }

    double number() {
        skip_ws();
        std::size_t start = pos;
        std::size_t consumed = 0;
        double v;
        try {
            v = std::stod(src.substr(start), &consumed);
        } catch (const std::exception&) {
            throw ParseError("expected a number", start);
        }
        pos = start + consumed;
        return v;
    }

    static NodePtr make(NodeKind k, std::vector<NodePtr> args = {}) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->args = std::move(args);
        return n;
    }

    static NodePtr make_number(double v) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::number;
        n->value = v;
        return n;
    }

    NodePtr parse_expr() { return parse_sum(); }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (eat('+'))
                lhs = make(NodeKind::add, {lhs, parse_product()});
            else if (eat('-'))
                lhs = make(NodeKind::sub, {lhs, parse_product()});
            else
                return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (eat('*'))
                lhs = make(NodeKind::mul, {lhs, parse_unary()});
            else if (eat('/'))
                lhs = make(NodeKind::div, {lhs, parse_unary()});
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (eat('-')) return make(NodeKind::neg, {parse_unary()});
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (eat('^')) {
            // right-associative; exponent may carry its own unary minus
            NodePtr expo = parse_unary_in_exponent();
            return make(NodeKind::pow, {base, expo});
        }
        return base;
    }

    NodePtr parse_unary_in_exponent() {
        if (eat('-')) return make(NodeKind::neg, {parse_unary_in_exponent()});
        return parse_power();
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos >= src.size()) throw ParseError("unexpected end of input", pos);
        char c = src[pos];
        if (c == '(') {
            ++pos;
            NodePtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make_number(number());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t at = pos;
            std::string id = ident();
            if (id == "t") return make(NodeKind::var_t);
            if (id == "ln" || id == "exp") {
                expect('(');
                NodePtr a = parse_expr();
                expect(')');
                return make(id == "ln" ? NodeKind::ln : NodeKind::exp, {a});
            }
            if (id == "min" || id == "max") {
                expect('(');
                NodePtr a = parse_expr();
                expect(',');
                NodePtr b = parse_expr();
                expect(')');
                return make(id == "min" ? NodeKind::min : NodeKind::max, {a, b});
            }
            if (id == "piecewise") return parse_piecewise();
            if (id == "e") return make_number(M_E);
            auto it = bindings.find(id);
            if (it != bindings.end()) return make_number(it->second);
            throw ParseError("unknown identifier '" + id + "'", at);
        }
        throw ParseError("unexpected character", pos);
    }

    Guard parse_guard() {
        skip_ws();
        std::size_t at = pos;
        std::string id = ident();
        if (id != "t") throw ParseError("piecewise guard must compare t", at);
        skip_ws();
        CmpOp op;
        if (eat('<'))
            op = eat('=') ? CmpOp::le : CmpOp::lt;
        else if (eat('>'))
            op = eat('=') ? CmpOp::ge : CmpOp::gt;
        else
            throw ParseError("expected comparison operator", pos);
        skip_ws();
        std::size_t nat = pos;
        // the threshold is a literal (a bound constant counts as one)
        double thr;
        if (std::isalpha(static_cast<unsigned char>(src[pos])) || src[pos] == '_') {
            std::string tid = ident();
            if (tid == "e") {
                thr = M_E;
            } else {
                auto it = bindings.find(tid);
                if (it == bindings.end())
                    throw ParseError("unknown identifier '" + tid + "' in guard", nat);
                thr = it->second;
            }
        } else {
            thr = number();
        }
        return Guard{op, thr};
    }

    NodePtr parse_piecewise() {
        expect('(');
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::piecewise;
        for (;;) {
            n->guards.push_back(parse_guard());
            expect(':');
            n->args.push_back(parse_expr());
            if (!eat(';')) break;
        }
        expect(')');
        validate_guard_coverage(n->guards);
        return n;
    }

    // Guards must partition [0, inf): exactly one true at every point. Since
    // guards are rays, it is enough to test at 0, every threshold, points
    // just around each threshold, and one large point.
    void validate_guard_coverage(const std::vector<Guard>& guards) const {
        std::vector<double> samples{0.0, 1e30};
        for (const auto& g : guards) {
            if (g.threshold >= 0) {
                samples.push_back(g.threshold);
                samples.push_back(std::nextafter(g.threshold, -kInf));
                samples.push_back(std::nextafter(g.threshold, kInf));
            }
        }
        for (double s : samples) {
            if (s < 0) continue;
            int hits = 0;
            for (const auto& g : guards)
                if (g.matches(s)) ++hits;
            if (hits != 1)
                throw ParseError("piecewise guards must cover [0,inf) exactly once; "
                                 "t=" + std::to_string(s) + " matched " + std::to_string(hits) +
                                 " branches", pos);
        }
    }
};

inline std::string fmt_number(double v) {
    char buf[40];
    snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline NodePtr parse(const std::string& text, const Bindings& bindings = {}) {
    detail::Parser p(text, bindings);
    NodePtr e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
    return e;
}

// Evaluation over the extended nonnegative reals: overflow saturates to inf,
// 0 * inf = 0, ln of a nonpositive and fractional powers of negatives are
// domain errors.
inline double evaluate(const NodePtr& n, double t) {
    switch (n->kind) {
        case NodeKind::number: return n->value;
        case NodeKind::var_t: return t;
        case NodeKind::add: return evaluate(n->args[0], t) + evaluate(n->args[1], t);
        case NodeKind::sub: return evaluate(n->args[0], t) - evaluate(n->args[1], t);
        case NodeKind::mul: {
            const double a = evaluate(n->args[0], t), b = evaluate(n->args[1], t);
            if ((a == 0 && std::isinf(b)) || (b == 0 && std::isinf(a))) return 0.0;
            return a * b;
        }
        case NodeKind::div: {
            const double a = evaluate(n->args[0], t), b = evaluate(n->args[1], t);
            if (b == 0) {
                if (a == 0) throw EvalError("0/0");
                return a > 0 ? kInf : -kInf;
            }
            return a / b;
        }
        case NodeKind::pow: {
            const double a = evaluate(n->args[0], t), b = evaluate(n->args[1], t);
            if (a < 0 && b != std::floor(b)) throw EvalError("fractional power of a negative");
            if (a == 0 && b == 0) return 1.0;
            return std::pow(a, b);
        }
        case NodeKind::neg: return -evaluate(n->args[0], t);
        case NodeKind::ln: {
            const double a = evaluate(n->args[0], t);
            if (a <= 0) throw EvalError("ln of a nonpositive value");
            return std::log(a);
        }
        case NodeKind::exp: return std::exp(evaluate(n->args[0], t));
        case NodeKind::min: return std::min(evaluate(n->args[0], t), evaluate(n->args[1], t));
        case NodeKind::max: return std::max(evaluate(n->args[0], t), evaluate(n->args[1], t));
        case NodeKind::piecewise:
            for (std::size_t i = 0; i < n->guards.size(); ++i)
                if (n->guards[i].matches(t)) return evaluate(n->args[i], t);
            throw EvalError("no piecewise branch matched");  // unreachable after validation
    }
    throw EvalError("corrupt AST");
}

inline std::string render(const NodePtr& n);

namespace detail {
inline std::string render_guard(const Guard& g) {
    const char* op = g.op == CmpOp::lt ? "<" : g.op == CmpOp::le ? "<=" : g.op == CmpOp::gt ? ">" : ">=";
    return std::string("t") + op + fmt_number(g.threshold);
}
}  // namespace detail

// Fully parenthesized rendering; render(parse(x)) reparses to an equal tree.
inline std::string render(const NodePtr& n) {
    using detail::fmt_number;
    switch (n->kind) {
        case NodeKind::number: return fmt_number(n->value);
        case NodeKind::var_t: return "t";
        case NodeKind::add: return "(" + render(n->args[0]) + "+" + render(n->args[1]) + ")";
        case NodeKind::sub: return "(" + render(n->args[0]) + "-" + render(n->args[1]) + ")";
        case NodeKind::mul: return "(" + render(n->args[0]) + "*" + render(n->args[1]) + ")";
        case NodeKind::div: return "(" + render(n->args[0]) + "/" + render(n->args[1]) + ")";
        case NodeKind::pow: return "(" + render(n->args[0]) + "^" + render(n->args[1]) + ")";
        case NodeKind::neg: return "(-" + render(n->args[0]) + ")";
        case NodeKind::ln: return "ln(" + render(n->args[0]) + ")";
        case NodeKind::exp: return "exp(" + render(n->args[0]) + ")";
        case NodeKind::min: return "min(" + render(n->args[0]) + "," + render(n->args[1]) + ")";
        case NodeKind::max: return "max(" + render(n->args[0]) + "," + render(n->args[1]) + ")";
        case NodeKind::piecewise: {
            std::string out = "piecewise(";
            for (std::size_t i = 0; i < n->args.size(); ++i) {
                if (i) out += "; ";
                out += detail::render_guard(n->guards[i]) + ": " + render(n->args[i]);
            }
            return out + ")";
        }
    }
    return "?";
}

inline bool equal(const NodePtr& a, const NodePtr& b) {
    if (a->kind != b->kind) return false;
    if (a->kind == NodeKind::number && a->value != b->value) return false;
    if (a->guards.size() != b->guards.size()) return false;
    for (std::size_t i = 0; i < a->guards.size(); ++i)
        if (a->guards[i].op != b->guards[i].op || a->guards[i].threshold != b->guards[i].threshold)
            return false;
    if (a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
    return true;
}

// Diagnostics from validation. Failures carry a witness point (or pair).
struct Diagnostic {
    std::string what;
    double at = 0.0;
    double at2 = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Diagnostic> failures;
    std::vector<Diagnostic> notes;  // e.g. piecewise discontinuities (reported, not enforced)

    void fail(std::string what, double at, double at2 = 0.0) {
        ok = false;
        failures.push_back({std::move(what), at, at2});
    }
};

// Young-function shape checks on a probe grid: vanishing at 0, monotone
// growth, midpoint convexity.
inline ValidationReport validate_young(const NodePtr& ast, const std::vector<double>& probe,
                                       double rel_tol = 1e-9) {
    ValidationReport rep;
    try {
        const double at0 = evaluate(ast, 0.0);
        if (!(std::abs(at0) <= rel_tol)) rep.fail("value at 0 must be 0", 0.0);
    } catch (const EvalError&) {
        rep.fail("evaluation failed at 0", 0.0);
    }
    double prev = 0.0;
    bool have_prev = false;
    for (double r : probe) {
        double v;
        try {
            v = evaluate(ast, r);
        } catch (const EvalError&) {
            rep.fail("evaluation failed", r);
            continue;
        }
        if (v < 0) rep.fail("negative value", r);
        if (have_prev && v < prev * (1 - 1e-12)) rep.fail("not nondecreasing", r);
        prev = v;
        have_prev = true;
    }
    for (std::size_t i = 0; i + 1 < probe.size(); ++i) {
        const double a = probe[i], b = probe[i + 1];
        try {
            const double fa = evaluate(ast, a), fb = evaluate(ast, b);
            const double fm = evaluate(ast, 0.5 * (a + b));
            if (std::isinf(fa) || std::isinf(fb)) continue;
            const double chord = 0.5 * (fa + fb);
            if (fm > chord + 1e-9 * std::max(1.0, std::abs(chord)) + 1e-300)
                rep.fail("midpoint convexity violated", a, b);
        } catch (const EvalError&) {
            // already reported above
        }
    }
    // continuity note at piecewise seams
    if (ast->kind == NodeKind::piecewise) {
        for (const auto& g : ast->guards) {
            const double c = g.threshold;
            if (!(c > 0) || std::isinf(c)) continue;
            try {
                const double below = evaluate(ast, std::nextafter(c, -kInf));
                const double at = evaluate(ast, c);
                if (std::isfinite(below) && std::isfinite(at) &&
                    std::abs(below - at) > 1e-6 * std::max({1.0, std::abs(below), std::abs(at)}))
                    rep.notes.push_back({"piecewise seam is discontinuous", c});
            } catch (const EvalError&) {
            }
        }
    }
    return rep;
}

// Kernel shape check: strictly positive on the probe.
inline ValidationReport validate_kernel(const NodePtr& ast, const std::vector<double>& probe) {
    ValidationReport rep;
    for (double r : probe) {
        try {
            const double v = evaluate(ast, r);
            if (!(v > 0)) rep.fail("kernel must be positive", r);
        } catch (const EvalError&) {
            rep.fail("evaluation failed", r);
        }
    }
    return rep;
}

}  // namespace orlicz::dsl
