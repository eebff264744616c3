#include "gnormal/payoff.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace gnormal {

namespace {

std::string join_expected(const std::vector<std::string>& expected)
{
    std::string out;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        if (k) {
            out += ", ";
        }
        out += expected[k];
    }
    return out;
}

// --- jet arithmetic --------------------------------------------------------

Jet2 operator+(const Jet2& a, const Jet2& b)
{
    return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
}

Jet2 operator-(const Jet2& a, const Jet2& b)
{
    return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2};
}

Jet2 operator*(const Jet2& a, const Jet2& b)
{
    return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
            a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
}

Jet2 divide(const Jet2& a, const Jet2& b)
{
    if (b.value == 0.0) {
        throw DomainError("division by zero");
    }
    const double q = a.value / b.value;
    const double q1 = (a.d1 - q * b.d1) / b.value;
    const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.value;
    return {q, q1, q2};
}

double ipow(double base, int e)
{
    double result = 1.0;
    for (int k = 0; k < e; ++k) {
        result *= base;
    }
    return result;
}

// a^k for integer k via the chain rule on f(u) = u^k.
Jet2 int_power(const Jet2& a, int k)
{
    if (k == 0) {
        return {1.0, 0.0, 0.0};
    }
    if (k < 0) {
        if (a.value == 0.0) {
            throw DomainError("zero raised to a negative power");
        }
        return divide(Jet2{1.0, 0.0, 0.0}, int_power(a, -k));
    }
    const double f = ipow(a.value, k);
    const double f1 = k * ipow(a.value, k - 1);
    const double f2 = k >= 2 ? static_cast<double>(k) * (k - 1) * ipow(a.value, k - 2) : 0.0;
    return {f, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2};
}

// --- parser ----------------------------------------------------------------

class Parser {
  public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprAst parse()
    {
        skip_ws();
        if (pos_ == src_.size()) {
            fail({"expression"});
        }
        parse_expr();
        skip_ws();
        if (pos_ != src_.size()) {
            fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
        }
        return std::move(ast_);
    }

  private:
    [[noreturn]] void fail(std::vector<std::string> expected) const
    {
        throw ParseError(pos_, std::move(expected));
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int node(ExprAst::Op op, int lhs = -1, int rhs = -1)
    {
        ExprAst::Node n{op};
        n.lhs = lhs;
        n.rhs = rhs;
        return ast_.add_node(n);
    }

    int parse_expr()
    {
        int lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = node(ExprAst::Op::add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = node(ExprAst::Op::sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    int parse_term()
    {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = node(ExprAst::Op::mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = node(ExprAst::Op::div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    int parse_unary()
    {
        if (accept('-')) {
            return node(ExprAst::Op::negate, parse_unary());
        }
        return parse_power();
    }

    int parse_power()
    {
        const int base = parse_atom();
        if (!accept('^')) {
            return base;
        }
        skip_ws();
        const bool negative = pos_ < src_.size() && src_[pos_] == '-';
        if (negative) {
            ++pos_;
            skip_ws();
        }
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
        if (pos_ == start) {
            fail({"integer exponent"});
        }
        int value = 0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc{} || ptr != src_.data() + pos_) {
            pos_ = start;
            fail({"integer exponent"});
        }
        ExprAst::Node n{ExprAst::Op::pow};
        n.exponent = negative ? -value : value;
        n.lhs = base;
        return ast_.add_node(n);
    }

    int parse_atom()
    {
        skip_ws();
        if (pos_ == src_.size()) {
            fail(atom_expected());
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (c == '(') {
            ++pos_;
            const int inner = parse_expr();
            if (!accept(')')) {
                fail({"')'"});
            }
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
            const std::string_view word = src_.substr(start, pos_ - start);
            if (word == "x") {
                return node(ExprAst::Op::variable);
            }
            ExprAst::Op fn;
            if (word == "sin") {
                fn = ExprAst::Op::sin;
            } else if (word == "cos") {
                fn = ExprAst::Op::cos;
            } else if (word == "exp") {
                fn = ExprAst::Op::exp;
            } else {
                pos_ = start;
                fail(atom_expected());
            }
            if (!accept('(')) {
                fail({"'('"});
            }
            const int arg = parse_expr();
            if (!accept(')')) {
                fail({"')'"});
            }
            return node(fn, arg);
        }
        fail(atom_expected());
    }

    int parse_number()
    {
        // Digits, optional fraction, optional exponent; no sign (handled by unary).
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                ++pos_;
            }
            const std::size_t exp_start = pos_;
            digits();
            if (pos_ == exp_start) {
                pos_ = save;
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (ec != std::errc{} || ptr != src_.data() + pos_) {
            pos_ = start;
            fail({"number"});
        }
        ExprAst::Node n{ExprAst::Op::constant};
        n.constant = value;
        return ast_.add_node(n);
    }

    static std::vector<std::string> atom_expected()
    {
        return {"number", "'x'", "'sin'", "'cos'", "'exp'", "'('", "'-'"};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    ExprAst ast_;
};

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected)
    : ConfigError("parse error at offset " + std::to_string(offset) + ": expected "
                  + join_expected(expected)),
      offset_(offset),
      expected_(std::move(expected))
{
}

int ExprAst::add_node(Node node)
{
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
}

double ExprAst::eval(double x) const
{
    return eval_jet(x).value;
}

Jet2 ExprAst::eval_jet(double x) const
{
    return eval_node(root(), x);
}

Jet2 ExprAst::eval_node(int idx, double x) const
{
    const Node& n = nodes_[idx];
    switch (n.op) {
    case Op::constant:
        return {n.constant, 0.0, 0.0};
    case Op::variable:
        return {x, 1.0, 0.0};
    case Op::negate: {
        const Jet2 a = eval_node(n.lhs, x);
        return {-a.value, -a.d1, -a.d2};
    }
    case Op::add:
        return eval_node(n.lhs, x) + eval_node(n.rhs, x);
    case Op::sub:
        return eval_node(n.lhs, x) - eval_node(n.rhs, x);
    case Op::mul:
        return eval_node(n.lhs, x) * eval_node(n.rhs, x);
    case Op::div:
        return divide(eval_node(n.lhs, x), eval_node(n.rhs, x));
    case Op::pow:
        return int_power(eval_node(n.lhs, x), n.exponent);
    case Op::sin: {
        const Jet2 a = eval_node(n.lhs, x);
        const double s = std::sin(a.value);
        const double c = std::cos(a.value);
        return {s, c * a.d1, -s * a.d1 * a.d1 + c * a.d2};
    }
    case Op::cos: {
        const Jet2 a = eval_node(n.lhs, x);
        const double s = std::sin(a.value);
        const double c = std::cos(a.value);
        return {c, -s * a.d1, -c * a.d1 * a.d1 - s * a.d2};
    }
    case Op::exp: {
        const Jet2 a = eval_node(n.lhs, x);
        const double e = std::exp(a.value);
        return {e, e * a.d1, e * (a.d2 + a.d1 * a.d1)};
    }
    }
    return {};
}

// ---------------------------------------------------------------------------

Payoff Payoff::from_builtin(Builtin b)
{
    Payoff p;
    p.kind_ = Kind::builtin;
    p.builtin_ = b;
    switch (b) {
    case Builtin::square:
        p.name_ = "square";
        break;
    case Builtin::neg_square:
        p.name_ = "neg_square";
        break;
    case Builtin::sin3x:
        p.name_ = "sin3x";
        break;
    case Builtin::cube:
        p.name_ = "cube";
        break;
    }
    return p;
}

Payoff Payoff::from_expression(std::string text, ExprAst ast)
{
    Payoff p;
    p.kind_ = Kind::expression;
    p.name_ = std::move(text);
    p.ast_ = std::make_shared<const ExprAst>(std::move(ast));
    return p;
}

double Payoff::eval(double x) const
{
    if (kind_ == Kind::expression) {
        return ast_->eval(x);
    }
    switch (builtin_) {
    case Builtin::square:
        return x * x;
    case Builtin::neg_square:
        return -(x * x);
    case Builtin::sin3x:
        return std::sin(3.0 * x);
    case Builtin::cube:
        return x * x * x;
    }
    return 0.0;
}

double Payoff::eval_d2(double x) const
{
    if (kind_ == Kind::expression) {
        return ast_->eval_jet(x).d2;
    }
    switch (builtin_) {
    case Builtin::square:
        return 2.0;
    case Builtin::neg_square:
        return -2.0;
    case Builtin::sin3x:
        return -9.0 * std::sin(3.0 * x);
    case Builtin::cube:
        return 6.0 * x;
    }
    return 0.0;
}

Payoff parse_payoff(std::string_view text)
{
    return Payoff::from_expression(std::string(text), Parser(text).parse());
}

Payoff builtin_payoff(std::string_view name)
{
    if (name == "square") {
        return Payoff::from_builtin(Builtin::square);
    }
    if (name == "neg_square") {
        return Payoff::from_builtin(Builtin::neg_square);
    }
    if (name == "sin3x") {
        return Payoff::from_builtin(Builtin::sin3x);
    }
    if (name == "cube") {
        return Payoff::from_builtin(Builtin::cube);
    }
    throw UnknownBuiltin("unknown builtin payoff '" + std::string(name)
                         + "' (expected square, neg_square, sin3x or cube)");
}

Payoff make_payoff(std::string_view text)
{
    if (text == "square" || text == "neg_square" || text == "sin3x" || text == "cube") {
        return builtin_payoff(text);
    }
    return parse_payoff(text);
}

}  // namespace gnormal
