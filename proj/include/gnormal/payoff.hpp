#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gnormal/core.hpp"

namespace gnormal {

class ParseError : public ConfigError {
  public:
    ParseError(std::size_t offset, std::vector<std::string> expected);

    /// Byte offset into the source text where parsing stopped.
    std::size_t offset() const noexcept { return offset_; }
    /// Tokens that would have been accepted at `offset`.
    const std::vector<std::string>& expected() const noexcept { return expected_; }

  private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownBuiltin : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

/// Raised while evaluating a parsed expression (division by zero, 0 to a
/// negative power).
class DomainError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Value with first and second derivative, propagated exactly through the
/// expression tree.
struct Jet2 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Expression tree over the single variable x. Nodes live in a flat arena and
/// refer to their children by index; the last node is the root.
class ExprAst {
  public:
    enum class Op { constant, variable, negate, add, sub, mul, div, pow, sin, cos, exp };

    struct Node {
        Op op;
        double constant = 0.0;  // Op::constant
        int exponent = 0;       // Op::pow
        int lhs = -1;
        int rhs = -1;
    };

    int add_node(Node node);
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    int root() const noexcept { return static_cast<int>(nodes_.size()) - 1; }

    double eval(double x) const;
    Jet2 eval_jet(double x) const;

  private:
    Jet2 eval_node(int idx, double x) const;

    std::vector<Node> nodes_;
};

enum class Builtin { square, neg_square, sin3x, cube };

/// A measurement function phi and its second derivative.
class Payoff {
  public:
    enum class Kind { builtin, expression };
    enum class SecondDerivativeSource { analytic, automatic };

    static Payoff from_builtin(Builtin b);
    static Payoff from_expression(std::string text, ExprAst ast);

    double operator()(double x) const { return eval(x); }
    double eval(double x) const;
    double eval_d2(double x) const;

    Kind kind() const noexcept { return kind_; }
    SecondDerivativeSource d2_source() const noexcept
    {
        return kind_ == Kind::builtin ? SecondDerivativeSource::analytic
                                      : SecondDerivativeSource::automatic;
    }
    /// Builtin name or the expression text.
    const std::string& name() const noexcept { return name_; }

  private:
    Payoff() = default;

    Kind kind_ = Kind::builtin;
    Builtin builtin_ = Builtin::square;
    std::string name_;
    std::shared_ptr<const ExprAst> ast_;
};

/// Parses
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary
///   unary  := '-' unary | power
///   power  := atom ('^' ['-'] int)?
///   atom   := number | 'x' | fn '(' expr ')' | '(' expr ')'   fn in {sin, cos, exp}
/// so that "-x^2" means -(x^2). Whitespace between tokens is ignored.
Payoff parse_payoff(std::string_view text);

/// One of "square", "neg_square", "sin3x", "cube".
Payoff builtin_payoff(std::string_view name);

/// Builtin when `text` names one, otherwise a parsed expression.
Payoff make_payoff(std::string_view text);

}  // namespace gnormal
