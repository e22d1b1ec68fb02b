#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "tscalc/errors.hpp"

namespace tscalc::cli {

/// Syntax error with the byte offset of the offending token and the set of
/// tokens that would have been accepted there.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset)
        : Error(std::move(message)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Expression AST over numbers, the variable t, arithmetic, unary minus and
/// the calls exp/ln/sin/cos/sqrt.
struct Expr {
    enum class Op { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Call };

    Op op = Op::Number;
    double number = 0.0;
    std::string call_name;
    std::shared_ptr<const Expr> lhs;
    std::shared_ptr<const Expr> rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Precedence: ^ (right-associative) > unary minus > * / > + -.
ExprPtr parse_expr(std::string_view text);

/// Canonical text; parse_expr(print_expr(e)) is structurally equal to e.
std::string print_expr(const Expr& e);

double eval_expr(const Expr& e, double t);

bool expr_equal(const Expr& a, const Expr& b);

} // namespace tscalc::cli
