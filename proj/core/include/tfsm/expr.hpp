#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfsm/error.hpp"
#include "tfsm/value.hpp"

namespace tfsm {

// Guard and update expressions of timed EFSM transitions.
//
//   guard  := conj ('&&' conj | 'and' conj)*
//   conj   := sum (('<'|'<='|'=='|'!='|'>='|'>') sum)?
//   sum    := prod (('+'|'-') prod)*
//   prod   := atom (('*'|'/') atom)*
//   atom   := int | "string" | 'c' | true | false | ident | '(' guard ')'
//
// `+` on strings is concatenation. Division truncates toward zero.

enum class ExprType { Int, String, Bool };

enum class BinOp { Add, Sub, Mul, Div, Lt, Le, Eq, Ne, Ge, Gt, And };

struct Expr {
  enum class Kind { IntLit, StrLit, BoolLit, Var, Param, Binary };

  Kind kind = Kind::IntLit;
  ExprType type = ExprType::Int;
  std::int64_t int_value = 0;  // IntLit, BoolLit (0/1)
  std::string text;            // StrLit value, or identifier for Var/Param
  int slot = -1;               // variable index for Var
  BinOp op = BinOp::Add;
  std::shared_ptr<const Expr> lhs;
  std::shared_ptr<const Expr> rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Names visible to an expression: declared variables plus the input parameter.
struct Scope {
  struct Variable {
    std::string name;
    ValueKind kind;
  };
  std::vector<Variable> variables;
  std::string param_name;  // empty when the input carries no parameter
  ValueKind param_kind = ValueKind::None;
};

class ExprError : public Error {
 public:
  ExprError(std::size_t column, const std::string& message, bool type_error = false);
  std::size_t column() const noexcept { return column_; }
  bool type_error() const noexcept { return type_error_; }

 private:
  std::size_t column_;
  bool type_error_;
};

/// Parses and type-checks. Throws ExprError (1-based column) on failure.
ExprPtr parse_expr(std::string_view text, const Scope& scope);

/// Parses a guard; must have boolean type. Empty text means `true`.
ExprPtr parse_guard(std::string_view text, const Scope& scope);

/// Canonical text with minimal parentheses; parse_expr(print_expr(e)) is structurally equal to e.
std::string print_expr(const Expr& e);

/// Booleans evaluate to Int 0/1. Throws Error(EvalError) on division by zero.
Value eval(const Expr& e, std::span<const Value> env, const Value* param);
bool eval_guard(const Expr* guard, std::span<const Value> env, const Value* param);

/// Integer and string literals appearing in the expression (for parameter pools).
void collect_literals(const Expr& e, std::vector<Value>& out);

}  // namespace tfsm
