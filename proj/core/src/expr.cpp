#include "tfsm/expr.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace tfsm {

ExprError::ExprError(std::size_t column, const std::string& message, bool type_error)
    : Error(ErrorKind::SchemaError, "column " + std::to_string(column) + ": " + message),
      column_(column),
      type_error_(type_error) {}

namespace {

enum class Tok { End, Int, Str, Ident, Op, LParen, RParen };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.column = pos_ + 1;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      t.kind = Tok::Int;
      t.text = std::string(src_.substr(start, pos_ - start));
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (ec != std::errc()) throw ExprError(t.column, "integer literal out of range");
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (c == '"' || c == '\'') {
      char q = c;
      ++pos_;
      t.kind = Tok::Str;
      while (true) {
        if (pos_ >= src_.size()) throw ExprError(t.column, "unterminated string literal");
        char d = src_[pos_++];
        if (d == q) break;
        if (d == '\\') {
          if (pos_ >= src_.size()) throw ExprError(t.column, "unterminated escape");
          char e = src_[pos_++];
          switch (e) {
            case 'n': t.text.push_back('\n'); break;
            case 't': t.text.push_back('\t'); break;
            case 'r': t.text.push_back('\r'); break;
            default: t.text.push_back(e);
          }
        } else {
          t.text.push_back(d);
        }
      }
      return t;
    }
    if (c == '(') { ++pos_; t.kind = Tok::LParen; t.text = "("; return t; }
    if (c == ')') { ++pos_; t.kind = Tok::RParen; t.text = ")"; return t; }
    static constexpr std::string_view two[] = {"<=", ">=", "==", "!=", "&&"};
    for (auto op : two) {
      if (src_.substr(pos_, 2) == op) {
        pos_ += 2;
        t.kind = Tok::Op;
        t.text = std::string(op);
        return t;
      }
    }
    if (c == '<' || c == '>' || c == '+' || c == '-' || c == '*' || c == '/') {
      ++pos_;
      t.kind = Tok::Op;
      t.text = std::string(1, c);
      return t;
    }
    throw ExprError(t.column, std::string("unexpected character '") + c + "'");
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string_view type_name(ExprType t) {
  switch (t) {
    case ExprType::Int: return "int";
    case ExprType::String: return "string";
    case ExprType::Bool: return "bool";
  }
  return "?";
}

ExprType to_expr_type(ValueKind k) {
  return k == ValueKind::String ? ExprType::String : ExprType::Int;
}

std::optional<BinOp> binop_of(const Token& t) {
  if (t.kind == Tok::Ident && (t.text == "and" || t.text == "AND")) return BinOp::And;
  if (t.kind != Tok::Op) return std::nullopt;
  if (t.text == "+") return BinOp::Add;
  if (t.text == "-") return BinOp::Sub;
  if (t.text == "*") return BinOp::Mul;
  if (t.text == "/") return BinOp::Div;
  if (t.text == "<") return BinOp::Lt;
  if (t.text == "<=") return BinOp::Le;
  if (t.text == "==") return BinOp::Eq;
  if (t.text == "!=") return BinOp::Ne;
  if (t.text == ">=") return BinOp::Ge;
  if (t.text == ">") return BinOp::Gt;
  if (t.text == "&&") return BinOp::And;
  return std::nullopt;
}

int precedence(BinOp op) {
  switch (op) {
    case BinOp::And: return 1;
    case BinOp::Lt: case BinOp::Le: case BinOp::Eq:
    case BinOp::Ne: case BinOp::Ge: case BinOp::Gt: return 2;
    case BinOp::Add: case BinOp::Sub: return 3;
    case BinOp::Mul: case BinOp::Div: return 4;
  }
  return 0;
}

std::string_view symbol(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Ge: return ">=";
    case BinOp::Gt: return ">";
    case BinOp::And: return "&&";
  }
  return "?";
}

class Parser {
 public:
  Parser(std::string_view src, const Scope& scope) : lex_(src), scope_(scope) { advance(); }

  ExprPtr parse_all() {
    auto e = parse_level(1);
    if (tok_.kind != Tok::End) throw ExprError(tok_.column, "unexpected '" + tok_.text + "'");
    return e;
  }

 private:
  void advance() { tok_ = lex_.next(); }

  ExprPtr parse_level(int level) {
    if (level > 4) return parse_atom();
    auto lhs = parse_level(level + 1);
    while (true) {
      auto op = binop_of(tok_);
      if (!op || precedence(*op) != level) return lhs;
      std::size_t col = tok_.column;
      advance();
      auto rhs = parse_level(level + 1);
      lhs = make_binary(*op, lhs, rhs, col);
      // comparisons do not chain
      if (level == 2) {
        auto again = binop_of(tok_);
        if (again && precedence(*again) == 2)
          throw ExprError(tok_.column, "comparison operators do not chain");
        return lhs;
      }
    }
  }

  ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs, std::size_t col) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    ExprType lt = lhs->type, rt = rhs->type;
    auto mismatch = [&](std::string_view what) {
      throw ExprError(col, std::string(what) + " '" + std::string(symbol(op)) + "' applied to " +
                               std::string(type_name(lt)) + " and " + std::string(type_name(rt)),
                      true);
    };
    switch (op) {
      case BinOp::Add:
        if (lt != rt || lt == ExprType::Bool) mismatch("operator");
        e->type = lt;
        break;
      case BinOp::Sub: case BinOp::Mul: case BinOp::Div:
        if (lt != ExprType::Int || rt != ExprType::Int) mismatch("arithmetic operator");
        e->type = ExprType::Int;
        break;
      case BinOp::Lt: case BinOp::Le: case BinOp::Ge: case BinOp::Gt:
        if (lt != ExprType::Int || rt != ExprType::Int) mismatch("ordering comparator");
        e->type = ExprType::Bool;
        break;
      case BinOp::Eq: case BinOp::Ne:
        if (lt != rt || lt == ExprType::Bool) mismatch("equality comparator");
        e->type = ExprType::Bool;
        break;
      case BinOp::And:
        if (lt != ExprType::Bool || rt != ExprType::Bool) mismatch("conjunction");
        e->type = ExprType::Bool;
        break;
    }
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  ExprPtr parse_atom() {
    auto e = std::make_shared<Expr>();
    Token t = tok_;
    switch (t.kind) {
      case Tok::Int:
        advance();
        e->kind = Expr::Kind::IntLit;
        e->type = ExprType::Int;
        e->int_value = t.value;
        return e;
      case Tok::Op:
        if (t.text == "-") {
          advance();
          if (tok_.kind != Tok::Int) throw ExprError(t.column, "'-' must prefix an integer literal");
          e->kind = Expr::Kind::IntLit;
          e->type = ExprType::Int;
          e->int_value = -tok_.value;
          advance();
          return e;
        }
        throw ExprError(t.column, "unexpected operator '" + t.text + "'");
      case Tok::Str:
        advance();
        e->kind = Expr::Kind::StrLit;
        e->type = ExprType::String;
        e->text = t.text;
        return e;
      case Tok::LParen: {
        advance();
        auto inner = parse_level(1);
        if (tok_.kind != Tok::RParen) throw ExprError(tok_.column, "expected ')'");
        advance();
        return inner;
      }
      case Tok::Ident: {
        advance();
        if (t.text == "true" || t.text == "false") {
          e->kind = Expr::Kind::BoolLit;
          e->type = ExprType::Bool;
          e->int_value = t.text == "true" ? 1 : 0;
          return e;
        }
        for (std::size_t i = 0; i < scope_.variables.size(); ++i) {
          if (scope_.variables[i].name == t.text) {
            e->kind = Expr::Kind::Var;
            e->type = to_expr_type(scope_.variables[i].kind);
            e->text = t.text;
            e->slot = static_cast<int>(i);
            return e;
          }
        }
        if (scope_.param_kind != ValueKind::None &&
            (t.text == scope_.param_name || t.text == "p")) {
          e->kind = Expr::Kind::Param;
          e->type = to_expr_type(scope_.param_kind);
          e->text = scope_.param_name.empty() ? "p" : scope_.param_name;
          return e;
        }
        throw ExprError(t.column, "unknown identifier '" + t.text + "'");
      }
      case Tok::End:
        throw ExprError(t.column, "unexpected end of expression");
      case Tok::RParen:
        throw ExprError(t.column, "unexpected ')'");
    }
    throw ExprError(t.column, "unexpected token");
  }

  Lexer lex_;
  const Scope& scope_;
  Token tok_;
};

void print_into(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::IntLit: out += std::to_string(e.int_value); return;
    case Expr::Kind::BoolLit: out += e.int_value ? "true" : "false"; return;
    case Expr::Kind::StrLit: out += quote(e.text); return;
    case Expr::Kind::Var:
    case Expr::Kind::Param: out += e.text; return;
    case Expr::Kind::Binary: break;
  }
  int p = precedence(e.op);
  auto child = [&](const Expr& c, bool right) {
    bool paren = c.kind == Expr::Kind::Binary &&
                 (precedence(c.op) < p || (right && precedence(c.op) == p) ||
                  (precedence(c.op) == 2 && p == 2));
    if (paren) out.push_back('(');
    print_into(c, out);
    if (paren) out.push_back(')');
  };
  child(*e.lhs, false);
  out.push_back(' ');
  out += symbol(e.op);
  out.push_back(' ');
  child(*e.rhs, true);
}

std::int64_t as_int(const Value& v) { return std::get<std::int64_t>(v); }

}  // namespace

ExprPtr parse_expr(std::string_view text, const Scope& scope) {
  return Parser(text, scope).parse_all();
}

ExprPtr parse_guard(std::string_view text, const Scope& scope) {
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) return nullptr;
  auto e = parse_expr(text, scope);
  if (e->type != ExprType::Bool)
    throw ExprError(1, "guard must be boolean, got " + std::string(type_name(e->type)), true);
  return e;
}

std::string print_expr(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

Value eval(const Expr& e, std::span<const Value> env, const Value* param) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit: return e.int_value;
    case Expr::Kind::StrLit: return e.text;
    case Expr::Kind::Var: return env[e.slot];
    case Expr::Kind::Param:
      if (param == nullptr) throw Error(ErrorKind::EvalError, "parameter is not bound");
      return *param;
    case Expr::Kind::Binary: break;
  }
  if (e.op == BinOp::And) {
    if (as_int(eval(*e.lhs, env, param)) == 0) return std::int64_t{0};
    return std::int64_t{as_int(eval(*e.rhs, env, param)) != 0 ? 1 : 0};
  }
  Value l = eval(*e.lhs, env, param);
  Value r = eval(*e.rhs, env, param);
  switch (e.op) {
    case BinOp::Add:
      if (e.type == ExprType::String) return std::get<std::string>(l) + std::get<std::string>(r);
      return as_int(l) + as_int(r);
    case BinOp::Sub: return as_int(l) - as_int(r);
    case BinOp::Mul: return as_int(l) * as_int(r);
    case BinOp::Div:
      if (as_int(r) == 0) throw Error(ErrorKind::EvalError, "division by zero");
      return as_int(l) / as_int(r);
    case BinOp::Lt: return std::int64_t{as_int(l) < as_int(r)};
    case BinOp::Le: return std::int64_t{as_int(l) <= as_int(r)};
    case BinOp::Ge: return std::int64_t{as_int(l) >= as_int(r)};
    case BinOp::Gt: return std::int64_t{as_int(l) > as_int(r)};
    case BinOp::Eq: return std::int64_t{l == r};
    case BinOp::Ne: return std::int64_t{l != r};
    case BinOp::And: break;
  }
  return std::int64_t{0};
}

bool eval_guard(const Expr* guard, std::span<const Value> env, const Value* param) {
  if (guard == nullptr) return true;
  return as_int(eval(*guard, env, param)) != 0;
}

void collect_literals(const Expr& e, std::vector<Value>& out) {
  switch (e.kind) {
    case Expr::Kind::IntLit: out.emplace_back(e.int_value); return;
    case Expr::Kind::StrLit: out.emplace_back(e.text); return;
    case Expr::Kind::Binary:
      collect_literals(*e.lhs, out);
      collect_literals(*e.rhs, out);
      return;
    default: return;
  }
}

}  // namespace tfsm
