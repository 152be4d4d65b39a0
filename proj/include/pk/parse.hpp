#pragma once

#include "pk/expr.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pk {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
  size_t offset;
};

struct UnknownIdentifier : ParseError {
  UnknownIdentifier(const std::string& name, size_t off, const std::vector<std::string>& declared);
  std::string name;
};

// Syntax tree shared by the scalar and operator front ends.
struct Node {
  enum Kind { Num, Ident, Call, Add, Sub, Mul, Div, Neg, Pow, Matrix };
  Kind kind;
  size_t offset = 0;
  mpq_class num;
  std::string name;
  int power = 0;
  int rows = 0, cols = 0;  // Matrix, kids stored row-major
  std::vector<std::shared_ptr<const Node>> kids;
};
using NodeP = std::shared_ptr<const Node>;

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' int)?          int may carry a sign, optionally in parentheses
//   base   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')' | matrix
//   matrix := '[' row (',' row)* ']',  row := '[' expr (',' expr)* ']'
NodeP parse_ast(std::string_view text, bool allow_matrix = false);

struct SymbolTable {
  struct Function {
    size_t arity = 0;
    std::string conj_name;
  };

  std::vector<AtomP> coordinates;
  int dependents = 0;
  std::map<std::string, AtomP> params;
  std::map<std::string, Expr> definitions;
  std::map<std::string, Function> functions;

  AtomP declare_param(const std::string& name, ParamDomain d = ParamDomain::Real, const std::string& conj_name = "",
                      double value = 0);
  void declare_complex_pair(const std::string& name, const std::string& partner);
  void define(const std::string& name, const Expr& value) { definitions[name] = value; }
  void declare_function(const std::string& name, size_t arity, const std::string& conj_name = "") {
    functions[name] = {arity, conj_name};
  }

  // Resolves a bare identifier; nullopt when not declared.
  std::optional<Expr> resolve(const std::string& name) const;
  std::vector<std::string> declared() const;

  // t, x, y; four dependents; the scalar symbols used across the built-in models.
  static SymbolTable standard();
};

Expr to_expr(const Node& n, const SymbolTable& tab);
Expr parse(std::string_view text, const SymbolTable& tab);
Expr parse(std::string_view text);

// Parses "u2_tx" / "cu1" style jet names; false if `name` is not a jet name.
bool parse_jet_name(const std::string& name, int& alpha, bool& conj, MultiIndex& J);

}  // namespace pk
