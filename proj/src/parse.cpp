#include "pk/parse.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>

namespace pk {

UnknownIdentifier::UnknownIdentifier(const std::string& n, size_t off, const std::vector<std::string>& declared)
    : ParseError(
          [&] {
            std::string m = "unknown identifier '" + n + "'; declared:";
            for (const auto& d : declared) m += " " + d;
            return m;
          }(),
          off),
      name(n) {}

namespace {

class Parser {
 public:
  Parser(std::string_view s, bool allow_matrix) : s_(s), allow_matrix_(allow_matrix) {}

  NodeP run() {
    NodeP n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;
  bool allow_matrix_;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  static NodeP make(Node::Kind k, size_t off, std::vector<NodeP> kids = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->offset = off;
    n->kids = std::move(kids);
    return n;
  }

  NodeP expr() {
    NodeP lhs = term();
    for (;;) {
      skip();
      size_t off = pos_;
      if (eat('+'))
        lhs = make(Node::Add, off, {lhs, term()});
      else if (eat('-'))
        lhs = make(Node::Sub, off, {lhs, term()});
      else
        return lhs;
    }
  }

  NodeP term() {
    NodeP lhs = factor();
    for (;;) {
      skip();
      size_t off = pos_;
      if (eat('*'))
        lhs = make(Node::Mul, off, {lhs, factor()});
      else if (eat('/'))
        lhs = make(Node::Div, off, {lhs, factor()});
      else
        return lhs;
    }
  }

  int integer() {
    skip();
    bool paren = eat('(');
    skip();
    bool neg = eat('-');
    skip();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int v = std::stoi(std::string(s_.substr(start, pos_ - start)));
    if (paren) expect(')');
    return neg ? -v : v;
  }

  NodeP factor() {
    skip();
    size_t off = pos_;
    if (eat('-')) return make(Node::Neg, off, {factor()});
    NodeP b = base();
    skip();
    off = pos_;
    if (eat('^')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Pow;
      n->offset = off;
      n->kids = {b};
      n->power = integer();
      return n;
    }
    return b;
  }

  NodeP base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    size_t off = pos_;
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (eat('(')) {
        std::vector<NodeP> args{expr()};
        while (eat(',')) args.push_back(expr());
        expect(')');
        auto n = make(Node::Call, off, std::move(args));
        const_cast<Node&>(*n).name = name;
        return n;
      }
      auto n = make(Node::Ident, off);
      const_cast<Node&>(*n).name = name;
      return n;
    }
    if (eat('(')) {
      NodeP inner = expr();
      expect(')');
      return inner;
    }
    if (c == '[') {
      if (!allow_matrix_) fail("matrix literal not allowed here");
      return matrix();
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodeP number() {
    size_t off = pos_;
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string ip(s_.substr(start, pos_ - start));
    std::string fp;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      size_t fs = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      fp = std::string(s_.substr(fs, pos_ - fs));
    }
    if (ip.empty() && fp.empty()) fail("malformed number");
    mpz_class num(ip.empty() ? "0" : ip);
    mpz_class den(1);
    for (char d : fp) {
      num = num * 10 + (d - '0');
      den *= 10;
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Num;
    n->offset = off;
    n->num = mpq_class(num, den);
    n->num.canonicalize();
    return n;
  }

  NodeP matrix() {
    size_t off = pos_;
    expect('[');
    std::vector<NodeP> cells;
    int rows = 0, cols = -1;
    do {
      expect('[');
      int c = 0;
      do {
        cells.push_back(expr());
        ++c;
      } while (eat(','));
      expect(']');
      if (cols >= 0 && c != cols) fail("ragged matrix literal");
      cols = c;
      ++rows;
    } while (eat(','));
    expect(']');
    if (rows != cols) fail("matrix literal must be square");
    auto n = make(Node::Matrix, off, std::move(cells));
    const_cast<Node&>(*n).rows = rows;
    const_cast<Node&>(*n).cols = cols;
    return n;
  }
};

}  // namespace

NodeP parse_ast(std::string_view text, bool allow_matrix) { return Parser(text, allow_matrix).run(); }

// ---------------------------------------------------------------- symbols

bool parse_jet_name(const std::string& name, int& alpha, bool& conj, MultiIndex& J) {
  size_t p = 0;
  conj = false;
  if (name.size() > 1 && name[0] == 'c' && name[1] == 'u') {
    conj = true;
    p = 1;
  }
  if (p >= name.size() || name[p] != 'u') return false;
  ++p;
  size_t ds = p;
  while (p < name.size() && std::isdigit(static_cast<unsigned char>(name[p]))) ++p;
  if (ds == p || p - ds > 2) return false;
  alpha = std::stoi(name.substr(ds, p - ds));
  if (alpha < 1) return false;
  J = {};
  if (p == name.size()) return true;
  if (name[p] != '_' || p + 1 == name.size()) return false;
  for (++p; p < name.size(); ++p) {
    switch (name[p]) {
      case 't': J.n[0]++; break;
      case 'x': J.n[1]++; break;
      case 'y': J.n[2]++; break;
      default: return false;
    }
  }
  return true;
}

AtomP SymbolTable::declare_param(const std::string& name, ParamDomain d, const std::string& conj_name,
                                 double value) {
  AtomP p = param(name, d, conj_name, value);
  params[name] = p;
  return p;
}

void SymbolTable::declare_complex_pair(const std::string& name, const std::string& partner) {
  declare_param(name, ParamDomain::Complex, partner);
  declare_param(partner, ParamDomain::Complex, name);
}

std::optional<Expr> SymbolTable::resolve(const std::string& name) const {
  if (auto it = definitions.find(name); it != definitions.end()) return it->second;
  if (auto it = params.find(name); it != params.end()) return sym(it->second);
  if (name == "i") return Expr::imag_unit();
  if (name == "pi") return sym(param("pi", ParamDomain::Fixed, "", std::numbers::pi));
  for (auto c : coordinates)
    if (c->name == name) return sym(c);
  int alpha;
  bool cj;
  MultiIndex J;
  if (parse_jet_name(name, alpha, cj, J) && alpha <= dependents) {
    for (int k = 0; k < 3; ++k)
      if (J.n[k] > 0 && std::none_of(coordinates.begin(), coordinates.end(), [&](AtomP c) { return c->index == k; }))
        return std::nullopt;
    return sym(jet(alpha, cj, J));
  }
  return std::nullopt;
}

std::vector<std::string> SymbolTable::declared() const {
  std::vector<std::string> out;
  for (auto c : coordinates) out.push_back(c->name);
  for (const auto& [n, _] : params) out.push_back(n);
  for (const auto& [n, _] : definitions) out.push_back(n);
  for (const auto& [n, _] : functions) out.push_back(n + "(...)");
  if (dependents > 0) out.push_back("u1..u" + std::to_string(dependents) + " (jets)");
  return out;
}

SymbolTable SymbolTable::standard() {
  SymbolTable t;
  t.coordinates = {coord(0), coord(1), coord(2)};
  t.dependents = 4;
  for (const char* n : {"w", "M", "e", "B", "E", "wt", "alpha", "beta", "phi"}) t.declare_param(n);
  t.declare_complex_pair("kappa", "kappab");
  for (int k = 1; k <= 13; ++k) t.declare_param("d" + std::to_string(k));
  return t;
}

// ---------------------------------------------------------------- evaluation to Expr

Expr to_expr(const Node& n, const SymbolTable& tab) {
  switch (n.kind) {
    case Node::Num:
      return Expr(Coeff(n.num));
    case Node::Ident: {
      if (auto e = tab.resolve(n.name)) return *e;
      throw UnknownIdentifier(n.name, n.offset, tab.declared());
    }
    case Node::Add:
      return to_expr(*n.kids[0], tab) + to_expr(*n.kids[1], tab);
    case Node::Sub:
      return to_expr(*n.kids[0], tab) - to_expr(*n.kids[1], tab);
    case Node::Mul:
      return to_expr(*n.kids[0], tab) * to_expr(*n.kids[1], tab);
    case Node::Div: {
      Expr d = to_expr(*n.kids[1], tab);
      if (d.is_zero()) throw ParseError("division by zero", n.offset);
      return to_expr(*n.kids[0], tab) / d;
    }
    case Node::Neg:
      return -to_expr(*n.kids[0], tab);
    case Node::Pow: {
      Expr b = to_expr(*n.kids[0], tab);
      if (n.power < 0 && b.is_zero()) throw ParseError("negative power of zero", n.offset);
      return pow(b, n.power);
    }
    case Node::Call: {
      static const char* elem[] = {"sin", "cos", "exp", "sqrt", "tan", "arctan"};
      for (const char* f : elem)
        if (n.name == f) {
          if (n.kids.size() != 1) throw ParseError(n.name + " takes one argument", n.offset);
          return func(n.name, to_expr(*n.kids[0], tab));
        }
      if (n.name == "conj") {
        if (n.kids.size() != 1) throw ParseError("conj takes one argument", n.offset);
        return conj(to_expr(*n.kids[0], tab));
      }
      if (n.name == "diff") {
        if (n.kids.size() < 2) throw ParseError("diff needs an expression and symbols", n.offset);
        Expr e = to_expr(*n.kids[0], tab);
        for (size_t k = 1; k < n.kids.size(); ++k) {
          auto s = to_expr(*n.kids[k], tab).as_symbol();
          if (!s) throw ParseError("diff: variable must be a symbol", n.kids[k]->offset);
          e = differentiate(e, *s);
        }
        return e;
      }
      auto f = tab.functions.find(n.name);
      if (f == tab.functions.end()) throw UnknownIdentifier(n.name, n.offset, tab.declared());
      if (n.kids.size() != f->second.arity)
        throw ParseError(n.name + " expects " + std::to_string(f->second.arity) + " arguments", n.offset);
      std::vector<AtomP> args;
      for (const auto& k : n.kids) {
        auto s = to_expr(*k, tab).as_symbol();
        if (!s) throw ParseError("arguments of " + n.name + " must be symbols", k->offset);
        args.push_back(*s);
      }
      return sym(unknown(n.name, args, std::vector<int>(args.size(), 0), f->second.conj_name));
    }
    case Node::Matrix:
      throw ParseError("matrix literal in scalar expression", n.offset);
  }
  throw ParseError("bad node", n.offset);
}

Expr parse(std::string_view text, const SymbolTable& tab) { return to_expr(*parse_ast(text), tab); }

Expr parse(std::string_view text) {
  static const SymbolTable tab = SymbolTable::standard();
  return parse(text, tab);
}

}  // namespace pk
