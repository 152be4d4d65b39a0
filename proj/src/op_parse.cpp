#include "pk/operator.hpp"


namespace pk {

namespace {

// A parsed value is a plain function, a scalar differential operator, or a matrix operator.
struct Value {
  enum Kind { Fn, Diff, Mat } kind = Fn;
  Expr f;
  ScalarOp d;
  MatrixDiffOp m;

  static Value fn(Expr e) {
    Value v;
    v.f = std::move(e);
    return v;
  }
  static Value diff(ScalarOp s) {
    Value v;
    v.kind = Diff;
    v.d = std::move(s);
    return v;
  }
  static Value mat(MatrixDiffOp op) {
    Value v;
    v.kind = Mat;
    v.m = std::move(op);
    return v;
  }

  ScalarOp as_diff() const {
    if (kind == Diff) return d;
    if (f.is_zero()) return {};
    return {{MultiIndex{}, f}};
  }

  MatrixDiffOp as_mat(int n) const {
    if (kind == Mat) {
      if (m.dim() != n) throw std::invalid_argument("operator dimension mismatch");
      return m;
    }
    MatrixDiffOp r(n);
    ScalarOp s = as_diff();
    for (int k = 0; k < n; ++k) r.at(k, k) = s;
    return r;
  }
};

struct OpEval {
  const OpEnv& env;
  const SymbolTable& tab;

  int dim_of(const Value& a, const Value& b, size_t off) const {
    if (a.kind == Value::Mat && b.kind == Value::Mat && a.m.dim() != b.m.dim())
      throw ParseError("operator dimension mismatch", off);
    if (a.kind == Value::Mat) return a.m.dim();
    if (b.kind == Value::Mat) return b.m.dim();
    return 0;
  }

  Value add(const Value& a, const Value& b, size_t off) {
    if (a.kind == Value::Fn && b.kind == Value::Fn) return Value::fn(a.f + b.f);
    int n = dim_of(a, b, off);
    if (n == 0) return Value::diff(scalar_add(a.as_diff(), b.as_diff()));
    return Value::mat(a.as_mat(n) + b.as_mat(n));
  }

  Value mul(const Value& a, const Value& b, size_t off) {
    if (a.kind == Value::Fn && b.kind == Value::Fn) return Value::fn(a.f * b.f);
    if (a.kind == Value::Fn && b.kind == Value::Mat) return Value::mat(a.f * b.m);
    int n = dim_of(a, b, off);
    if (n == 0) return Value::diff(scalar_compose(a.as_diff(), b.as_diff()));
    return Value::mat(compose(a.as_mat(n), b.as_mat(n)));
  }

  Value neg(const Value& a) { return mul(Value::fn(Expr(-1)), a, 0); }

  Value eval(const Node& n) {
    switch (n.kind) {
      case Node::Num:
        return Value::fn(Expr(Coeff(n.num)));
      case Node::Ident:
        return ident(n);
      case Node::Add:
        return add(eval(*n.kids[0]), eval(*n.kids[1]), n.offset);
      case Node::Sub:
        return add(eval(*n.kids[0]), neg(eval(*n.kids[1])), n.offset);
      case Node::Mul:
        return mul(eval(*n.kids[0]), eval(*n.kids[1]), n.offset);
      case Node::Div: {
        Value d = eval(*n.kids[1]);
        if (d.kind != Value::Fn) throw ParseError("division by an operator", n.offset);
        if (d.f.is_zero()) throw ParseError("division by zero", n.offset);
        return mul(eval(*n.kids[0]), Value::fn(pow(d.f, -1)), n.offset);
      }
      case Node::Neg:
        return neg(eval(*n.kids[0]));
      case Node::Pow: {
        Value b = eval(*n.kids[0]);
        if (b.kind == Value::Fn) {
          if (n.power < 0 && b.f.is_zero()) throw ParseError("negative power of zero", n.offset);
          return Value::fn(pow(b.f, n.power));
        }
        if (n.power < 0) throw ParseError("negative power of an operator", n.offset);
        Value r = Value::fn(Expr(1));
        for (int k = 0; k < n.power; ++k) r = mul(r, b, n.offset);
        return r;
      }
      case Node::Call:
        return call(n);
      case Node::Matrix:
        return matrix(n);
    }
    throw ParseError("bad node", n.offset);
  }

  Value ident(const Node& n) {
    if (n.name == "Dt") return Value::diff({{MultiIndex(1, 0, 0), Expr(1)}});
    if (n.name == "Dx") return Value::diff({{MultiIndex(0, 1, 0), Expr(1)}});
    if (n.name == "Dy") return Value::diff({{MultiIndex(0, 0, 1), Expr(1)}});
    if (auto it = env.ops.find(n.name); it != env.ops.end()) return Value::mat(it->second);
    if (n.name == "s0") return Value::mat(sigma(0));
    if (n.name == "s1") return Value::mat(sigma(1));
    if (n.name == "s2") return Value::mat(sigma(2));
    if (n.name == "s3") return Value::mat(sigma(3));
    if (n.name == "sp") return Value::mat(sigma_plus());
    if (n.name == "sm") return Value::mat(sigma_minus());
    if (auto e = tab.resolve(n.name)) return Value::fn(*e);
    auto decl = tab.declared();
    for (const auto& [k, _] : env.ops) decl.push_back(k);
    throw UnknownIdentifier(n.name, n.offset, decl);
  }

  Value call(const Node& n) {
    if (n.name == "comm" || n.name == "anti") {
      if (n.kids.size() != 2) throw ParseError(n.name + " takes two operators", n.offset);
      Value a = eval(*n.kids[0]), b = eval(*n.kids[1]);
      int d = dim_of(a, b, n.offset);
      if (d == 0) d = env.dim;
      MatrixDiffOp A = a.as_mat(d), B = b.as_mat(d);
      return Value::mat(n.name == "comm" ? commutator(A, B) : anticommutator(A, B));
    }
    // remaining calls are scalar functions
    std::vector<Value> args;
    for (const auto& k : n.kids) {
      args.push_back(eval(*k));
      if (args.back().kind != Value::Fn) throw ParseError(n.name + ": operator argument", k->offset);
    }
    return Value::fn(to_expr(n, tab));
  }

  Value matrix(const Node& n) {
    std::vector<Value> cells;
    int block = 0;
    for (const auto& k : n.kids) {
      cells.push_back(eval(*k));
      if (cells.back().kind == Value::Mat) {
        if (block && cells.back().m.dim() != block) throw ParseError("inconsistent block sizes", k->offset);
        block = cells.back().m.dim();
      }
    }
    int nb = n.rows;
    if (block == 0) {
      MatrixDiffOp m(nb);
      for (int r = 0; r < nb; ++r)
        for (int c = 0; c < nb; ++c) m.at(r, c) = cells[static_cast<size_t>(r * nb + c)].as_diff();
      return Value::mat(m);
    }
    std::vector<MatrixDiffOp> blocks;
    for (const auto& v : cells) blocks.push_back(v.as_mat(block));
    return Value::mat(MatrixDiffOp::from_blocks(blocks, nb));
  }
};

}  // namespace

MatrixDiffOp parse_operator(std::string_view text, const OpEnv& env) {
  static const SymbolTable std_tab = SymbolTable::standard();
  const SymbolTable& tab = env.symbols ? *env.symbols : std_tab;
  NodeP ast = parse_ast(text, true);
  OpEval ev{env, tab};
  Value v = ev.eval(*ast);
  if (v.kind == Value::Mat && v.m.dim() != env.dim)
    throw ParseError("operator has dimension " + std::to_string(v.m.dim()) + ", expected " + std::to_string(env.dim),
                     0);
  return v.as_mat(env.dim);
}

MatrixDiffOp parse_operator(std::string_view text, int dim) {
  OpEnv env;
  env.dim = dim;
  return parse_operator(text, env);
}

}  // namespace pk
