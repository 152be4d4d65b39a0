#include "pk/operator.hpp"

#include <algorithm>
#include <sstream>

namespace pk {

// ---------------------------------------------------------------- scalar operators

namespace {

void put(std::map<MultiIndex, Expr>& acc, const MultiIndex& J, const Expr& f) {
  if (f.is_zero()) return;
  auto it = acc.find(J);
  if (it == acc.end())
    acc.emplace(J, f);
  else
    it->second = it->second + f;
}

ScalarOp flatten(std::map<MultiIndex, Expr>&& acc) {
  ScalarOp out;
  out.reserve(acc.size());
  for (auto& [J, f] : acc)
    if (!f.is_zero()) out.emplace_back(J, std::move(f));
  return out;
}

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool depends_on_coords(const Expr& g) {
  for (int k = 0; k < 3; ++k)
    if (depends_on(g, coord(k))) return true;
  return false;
}

}  // namespace

Expr partial(const Expr& g, const MultiIndex& J) {
  Expr r = g;
  for (int k = 0; k < 3 && !r.is_zero(); ++k) r = differentiate(r, coord(k), J[k]);
  return r;
}

ScalarOp scalar_add(const ScalarOp& a, const ScalarOp& b) {
  std::map<MultiIndex, Expr> acc;
  for (const auto& [J, f] : a) put(acc, J, f);
  for (const auto& [J, f] : b) put(acc, J, f);
  return flatten(std::move(acc));
}

ScalarOp scalar_scale(const Expr& f, const ScalarOp& a) {
  if (f.is_zero()) return {};
  ScalarOp out;
  for (const auto& [J, g] : a) {
    Expr p = f * g;
    if (!p.is_zero()) out.emplace_back(J, std::move(p));
  }
  return out;
}

ScalarOp scalar_compose(const ScalarOp& a, const ScalarOp& b) {
  if (a.empty() || b.empty()) return {};
  MultiIndex top;
  for (const auto& [J, _] : a)
    for (int k = 0; k < 3; ++k) top.n[k] = std::max(top.n[k], J[k]);
  std::map<MultiIndex, Expr> acc;
  for (const auto& [jb, g] : b) {
    bool varies = depends_on_coords(g);
    // derivatives of g needed by the Leibniz expansion
    std::map<MultiIndex, Expr> dg;
    dg.emplace(MultiIndex{}, g);
    if (varies) {
      for (int c0 = 0; c0 <= top[0]; ++c0)
        for (int c1 = 0; c1 <= top[1]; ++c1)
          for (int c2 = 0; c2 <= top[2]; ++c2) {
            MultiIndex c(c0, c1, c2);
            if (c.is_zero()) continue;
            int k = c2 > 0 ? 2 : (c1 > 0 ? 1 : 0);
            const Expr& prev = dg.at(c - MultiIndex::unit(k));
            dg.emplace(c, prev.is_zero() ? Expr() : differentiate(prev, coord(k)));
          }
    }
    for (const auto& [ja, f] : a) {
      for (int c0 = 0; c0 <= ja[0]; ++c0)
        for (int c1 = 0; c1 <= ja[1]; ++c1)
          for (int c2 = 0; c2 <= ja[2]; ++c2) {
            MultiIndex c(c0, c1, c2);
            if (!c.is_zero() && !varies) continue;
            const Expr& d = dg.at(c);
            if (d.is_zero()) continue;
            long bc = binom(ja[0], c0) * binom(ja[1], c1) * binom(ja[2], c2);
            put(acc, ja - c + jb, Expr(bc) * f * d);
          }
    }
  }
  return flatten(std::move(acc));
}

// ---------------------------------------------------------------- MatrixDiffOp

MatrixDiffOp MatrixDiffOp::scalar(int n, const Expr& f, const MultiIndex& J) {
  MatrixDiffOp m(n);
  for (int r = 0; r < n; ++r) m.add_term(r, r, J, f);
  return m;
}

MatrixDiffOp MatrixDiffOp::constant(int n, const std::vector<Expr>& entries) {
  if (entries.size() != static_cast<size_t>(n * n)) throw std::invalid_argument("constant: wrong entry count");
  MatrixDiffOp m(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m.add_term(r, c, {}, entries[static_cast<size_t>(r * n + c)]);
  return m;
}

void MatrixDiffOp::add_term(int r, int c, const MultiIndex& J, const Expr& f) {
  if (f.is_zero()) return;
  at(r, c) = scalar_add(at(r, c), ScalarOp{{J, f}});
}

bool MatrixDiffOp::is_zero() const {
  return std::all_of(e_.begin(), e_.end(), [](const ScalarOp& s) { return s.empty(); });
}

int MatrixDiffOp::max_order() const {
  int m = 0;
  for (const auto& s : e_)
    for (const auto& [J, _] : s) m = std::max(m, J.order());
  return m;
}

int MatrixDiffOp::max_order(int var) const {
  int m = 0;
  for (const auto& s : e_)
    for (const auto& [J, _] : s) m = std::max(m, J[var]);
  return m;
}

bool MatrixDiffOp::depends_on(AtomP s) const {
  for (const auto& e : e_)
    for (const auto& [_, f] : e)
      if (pk::depends_on(f, s)) return true;
  return false;
}

MatrixDiffOp MatrixDiffOp::operator+(const MatrixDiffOp& o) const {
  if (o.n_ != n_) throw std::invalid_argument("operator dimension mismatch");
  MatrixDiffOp r(n_);
  for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = scalar_add(e_[k], o.e_[k]);
  return r;
}

MatrixDiffOp MatrixDiffOp::operator-() const {
  MatrixDiffOp r(n_);
  for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = scalar_scale(Expr(-1), e_[k]);
  return r;
}

MatrixDiffOp MatrixDiffOp::operator-(const MatrixDiffOp& o) const { return *this + (-o); }

MatrixDiffOp operator*(const Expr& f, const MatrixDiffOp& a) {
  MatrixDiffOp r(a.n_);
  for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = scalar_scale(f, a.e_[k]);
  return r;
}

bool operator==(const MatrixDiffOp& a, const MatrixDiffOp& b) {
  if (a.n_ != b.n_) return false;
  for (size_t k = 0; k < a.e_.size(); ++k) {
    if (a.e_[k].size() != b.e_[k].size()) return false;
    for (size_t i = 0; i < a.e_[k].size(); ++i)
      if (a.e_[k][i].first != b.e_[k][i].first || a.e_[k][i].second != b.e_[k][i].second) return false;
  }
  return true;
}

MatrixDiffOp MatrixDiffOp::block(int r0, int c0, int k) const {
  MatrixDiffOp b(k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) b.at(r, c) = at(r0 + r, c0 + c);
  return b;
}

MatrixDiffOp MatrixDiffOp::from_blocks(const std::vector<MatrixDiffOp>& blocks, int nb) {
  if (blocks.size() != static_cast<size_t>(nb * nb)) throw std::invalid_argument("from_blocks: wrong block count");
  int k = blocks[0].dim();
  MatrixDiffOp m(k * nb);
  for (int br = 0; br < nb; ++br)
    for (int bc = 0; bc < nb; ++bc) {
      const auto& b = blocks[static_cast<size_t>(br * nb + bc)];
      if (b.dim() != k) throw std::invalid_argument("from_blocks: block dimension mismatch");
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) m.at(br * k + r, bc * k + c) = b.at(r, c);
    }
  return m;
}

MatrixDiffOp MatrixDiffOp::map_coeffs(const std::function<Expr(const Expr&)>& f) const {
  MatrixDiffOp r(n_);
  for (size_t k = 0; k < e_.size(); ++k) {
    std::map<MultiIndex, Expr> acc;
    for (const auto& [J, g] : e_[k]) put(acc, J, f(g));
    r.e_[k] = flatten(std::move(acc));
  }
  return r;
}

std::string MatrixDiffOp::entry_str(const ScalarOp& s) {
  if (s.empty()) return "0";
  std::string out;
  for (size_t k = 0; k < s.size(); ++k) {
    const auto& [J, f] = s[k];
    std::string d;
    static const char* tok[3] = {"Dt", "Dx", "Dy"};
    for (int v = 0; v < 3; ++v) {
      if (J[v] == 0) continue;
      if (!d.empty()) d += "*";
      d += tok[v];
      if (J[v] > 1) d += "^" + std::to_string(J[v]);
    }
    std::string t;
    if (d.empty()) {
      t = f.str();
    } else if (f == Expr(1)) {
      t = d;
    } else if (f == Expr(-1)) {
      t = "-" + d;
    } else if (f.size() == 1) {
      t = f.str() + "*" + d;
    } else {
      t = "(" + f.str() + ")*" + d;
    }
    if (k == 0)
      out = t;
    else if (t[0] == '-')
      out += " - " + t.substr(1);
    else
      out += " + " + t;
  }
  return out;
}

std::string MatrixDiffOp::str() const {
  std::string s = "[";
  for (int r = 0; r < n_; ++r) {
    s += r ? ", [" : "[";
    for (int c = 0; c < n_; ++c) s += (c ? ", " : "") + entry_str(at(r, c));
    s += "]";
  }
  return s + "]";
}

MatrixDiffOp compose(const MatrixDiffOp& a, const MatrixDiffOp& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("compose: dimension mismatch");
  int n = a.dim();
  MatrixDiffOp r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ScalarOp acc;
      for (int k = 0; k < n; ++k) {
        if (a.at(i, k).empty() || b.at(k, j).empty()) continue;
        acc = scalar_add(acc, scalar_compose(a.at(i, k), b.at(k, j)));
      }
      r.at(i, j) = std::move(acc);
    }
  return r;
}

MatrixDiffOp power(const MatrixDiffOp& a, int k) {
  if (k < 0) throw std::invalid_argument("power: negative exponent");
  MatrixDiffOp r = MatrixDiffOp::identity(a.dim());
  for (int i = 0; i < k; ++i) r = compose(r, a);
  return r;
}

MatrixDiffOp commutator(const MatrixDiffOp& a, const MatrixDiffOp& b) { return compose(a, b) - compose(b, a); }
MatrixDiffOp anticommutator(const MatrixDiffOp& a, const MatrixDiffOp& b) { return compose(a, b) + compose(b, a); }

std::string parity_name(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    default: return "neither";
  }
}

BracketKind bracket_kind(Parity a, Parity b) {
  if (a == Parity::Neither || b == Parity::Neither) throw BracketKindError("graded bracket needs classified parities");
  return (a == Parity::Odd && b == Parity::Odd) ? BracketKind::Anticommutator : BracketKind::Commutator;
}

MatrixDiffOp bracket(const MatrixDiffOp& a, const MatrixDiffOp& b, BracketKind k) {
  return k == BracketKind::Anticommutator ? anticommutator(a, b) : commutator(a, b);
}

MatrixDiffOp graded_bracket(const GradedGenerator& a, const GradedGenerator& b) {
  try {
    return bracket(a.op, b.op, bracket_kind(a.parity, b.parity));
  } catch (const BracketKindError&) {
    throw BracketKindError("graded bracket of '" + a.name + "' and '" + b.name + "': unclassified parity");
  }
}

std::string mode_name(Mode m) { return m == Mode::Exact ? "exact" : "on-shell"; }

// ---------------------------------------------------------------- on-shell reduction

MatrixDiffOp reduce_on_shell(const MatrixDiffOp& a, const MatrixDiffOp& H) {
  if (H.dim() != a.dim()) throw std::invalid_argument("reduce_on_shell: dimension mismatch");
  if (H.max_order(0) > 0 || H.depends_on(coord(0)))
    throw std::invalid_argument("reduce_on_shell: H must be t-independent and free of Dt");
  int n = a.dim();
  int kmax = a.max_order(0);
  if (kmax == 0) return a;
  std::vector<MatrixDiffOp> P{MatrixDiffOp::identity(n)};
  MatrixDiffOp step = Expr(-1) * Expr::imag_unit() * H;
  for (int k = 1; k <= kmax; ++k) P.push_back(compose(P.back(), step));
  MatrixDiffOp r(n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c)
      for (const auto& [J, f] : a.at(i, c)) {
        if (J[0] == 0) {
          r.at(i, c) = scalar_add(r.at(i, c), ScalarOp{{J, f}});
          continue;
        }
        ScalarOp spatial{{MultiIndex(0, J[1], J[2]), f}};
        for (int c2 = 0; c2 < n; ++c2) {
          const ScalarOp& pk = P[static_cast<size_t>(J[0])].at(c, c2);
          if (pk.empty()) continue;
          r.at(i, c2) = scalar_add(r.at(i, c2), scalar_compose(spatial, pk));
        }
      }
  return r;
}

// ---------------------------------------------------------------- equality and parity

std::string OpEquality::str() const {
  if (equal) return "equal";
  std::ostringstream os;
  os << "differ at entry (" << row + 1 << "," << col + 1 << ") derivative '" << J.letters() << "'";
  if (witness) os << ": " << witness->str();
  return os.str();
}

OpEquality equals(const MatrixDiffOp& a, const MatrixDiffOp& b, uint64_t seed, int trials) {
  return equals(a, b, Mode::Exact, nullptr, seed, trials);
}

OpEquality equals(const MatrixDiffOp& a, const MatrixDiffOp& b, Mode mode, const MatrixDiffOp* H, uint64_t seed,
                  int trials) {
  if (a.dim() != b.dim()) throw std::invalid_argument("equals: dimension mismatch");
  MatrixDiffOp d = a - b;
  if (mode == Mode::OnShell) {
    if (!H) throw std::invalid_argument("equals: on-shell mode needs a Hamiltonian");
    d = reduce_on_shell(d, *H);
  }
  OpEquality res;
  for (int r = 0; r < d.dim(); ++r)
    for (int c = 0; c < d.dim(); ++c)
      for (const auto& [J, f] : d.at(r, c)) {
        auto z = is_zero(f, seed, trials);
        if (!z.zero) {
          res.equal = false;
          res.row = r;
          res.col = c;
          res.J = J;
          res.witness = z.witness;
          return res;
        }
      }
  return res;
}

Parity classify_parity(const MatrixDiffOp& a, const MatrixDiffOp& gamma, uint64_t seed, int trials) {
  if (a.dim() != gamma.dim()) throw std::invalid_argument("classify_parity: dimension mismatch");
  MatrixDiffOp zero(a.dim());
  if (equals(commutator(gamma, a), zero, seed, trials)) return Parity::Even;
  if (equals(anticommutator(gamma, a), zero, seed, trials)) return Parity::Odd;
  return Parity::Neither;
}

std::vector<Expr> apply(const MatrixDiffOp& a, const std::vector<Expr>& psi) {
  if (psi.size() != static_cast<size_t>(a.dim())) throw std::invalid_argument("apply: length mismatch");
  std::vector<Expr> out(psi.size());
  for (int r = 0; r < a.dim(); ++r)
    for (int c = 0; c < a.dim(); ++c)
      for (const auto& [J, f] : a.at(r, c)) out[static_cast<size_t>(r)] += f * partial(psi[static_cast<size_t>(c)], J);
  return out;
}

// ---------------------------------------------------------------- constants

MatrixDiffOp sigma(int k) {
  Expr i = Expr::imag_unit();
  switch (k) {
    case 0: return MatrixDiffOp::constant(2, {1, 0, 0, 1});
    case 1: return MatrixDiffOp::constant(2, {0, 1, 1, 0});
    case 2: return MatrixDiffOp::constant(2, {0, -i, i, 0});
    case 3: return MatrixDiffOp::constant(2, {1, 0, 0, -1});
  }
  throw std::invalid_argument("sigma index out of range");
}

MatrixDiffOp sigma_plus() { return MatrixDiffOp::constant(2, {0, 1, 0, 0}); }
MatrixDiffOp sigma_minus() { return MatrixDiffOp::constant(2, {0, 0, 1, 0}); }

}  // namespace pk
