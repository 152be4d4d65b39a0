#include "pk/algebra.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace pk {

using json = nlohmann::ordered_json;

namespace {

using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

constexpr double kRelTol = 1e-7;

MatrixDiffOp prepare(const MatrixDiffOp& a, const ExpandOptions& opt) {
  return opt.mode == Mode::OnShell ? reduce_on_shell(a, *opt.H) : a;
}

std::vector<Expr> coeff_exprs(const MatrixDiffOp& a) {
  std::vector<Expr> out;
  for (int r = 0; r < a.dim(); ++r)
    for (int c = 0; c < a.dim(); ++c)
      for (const auto& [J, f] : a.at(r, c)) out.push_back(f);
  return out;
}

std::vector<AtomP> params_of(const std::vector<Expr>& es) {
  std::vector<AtomP> out;
  for (AtomP s : sample_symbols(es))
    if (s->kind == AtomKind::Param) out.push_back(s);
  return out;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

Expr to_expr(const Coeff& c) { return Expr(c); }

// Constant ratio c_s / d_s across samples, rationalized.
std::optional<Coeff> constant_ratio(const std::vector<cplx>& c, const std::vector<cplx>& d) {
  std::vector<cplx> r;
  for (size_t s = 0; s < c.size(); ++s) {
    if (std::abs(d[s]) < 1e-12) return std::nullopt;
    r.push_back(c[s] / d[s]);
  }
  for (const auto& z : r)
    if (std::abs(z - r[0]) > kRelTol * std::max(1.0, std::abs(r[0]))) return std::nullopt;
  Coeff q;
  if (!rationalize(r[0], q)) return std::nullopt;
  return q;
}

// Coefficient as a rational combination of dictionary values; nullopt when no fit is found.
std::optional<Expr> fit_coefficient(const std::vector<cplx>& c, const std::vector<std::vector<cplx>>& dict,
                                    const std::vector<Expr>& dict_exprs, double scale) {
  size_t P = c.size();
  if (max_abs(c) <= 1e-9 * scale) return Expr();
  for (size_t j = 0; j < dict_exprs.size(); ++j) {
    std::vector<cplx> d(P);
    for (size_t s = 0; s < P; ++s) d[s] = dict[s][j];
    if (auto q = constant_ratio(c, d)) return to_expr(*q) * dict_exprs[j];
  }
  MatC D(P, dict_exprs.size());
  VecC b(P);
  for (size_t s = 0; s < P; ++s) {
    b(s) = c[s];
    for (size_t j = 0; j < dict_exprs.size(); ++j) D(s, j) = dict[s][j];
  }
  VecC x = D.completeOrthogonalDecomposition().solve(b);
  Expr out;
  VecC xr(dict_exprs.size());
  for (size_t j = 0; j < dict_exprs.size(); ++j) {
    Coeff q;
    if (std::abs(x(j)) < 1e-10) {
      xr(j) = 0;
      continue;
    }
    if (!rationalize(x(j), q)) return std::nullopt;
    xr(j) = q.to_complex();
    out += to_expr(q) * dict_exprs[j];
  }
  if ((D * xr - b).norm() > kRelTol * std::max(1.0, b.norm())) return std::nullopt;
  return out;
}

}  // namespace

bool Expander::Key::operator<(const Key& o) const {
  if (r != o.r) return r < o.r;
  if (c != o.c) return c < o.c;
  return J < o.J;
}

std::optional<Expr> BasisExpansion::coeff(const std::string& name) const {
  for (size_t k = 0; k < names.size() && k < coeffs.size(); ++k)
    if (names[k] == name) return coeffs[k];
  return std::nullopt;
}

std::string BasisExpansion::str() const {
  std::vector<std::pair<std::string, Expr>> terms;
  for (size_t k = 0; k < names.size() && k < coeffs.size(); ++k) terms.emplace_back(names[k], coeffs[k]);
  return combination_str(terms);
}

std::string combination_str(const std::vector<std::pair<std::string, Expr>>& terms) {
  std::string out;
  for (const auto& [name, c] : terms) {
    if (c.is_zero()) continue;
    std::string t;
    bool neg = false;
    if (c == Expr(1)) {
      t = name;
    } else if (c == Expr(-1)) {
      t = name;
      neg = true;
    } else {
      std::string cs = c.str();
      if (c.size() == 1 && !cs.empty() && cs[0] == '-') {
        neg = true;
        cs = (-c).str();
      }
      bool wrap = c.size() > 1 || cs.find_first_of("+-") != std::string::npos;
      t = (wrap ? "(" + cs + ")" : cs) + "*" + name;
    }
    if (out.empty())
      out = neg ? "-" + t : t;
    else
      out += (neg ? " - " : " + ") + t;
  }
  return out.empty() ? "0" : out;
}

Expander::Expander(std::vector<GradedGenerator> basis, ExpandOptions opt) : basis_(std::move(basis)), opt_(std::move(opt)) {
  if (opt_.mode == Mode::OnShell && !opt_.H) throw std::invalid_argument("on-shell expansion needs a Hamiltonian");
  if (opt_.dictionary.empty()) opt_.dictionary = {Expr(1)};
  std::vector<Expr> all = opt_.dictionary;
  std::set<Key> keys;
  for (const auto& g : basis_) {
    if (!basis_.empty() && g.op.dim() != basis_[0].op.dim())
      throw std::invalid_argument("basis element " + g.name + " has a different dimension");
    reduced_.push_back(prepare(g.op, opt_));
    const MatrixDiffOp& a = reduced_.back();
    for (int r = 0; r < a.dim(); ++r)
      for (int c = 0; c < a.dim(); ++c)
        for (const auto& [J, f] : a.at(r, c)) {
          keys.insert({r, c, J});
          all.push_back(f);
        }
  }
  if (opt_.H)
    for (const auto& f : coeff_exprs(*opt_.H)) all.push_back(f);
  keys_.assign(keys.begin(), keys.end());
  params_ = params_of(all);

  size_t P = std::max<size_t>(3, opt_.dictionary.size() + 2);
  size_t R = std::max<size_t>(8, 2 * basis_.size() + 4);
  coord_points_.resize(P);
  cols_.resize(P);
  dict_values_.resize(P);
  for (size_t s = 0; s < P; ++s) {
    Sampler smp(opt_.seed + 7919 * (s + 1));
    Point base = smp.draw(params_);
    for (size_t row = 0; row < R; ++row) {
      Point p = base;
      for (int k = 0; k < 3; ++k) p[coord(k)] = smp.uniform(-2, 2);
      coord_points_[s].push_back(std::move(p));
    }
    for (const auto& d : opt_.dictionary) dict_values_[s].push_back(eval_numeric(d, base));
    for (const auto& a : reduced_) {
      std::vector<cplx> v;
      values(a, s, v);
      cols_[s].push_back(std::move(v));
    }
  }

  // Greedy independent subset at the first sample.
  if (basis_.empty() || keys_.empty()) return;
  size_t n = cols_[0][0].size();
  for (size_t k = 0; k < basis_.size(); ++k) {
    std::vector<size_t> trial = independent_;
    trial.push_back(k);
    MatC M(n, trial.size());
    for (size_t j = 0; j < trial.size(); ++j)
      for (size_t i = 0; i < n; ++i) M(i, j) = cols_[0][trial[j]][i];
    Eigen::ColPivHouseholderQR<MatC> qr(M);
    qr.setThreshold(1e-9);
    if (static_cast<size_t>(qr.rank()) == trial.size()) independent_ = std::move(trial);
  }
}

bool Expander::values(const MatrixDiffOp& a, size_t sample, std::vector<cplx>& out) const {
  std::map<Key, Expr> entries;
  std::vector<Expr> all;
  for (int r = 0; r < a.dim(); ++r)
    for (int c = 0; c < a.dim(); ++c)
      for (const auto& [J, f] : a.at(r, c)) {
        entries.emplace(Key{r, c, J}, f);
        all.push_back(f);
      }
  std::vector<AtomP> extra;
  for (AtomP s : params_of(all))
    if (std::find(params_.begin(), params_.end(), s) == params_.end()) extra.push_back(s);

  bool inside = true;
  out.clear();
  std::vector<cplx> outside;
  for (const Point& p0 : coord_points_[sample]) {
    Point p = extra.empty() ? p0 : extend(p0, extra, sample);
    Evaluator ev(p);
    for (const Key& k : keys_) {
      auto it = entries.find(k);
      out.push_back(it == entries.end() ? cplx(0) : ev.eval(it->second));
    }
    for (const auto& [k, f] : entries)
      if (!std::binary_search(keys_.begin(), keys_.end(), k)) outside.push_back(ev.eval(f));
  }
  double scale = std::max(1.0, max_abs(out));
  if (max_abs(outside) > 1e-9 * scale) inside = false;
  return inside;
}

Point Expander::extend(const Point& base, const std::vector<AtomP>& extra, size_t sample) const {
  Sampler smp(opt_.seed + 104729 * (sample + 1));
  Point p = base;
  for (const auto& [s, v] : smp.draw(extra)) p.emplace(s, v);
  return p;
}

BasisExpansion Expander::expand(const MatrixDiffOp& a) const {
  BasisExpansion out;
  for (const auto& g : basis_) out.names.push_back(g.name);
  if (!basis_.empty() && a.dim() != basis_[0].op.dim())
    throw std::invalid_argument("operator dimension does not match the basis");
  MatrixDiffOp ar = prepare(a, opt_);

  std::vector<Expr> coeffs(basis_.size());
  bool fitted = true;
  size_t P = coord_points_.size();
  std::vector<std::vector<cplx>> c(independent_.size(), std::vector<cplx>(P));
  double scale = 1;
  for (size_t s = 0; s < P && fitted; ++s) {
    std::vector<cplx> b;
    if (!values(ar, s, b)) {
      fitted = false;
      break;
    }
    scale = std::max(scale, max_abs(b));
    if (independent_.empty()) {
      if (max_abs(b) > 1e-9 * std::max(1.0, scale)) fitted = false;
      continue;
    }
    MatC M(b.size(), independent_.size());
    for (size_t j = 0; j < independent_.size(); ++j)
      for (size_t i = 0; i < b.size(); ++i) M(i, j) = cols_[s][independent_[j]][i];
    VecC bv = Eigen::Map<const VecC>(b.data(), static_cast<Eigen::Index>(b.size()));
    VecC x = M.colPivHouseholderQr().solve(bv);
    if ((M * x - bv).norm() > kRelTol * std::max(1.0, bv.norm())) fitted = false;
    for (size_t j = 0; j < independent_.size(); ++j) c[j][s] = x(j);
  }
  if (fitted) {
    for (size_t j = 0; j < independent_.size(); ++j) {
      auto e = fit_coefficient(c[j], dict_values_, opt_.dictionary, scale);
      if (!e) {
        fitted = false;
        continue;
      }
      coeffs[independent_[j]] = *e;
    }
  }

  MatrixDiffOp sum = MatrixDiffOp::zero(a.dim());
  for (size_t k = 0; k < basis_.size(); ++k)
    if (!coeffs[k].is_zero()) sum = sum + coeffs[k] * basis_[k].op;
  OpEquality eq = equals(a, sum, opt_.mode, opt_.H, opt_.seed, opt_.trials);
  out.residual = a - sum;
  out.in_span = eq.equal;
  if (eq.equal || fitted) out.coeffs = coeffs;
  if (!eq.equal) out.witness = eq;
  return out;
}

BasisExpansion expand_in_basis(const MatrixDiffOp& a, const std::vector<GradedGenerator>& basis,
                               const ExpandOptions& opt) {
  return Expander(basis, opt).expand(a);
}

ExpandOptions model_expand_options(const ModelSpec& m, Mode mode, const Bindings& subst, const MatrixDiffOp* H,
                                   uint64_t seed, int trials) {
  ExpandOptions o;
  o.mode = mode;
  o.H = H;
  o.seed = seed;
  o.trials = trials;
  for (const auto& d : m.dictionary) o.dictionary.push_back(substitute(m.parse_expr(d), subst));
  return o;
}

// ---------------------------------------------------------------- tables

std::string status_name(CellStatus s) {
  switch (s) {
    case CellStatus::Match: return "match";
    case CellStatus::Mismatch: return "mismatch";
    case CellStatus::NotInSpan: return "not-in-span";
    case CellStatus::Error: return "error";
  }
  return "?";
}

int TableReport::matches() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const CellReport& c) {
    return c.status == CellStatus::Match;
  }));
}

int TableReport::mismatches() const { return static_cast<int>(cells.size()) - matches(); }

bool TableReport::passed() const {
  for (const auto& c : cells)
    if (c.status != CellStatus::Match && !(c.suspect && c.adjudicated)) return false;
  return true;
}

std::string TableReport::to_json() const {
  json cs = json::array();
  int adjudicated = 0;
  for (const auto& c : cells) {
    json j = {{"row", c.row},           {"col", c.col},           {"kind", c.kind},
              {"status", status_name(c.status)}, {"expected", c.expected}, {"computed", c.computed}};
    if (c.suspect) j["suspect"] = true;
    if (c.adjudicated) {
      j["adjudicated"] = true;
      ++adjudicated;
    }
    if (!c.witness.empty()) j["witness"] = c.witness;
    cs.push_back(std::move(j));
  }
  json out = {{"model", model},
              {"table", table},
              {"cells", cs},
              {"summary",
               {{"cells", cells.size()},
                {"match", matches()},
                {"mismatch", mismatches()},
                {"adjudicated", adjudicated},
                {"passed", passed()}}}};
  return out.dump(2);
}

std::string TableReport::to_text() const {
  std::ostringstream os;
  os << model << "/" << table << ": " << matches() << "/" << cells.size() << " cells match"
     << (passed() ? "" : ", FAILED") << "\n";
  for (const auto& c : cells) {
    if (c.status == CellStatus::Match) continue;
    os << "  [" << c.row << ", " << c.col << "] " << status_name(c.status) << ": printed " << c.expected
       << ", computed " << c.computed;
    if (c.suspect) os << (c.adjudicated ? " (suspect, adjudicated by symmetry)" : " (suspect)");
    os << "\n";
    if (!c.witness.empty()) os << "    " << c.witness << "\n";
  }
  return os.str();
}

namespace {

GradedGenerator substituted(const ModelSpec& m, const std::string& name, const Bindings& b) {
  GradedGenerator g = m.op(name);
  if (!b.empty()) g.op = substitute(g.op, b);
  return g;
}

MatrixDiffOp combination(const ModelSpec& m, const TableCell& cell, const Bindings& b, int dim) {
  MatrixDiffOp out = MatrixDiffOp::zero(dim);
  for (const auto& [name, c] : cell.coeffs) out = out + substitute(c, b) * substituted(m, name, b).op;
  return out;
}

const Bindings& subst_of(const ModelSpec& m, const std::string& name) {
  static const Bindings none;
  return name.empty() ? none : m.substitution(name);
}

}  // namespace

TableReport verify_table(const ModelSpec& m, const StructureTable& t, uint64_t seed, int trials) {
  TableReport rep;
  rep.model = m.name;
  rep.table = t.name;
  const Bindings& b = subst_of(m, t.substitution);
  MatrixDiffOp H = substitute(m.hamiltonian, b);
  std::optional<Expander> ex;
  auto expander = [&]() -> const Expander& {
    if (!ex) {
      std::vector<GradedGenerator> basis;
      for (const auto& n : t.basis) basis.push_back(substituted(m, n, b));
      ex.emplace(basis, model_expand_options(m, t.mode, b, &H, seed, trials));
    }
    return *ex;
  };

  std::map<std::pair<std::string, std::string>, MatrixDiffOp> brackets;
  std::map<std::pair<std::string, std::string>, BracketKind> kinds;
  for (const auto& r : t.rows)
    for (const auto& c : t.cols) {
      const TableCell* cell = t.cell(r, c);
      if (!cell) continue;
      CellReport cr;
      cr.row = r;
      cr.col = c;
      cr.suspect = cell->suspect;
      cr.expected = cell->value;
      try {
        GradedGenerator a = substituted(m, r, b), g = substituted(m, c, b);
        BracketKind k = t.graded ? bracket_kind(a.parity, g.parity) : BracketKind::Commutator;
        cr.kind = k == BracketKind::Commutator ? "commutator" : "anticommutator";
        MatrixDiffOp br = bracket(a.op, g.op, k);
        brackets[{r, c}] = br;
        kinds[{r, c}] = k;
        OpEquality eq = equals(br, combination(m, *cell, b, br.dim()), t.mode, &H, seed, trials);
        if (eq.equal) {
          cr.status = CellStatus::Match;
          cr.computed = cell->value;
        } else {
          BasisExpansion e = expander().expand(br);
          cr.status = e.in_span ? CellStatus::Mismatch : CellStatus::NotInSpan;
          cr.computed = e.in_span ? e.str() : "not in span";
          cr.witness = eq.str();
          cr.expansion = std::move(e);
        }
      } catch (const std::exception& ex) {
        cr.status = CellStatus::Error;
        cr.computed = "error";
        cr.witness = ex.what();
      }
      rep.cells.push_back(std::move(cr));
    }

  // A failing suspect cell is settled by the printed mirror cell when that one is consistent.
  for (auto& cr : rep.cells) {
    if (!cr.suspect || cr.status == CellStatus::Match || cr.status == CellStatus::Error) continue;
    const TableCell* mirror = t.cell(cr.col, cr.row);
    if (!mirror) continue;
    const MatrixDiffOp& br = brackets.at({cr.row, cr.col});
    MatrixDiffOp expect = combination(m, *mirror, b, br.dim());
    if (kinds.at({cr.row, cr.col}) == BracketKind::Commutator) expect = -expect;
    cr.adjudicated = equals(br, expect, t.mode, &H, seed, trials).equal;
  }
  return rep;
}

TableReport verify_table(const ModelSpec& m, const std::string& table, uint64_t seed, int trials) {
  for (const auto& t : m.tables)
    if (t.name == table) return verify_table(m, t, seed, trials);
  throw std::invalid_argument("model " + m.name + " has no table '" + table + "'");
}

// ---------------------------------------------------------------- closure

bool ProbeReport::pass() const {
  if (expect == "in-span") return expansion.in_span;
  if (expect == "not-in-span") return !expansion.in_span;
  return true;
}

bool ClosureReport::closed() const {
  if (!error.empty()) return false;
  return std::all_of(pairs.begin(), pairs.end(), [](const PairReport& p) { return p.expansion.in_span; });
}

bool ClosureReport::jacobi_holds() const {
  return error.empty() && std::all_of(jacobi.begin(), jacobi.end(), [](const JacobiReport& j) { return j.holds; });
}

bool ClosureReport::probes_pass() const {
  return std::all_of(probes.begin(), probes.end(), [](const ProbeReport& p) { return p.pass(); });
}

std::string ClosureReport::to_json() const {
  json ps = json::array();
  for (const auto& p : pairs) {
    json j = {{"a", p.a}, {"b", p.b}, {"kind", p.kind}, {"in_span", p.expansion.in_span}};
    j["value"] = p.expansion.in_span ? p.expansion.str() : "not in span";
    if (p.expansion.witness) j["witness"] = p.expansion.witness->str();
    ps.push_back(std::move(j));
  }
  json js = json::array();
  for (const auto& t : jacobi)
    if (!t.holds) js.push_back({{"a", t.a}, {"b", t.b}, {"c", t.c}, {"witness", t.witness}});
  json pr = json::array();
  for (const auto& p : probes)
    pr.push_back({{"expr", p.expr},
                  {"expect", p.expect},
                  {"in_span", p.expansion.in_span},
                  {"value", p.expansion.in_span ? p.expansion.str() : "not in span"},
                  {"pass", p.pass()}});
  json out = {{"model", model},     {"closure", name},          {"graded", graded},
              {"closed", closed()}, {"jacobi_triples", jacobi.size()}, {"jacobi_holds", jacobi_holds()},
              {"pairs", ps},        {"jacobi_failures", js},    {"probes", pr}};
  if (!error.empty()) out["error"] = error;
  return out.dump(2);
}

std::string ClosureReport::to_text() const {
  std::ostringstream os;
  int in = static_cast<int>(
      std::count_if(pairs.begin(), pairs.end(), [](const PairReport& p) { return p.expansion.in_span; }));
  os << model << "/" << name << (graded ? " (graded)" : " (Lie)") << ": " << in << "/" << pairs.size()
     << " brackets in span, " << (closed() ? "closed" : "not closed") << "\n";
  if (!error.empty()) os << "  error: " << error << "\n";
  for (const auto& p : pairs)
    os << "  [" << p.a << ", " << p.b << "] = " << (p.expansion.in_span ? p.expansion.str() : "not in span") << "\n";
  if (!jacobi.empty())
    os << "  Jacobi: " << (jacobi_holds() ? "holds" : "fails") << " on " << jacobi.size() << " triples\n";
  for (const auto& t : jacobi)
    if (!t.holds) os << "    (" << t.a << ", " << t.b << ", " << t.c << "): " << t.witness << "\n";
  for (const auto& p : probes)
    os << "  probe " << p.expr << ": " << (p.expansion.in_span ? p.expansion.str() : "not in span")
       << (p.pass() ? "" : "  [unexpected]") << "\n";
  return os.str();
}

namespace {

int grade(Parity p) { return p == Parity::Odd ? 1 : 0; }

// Elements of parity Neither are bracketed with commutators.
BracketKind kind_of(bool graded, Parity a, Parity b) {
  return graded && a == Parity::Odd && b == Parity::Odd ? BracketKind::Anticommutator : BracketKind::Commutator;
}

Parity sum_parity(Parity a, Parity b) {
  if (a == Parity::Neither || b == Parity::Neither) return Parity::Neither;
  return a == b ? Parity::Even : Parity::Odd;
}

}  // namespace

ClosureReport closure_check(const std::vector<GradedGenerator>& basis, bool graded, const ExpandOptions& opt,
                            bool jacobi) {
  ClosureReport rep;
  rep.graded = graded;
  for (const auto& g : basis)
    if (g.op.dim() != basis[0].op.dim()) {
      rep.error = "basis element " + g.name + " has dimension " + std::to_string(g.op.dim()) + ", expected " +
                  std::to_string(basis[0].op.dim());
      return rep;
    }
  Expander ex(basis, opt);
  size_t n = basis.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      BracketKind k = kind_of(graded, basis[i].parity, basis[j].parity);
      if (i == j && k == BracketKind::Commutator) continue;
      PairReport p;
      p.a = basis[i].name;
      p.b = basis[j].name;
      p.kind = k == BracketKind::Commutator ? "commutator" : "anticommutator";
      p.expansion = ex.expand(bracket(basis[i].op, basis[j].op, k));
      rep.pairs.push_back(std::move(p));
    }
  if (!jacobi) return rep;

  auto br = [&](const MatrixDiffOp& x, Parity px, const MatrixDiffOp& y, Parity py) {
    return bracket(x, y, kind_of(graded, px, py));
  };
  MatrixDiffOp zero = MatrixDiffOp::zero(n ? basis[0].op.dim() : 2);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j)
      for (size_t k = j; k < n; ++k) {
        const GradedGenerator &a = basis[i], &b = basis[j], &c = basis[k];
        bool neither = a.parity == Parity::Neither || b.parity == Parity::Neither || c.parity == Parity::Neither;
        bool odd = a.parity == Parity::Odd || b.parity == Parity::Odd || c.parity == Parity::Odd;
        if (graded && neither && odd) continue;  // no super-Jacobi identity for mixed elements
        auto sign = [&](const GradedGenerator& x, const GradedGenerator& y) {
          return graded && grade(x.parity) == 1 && grade(y.parity) == 1 ? Expr(-1) : Expr(1);
        };
        MatrixDiffOp J = sign(a, c) * br(a.op, a.parity, br(b.op, b.parity, c.op, c.parity),
                                        sum_parity(b.parity, c.parity)) +
                         sign(b, a) * br(b.op, b.parity, br(c.op, c.parity, a.op, a.parity),
                                        sum_parity(c.parity, a.parity)) +
                         sign(c, b) * br(c.op, c.parity, br(a.op, a.parity, b.op, b.parity),
                                        sum_parity(a.parity, b.parity));
        JacobiReport jr{a.name, b.name, c.name, true, ""};
        if (!J.is_zero()) {
          OpEquality eq = equals(J, zero, opt.seed, opt.trials);
          jr.holds = eq.equal;
          if (!eq.equal) jr.witness = eq.str();
        }
        rep.jacobi.push_back(std::move(jr));
      }
  return rep;
}

ClosureReport closure_check(const ModelSpec& m, const ClosureSpec& c, uint64_t seed, int trials, bool jacobi) {
  const Bindings& b = subst_of(m, c.substitution);
  MatrixDiffOp H = substitute(m.hamiltonian, b);
  std::vector<GradedGenerator> basis;
  for (const auto& n : c.basis) basis.push_back(substituted(m, n, b));
  ExpandOptions opt = model_expand_options(m, c.mode, b, &H, seed, trials);
  ClosureReport rep = closure_check(basis, c.graded, opt, jacobi);
  rep.model = m.name;
  rep.name = c.name;
  if (!rep.error.empty()) return rep;
  Expander ex(basis, opt);
  for (const auto& p : c.probes) {
    ProbeReport pr;
    pr.expr = p.expr;
    pr.expect = p.expect;
    pr.expansion = ex.expand(substitute(m.parse_op(p.expr), b));
    rep.probes.push_back(std::move(pr));
  }
  return rep;
}

// ---------------------------------------------------------------- relations

RelationReport check_relation(const ModelSpec& m, const Relation& r, uint64_t seed, int trials) {
  RelationReport rep;
  rep.name = r.name;
  rep.lhs = r.lhs;
  rep.rhs = r.rhs;
  rep.mode = mode_name(r.mode);
  rep.substitution = r.substitution;
  rep.expect_equal = r.expect_equal;
  const Bindings& b = subst_of(m, r.substitution);
  MatrixDiffOp H = substitute(m.hamiltonian, b);
  MatrixDiffOp lhs = substitute(m.parse_op(r.lhs), b), rhs = substitute(m.parse_op(r.rhs), b);
  if (lhs.dim() != rhs.dim()) {
    rep.equal = false;
    rep.witness = "dimensions differ: " + std::to_string(lhs.dim()) + " vs " + std::to_string(rhs.dim());
    return rep;
  }
  OpEquality eq = equals(lhs, rhs, r.mode, &H, seed, trials);
  rep.equal = eq.equal;
  if (!eq.equal) rep.witness = eq.str();
  return rep;
}

std::vector<RelationReport> supercharge_suite(const ModelSpec& m, uint64_t seed, int trials) {
  std::vector<RelationReport> out;
  for (const auto& r : m.relations) out.push_back(check_relation(m, r, seed, trials));
  return out;
}

std::string relations_json(const std::string& model, const std::vector<RelationReport>& rs) {
  json arr = json::array();
  int pass = 0;
  for (const auto& r : rs) {
    json j = {{"name", r.name},   {"lhs", r.lhs}, {"rhs", r.rhs}, {"mode", r.mode}, {"expect_equal", r.expect_equal},
              {"equal", r.equal}, {"pass", r.pass()}};
    if (!r.substitution.empty()) j["substitution"] = r.substitution;
    if (!r.witness.empty()) j["witness"] = r.witness;
    arr.push_back(std::move(j));
    pass += r.pass();
  }
  json out = {{"model", model}, {"relations", arr}, {"summary", {{"total", rs.size()}, {"pass", pass}}}};
  return out.dump(2);
}

}  // namespace pk
