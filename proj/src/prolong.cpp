#include "pk/prolong.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace pk {

namespace {

DepKey key_of(AtomP j) { return {j->index, j->conj}; }

std::vector<AtomP> jets_in(const Expr& e) {
  std::vector<AtomP> out;
  for (AtomP a : free_atoms(e))
    if (a->kind == AtomKind::Jet) out.push_back(a);
  return out;
}

}  // namespace

Expr total_derivative(const Expr& e, AtomP c) {
  if (c->kind != AtomKind::Coord) throw std::invalid_argument("total_derivative: '" + c->str() + "' is not a coordinate");
  Expr r = differentiate(e, c);
  MultiIndex ek = MultiIndex::unit(c->index);
  for (AtomP j : jets_in(e)) {
    Expr d = differentiate(e, j);
    if (!d.is_zero()) r += sym(jet(j->index, j->conj, j->J + ek)) * d;
  }
  return r;
}

Expr total_derivative(const Expr& e, const MultiIndex& J) {
  Expr r = e;
  for (int k = 0; k < 3; ++k)
    for (int m = 0; m < J[k]; ++m) r = total_derivative(r, coord(k));
  return r;
}

// ---------------------------------------------------------------- PDESystem

PDESystem::PDESystem(std::vector<AtomP> coords, int dependents, bool with_conj, const std::vector<Expr>& eqs)
    : coords_(std::move(coords)), q_(dependents), conj_(with_conj) {
  const MultiIndex et(1, 0, 0);
  for (const Expr& lhs : eqs) {
    PDEEquation eq;
    eq.lhs = lhs;
    for (AtomP j : jets_in(lhs)) {
      if (j->J[0] == 0) continue;
      if (j->J != et || eq.leading)
        throw std::invalid_argument("equation is not first order in t in a single variable: " + lhs.str());
      eq.leading = j;
    }
    if (!eq.leading) throw std::invalid_argument("equation has no time derivative: " + lhs.str());
    Expr c = differentiate(lhs, eq.leading);
    auto cc = c.constant();
    if (!cc || cc->is_zero())
      throw std::invalid_argument("leading term " + eq.leading->str() + " must have a nonzero constant coefficient");
    eq.solved = -(lhs - c * sym(eq.leading)) * Expr(Coeff(1) / *cc);
    for (const auto& o : eqs_)
      if (o.leading == eq.leading) throw std::invalid_argument("two equations solved for " + eq.leading->str());
    eqs_.push_back(std::move(eq));
  }
}

std::vector<DepKey> PDESystem::dep_keys() const {
  std::vector<DepKey> out;
  for (int a = 1; a <= q_; ++a) {
    out.push_back({a, false});
    if (conj_) out.push_back({a, true});
  }
  return out;
}

int PDESystem::order() const {
  int n = 0;
  for (const auto& e : eqs_)
    for (AtomP j : jets_in(e.lhs)) n = std::max(n, j->J.order());
  return n;
}

const PDEEquation* PDESystem::solved_for(const DepKey& d) const {
  for (const auto& e : eqs_)
    if (key_of(e.leading) == d) return &e;
  return nullptr;
}

bool PDESystem::self_conjugate(uint64_t seed, int trials) const {
  for (const auto& e : eqs_) {
    const PDEEquation* o = solved_for({e.leading->index, !e.leading->conj});
    if (!o) return false;
    // compare normalized forms: lhs / (coefficient of the leading symbol)
    Expr a = conj(e.lhs), b = o->lhs;
    Coeff ca = *differentiate(a, o->leading).constant(), cb = *differentiate(b, o->leading).constant();
    if (!is_zero(a * Expr(cb) - b * Expr(ca), seed, trials).zero) return false;
  }
  return true;
}

// ---------------------------------------------------------------- OnShell

Expr OnShell::value(AtomP j) {
  auto it = memo_.find(j);
  if (it != memo_.end()) return it->second;
  const PDEEquation* eq = s_.solved_for(key_of(j));
  if (!eq) throw std::invalid_argument("no solved form for " + j->str());
  Expr w = eq->solved;
  for (int k = 1; k < j->J[0]; ++k) w = (*this)(total_derivative(w, coord(0)));
  w = total_derivative(w, MultiIndex(0, j->J[1], j->J[2]));
  memo_.emplace(j, w);
  return w;
}

Expr OnShell::operator()(const Expr& e) {
  Bindings b;
  for (AtomP j : jets_in(e))
    if (j->J[0] > 0) b.emplace(j, value(j));
  return substitute(e, b);
}

// ---------------------------------------------------------------- JetVectorField

JetVectorField::JetVectorField(std::vector<AtomP> coords, std::vector<Expr> xi, std::map<DepKey, Expr> phi)
    : coords_(std::move(coords)), xi_(std::move(xi)), phi_(std::move(phi)) {
  if (xi_.size() != coords_.size()) throw std::invalid_argument("one xi per coordinate is required");
}

JetVectorField& JetVectorField::operator=(const JetVectorField& o) {
  if (this == &o) return *this;
  coords_ = o.coords_;
  xi_ = o.xi_;
  phi_ = o.phi_;
  std::lock_guard<std::mutex> lk(mu_);
  cache_.clear();
  return *this;
}

std::vector<AtomP> JetVectorField::base_symbols() const {
  std::vector<AtomP> out = coords_;
  for (const auto& [d, _] : phi_) out.push_back(jet(d.first, d.second));
  return out;
}

JetVectorField JetVectorField::general(const PDESystem& s) {
  std::vector<AtomP> args = s.coords();
  for (const auto& d : s.dep_keys()) args.push_back(jet(d.first, d.second));
  std::vector<int> none(args.size(), 0);
  std::vector<Expr> xi;
  for (size_t k = 0; k < s.coords().size(); ++k)
    xi.push_back(sym(unknown("xi" + std::to_string(k + 1), args, none)));
  std::map<DepKey, Expr> phi;
  for (const auto& d : s.dep_keys()) {
    std::string n = "Phi" + std::to_string(d.first), cn = "cPhi" + std::to_string(d.first);
    phi[d] = sym(d.second ? unknown(cn, args, none, n) : unknown(n, args, none, cn));
  }
  return JetVectorField(s.coords(), std::move(xi), std::move(phi));
}

Expr JetVectorField::coefficient(const DepKey& d, const MultiIndex& J) const {
  if (J.is_zero()) {
    auto it = phi_.find(d);
    return it == phi_.end() ? Expr() : it->second;
  }
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find({d, J});
    if (it != cache_.end()) return it->second;
  }
  size_t k = 0;
  while (k < coords_.size() && J[coords_[k]->index] == 0) ++k;
  if (k == coords_.size()) throw std::invalid_argument("derivative index " + J.letters() + " outside the field's coordinates");
  AtomP ck = coords_[k];
  MultiIndex prev = J - MultiIndex::unit(ck->index);
  Expr r = total_derivative(coefficient(d, prev), ck);
  for (size_t j = 0; j < coords_.size(); ++j) {
    Expr dxi = total_derivative(xi_[j], ck);
    if (!dxi.is_zero()) r -= dxi * sym(jet(d.first, d.second, prev + MultiIndex::unit(coords_[j]->index)));
  }
  std::lock_guard<std::mutex> lk(mu_);
  cache_.emplace(std::make_pair(d, J), r);
  return r;
}

std::vector<std::pair<AtomP, Expr>> JetVectorField::prolongation(int n) const {
  // multi-indices over the field's coordinates, graded then lexicographic
  std::vector<MultiIndex> idx;
  std::function<void(size_t, int, MultiIndex)> rec = [&](size_t k, int left, MultiIndex m) {
    if (k == coords_.size()) {
      if (left == 0) idx.push_back(m);
      return;
    }
    for (int a = left; a >= 0; --a) {
      MultiIndex mm = m;
      mm.n[coords_[k]->index] = a;
      rec(k + 1, left - a, mm);
    }
  };
  for (int o = 1; o <= n; ++o) rec(0, o, MultiIndex{});
  std::vector<std::pair<AtomP, Expr>> out;
  for (const auto& [d, _] : phi_)
    for (const auto& J : idx) out.emplace_back(jet(d.first, d.second, J), coefficient(d, J));
  return out;
}

Expr JetVectorField::act(const Expr& f, int n) const {
  Expr r;
  for (size_t j = 0; j < coords_.size(); ++j)
    if (!xi_[j].is_zero()) r += xi_[j] * differentiate(f, coords_[j]);
  for (AtomP a : jets_in(f)) {
    if (a->J.order() > n) throw std::invalid_argument("jet " + a->str() + " exceeds prolongation order");
    Expr c = coefficient(key_of(a), a->J);
    if (!c.is_zero()) r += c * differentiate(f, a);
  }
  return r;
}

JetVectorField JetVectorField::operator+(const JetVectorField& o) const {
  if (coords_ != o.coords_) throw std::invalid_argument("fields over different coordinates");
  std::vector<Expr> xi = xi_;
  for (size_t k = 0; k < xi.size(); ++k) xi[k] += o.xi_[k];
  std::map<DepKey, Expr> phi = phi_;
  for (const auto& [d, e] : o.phi_) phi[d] += e;
  return JetVectorField(coords_, xi, phi);
}

JetVectorField JetVectorField::scaled(const Expr& c) const {
  std::vector<Expr> xi = xi_;
  for (auto& e : xi) e = c * e;
  std::map<DepKey, Expr> phi = phi_;
  for (auto& [_, e] : phi) e = c * e;
  return JetVectorField(coords_, xi, phi);
}

JetVectorField bracket(const JetVectorField& a, const JetVectorField& b) {
  if (a.coords() != b.coords()) throw std::invalid_argument("fields over different coordinates");
  std::set<DepKey> keys;
  for (const auto& [d, _] : a.phi()) keys.insert(d);
  for (const auto& [d, _] : b.phi()) keys.insert(d);
  auto base = [&](const JetVectorField& v, const Expr& f) {
    Expr r;
    for (size_t j = 0; j < v.coords().size(); ++j) r += v.xi()[j] * differentiate(f, v.coords()[j]);
    for (const auto& [d, e] : v.phi()) r += e * differentiate(f, jet(d.first, d.second));
    return r;
  };
  std::vector<Expr> xi;
  for (size_t j = 0; j < a.coords().size(); ++j) xi.push_back(base(a, b.xi()[j]) - base(b, a.xi()[j]));
  std::map<DepKey, Expr> phi;
  for (const auto& d : keys) phi[d] = base(a, b.coefficient(d, {})) - base(b, a.coefficient(d, {}));
  return JetVectorField(a.coords(), xi, phi);
}

std::vector<Expr> invariance_residual(const JetVectorField& v, const PDESystem& s, int n) {
  if (n < s.order()) throw std::invalid_argument("prolongation order below the system order");
  OnShell os(s);
  std::vector<Expr> out;
  for (const auto& eq : s.equations()) out.push_back(os(v.act(eq.lhs, n)));
  return out;
}

// ---------------------------------------------------------------- determining equations

namespace {

// "dxi1/du1 = 0" when every term carries the same single first derivative of a xi in a jet argument.
std::optional<std::string> jet_independence(const Expr& e) {
  AtomP u = nullptr;
  for (const auto& t : e.terms()) {
    AtomP here = nullptr;
    for (const auto& [a, p] : t.m) {
      if (a->kind != AtomKind::Unknown && !(a->kind == AtomKind::Func && a->has_unknown) &&
          !(a->kind == AtomKind::Inverse && a->has_unknown))
        continue;
      if (a->kind != AtomKind::Unknown || p != 1 || here) return std::nullopt;
      here = a;
    }
    if (!here || (u && here != u)) return std::nullopt;
    u = here;
  }
  if (!u || u->name.rfind("xi", 0) != 0) return std::nullopt;
  int total = 0;
  size_t pos = 0;
  for (size_t k = 0; k < u->deriv.size(); ++k)
    if (u->deriv[k]) {
      total += u->deriv[k];
      pos = k;
    }
  if (total != 1 || u->args[pos]->kind != AtomKind::Jet) return std::nullopt;
  return "d" + u->name + "/d" + u->args[pos]->str() + " = 0";
}

}  // namespace

DeterminingSystem collect_determining(const std::vector<Expr>& residuals) {
  DeterminingSystem out;
  std::unordered_set<Expr> seen;
  std::set<std::string> findings;
  auto pick = [](AtomP a) { return a->kind == AtomKind::Jet && a->J.order() > 0; };
  for (const Expr& r : residuals) {
    auto groups = collect(r, pick);
    std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
      int da = 0, db = 0;
      for (const auto& f : a.first) da += f.second;
      for (const auto& f : b.first) db += f.second;
      if (da != db) return da < db;
      return compare(a.first, b.first) < 0;
    });
    for (auto& [m, c] : groups) {
      if (c.is_zero()) continue;
      if (!seen.insert(make_monic(c)).second) continue;
      if (auto f = jet_independence(c)) findings.insert(*f);
      out.equations.push_back({c, m.empty() ? "1" : monomial_str(m)});
    }
  }
  // Drop terms containing derivatives of an xi already known to be jet-independent, then look again.
  auto known_zero = [&](AtomP a) {
    if (a->kind != AtomKind::Unknown || a->name.rfind("xi", 0) != 0) return false;
    for (size_t k = 0; k < a->deriv.size(); ++k)
      if (a->deriv[k] && a->args[k]->kind == AtomKind::Jet &&
          findings.count("d" + a->name + "/d" + a->args[k]->str() + " = 0"))
        return true;
    return false;
  };
  for (size_t before = 0; before != findings.size();) {
    before = findings.size();
    for (const auto& eq : out.equations) {
      std::vector<Term> kept;
      for (const auto& t : eq.expr.terms())
        if (std::none_of(t.m.begin(), t.m.end(), [&](const Factor& f) { return known_zero(f.first); }))
          kept.push_back(t);
      if (kept.size() == eq.expr.terms().size() || kept.empty()) continue;
      if (auto f = jet_independence(Expr::from_terms(std::move(kept)))) findings.insert(*f);
    }
  }
  out.findings.assign(findings.begin(), findings.end());
  return out;
}

std::string DeterminingSystem::to_text() const {
  std::string s;
  for (const auto& e : equations) s += e.expr.str() + "\n";
  return s;
}

std::string DeterminingSystem::to_json() const {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : equations) a.push_back({{"monomial", e.monomial}, {"expr", e.expr.str()}});
  return a.dump(2);
}

// ---------------------------------------------------------------- ansatz verification

bool AnsatzReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AnsatzCheck& c) { return c.pass; });
}

std::string AnsatzReport::str() const {
  std::ostringstream os;
  size_t bad = 0;
  for (const auto& c : checks)
    if (!c.pass) {
      ++bad;
      os << "FAIL equation " << c.equation << " [" << c.instance << "]";
      if (c.witness) os << " " << c.witness->str();
      os << "\n";
    }
  os << checks.size() - bad << "/" << checks.size() << " checks pass; " << independent_constants
     << " independent constants; " << solution_function_count << " free solution functions\n";
  return os.str();
}

namespace {

void unknown_names(const Expr& e, std::set<AtomP>& out) {
  for (AtomP a : free_atoms(e))
    if (a->kind == AtomKind::Unknown) out.insert(a);
}

int constant_rank(const AnsatzSolution& sol, const FunctionBindings& zero, uint64_t seed) {
  if (sol.constants.empty()) return 0;
  std::vector<std::vector<Expr>> cols(sol.constants.size());
  std::vector<Expr> all;
  for (const auto& [_, def] : sol.functions) {
    Expr body = substitute_functions(def.body, zero);
    for (size_t k = 0; k < sol.constants.size(); ++k) {
      cols[k].push_back(differentiate(body, sol.constants[k]));
      all.push_back(cols[k].back());
    }
  }
  std::vector<AtomP> syms = sample_symbols(all);
  const int points = 6;
  size_t comps = cols[0].size();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(comps * points), static_cast<Eigen::Index>(sol.constants.size()));
  Sampler s(seed);
  for (int p = 0; p < points; ++p) {
    for (int attempt = 0;; ++attempt) {
      Point pt = s.draw(syms);
      try {
        for (size_t k = 0; k < cols.size(); ++k)
          for (size_t c = 0; c < comps; ++c)
            m(static_cast<Eigen::Index>(p * comps + c), static_cast<Eigen::Index>(k)) = eval_numeric(cols[k][c], pt);
        break;
      } catch (const SingularPoint&) {
        if (attempt >= 100) throw;
      }
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

}  // namespace

AnsatzReport verify_ansatz(const DeterminingSystem& det, const AnsatzSolution& sol, uint64_t seed, int trials) {
  AnsatzReport rep;
  std::vector<Expr> reduced;
  std::set<AtomP> left;
  for (const auto& e : det.equations) {
    reduced.push_back(substitute_functions(e.expr, sol.functions));
    unknown_names(reduced.back(), left);
  }
  for (const auto& [_, def] : sol.functions) unknown_names(def.body, left);

  std::set<std::string> allowed(sol.solution_functions.begin(), sol.solution_functions.end());
  FunctionBindings zero;
  for (AtomP a : left) {
    bool ok = allowed.count(a->name) || (!a->conj_name.empty() && allowed.count(a->conj_name));
    if (!ok) throw std::invalid_argument("unassigned unknown function '" + a->name + "'");
    zero[a->name] = {a->args, Expr()};
  }

  std::vector<std::pair<std::string, FunctionBindings>> inst{{"zero", zero}};
  for (size_t k = 0; k < sol.instances.size(); ++k) inst.push_back({"solution " + std::to_string(k + 1), sol.instances[k]});
  rep.instances = static_cast<int>(inst.size());
  rep.solution_function_count = static_cast<int>(sol.solution_functions.size());

  for (size_t i = 0; i < reduced.size(); ++i)
    for (const auto& [name, b] : inst) {
      Expr e = substitute_functions(reduced[i], b);
      if (has_unknown(e)) throw std::invalid_argument("instance '" + name + "' leaves unknown functions");
      ZeroResult z = is_zero(e, seed + i, trials);
      rep.checks.push_back({i, name, z.zero, z.witness});
    }
  rep.independent_constants = constant_rank(sol, zero, seed);
  return rep;
}

}  // namespace pk
