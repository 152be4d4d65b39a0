#include "pk/expr.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace pk {

// ---------------------------------------------------------------- MultiIndex

std::string MultiIndex::letters() const {
  static const char names[3] = {'t', 'x', 'y'};
  std::string s;
  for (int k = 0; k < 3; ++k) s.append(static_cast<size_t>(n[k]), names[k]);
  return s;
}

// ---------------------------------------------------------------- hashing

namespace {

inline size_t mix(size_t h, size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

size_t hash_mpq(const mpq_class& q) {
  size_t h = mpz_get_ui(q.get_num_mpz_t());
  h = mix(h, static_cast<size_t>(sgn(q) + 1));
  return mix(h, mpz_get_ui(q.get_den_mpz_t()));
}

size_t hash_coeff(const Coeff& c) { return mix(hash_mpq(c.re), hash_mpq(c.im)); }

size_t hash_terms(const std::vector<Term>& ts) {
  size_t h = ts.size();
  for (const auto& t : ts) {
    h = mix(h, hash_coeff(t.c));
    for (const auto& [a, e] : t.m) h = mix(mix(h, a->hash), static_cast<size_t>(e + 1000));
  }
  return h;
}

// ---------------------------------------------------------------- interning

struct AtomHash {
  size_t operator()(const Atom* a) const { return a->hash; }
};

bool same_terms(const Expr& a, const Expr& b);

struct AtomEq {
  bool operator()(const Atom* a, const Atom* b) const {
    return a->kind == b->kind && a->name == b->name && a->index == b->index && a->conj == b->conj &&
           a->J == b->J && a->conj_name == b->conj_name && a->args == b->args && a->deriv == b->deriv &&
           same_terms(a->arg, b->arg);
  }
};

std::mutex& intern_mutex() {
  static std::mutex m;
  return m;
}

std::unordered_set<Atom*, AtomHash, AtomEq>& intern_table() {
  static std::unordered_set<Atom*, AtomHash, AtomEq> t;
  return t;
}

std::unordered_map<std::string, AtomP>& param_table() {
  static std::unordered_map<std::string, AtomP> t;
  return t;
}

void add_free(std::vector<AtomP>& out, const Expr& e) {
  for (const auto& t : e.terms())
    for (const auto& [a, _] : t.m) out.insert(out.end(), a->free.begin(), a->free.end());
}

void finish_free(std::vector<AtomP>& f) {
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
}

AtomP intern(Atom&& a) {
  size_t h = std::hash<std::string>{}(a.name);
  h = mix(h, static_cast<size_t>(a.kind));
  h = mix(h, static_cast<size_t>(a.index));
  h = mix(h, static_cast<size_t>(a.conj));
  for (int k = 0; k < 3; ++k) h = mix(h, static_cast<size_t>(a.J.n[k]));
  for (auto p : a.args) h = mix(h, p->hash);
  for (auto d : a.deriv) h = mix(h, static_cast<size_t>(d));
  h = mix(h, hash_terms(a.arg.terms()));
  a.hash = h;

  std::lock_guard<std::mutex> lock(intern_mutex());
  auto& tab = intern_table();
  auto it = tab.find(&a);
  if (it != tab.end()) return *it;
  auto* fresh = new Atom(std::move(a));
  switch (fresh->kind) {
    case AtomKind::Param:
    case AtomKind::Coord:
    case AtomKind::Jet:
      fresh->free = {fresh};
      break;
    case AtomKind::Unknown:
      fresh->free = fresh->args;
      fresh->free.push_back(fresh);
      fresh->has_unknown = true;
      break;
    case AtomKind::Func:
    case AtomKind::Inverse:
      add_free(fresh->free, fresh->arg);
      for (auto p : fresh->free)
        if (p->kind == AtomKind::Unknown) fresh->has_unknown = true;
      break;
  }
  finish_free(fresh->free);
  tab.insert(fresh);
  return fresh;
}

}  // namespace

bool Atom::depends_on(AtomP s) const { return std::binary_search(free.begin(), free.end(), s); }

AtomP param(const std::string& name, ParamDomain d, const std::string& conj_name, double value) {
  {
    std::lock_guard<std::mutex> lock(intern_mutex());
    auto& pt = param_table();
    auto it = pt.find(name);
    if (it != pt.end()) {
      AtomP p = it->second;
      if (p->domain != d || p->conj_name != conj_name || (d == ParamDomain::Fixed && p->value != value))
        throw std::invalid_argument("parameter '" + name + "' redeclared with different attributes");
      return p;
    }
  }
  Atom a;
  a.kind = AtomKind::Param;
  a.name = name;
  a.domain = d;
  a.conj_name = conj_name;
  a.value = value;
  AtomP p = intern(std::move(a));
  std::lock_guard<std::mutex> lock(intern_mutex());
  param_table().emplace(name, p);
  return p;
}

AtomP find_param(const std::string& name) {
  std::lock_guard<std::mutex> lock(intern_mutex());
  auto& pt = param_table();
  auto it = pt.find(name);
  return it == pt.end() ? nullptr : it->second;
}

AtomP coord(int k) {
  static const char* names[3] = {"t", "x", "y"};
  if (k < 0 || k > 2) throw std::invalid_argument("coordinate index out of range");
  Atom a;
  a.kind = AtomKind::Coord;
  a.name = names[k];
  a.index = k;
  return intern(std::move(a));
}

AtomP coord(const std::string& name) {
  if (name == "t") return coord(0);
  if (name == "x") return coord(1);
  if (name == "y") return coord(2);
  throw std::invalid_argument("unknown coordinate '" + name + "'");
}

AtomP jet(int alpha, bool conj, const MultiIndex& J) {
  Atom a;
  a.kind = AtomKind::Jet;
  a.index = alpha;
  a.conj = conj;
  a.J = J;
  return intern(std::move(a));
}

AtomP unknown(const std::string& name, const std::vector<AtomP>& args, const std::vector<int>& deriv,
              const std::string& conj_name) {
  if (args.size() != deriv.size()) throw std::invalid_argument("unknown function: args/deriv size mismatch");
  Atom a;
  a.kind = AtomKind::Unknown;
  a.name = name;
  a.args = args;
  a.deriv = deriv;
  a.conj_name = conj_name;
  return intern(std::move(a));
}

namespace {

AtomP func_atom(const std::string& name, const Expr& arg) {
  Atom a;
  a.kind = AtomKind::Func;
  a.name = name;
  a.arg = arg;
  return intern(std::move(a));
}

AtomP inverse_atom(const Expr& base) {
  Atom a;
  a.kind = AtomKind::Inverse;
  a.arg = base;
  return intern(std::move(a));
}

bool same_terms(const Expr& a, const Expr& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i].m != y[i].m || x[i].c != y[i].c) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------- ordering

int compare(AtomP a, AtomP b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case AtomKind::Param:
      return a->name < b->name ? -1 : (a->name > b->name ? 1 : 0);
    case AtomKind::Coord:
      return a->index < b->index ? -1 : 1;
    case AtomKind::Jet:
      if (a->index != b->index) return a->index < b->index ? -1 : 1;
      if (a->conj != b->conj) return a->conj ? 1 : -1;
      if (a->J.order() != b->J.order()) return a->J.order() < b->J.order() ? -1 : 1;
      return a->J < b->J ? 1 : -1;
    case AtomKind::Unknown: {
      if (a->name != b->name) return a->name < b->name ? -1 : 1;
      size_t n = std::min(a->args.size(), b->args.size());
      for (size_t i = 0; i < n; ++i)
        if (int c = compare(a->args[i], b->args[i])) return c;
      if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
      int oa = 0, ob = 0;
      for (auto d : a->deriv) oa += d;
      for (auto d : b->deriv) ob += d;
      if (oa != ob) return oa < ob ? -1 : 1;
      return a->deriv < b->deriv ? 1 : -1;
    }
    case AtomKind::Func:
      if (a->name != b->name) return a->name < b->name ? -1 : 1;
      return compare(a->arg, b->arg);
    case AtomKind::Inverse:
      return compare(a->arg, b->arg);
  }
  return 0;
}

int compare(const Monomial& a, const Monomial& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i].first != b[i].first) return compare(a[i].first, b[i].first);
    if (a[i].second != b[i].second) return a[i].second < b[i].second ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

int compare(const Expr& a, const Expr& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  size_t n = std::min(x.size(), y.size());
  for (size_t i = 0; i < n; ++i) {
    if (int c = compare(x[i].m, y[i].m)) return c;
    if (int c = x[i].c.compare(y[i].c)) return c;
  }
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return 0;
}

// ---------------------------------------------------------------- canonical form

namespace {

const std::shared_ptr<const std::vector<Term>>& empty_terms() {
  static const auto e = std::make_shared<const std::vector<Term>>();
  return e;
}

bool is_func(AtomP a, const char* n) { return a->kind == AtomKind::Func && a->name == n; }

// Monomials carrying exp powers, repeated exp factors, sqrt powers beyond +-1 or negative powers
// of an inverse need a rewrite.
bool needs_rewrite(const Monomial& m) {
  int exps = 0;
  for (const auto& [a, e] : m) {
    if (a->kind == AtomKind::Func) {
      if (a->name == "exp") {
        ++exps;
        if (e != 1) return true;
      } else if (a->name == "sqrt" && (e >= 2 || e <= -2)) {
        return true;
      }
    } else if (a->kind == AtomKind::Inverse && e < 0) {
      return true;
    }
  }
  return exps > 1;
}

void sort_monomial(Monomial& m) {
  std::sort(m.begin(), m.end(), [](const Factor& a, const Factor& b) { return compare(a.first, b.first) < 0; });
  size_t w = 0;
  for (size_t r = 0; r < m.size(); ++r) {
    if (w > 0 && m[w - 1].first == m[r].first) {
      m[w - 1].second += m[r].second;
    } else {
      m[w++] = m[r];
    }
  }
  m.resize(w);
  m.erase(std::remove_if(m.begin(), m.end(), [](const Factor& f) { return f.second == 0; }), m.end());
}

Monomial merge_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      int e = a[i].second + b[j].second;
      if (e != 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    } else if (compare(a[i].first, b[j].first) < 0) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return out;
}

Expr rewrite_term(const Term& t);

// Sorts terms, merges like monomials, drops zeros. Monomials must be sorted already.
Expr collect_sorted(std::vector<Term>&& ts);

}  // namespace

Expr::Expr() : d_(empty_terms()) {}

Expr::Expr(long n) : Expr(Coeff(n)) {}

Expr::Expr(const Coeff& c) : d_(empty_terms()) {
  if (!c.is_zero()) d_ = std::make_shared<const std::vector<Term>>(std::vector<Term>{Term{c, {}}});
}

Expr Expr::atom(AtomP a, int e) {
  if (e == 0) return Expr(1);
  return from_terms({Term{Coeff(1), Monomial{{a, e}}}});
}

Expr sym(AtomP a) { return Expr::atom(a); }

size_t Expr::size() const { return d_->size(); }

std::optional<Coeff> Expr::constant() const {
  if (d_->empty()) return Coeff(0);
  if (d_->size() == 1 && (*d_)[0].m.empty()) return (*d_)[0].c;
  return std::nullopt;
}

std::optional<AtomP> Expr::as_symbol() const {
  if (d_->size() == 1 && (*d_)[0].c.is_one() && (*d_)[0].m.size() == 1 && (*d_)[0].m[0].second == 1)
    return (*d_)[0].m[0].first;
  return std::nullopt;
}

size_t Expr::hash() const { return hash_terms(*d_); }

bool operator==(const Expr& a, const Expr& b) { return a.d_ == b.d_ || same_terms(a, b); }

namespace {

Expr collect_sorted(std::vector<Term>&& ts) {
  std::sort(ts.begin(), ts.end(), [](const Term& a, const Term& b) { return compare(a.m, b.m) < 0; });
  std::vector<Term> out;
  out.reserve(ts.size());
  for (auto& t : ts) {
    if (!out.empty() && out.back().m == t.m) {
      out.back().c += t.c;
    } else {
      if (!out.empty() && out.back().c.is_zero()) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().c.is_zero()) out.pop_back();
  return Expr::from_terms(std::move(out));
}

}  // namespace

Expr Expr::from_terms(std::vector<Term> terms) {
  // Fast path used internally: already sorted, merged and rewrite-free.
  bool canonical = true;
  for (size_t i = 0; i < terms.size() && canonical; ++i) {
    const auto& m = terms[i].m;
    if (terms[i].c.is_zero()) canonical = false;
    for (size_t k = 0; k < m.size() && canonical; ++k) {
      if (m[k].second == 0) canonical = false;
      if (k > 0 && compare(m[k - 1].first, m[k].first) >= 0) canonical = false;
    }
    if (canonical && needs_rewrite(m)) canonical = false;
    if (canonical && i > 0 && compare(terms[i - 1].m, m) >= 0) canonical = false;
  }
  if (canonical) {
    if (terms.empty()) return Expr();
    return Expr(std::make_shared<const std::vector<Term>>(std::move(terms)));
  }

  std::vector<Term> plain;
  plain.reserve(terms.size());
  Expr extra;
  for (auto& t : terms) {
    if (t.c.is_zero()) continue;
    sort_monomial(t.m);
    if (needs_rewrite(t.m))
      extra = extra + rewrite_term(t);
    else
      plain.push_back(std::move(t));
  }
  Expr base = collect_sorted(std::move(plain));
  return extra.is_zero() ? base : base + extra;
}

namespace {

Expr rewrite_term(const Term& t) {
  Monomial rest;
  Expr exp_arg;
  bool has_exp = false;
  Expr out(t.c);
  for (const auto& [a, e] : t.m) {
    if (is_func(a, "exp")) {
      exp_arg = exp_arg + Expr(e) * a->arg;
      has_exp = true;
    } else if (is_func(a, "sqrt") && (e >= 2 || e <= -2)) {
      out = out * pow(a->arg, e / 2);
      if (e % 2 != 0) rest.emplace_back(a, e % 2);
    } else if (a->kind == AtomKind::Inverse && e < 0) {
      out = out * pow(a->arg, -e);
    } else {
      rest.emplace_back(a, e);
    }
  }
  out = out * Expr::from_terms({Term{Coeff(1), rest}});
  if (has_exp) out = out * exp(exp_arg);
  return out;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::vector<Term> out;
  out.reserve(x.size() + y.size());
  size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    int c = compare(x[i].m, y[j].m);
    if (c == 0) {
      Coeff s = x[i].c + y[j].c;
      if (!s.is_zero()) out.push_back(Term{std::move(s), x[i].m});
      ++i;
      ++j;
    } else if (c < 0) {
      out.push_back(x[i++]);
    } else {
      out.push_back(y[j++]);
    }
  }
  while (i < x.size()) out.push_back(x[i++]);
  while (j < y.size()) out.push_back(y[j++]);
  if (out.empty()) return Expr();
  return Expr(std::make_shared<const std::vector<Term>>(std::move(out)));
}

Expr Expr::operator-() const {
  std::vector<Term> out = *d_;
  for (auto& t : out) t.c = -t.c;
  if (out.empty()) return Expr();
  return Expr(std::make_shared<const std::vector<Term>>(std::move(out)));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (auto c = a.constant()) {
    if (c->is_one()) return b;
    std::vector<Term> out = b.terms();
    for (auto& t : out) t.c = *c * t.c;
    return Expr(std::make_shared<const std::vector<Term>>(std::move(out)));
  }
  if (auto c = b.constant()) return b * a;
  std::vector<Term> out;
  out.reserve(a.size() * b.size());
  bool rewrite = false;
  for (const auto& x : a.terms())
    for (const auto& y : b.terms()) {
      Term t{x.c * y.c, merge_monomials(x.m, y.m)};
      if (!rewrite && needs_rewrite(t.m)) rewrite = true;
      out.push_back(std::move(t));
    }
  if (rewrite) return Expr::from_terms(std::move(out));
  return collect_sorted(std::move(out));
}

Expr operator/(const Expr& a, const Expr& b) { return a * pow(b, -1); }

Expr pow(const Expr& e, int n) {
  if (n == 0) return Expr(1);
  if (n == 1) return e;
  if (n > 0) {
    Expr result(1), base = e;
    int k = n;
    while (k > 0) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return result;
  }
  if (e.is_zero()) throw std::domain_error("negative power of zero");
  if (e.size() == 1) {
    const Term& t = e.terms()[0];
    Coeff c(1);
    for (int k = 0; k < -n; ++k) c = c / t.c;
    Monomial m = t.m;
    for (auto& f : m) f.second *= n;
    return Expr::from_terms({Term{c, m}});
  }
  Coeff lead = e.terms()[0].c;
  Expr monic = e * Expr(Coeff(1) / lead);
  Coeff scale(1);
  for (int k = 0; k < -n; ++k) scale = scale / lead;
  return Expr(scale) * Expr::atom(inverse_atom(monic), -n);
}

// ---------------------------------------------------------------- elementary functions

namespace {

bool perfect_square(const mpz_class& z, mpz_class& root) {
  if (sgn(z) < 0) return false;
  root = sqrt(z);
  return root * root == z;
}

}  // namespace

Expr func(const std::string& name, const Expr& arg) {
  if (auto c = arg.constant()) {
    if (c->is_zero()) {
      if (name == "sin" || name == "tan" || name == "arctan" || name == "sqrt") return Expr();
      if (name == "cos" || name == "exp") return Expr(1);
    }
    if (name == "sqrt" && c->is_real() && sgn(c->re) > 0) {
      mpz_class rn, rd;
      if (perfect_square(c->re.get_num(), rn) && perfect_square(c->re.get_den(), rd)) {
        mpq_class q(rn, rd);
        q.canonicalize();
        return Expr(Coeff(q));
      }
    }
  }
  static const char* known[] = {"sin", "cos", "exp", "sqrt", "tan", "arctan"};
  if (std::find(std::begin(known), std::end(known), name) == std::end(known))
    throw std::invalid_argument("unknown elementary function '" + name + "'");
  return Expr::atom(func_atom(name, arg));
}

Expr sin(const Expr& a) { return func("sin", a); }
Expr cos(const Expr& a) { return func("cos", a); }
Expr exp(const Expr& a) { return func("exp", a); }
Expr sqrt(const Expr& a) { return func("sqrt", a); }
Expr tan(const Expr& a) { return func("tan", a); }
Expr arctan(const Expr& a) { return func("arctan", a); }

// ---------------------------------------------------------------- differentiation

namespace {

struct Differ {
  AtomP v;
  std::unordered_map<AtomP, Expr> memo;

  Expr atom(AtomP a) {
    if (a == v) return Expr(1);
    if (!a->depends_on(v)) return Expr();
    auto it = memo.find(a);
    if (it != memo.end()) return it->second;
    Expr r;
    switch (a->kind) {
      case AtomKind::Unknown: {
        std::vector<int> d = a->deriv;
        for (size_t i = 0; i < a->args.size(); ++i)
          if (a->args[i] == v) {
            d[i] += 1;
            r = sym(unknown(a->name, a->args, d, a->conj_name));
          }
        break;
      }
      case AtomKind::Func: {
        Expr d = run(a->arg);
        if (d.is_zero()) break;
        const Expr& u = a->arg;
        if (a->name == "sin")
          r = cos(u) * d;
        else if (a->name == "cos")
          r = -(sin(u) * d);
        else if (a->name == "exp")
          r = sym(a) * d;
        else if (a->name == "sqrt")
          r = Expr::ratio(1, 2) * Expr::atom(a, -1) * d;
        else if (a->name == "tan")
          r = (Expr(1) + Expr::atom(a, 2)) * d;
        else if (a->name == "arctan")
          r = d * pow(Expr(1) + u * u, -1);
        break;
      }
      case AtomKind::Inverse:
        r = -(Expr::atom(a, 2) * run(a->arg));
        break;
      default:
        break;
    }
    memo.emplace(a, r);
    return r;
  }

  Expr run(const Expr& e) {
    std::vector<Term> simple;
    Expr acc;
    for (const auto& t : e.terms()) {
      for (size_t k = 0; k < t.m.size(); ++k) {
        auto [a, n] = t.m[k];
        if (a != v && !a->depends_on(v)) continue;
        Expr da = atom(a);
        if (da.is_zero()) continue;
        Monomial rest = t.m;
        if (n == 1)
          rest.erase(rest.begin() + static_cast<long>(k));
        else
          rest[k].second = n - 1;
        Coeff c = t.c * Coeff(n);
        if (auto dc = da.constant()) {
          simple.push_back(Term{c * *dc, std::move(rest)});
        } else {
          acc = acc + Expr::from_terms({Term{c, std::move(rest)}}) * da;
        }
      }
    }
    return Expr::from_terms(std::move(simple)) + acc;
  }
};

}  // namespace

Expr differentiate(const Expr& e, AtomP v) {
  Differ d{v, {}};
  return d.run(e);
}

Expr differentiate(const Expr& e, AtomP v, int times) {
  Expr r = e;
  for (int k = 0; k < times && !r.is_zero(); ++k) r = differentiate(r, v);
  return r;
}

// ---------------------------------------------------------------- substitution

namespace {

template <class Map>
bool touches(AtomP a, const Map& keys) {
  for (auto s : a->free)
    if (keys.count(s)) return true;
  return false;
}

// Rebuilds an expression factor by factor through `atom_fn`, keeping untouched factors together.
template <class F, class Pred>
Expr rebuild(const Expr& e, F&& atom_fn, Pred&& changed) {
  std::vector<Term> keep;
  Expr acc;
  for (const auto& t : e.terms()) {
    Monomial rest;
    Expr prod;
    bool any = false;
    for (const auto& [a, n] : t.m) {
      if (!changed(a)) {
        rest.emplace_back(a, n);
        continue;
      }
      Expr r = pow(atom_fn(a), n);
      prod = any ? prod * r : r;
      any = true;
    }
    if (!any) {
      keep.push_back(t);
    } else {
      acc = acc + Expr::from_terms({Term{t.c, std::move(rest)}}) * prod;
    }
  }
  return Expr::from_terms(std::move(keep)) + acc;
}

struct Subst {
  const Bindings& b;
  std::unordered_map<AtomP, Expr> memo;

  Expr atom(AtomP a) {
    auto bi = b.find(a);
    if (bi != b.end()) return bi->second;
    auto it = memo.find(a);
    if (it != memo.end()) return it->second;
    Expr r;
    switch (a->kind) {
      case AtomKind::Unknown: {
        std::vector<AtomP> args = a->args;
        for (auto& s : args) {
          auto f = b.find(s);
          if (f == b.end()) continue;
          auto ns = f->second.as_symbol();
          if (!ns) throw std::invalid_argument("substitute: argument '" + s->str() + "' of " + a->name + " is bound");
          s = *ns;
        }
        r = sym(unknown(a->name, args, a->deriv, a->conj_name));
        break;
      }
      case AtomKind::Func:
        r = func(a->name, run(a->arg));
        break;
      case AtomKind::Inverse:
        r = pow(run(a->arg), -1);
        break;
      default:
        r = sym(a);
    }
    memo.emplace(a, r);
    return r;
  }

  Expr run(const Expr& e) {
    return rebuild(e, [&](AtomP a) { return atom(a); }, [&](AtomP a) { return touches(a, b); });
  }
};

}  // namespace

Expr substitute(const Expr& e, const Bindings& b) {
  if (b.empty()) return e;
  Subst s{b, {}};
  return s.run(e);
}

namespace {

struct FuncSubst {
  const FunctionBindings& b;
  std::unordered_map<AtomP, Expr> memo;

  Expr atom(AtomP a) {
    auto it = memo.find(a);
    if (it != memo.end()) return it->second;
    Expr r;
    switch (a->kind) {
      case AtomKind::Unknown: {
        auto f = b.find(a->name);
        if (f == b.end()) {
          r = sym(a);
          break;
        }
        const FunctionDef& def = f->second;
        if (def.params.size() != a->args.size())
          throw std::invalid_argument("function '" + a->name + "' arity mismatch");
        Expr body = def.body;
        for (size_t i = 0; i < a->args.size(); ++i) body = differentiate(body, def.params[i], a->deriv[i]);
        Bindings rename;
        for (size_t i = 0; i < a->args.size(); ++i)
          if (def.params[i] != a->args[i]) rename.emplace(def.params[i], sym(a->args[i]));
        r = substitute(body, rename);
        break;
      }
      case AtomKind::Func:
        r = func(a->name, run(a->arg));
        break;
      case AtomKind::Inverse:
        r = pow(run(a->arg), -1);
        break;
      default:
        r = sym(a);
    }
    memo.emplace(a, r);
    return r;
  }

  Expr run(const Expr& e) {
    return rebuild(e, [&](AtomP a) { return atom(a); }, [](AtomP a) { return a->has_unknown; });
  }
};

}  // namespace

Expr substitute_functions(const Expr& e, const FunctionBindings& b) {
  if (b.empty()) return e;
  FuncSubst s{b, {}};
  return s.run(e);
}

// ---------------------------------------------------------------- conjugation

namespace {

AtomP conj_symbol(AtomP a) {
  switch (a->kind) {
    case AtomKind::Param:
      if (a->conj_name.empty()) return a;
      if (auto p = find_param(a->conj_name)) return p;
      throw std::invalid_argument("conjugate partner '" + a->conj_name + "' of '" + a->name + "' undeclared");
    case AtomKind::Jet:
      return jet(a->index, !a->conj, a->J);
    default:
      return a;
  }
}

struct Conj {
  std::unordered_map<AtomP, Expr> memo;

  Expr atom(AtomP a) {
    auto it = memo.find(a);
    if (it != memo.end()) return it->second;
    Expr r;
    switch (a->kind) {
      case AtomKind::Unknown: {
        std::vector<AtomP> args;
        for (auto s : a->args) args.push_back(conj_symbol(s));
        std::string nm = a->conj_name.empty() ? a->name : a->conj_name;
        r = sym(unknown(nm, args, a->deriv, a->conj_name.empty() ? "" : a->name));
        break;
      }
      case AtomKind::Func:
        r = func(a->name, run(a->arg));
        break;
      case AtomKind::Inverse:
        r = pow(run(a->arg), -1);
        break;
      default:
        r = sym(conj_symbol(a));
    }
    memo.emplace(a, r);
    return r;
  }

  Expr run(const Expr& e) {
    std::vector<Term> out;
    Expr acc;
    for (const auto& t : e.terms()) {
      Expr prod(t.c.conj());
      for (const auto& [a, n] : t.m) prod = prod * pow(atom(a), n);
      acc = acc + prod;
    }
    return acc;
  }
};

}  // namespace

Expr conj(const Expr& e) {
  Conj c;
  return c.run(e);
}

// ---------------------------------------------------------------- queries

std::vector<AtomP> free_atoms(const Expr& e) {
  std::vector<AtomP> f;
  add_free(f, e);
  finish_free(f);
  std::sort(f.begin(), f.end(), [](AtomP a, AtomP b) { return compare(a, b) < 0; });
  return f;
}

bool depends_on(const Expr& e, AtomP s) {
  for (const auto& t : e.terms())
    for (const auto& [a, _] : t.m)
      if (a == s || a->depends_on(s)) return true;
  return false;
}

bool has_unknown(const Expr& e) {
  for (const auto& t : e.terms())
    for (const auto& [a, _] : t.m)
      if (a->has_unknown) return true;
  return false;
}

std::vector<std::pair<Monomial, Expr>> collect(const Expr& e, const std::function<bool(AtomP)>& pick) {
  std::vector<std::pair<Monomial, std::vector<Term>>> groups;
  auto find = [&](const Monomial& m) -> std::vector<Term>& {
    auto it = std::lower_bound(groups.begin(), groups.end(), m,
                               [](const auto& g, const Monomial& k) { return compare(g.first, k) < 0; });
    if (it == groups.end() || it->first != m) it = groups.insert(it, {m, {}});
    return it->second;
  };
  for (const auto& t : e.terms()) {
    Monomial key, rest;
    for (const auto& f : t.m) (pick(f.first) ? key : rest).push_back(f);
    find(key).push_back(Term{t.c, std::move(rest)});
  }
  std::vector<std::pair<Monomial, Expr>> out;
  out.reserve(groups.size());
  for (auto& [k, ts] : groups) out.emplace_back(k, Expr::from_terms(std::move(ts)));
  return out;
}

Expr monomial_expr(const Monomial& m) { return Expr::from_terms({Term{Coeff(1), m}}); }

Expr make_monic(const Expr& e) {
  if (e.is_zero()) return e;
  Coeff lead = e.terms()[0].c;
  if (lead.is_one()) return e;
  return e * Expr(Coeff(1) / lead);
}

// ---------------------------------------------------------------- printing

std::string Atom::str() const {
  switch (kind) {
    case AtomKind::Param:
    case AtomKind::Coord:
      return name;
    case AtomKind::Jet: {
      std::string s = (conj ? "cu" : "u") + std::to_string(index);
      if (!J.is_zero()) s += "_" + J.letters();
      return s;
    }
    case AtomKind::Unknown: {
      std::string s = name + "(";
      for (size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i]->str();
      s += ")";
      bool any = false;
      std::string d;
      for (size_t i = 0; i < args.size(); ++i)
        for (int k = 0; k < deriv[i]; ++k) {
          d += "," + args[i]->str();
          any = true;
        }
      return any ? "diff(" + s + d + ")" : s;
    }
    case AtomKind::Func:
      return name + "(" + arg.str() + ")";
    case AtomKind::Inverse:
      return "(" + arg.str() + ")";
  }
  return "?";
}

std::string monomial_str(const Monomial& m) {
  std::string s;
  for (size_t k = 0; k < m.size(); ++k) {
    auto [a, e] = m[k];
    if (k) s += "*";
    s += a->str();
    if (a->kind == AtomKind::Inverse) e = -e;
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s;
}

std::string Expr::str() const {
  if (d_->empty()) return "0";
  std::string out;
  for (size_t k = 0; k < d_->size(); ++k) {
    const Term& t = (*d_)[k];
    std::string s;
    if (t.m.empty()) {
      s = t.c.str();
    } else if (t.c.is_one()) {
      s = monomial_str(t.m);
    } else if (t.c == Coeff(-1)) {
      s = "-" + monomial_str(t.m);
    } else {
      s = t.c.str() + "*" + monomial_str(t.m);
    }
    if (k == 0) {
      out = s;
    } else if (s[0] == '-') {
      out += " - " + s.substr(1);
    } else {
      out += " + " + s;
    }
  }
  return out;
}

}  // namespace pk
