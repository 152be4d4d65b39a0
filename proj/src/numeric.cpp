#include "pk/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pk {

cplx Evaluator::atom(AtomP a) {
  switch (a->kind) {
    case AtomKind::Param:
      if (a->domain == ParamDomain::Fixed) return a->value;
      [[fallthrough]];
    case AtomKind::Coord:
    case AtomKind::Jet: {
      auto it = p_.find(a);
      if (it == p_.end()) throw EvalError("unbound symbol '" + a->str() + "'");
      return it->second;
    }
    case AtomKind::Unknown:
      throw EvalError("cannot evaluate unknown function '" + a->str() + "'");
    default:
      break;
  }
  auto it = cache_.find(a);
  if (it != cache_.end()) return it->second;
  cplx v;
  cplx u = eval(a->arg);
  if (a->kind == AtomKind::Inverse) {
    if (std::abs(u) < 1e-10) throw SingularPoint("inverse of ~0");
    v = 1.0 / u;
  } else if (a->name == "sin") {
    v = std::sin(u);
  } else if (a->name == "cos") {
    v = std::cos(u);
  } else if (a->name == "exp") {
    v = std::exp(u);
  } else if (a->name == "sqrt") {
    v = std::sqrt(u);
  } else if (a->name == "tan") {
    if (std::abs(std::cos(u)) < 1e-3) throw SingularPoint("tan near pole");
    v = std::tan(u);
  } else if (a->name == "arctan") {
    if (std::abs(1.0 + u * u) < 1e-10) throw SingularPoint("arctan branch point");
    v = std::atan(u);
  } else {
    throw EvalError("unknown function '" + a->name + "'");
  }
  cache_.emplace(a, v);
  return v;
}

cplx Evaluator::eval(const Expr& e) {
  cplx sum = 0;
  for (const auto& t : e.terms()) {
    cplx v = t.c.to_complex();
    for (const auto& [a, n] : t.m) {
      cplx b = atom(a);
      if (n < 0 && std::abs(b) < 1e-10) throw SingularPoint("negative power of ~0 at " + a->str());
      v *= (n == 1) ? b : std::pow(b, n);
    }
    maxmag_ = std::max(maxmag_, std::abs(v));
    sum += v;
  }
  return sum;
}

cplx eval_numeric(const Expr& e, const Point& p) {
  Evaluator ev(p);
  return ev.eval(e);
}

namespace {

void gather(const Expr& e, std::vector<AtomP>& out) {
  for (const auto& t : e.terms())
    for (const auto& [a, _] : t.m)
      for (auto s : a->free)
        if (s->kind != AtomKind::Unknown && !(s->kind == AtomKind::Param && s->domain == ParamDomain::Fixed))
          out.push_back(s);
}

}  // namespace

std::vector<AtomP> sample_symbols(const std::vector<Expr>& es) {
  std::vector<AtomP> out;
  for (const auto& e : es) gather(e, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::sort(out.begin(), out.end(), [](AtomP a, AtomP b) { return compare(a, b) < 0; });
  return out;
}

Point Sampler::draw(const std::vector<AtomP>& symbols) {
  Point p;
  for (auto s : symbols) {
    if (p.count(s)) continue;
    switch (s->kind) {
      case AtomKind::Param:
        if (s->domain == ParamDomain::Complex) {
          cplx z(uniform(0.5, 2.0), uniform(0.5, 2.0));
          p[s] = z;
          if (auto partner = find_param(s->conj_name)) p[partner] = std::conj(z);
        } else {
          p[s] = uniform(0.5, 2.0);
        }
        break;
      case AtomKind::Coord:
        p[s] = uniform(-2.0, 2.0);
        break;
      case AtomKind::Jet: {
        double r = 2.0 * std::sqrt(uniform(0.0, 1.0));
        double th = uniform(0.0, 2.0 * std::numbers::pi);
        p[s] = std::polar(r, th);
        break;
      }
      default:
        break;
    }
  }
  return p;
}

std::string Witness::str() const {
  std::ostringstream os;
  os.precision(6);
  os << "value " << value << " at {";
  for (size_t k = 0; k < point.size(); ++k) os << (k ? ", " : "") << point[k].first << "=" << point[k].second;
  os << "}";
  return os.str();
}

ZeroResult is_zero(const Expr& e, uint64_t seed, int trials) { return is_zero(e, seed, trials, {}); }

ZeroResult is_zero(const Expr& e, uint64_t seed, int trials, const Point& fixed) {
  ZeroResult res;
  if (e.is_zero()) return res;
  if (has_unknown(e)) throw EvalError("is_zero: expression still contains unknown functions");
  if (auto c = e.constant()) {
    res.zero = false;
    res.witness = Witness{{}, c->to_complex()};
    return res;
  }
  auto syms = sample_symbols({e});
  Sampler s(seed);
  for (int trial = 0; trial < std::max(trials, 1); ++trial) {
    for (int attempt = 0;; ++attempt) {
      Point p = s.draw(syms);
      for (const auto& [k, v] : fixed) p[k] = v;
      try {
        Evaluator ev(p);
        cplx v = ev.eval(e);
        if (std::abs(v) > 1e-9 * (1.0 + ev.max_magnitude())) {
          res.zero = false;
          Witness w;
          w.value = v;
          for (auto a : syms) w.point.emplace_back(a->str(), p[a]);
          res.witness = w;
          return res;
        }
        break;
      } catch (const SingularPoint&) {
        if (attempt >= 100) throw EvalError("is_zero: resample cap reached near a singularity");
      }
    }
  }
  return res;
}

}  // namespace pk
