#include "pk/numcheck.hpp"

#include "json.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pk {

using json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I1(0, 1);

double num(const ModelSpec& m, const Point& params, const std::string& name) {
  return eval_numeric(m.parse_expr(name), params).real();
}

// Distance of a from the lattice offset + k*period.
double lattice_distance(double a, double offset, double period) {
  double r = std::remainder(a - offset, period);
  return std::abs(r);
}

CMatrix diag2(cplx a, cplx b) {
  CMatrix M = CMatrix::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

// Time map of the lens-type flows: (1/w) arctan(s tan(phase)) on the branch continuous in phase.
double arctan_branch(double phase, double s) { return std::atan(s * std::tan(phase)) + kPi * std::round(phase / kPi); }

void oscillator(const ModelSpec& m, const Point& p, std::vector<FiniteTransformation>& out) {
  double w = num(m, p, "w"), M = num(m, p, "M");
  auto base = [&](const std::string& n) {
    FiniteTransformation T;
    T.name = n;
    T.generator = n;
    T.dim = 2;
    return T;
  };
  auto lens = [&](bool first, bool printed) {
    FiniteTransformation T = base(first ? "X1" : "X2");
    T.printed = printed;
    if (printed) T.name += "_printed";
    // X1 acts on w t, X2 on w t + pi/4 with the opposite sign of lambda.
    double shift = first ? 0 : kPi / 4, sgn = first ? 1 : -1;
    T.forward = [=](const Coords& c, double l) {
      double ph = w * c[0] + shift, tn = std::tan(ph);
      double tt = (arctan_branch(ph, std::exp(sgn * l)) - shift) / w;
      double xt = std::exp(sgn * l / 2) * c[1] * std::sqrt((1 + tn * tn) / (1 + std::exp(2 * sgn * l) * tn * tn));
      return Coords{tt, xt, c[2]};
    };
    T.inverse = [=](const Coords& c, double l) {
      double ph = w * c[0] + shift, tn = std::tan(ph);
      double t = (arctan_branch(ph, std::exp(-sgn * l)) - shift) / w;
      double x = std::exp(-sgn * l / 2) * c[1] * std::sqrt((1 + tn * tn) / (1 + std::exp(-2 * sgn * l) * tn * tn));
      return Coords{t, x, c[2]};
    };
    auto inv = T.inverse;
    // Printed: e^{+l/4} prefactor for X1 and a full spin phase e^{i w (t~ - t) s3}.
    double pre_sign = printed ? 1 : (first ? -1 : 1);
    double spin = printed ? 1 : 0.5;
    T.multiplier = [=](const Coords& c, double l) {
      double ph = w * c[0] + shift, tn = std::tan(ph);
      double ratio = (1 + tn * tn) / (1 + std::exp(-2 * sgn * l) * tn * tn);
      double amp = std::exp(pre_sign * l / 4) * std::pow(ratio, 0.25);
      cplx phase = std::exp(I1 * M * w * c[1] * c[1] / (2 * tn) * (1 - ratio));
      double dt = c[0] - inv(c, l)[0];
      return CMatrix(amp * phase * diag2(std::exp(I1 * spin * w * dt), std::exp(-I1 * spin * w * dt)));
    };
    T.regular = [=](const Coords& c) {
      double ph = w * c[0] + shift;
      return lattice_distance(ph, kPi / 2, kPi) > 0.02 && lattice_distance(ph, 0, kPi) > 0.01;
    };
    T.note = first ? "t~ = arctan(e^l tan wt)/w, branch continuous through wt = pi/2"
                   : "t~ = arctan(e^-l tan(pi/4 + wt))/w - pi/(4w), branch continuous through wt = pi/4";
    if (printed) T.note += "; multiplier as printed";
    return T;
  };
  out.push_back(lens(true, false));
  out.push_back(lens(false, false));

  FiniteTransformation T3 = base("X3");
  T3.forward = [](const Coords& c, double l) { return Coords{c[0] + l, c[1], c[2]}; };
  T3.inverse = [](const Coords& c, double l) { return Coords{c[0] - l, c[1], c[2]}; };
  T3.multiplier = [=](const Coords&, double l) { return diag2(std::exp(I1 * w * l / 2.0), std::exp(-I1 * w * l / 2.0)); };
  T3.note = "time translation";
  out.push_back(T3);

  auto boost = [&](const std::string& n, bool cosine) {
    FiniteTransformation T = base(n);
    auto f = [=](double t) { return cosine ? std::cos(w * t) : std::sin(w * t); };
    auto g = [=](double t) { return cosine ? -std::sin(w * t) : std::cos(w * t); };
    T.forward = [=](const Coords& c, double l) { return Coords{c[0], c[1] + l * f(c[0]), c[2]}; };
    T.inverse = [=](const Coords& c, double l) { return Coords{c[0], c[1] - l * f(c[0]), c[2]}; };
    T.multiplier = [=](const Coords& c, double l) {
      cplx ph = std::exp(I1 * M * w * (l * c[1] - l * l / 2 * f(c[0])) * g(c[0]));
      return CMatrix(ph * CMatrix::Identity(2, 2));
    };
    T.note = cosine ? "x~ = x + l cos wt" : "x~ = x + l sin wt";
    return T;
  };
  out.push_back(boost("X4", true));
  out.push_back(boost("X5", false));

  auto internal = [&](const std::string& n, std::function<CMatrix(double, double)> f) {
    FiniteTransformation T = base(n);
    T.forward = [](const Coords& c, double) { return c; };
    T.inverse = [](const Coords& c, double) { return c; };
    T.multiplier = [f](const Coords& c, double l) { return f(c[0], l); };
    T.note = "acts on the wave function only";
    out.push_back(T);
  };
  auto upper = [](cplx v) {
    CMatrix M = CMatrix::Identity(2, 2);
    M(0, 1) = v;
    return M;
  };
  auto lower = [](cplx v) {
    CMatrix M = CMatrix::Identity(2, 2);
    M(1, 0) = v;
    return M;
  };
  internal("X6", [](double, double l) { return CMatrix(std::exp(I1 * l) * CMatrix::Identity(2, 2)); });
  internal("X7", [=](double t, double l) { return upper(l * std::exp(I1 * w * t)); });
  internal("X8", [=](double t, double l) { return lower(l * std::exp(-I1 * w * t)); });
  internal("X9", [](double, double l) { return diag2(std::exp(-l), std::exp(l)); });
  internal("X10", [=](double t, double l) { return upper(-I1 * l * std::exp(I1 * w * t)); });
  internal("X11", [=](double t, double l) { return lower(-I1 * l * std::exp(-I1 * w * t)); });
  internal("X12", [](double, double l) { return diag2(std::exp(I1 * l), std::exp(-I1 * l)); });
  internal("X13", [](double, double l) { return CMatrix(std::exp(l) * CMatrix::Identity(2, 2)); });

  out.push_back(lens(true, true));
  out.push_back(lens(false, true));
}

// Space-time part shared by the Jaynes-Cummings families; n is 2 or 4.
void jc_family(const ModelSpec& m, const Point& p, int n, std::vector<FiniteTransformation>& out) {
  double eB = num(m, p, "e*B");
  bool gen = n == 4;
  double wab = gen ? num(m, p, "wab") : 0, phi = gen ? num(m, p, "phi") : 0;
  auto base = [&](const std::string& name) {
    FiniteTransformation T;
    T.name = name;
    T.generator = name;
    T.dim = n;
    T.forward = [](const Coords& c, double) { return c; };
    T.inverse = [](const Coords& c, double) { return c; };
    return T;
  };
  CMatrix Id = CMatrix::Identity(n, n);
  // Y = diag(1, 1, -1, -1) in the 4x4 case.
  CVector y = CVector::Ones(n);
  if (gen) y.tail(2) *= -1;

  FiniteTransformation T1 = base("X1");
  T1.forward = [](const Coords& c, double l) { return Coords{c[0] + l, c[1], c[2]}; };
  T1.inverse = [](const Coords& c, double l) { return Coords{c[0] - l, c[1], c[2]}; };
  T1.multiplier = [=](const Coords&, double l) {
    CVector d(n);
    for (int k = 0; k < n; ++k) d(k) = std::exp(I1 * wab * l / 2.0 * y(k));
    return CMatrix(d.asDiagonal());
  };
  T1.note = "time translation";
  out.push_back(T1);

  FiniteTransformation T2 = base("X2");
  T2.forward = [](const Coords& c, double l) {
    return Coords{c[0], c[1] * std::cos(l) - c[2] * std::sin(l), c[1] * std::sin(l) + c[2] * std::cos(l)};
  };
  T2.inverse = [](const Coords& c, double l) {
    return Coords{c[0], c[1] * std::cos(l) + c[2] * std::sin(l), -c[1] * std::sin(l) + c[2] * std::cos(l)};
  };
  T2.multiplier = [=](const Coords&, double l) {
    CVector d(n);
    for (int k = 0; k < n; ++k) d(k) = std::exp((k % 2 == 0 ? -0.5 : 0.5) * I1 * l);
    return CMatrix(d.asDiagonal());
  };
  T2.note = "rotation in the xy-plane";
  out.push_back(T2);

  FiniteTransformation T3 = base("X3");
  T3.forward = [](const Coords& c, double l) { return Coords{c[0], c[1] + l, c[2]}; };
  T3.inverse = [](const Coords& c, double l) { return Coords{c[0], c[1] - l, c[2]}; };
  T3.multiplier = [=](const Coords& c, double l) { return CMatrix(std::exp(I1 * eB / 2.0 * l * c[2]) * Id); };
  T3.note = "magnetic translation in x";
  out.push_back(T3);

  FiniteTransformation T4 = base("X4");
  T4.forward = [](const Coords& c, double l) { return Coords{c[0], c[1], c[2] + l}; };
  T4.inverse = [](const Coords& c, double l) { return Coords{c[0], c[1], c[2] - l}; };
  T4.multiplier = [=](const Coords& c, double l) { return CMatrix(std::exp(-I1 * eB / 2.0 * l * c[1]) * Id); };
  T4.note = "magnetic translation in y";
  out.push_back(T4);

  FiniteTransformation T5 = base("X5");
  T5.multiplier = [=](const Coords&, double l) { return CMatrix(std::exp(I1 * l) * Id); };
  T5.note = "phase";
  out.push_back(T5);
  FiniteTransformation T6 = base("X6");
  T6.multiplier = [=](const Coords&, double l) { return CMatrix(std::exp(l) * Id); };
  T6.note = "scale";
  out.push_back(T6);
  if (!gen) return;

  // Off-diagonal blocks diag(1, e^{i phi}) and its conjugate.
  CMatrix P = CMatrix::Zero(4, 4), Q = CMatrix::Zero(4, 4);
  P(0, 2) = 1;
  P(1, 3) = std::exp(I1 * phi);
  Q(2, 0) = 1;
  Q(3, 1) = std::exp(-I1 * phi);
  auto internal = [&](const std::string& name, std::function<CMatrix(double, double)> f) {
    FiniteTransformation T = base(name);
    T.multiplier = [f](const Coords& c, double l) { return f(c[0], l); };
    T.note = "acts on the wave function only";
    out.push_back(T);
  };
  internal("X7", [=](double t, double l) { return CMatrix(Id + l * std::exp(I1 * wab * t) * P); });
  internal("X8", [=](double t, double l) { return CMatrix(Id + l * std::exp(-I1 * wab * t) * Q); });
  internal("X9", [=](double, double l) {
    CVector d(4);
    d << std::exp(-l), std::exp(-l), std::exp(l), std::exp(l);
    return CMatrix(d.asDiagonal());
  });
  internal("X10", [=](double t, double l) { return CMatrix(Id - I1 * l * std::exp(I1 * wab * t) * P); });
  internal("X11", [=](double t, double l) { return CMatrix(Id - I1 * l * std::exp(-I1 * wab * t) * Q); });
  internal("X12", [=](double, double l) {
    CVector d(4);
    d << std::exp(-I1 * l), std::exp(-I1 * l), std::exp(I1 * l), std::exp(I1 * l);
    return CMatrix(d.asDiagonal());
  });
}

std::vector<Expr> model_exprs(const ModelSpec& m) {
  std::vector<Expr> all;
  auto add = [&](const MatrixDiffOp& a) {
    for (int r = 0; r < a.dim(); ++r)
      for (int c = 0; c < a.dim(); ++c)
        for (const auto& [J, f] : a.at(r, c)) all.push_back(f);
  };
  add(m.hamiltonian);
  for (const auto& [n, op] : m.ops) add(op.gen.op);
  for (const auto& s : m.solutions)
    for (const auto& e : s) all.push_back(e);
  return all;
}

double richardson(const std::function<CVector(double)>& f, int order, double h, CVector* out_vec) {
  auto stencil = [&](double s) -> CVector {
    if (order == 1) return (-f(2 * s) + 8.0 * f(s) - 8.0 * f(-s) + f(-2 * s)) / (12 * s);
    return (-f(2 * s) + 16.0 * f(s) - 30.0 * f(0) + 16.0 * f(-s) - f(-2 * s)) / (12 * s * s);
  };
  CVector a = stencil(h), b = stencil(h / 2);
  *out_vec = (16.0 * b - a) / 15.0;
  return 0;
}

// d^J F at p by nested central differences.
CVector derivative(const std::function<CVector(const Coords&)>& F, const Coords& p, const MultiIndex& J, double h) {
  if (J.is_zero()) return F(p);
  int k = 0;
  while (J[k] == 0) ++k;
  CVector out;
  if (J.order() == 2 && J[k] == 2) {
    richardson(
        [&](double s) {
          Coords q = p;
          q[k] += s;
          return F(q);
        },
        2, h, &out);
    return out;
  }
  MultiIndex rest = J - MultiIndex::unit(k);
  richardson(
      [&](double s) {
        Coords q = p;
        q[k] += s;
        return derivative(F, q, rest, h);
      },
      1, h, &out);
  return out;
}

Point with_coords(const Point& params, const Coords& c) {
  Point p = params;
  for (int k = 0; k < 3; ++k) p[coord(k)] = c[k];
  return p;
}

}  // namespace

std::string NumResult::str() const {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << value << " over " << points << " points";
  if (worst) os << " (worst at t=" << (*worst)[0] << ", x=" << (*worst)[1] << ", y=" << (*worst)[2] << ")";
  return os.str();
}

Point model_parameters(const ModelSpec& m, uint64_t seed) {
  std::vector<AtomP> ps;
  for (AtomP s : sample_symbols(model_exprs(m)))
    if (s->kind == AtomKind::Param) ps.push_back(s);
  Sampler smp(seed);
  return smp.draw(ps);
}

std::vector<FiniteTransformation> finite_transformations(const ModelSpec& m, const Point& params) {
  std::vector<FiniteTransformation> out;
  if (m.family == "susy_oscillator")
    oscillator(m, params, out);
  else if (m.family == "jc")
    jc_family(m, params, 2, out);
  else if (m.family == "jc_generalized")
    jc_family(m, params, 4, out);
  return out;
}

NumericSolution::NumericSolution(const ModelSpec& m, std::vector<Expr> sol, const Point& params)
    : sol_(std::move(sol)), params_(params), coords_(m.system.coords()) {}

CVector NumericSolution::operator()(const Coords& c) const {
  Point p = with_coords(params_, c);
  Evaluator ev(p);
  CVector v(sol_.size());
  for (size_t k = 0; k < sol_.size(); ++k) v(static_cast<Eigen::Index>(k)) = ev.eval(sol_[k]);
  return v;
}

NumResult generator_residual(const ModelSpec& m, const GradedGenerator& G, const std::vector<Expr>& sol,
                             uint64_t seed, int points) {
  MatrixDiffOp L = MatrixDiffOp::scalar(m.dim, Expr::imag_unit(), MultiIndex(1, 0, 0)) - m.hamiltonian;
  std::vector<Expr> r = pk::apply(L, pk::apply(G.op, sol));
  NumResult out;
  out.points = points;
  bool zero = std::all_of(r.begin(), r.end(), [](const Expr& e) { return e.is_zero(); });
  if (zero) return out;
  std::vector<AtomP> syms = sample_symbols(r);
  for (int k = 0; k < 3; ++k)
    if (std::find(syms.begin(), syms.end(), coord(k)) == syms.end()) syms.push_back(coord(k));
  Sampler smp(seed);
  for (int i = 0; i < points; ++i) {
    Point p = smp.draw(syms);
    Evaluator ev(p);
    for (const auto& e : r) {
      double v = std::abs(ev.eval(e));
      if (v > out.value || std::isnan(v)) {
        out.value = std::isnan(v) ? INFINITY : v;
        out.worst = Coords{p[coord(0)].real(), p[coord(1)].real(), p[coord(2)].real()};
      }
    }
  }
  return out;
}

NumResult finite_residual(const ModelSpec& m, const FiniteTransformation& T, double lambda,
                          const std::vector<Expr>& sol, const Point& params, const FiniteOptions& opt) {
  if (T.dim != m.dim || static_cast<int>(sol.size()) != m.dim)
    throw std::invalid_argument("transformation " + T.name + " does not match the model dimension");
  NumericSolution psi(m, sol, params);
  auto psit = [&](const Coords& c) -> CVector { return T.multiplier(c, lambda) * psi(T.inverse(c, lambda)); };

  // Numeric H: coefficient values at a point times derivatives of Psi~.
  struct HTerm {
    int r, c;
    MultiIndex J;
    Expr f;
  };
  std::vector<HTerm> hterms;
  for (int r = 0; r < m.dim; ++r)
    for (int c = 0; c < m.dim; ++c)
      for (const auto& [J, f] : m.hamiltonian.at(r, c)) hterms.push_back({r, c, J, f});

  bool spatial_y = m.system.coords().size() > 2;
  Sampler smp(opt.seed);
  NumResult out;
  double maxpsi = 0;
  int attempts = 0;
  while (out.points < opt.points) {
    if (++attempts > 100 * opt.points) throw std::runtime_error("no regular sample points for " + T.name);
    Coords c{smp.uniform(-opt.box, opt.box), smp.uniform(-opt.box, opt.box),
             spatial_y ? smp.uniform(-opt.box, opt.box) : 0.0};
    if (!T.regular(c) || !T.regular(T.inverse(c, lambda))) continue;
    std::map<MultiIndex, CVector> d;
    auto D = [&](const MultiIndex& J) -> const CVector& {
      auto it = d.find(J);
      if (it == d.end()) it = d.emplace(J, derivative(psit, c, J, opt.h)).first;
      return it->second;
    };
    CVector res = I1 * D(MultiIndex(1, 0, 0));
    Point p = with_coords(params, c);
    Evaluator ev(p);
    for (const auto& h : hterms) res(h.r) -= ev.eval(h.f) * D(h.J)(h.c);
    maxpsi = std::max(maxpsi, D(MultiIndex()).cwiseAbs().maxCoeff());
    double v = res.cwiseAbs().maxCoeff();
    if (v > out.value) {
      out.value = v;
      out.worst = c;
    }
    ++out.points;
  }
  if (maxpsi > 0) out.value /= maxpsi;
  return out;
}

NumResult group_law(const FiniteTransformation& T, double l1, double l2, uint64_t seed, int points) {
  Sampler smp(seed);
  NumResult out;
  int attempts = 0;
  while (out.points < points) {
    if (++attempts > 100 * points) throw std::runtime_error("no regular sample points for " + T.name);
    Coords p{smp.uniform(-2, 2), smp.uniform(-2, 2), smp.uniform(-2, 2)};
    Coords p2 = T.forward(p, l2), p12 = T.forward(p2, l1), q = T.forward(p, l1 + l2);
    if (!T.regular(p) || !T.regular(p2) || !T.regular(p12) || !T.regular(q)) continue;
    double dev = 0;
    for (int k = 0; k < 3; ++k) dev = std::max(dev, std::abs(p12[k] - q[k]));
    CMatrix composed = T.multiplier(p12, l1) * T.multiplier(p2, l2);
    dev = std::max(dev, (composed - T.multiplier(q, l1 + l2)).cwiseAbs().maxCoeff());
    if (dev > out.value) {
      out.value = dev;
      out.worst = p;
    }
    ++out.points;
  }
  return out;
}

JetVectorField vector_field(const ModelSpec& m, const GradedGenerator& G) {
  const MatrixDiffOp& a = G.op;
  int n = a.dim();
  if (n != m.dim) throw std::invalid_argument(G.name + " does not act on the model's dependents");
  const auto& coords = m.system.coords();
  std::vector<Expr> xi(coords.size());
  Bindings none;
  auto coeff_at = [&](int r, int c, const MultiIndex& J) {
    for (const auto& [K, f] : a.at(r, c))
      if (K == J) return f;
    return Expr();
  };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      for (const auto& [J, f] : a.at(r, c)) {
        if (J.order() > 1) throw std::invalid_argument(G.name + " is not a first-order operator");
        if (J.order() == 1 && r != c) throw std::invalid_argument(G.name + " mixes components in its derivative part");
      }
  for (size_t k = 0; k < coords.size(); ++k) {
    MultiIndex J = MultiIndex::unit(coords[k]->index);
    xi[k] = coeff_at(0, 0, J);
    for (int r = 1; r < n; ++r)
      if (!is_zero(coeff_at(r, r, J) - xi[k]).zero)
        throw std::invalid_argument(G.name + " has a matrix-valued derivative part");
  }
  std::map<DepKey, Expr> phi;
  for (int r = 0; r < n; ++r) {
    Expr f;
    for (int c = 0; c < n; ++c) f -= coeff_at(r, c, MultiIndex()) * sym(jet(c + 1, false));
    phi[{r + 1, false}] = f;
    if (m.system.with_conj()) phi[{r + 1, true}] = conj(f);
  }
  return JetVectorField(coords, xi, phi);
}

NumResult consistency_vector_field(const FiniteTransformation& T, const JetVectorField& v, const Point& params,
                                   uint64_t seed, int points) {
  const double h = 1e-4;
  Sampler smp(seed);
  NumResult out;
  int attempts = 0;
  while (out.points < points) {
    if (++attempts > 100 * points) throw std::runtime_error("no regular sample points for " + T.name);
    Coords c{smp.uniform(-2, 2), smp.uniform(-2, 2), smp.uniform(-2, 2)};
    if (!T.regular(c)) continue;
    Coords fp = T.forward(c, h), fm = T.forward(c, -h);
    CMatrix dM = (T.multiplier(fp, h) - T.multiplier(fm, -h)) / (2 * h);
    Point p = with_coords(params, c);
    CVector u(T.dim);
    for (int k = 0; k < T.dim; ++k) {
      u(k) = cplx(smp.uniform(-1, 1), smp.uniform(-1, 1));
      p[jet(k + 1, false)] = u(k);
      p[jet(k + 1, true)] = std::conj(u(k));
    }
    Evaluator ev(p);
    double dev = 0;
    for (size_t k = 0; k < v.coords().size(); ++k) {
      int idx = v.coords()[k]->index;
      double d = (fp[idx] - fm[idx]) / (2 * h);
      dev = std::max(dev, std::abs(ev.eval(v.xi()[k]) - d));
    }
    CVector phi = dM * u;
    for (int k = 0; k < T.dim; ++k) {
      auto it = v.phi().find({k + 1, false});
      cplx expect = it == v.phi().end() ? cplx(0) : ev.eval(it->second);
      dev = std::max(dev, std::abs(expect - phi(k)));
    }
    if (dev > out.value) {
      out.value = dev;
      out.worst = c;
    }
    ++out.points;
  }
  return out;
}

bool FiniteRow::pass(double tol_residual, double tol_group, double tol_consistency) const {
  for (double r : residual)
    if (!(r <= tol_residual)) return false;
  return group <= tol_group && consistency <= tol_consistency;
}

std::vector<FiniteRow> finite_suite(const ModelSpec& m, double lambda, uint64_t seed) {
  Point params = model_parameters(m, seed);
  std::vector<FiniteRow> rows;
  for (const auto& T : finite_transformations(m, params)) {
    FiniteRow r;
    r.model = m.name;
    r.transformation = T.name;
    r.generator = T.generator;
    r.printed = T.printed;
    r.lambda = lambda;
    FiniteOptions fo;
    fo.seed = seed;
    for (size_t s = 0; s < m.solutions.size(); ++s) {
      r.floor.push_back(finite_residual(m, T, 0, m.solutions[s], params, fo).value);
      r.residual.push_back(finite_residual(m, T, lambda, m.solutions[s], params, fo).value);
    }
    r.group = std::max(group_law(T, lambda / 3, lambda / 3, seed).value, group_law(T, lambda, 0, seed).value);
    r.consistency = consistency_vector_field(T, vector_field(m, m.op(T.generator)), params, seed).value;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string finite_json(const std::vector<FiniteRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j = {{"model", r.model},          {"transformation", r.transformation}, {"generator", r.generator},
              {"printed", r.printed},      {"lambda", r.lambda},                 {"floor", r.floor},
              {"residual", r.residual},    {"group_law", r.group},               {"consistency", r.consistency},
              {"pass", r.pass(1e-5, 1e-8, 1e-6)}};
    arr.push_back(std::move(j));
  }
  return json({{"finite", arr}}).dump(2);
}

}  // namespace pk
