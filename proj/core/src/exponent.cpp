#include "varlex/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "varlex/matrix.hpp"
#include "varlex/rng.hpp"

namespace varlex {

namespace {

void require_bounds(double pMinus, double pPlus, const std::string& what) {
  if (!(pMinus >= 1.0) || !(pPlus >= pMinus) || !std::isfinite(pPlus))
    throw std::invalid_argument(what + ": exponent bounds must satisfy 1 <= p- <= p+ < inf");
}

// geometric min/max of |x| over an axis-aligned box
double min_abs_over_box(const DomainBox& b) {
  double s = 0.0;
  for (int d = 0; d < b.dim; ++d) {
    double c = 0.0;
    if (b.lo[d] > 0.0) c = b.lo[d];
    else if (b.hi[d] < 0.0) c = -b.hi[d];
    s += c * c;
  }
  return std::sqrt(s);
}

double max_abs_over_box(const DomainBox& b) {
  double s = 0.0;
  for (int d = 0; d < b.dim; ++d) {
    double c = std::max(std::abs(b.lo[d]), std::abs(b.hi[d]));
    s += c * c;
  }
  return std::sqrt(s);
}

}  // namespace

ExponentField constant_exponent(double c) {
  require_bounds(c, c, "constant_exponent");
  ExponentField p;
  p.eval = [c](const Vec&) { return c; };
  p.pMinus = p.pPlus = c;
  std::ostringstream os;
  os << "constant(" << c << ")";
  p.describe = os.str();
  return p;
}

ExponentField radial_exponent(double a, double b, const DomainBox& box) {
  int dim = box.dim;
  auto f = [a, b, dim](const Vec& x) { return a + b / (1.0 + norm(x, dim)); };
  double rlo = min_abs_over_box(box);
  double rhi = max_abs_over_box(box);
  double v1 = a + b / (1.0 + rlo);
  double v2 = a + b / (1.0 + rhi);
  ExponentField p;
  p.eval = f;
  p.pMinus = std::min(v1, v2);
  p.pPlus = std::max(v1, v2);
  require_bounds(p.pMinus, p.pPlus, "radial_exponent");
  std::ostringstream os;
  os << "radial(" << a << "," << b << ")";
  p.describe = os.str();
  return p;
}

ExponentField piecewise_exponent(std::vector<double> breaks, std::vector<double> values) {
  if (values.size() != breaks.size() + 1)
    throw std::invalid_argument("piecewise_exponent: need one more value than breaks");
  if (!std::is_sorted(breaks.begin(), breaks.end()))
    throw std::invalid_argument("piecewise_exponent: breaks must be ascending");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  require_bounds(lo, hi, "piecewise_exponent");
  ExponentField p;
  p.eval = [breaks, values](const Vec& x) {
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(breaks.begin(), breaks.end(), x[0]) - breaks.begin());
    return values[i];
  };
  p.pMinus = lo;
  p.pPlus = hi;
  p.describe = "piecewise(" + std::to_string(breaks.size() + 1) + " pieces)";
  return p;
}

ExponentField pwlinear_exponent(std::vector<double> nodes, std::vector<double> values) {
  if (nodes.size() != values.size() || nodes.size() < 2)
    throw std::invalid_argument("pwlinear_exponent: need matching node/value lists, length >= 2");
  if (!std::is_sorted(nodes.begin(), nodes.end()))
    throw std::invalid_argument("pwlinear_exponent: nodes must be ascending");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  require_bounds(lo, hi, "pwlinear_exponent");
  ExponentField p;
  p.eval = [nodes, values](const Vec& x) {
    double t = x[0];
    if (t <= nodes.front()) return values.front();
    if (t >= nodes.back()) return values.back();
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(nodes.begin(), nodes.end(), t) - nodes.begin());
    double w = (t - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
    return (1.0 - w) * values[i - 1] + w * values[i];
  };
  p.pMinus = lo;
  p.pPlus = hi;
  p.describe = "pwlinear(" + std::to_string(nodes.size()) + " nodes)";
  return p;
}

ExponentField table_exponent(GridFunction table) {
  double lo = *std::min_element(table.values.begin(), table.values.end());
  double hi = *std::max_element(table.values.begin(), table.values.end());
  require_bounds(lo, hi, "table_exponent");
  const DomainBox box = table.domain;
  auto shared = std::make_shared<GridFunction>(std::move(table));
  ExponentField p;
  p.eval = [shared, box](const Vec& x) {
    Vec q = x;
    for (int d = 0; d < box.dim; ++d) q[d] = std::clamp(q[d], box.lo[d], box.hi[d]);
    return interp(*shared, q);
  };
  p.pMinus = lo;
  p.pPlus = hi;
  p.describe = "table";
  return p;
}

ExponentField custom_exponent(std::function<double(const Vec&)> fn, double pMinus, double pPlus,
                              std::string describe) {
  require_bounds(pMinus, pPlus, "custom_exponent");
  ExponentField p;
  p.eval = std::move(fn);
  p.pMinus = pMinus;
  p.pPlus = pPlus;
  p.describe = std::move(describe);
  return p;
}

ExponentField conjugate(const ExponentField& p) {
  if (!(p.pMinus > 1.0))
    throw std::invalid_argument("conjugate unbounded: p- = 1");
  auto f = p.eval;
  ExponentField c;
  c.eval = [f](const Vec& x) {
    double v = f(x);
    return v / (v - 1.0);
  };
  c.pMinus = p.pPlus / (p.pPlus - 1.0);
  c.pPlus = p.pMinus / (p.pMinus - 1.0);
  c.describe = "conjugate(" + p.describe + ")";
  return c;
}

DerivedExponents sobolev_exponent(const ExponentField& p, double alpha, int dim) {
  if (!(alpha >= 0.0) || !(alpha < static_cast<double>(dim)))
    throw std::invalid_argument("sobolev_exponent: alpha must lie in [0, dim)");
  double n = static_cast<double>(dim);
  if (alpha > 0.0 && !(p.pPlus < n / alpha))
    throw std::invalid_argument("Sobolev exponent undefined: p+ >= dim/alpha");

  auto pe = p.eval;
  auto qv = [n, alpha](double pv) { return n * pv / (n - alpha * pv); };

  DerivedExponents d;
  d.q.eval = [pe, n, alpha](const Vec& x) {
    double pv = pe(x);
    return n * pv / (n - alpha * pv);
  };
  d.q.pMinus = qv(p.pMinus);
  d.q.pPlus = qv(p.pPlus);
  d.q.describe = "sobolev(" + p.describe + ")";

  d.q0 = qv(p.pMinus);
  double q0 = d.q0;

  d.qTilde.eval = [pe, n, alpha, q0](const Vec& x) {
    double pv = pe(x);
    return (n * pv / (n - alpha * pv)) / q0;
  };
  d.qTilde.pMinus = 1.0;
  d.qTilde.pPlus = d.q.pPlus / q0;
  d.qTilde.describe = "qtilde(" + p.describe + ")";

  // Conjugate of qTilde. qTilde touches 1 exactly where p attains pMinus, so
  // the conjugate is capped: values at the cap act as the sup-norm endpoint.
  d.qTildeConj.eval = [pe, n, alpha, q0](const Vec& x) {
    double pv = pe(x);
    double qt = (n * pv / (n - alpha * pv)) / q0;
    if (qt <= 1.0 + 1.0 / kExponentCap) return kExponentCap;
    return std::min(kExponentCap, qt / (qt - 1.0));
  };
  double qtp = d.qTilde.pPlus;
  d.qTildeConj.pMinus = qtp > 1.0 + 1.0 / kExponentCap ? qtp / (qtp - 1.0) : kExponentCap;
  d.qTildeConj.pPlus = kExponentCap;
  d.qTildeConj.describe = "qtilde_conj(" + p.describe + ")";
  return d;
}

LogHolderReport check_log_holder(const ExponentField& p, const DomainBox& box,
                                 const LogHolderOptions& opts) {
  LogHolderReport rep;
  SplitMix64 rng(opts.seed);
  int dim = box.dim;

  auto random_point = [&]() {
    Vec x;
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform(box.lo[d], box.hi[d]);
    return x;
  };

  // local condition, pair separations at dyadic scales
  for (int s = 1; s <= opts.scales; ++s) {
    double d0 = std::ldexp(1.0, -s);  // 2^-s
    for (long k = 0; k < opts.pairsPerScale; ++k) {
      Vec x = random_point();
      Vec y = x;
      if (dim == 1) {
        y[0] += (rng.uniform() < 0.5 ? -d0 : d0);
      } else {
        double ang = rng.uniform(0.0, 6.283185307179586);
        y[0] += d0 * std::cos(ang);
        y[1] += d0 * std::sin(ang);
      }
      if (!box.contains(y)) continue;
      double dd = dist(x, y, dim);
      if (!(dd > 0.0) || dd >= 0.5) continue;
      double c = std::abs(p(x) - p(y)) * (-std::log(dd));
      if (c > rep.cLocal) {
        rep.cLocal = c;
        rep.worstLocalX = x;
        rep.worstLocalY = y;
      }
    }
  }

  // decay condition: pairs ordered so |y| >= |x|
  long pairs = opts.pairsPerScale * opts.scales;
  for (long k = 0; k < pairs; ++k) {
    Vec x = random_point();
    Vec y = random_point();
    if (norm(y, dim) < norm(x, dim)) std::swap(x, y);
    double c = std::abs(p(x) - p(y)) * std::log(std::exp(1.0) + norm(x, dim));
    if (c > rep.cInfinity) {
      rep.cInfinity = c;
      rep.worstInfX = x;
      rep.worstInfY = y;
    }
  }
  return rep;
}

InvarianceReport check_matrix_invariance(const ExponentField& p, const Matrix& A,
                                         const DomainBox& box, double tol) {
  if (A.dim != box.dim)
    throw std::invalid_argument("check_matrix_invariance: matrix/box dimension mismatch");
  InvarianceReport rep;
  long n = box.cellCount();
  for (long i = 0; i < n; ++i) {
    Vec x = box.midpoint(i);
    double dev = std::abs(p(apply(A, x)) - p(x));
    if (dev > rep.maxDeviation) {
      rep.maxDeviation = dev;
      rep.worst = x;
    }
  }
  rep.pass = rep.maxDeviation <= tol;
  return rep;
}

}  // namespace varlex
