#include "varlex/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace varlex {

namespace {

// modular with the exponent samples already materialized
ModularValue modular_sampled(const GridFunction& f, const std::vector<double>& pexp,
                             double lambda) {
  double vol = f.domain.cellVolume();
  double s = 0.0;
  std::size_t n = f.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    double r = std::abs(f.values[i]) / lambda;
    if (r == 0.0) continue;
    double term = std::pow(r, pexp[i]);
    s += term;
    if (std::isinf(s)) return {s, false};
    if (std::isnan(s)) return {std::numeric_limits<double>::infinity(), false};
  }
  double v = s * vol;
  if (std::isinf(v) || std::isnan(v)) return {std::numeric_limits<double>::infinity(), false};
  return {v, true};
}

std::vector<double> sample_exponent(const GridFunction& f, const ExponentField& p) {
  long n = f.domain.cellCount();
  std::vector<double> pe(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    double v = p(f.domain.midpoint(i));
    if (!(v >= 1.0) || !std::isfinite(v))
      throw std::invalid_argument("exponent sample below 1 or non-finite");
    pe[static_cast<std::size_t>(i)] = v;
  }
  return pe;
}

}  // namespace

ModularValue modular(const GridFunction& f, const ExponentField& p, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("modular: lambda must be positive");
  return modular_sampled(f, sample_exponent(f, p), lambda);
}

double luxemburg_norm(const GridFunction& f, const ExponentField& p,
                      const LuxemburgOptions& opts) {
  double maxAbs = 0.0;
  for (double v : f.values) maxAbs = std::max(maxAbs, std::abs(v));
  if (maxAbs == 0.0) return 0.0;

  std::vector<double> pe = sample_exponent(f, p);
  auto rho = [&](double lambda) { return modular_sampled(f, pe, lambda); };

  double vol = f.domain.volume();
  double lo = maxAbs * std::min(1.0, vol);
  double hi = maxAbs * std::max(1.0, vol);

  // expand until rho(lo) >= 1 >= rho(hi); rho is nonincreasing in lambda
  int guard = 0;
  while (true) {
    ModularValue m = rho(lo);
    if (!m.finite || m.value >= 1.0) break;
    hi = lo;
    lo *= 0.5;
    if (++guard > 4096 || lo < 1e-300)
      throw std::runtime_error("luxemburg_norm: bracket expansion failed (lower side)");
  }
  guard = 0;
  while (true) {
    ModularValue m = rho(hi);
    if (m.finite && m.value <= 1.0) break;
    lo = hi;
    hi *= 2.0;
    if (++guard > 4096 || hi > 1e300)
      throw std::runtime_error("luxemburg_norm: bracket expansion failed (upper side)");
  }

  for (int it = 0; it < opts.maxIter; ++it) {
    double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) mid = hi;  // bracket collapsed to adjacent doubles
    ModularValue m = rho(mid);
    if (m.finite && std::abs(m.value - 1.0) <= opts.tol) return mid;
    if (!m.finite || m.value > 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-16 * hi) {
      ModularValue mh = rho(hi);
      if (mh.finite && std::abs(mh.value - 1.0) <= opts.tol) return hi;
      break;
    }
  }
  ModularValue ml = rho(lo), mh = rho(hi);
  std::ostringstream os;
  os << "luxemburg_norm: no convergence after " << opts.maxIter
     << " bisections; bracket [" << lo << ", " << hi << "], modular ["
     << (ml.finite ? ml.value : std::numeric_limits<double>::infinity()) << ", " << mh.value
     << "]";
  throw std::runtime_error(os.str());
}

WeakQuasinormResult weak_quasinorm(const GridFunction& g, const ExponentField& q,
                                   const std::vector<double>& tGrid) {
  if (tGrid.empty()) throw std::invalid_argument("weak_quasinorm: empty level grid");
  WeakQuasinormResult res;
  long n = g.domain.cellCount();
  for (double t : tGrid) {
    if (!(t > 0.0)) throw std::invalid_argument("weak_quasinorm: levels must be positive");
    GridFunction lvl = make_grid(g.domain);
    bool any = false;
    for (long i = 0; i < n; ++i)
      if (g[i] > t) {
        lvl[i] = 1.0;
        any = true;
      }
    if (!any) continue;
    double s = t * luxemburg_norm(lvl, q);
    if (s > res.value) {
      res.value = s;
      res.worstT = t;
    }
  }
  return res;
}

std::vector<double> log_levels(double maxValue, int count, double span) {
  if (!(maxValue > 0.0)) throw std::invalid_argument("log_levels: max level must be positive");
  if (count < 2) throw std::invalid_argument("log_levels: need at least 2 levels");
  std::vector<double> t(static_cast<std::size_t>(count));
  double loLog = std::log(maxValue / span);
  double hiLog = std::log(maxValue);
  for (int i = 0; i < count; ++i) {
    double w = static_cast<double>(i) / static_cast<double>(count - 1);
    t[static_cast<std::size_t>(i)] = std::exp(loLog + w * (hiLog - loLog));
  }
  // the top level must sit strictly below the max so the level set is nonempty
  t.back() = maxValue * (1.0 - 1e-9);
  return t;
}

}  // namespace varlex
