#include "varlex/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "varlex/rng.hpp"

namespace varlex {

namespace {

constexpr int kHalvings = 60;

double surface_measure(int n) { return n == 1 ? 2.0 : 2.0 * M_PI; }

// max of p over a deterministic sampling of the closed ball B(c, r)
double ball_exponent_max(const ExponentField& p, const Vec& c, double r, int n) {
  double best = -1.0;
  if (n == 1) {
    const int steps = 512;
    for (int i = 0; i <= steps; ++i)
      best = std::max(best, p(Vec(c[0] + r * (2.0 * i / steps - 1.0))));
  } else {
    const int steps = 64;
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; j <= steps; ++j) {
        Vec x(c[0] + r * (2.0 * i / steps - 1.0), c[1] + r * (2.0 * j / steps - 1.0));
        if (dist(x, c, 2) <= r) best = std::max(best, p(x));
      }
  }
  return best;
}

double sobolev_point(double pv, double alpha, int n) {
  double den = n - alpha * pv;
  if (!(den > 0.0))
    throw std::runtime_error("Sobolev exponent undefined: dim - alpha*p <= 0 at a base point");
  return n * pv / den;
}

void require(bool ok, const char* what) {
  if (!ok) {
    std::ostringstream os;
    os << "derived spec failed re-verification: " << what;
    throw std::logic_error(os.str());
  }
}

}  // namespace

CounterexampleSpec derive_spec(const ExponentField& p, const Matrix& A, const Vec& y0,
                               double alpha, int n) {
  if (A.dim != n) throw std::invalid_argument("derive_spec: matrix dimension mismatch");
  if (alpha < 0.0 || alpha >= static_cast<double>(n))
    throw std::invalid_argument("derive_spec: order must lie in [0, dim)");

  CounterexampleSpec s;
  s.dim = n;
  s.A = A;
  s.y0 = y0;
  s.alpha = alpha;
  Vec ay0 = apply(A, y0);
  s.p0 = p(y0);
  s.p1 = p(ay0);
  if (!(s.p1 > s.p0 + 1e-12))
    throw std::invalid_argument("hypothesis not violated: p(Ay0) <= p(y0)");

  s.q0v = sobolev_point(s.p0, alpha, n);
  s.q1v = sobolev_point(s.p1, alpha, n);
  s.gamma = (s.q1v - s.q0v) / 2.0;
  double npp = static_cast<double>(n) / s.p0;
  s.beta = npp - 0.5 * (npp - (alpha + n / (s.q1v - s.gamma)));
  s.delta = 1.0 - s.beta * s.p0 / n;
  s.M = spectral_norm(A);

  // source ball: shrink until p stays below p0/(1-delta) on it
  double pCap = s.p0 / (1.0 - s.delta);
  double r = dist(ay0, y0, n) / 2.0;
  if (!(r > 0.0)) r = 1.0;
  bool ok = false;
  for (int i = 0; i < kHalvings; ++i) {
    if (ball_exponent_max(p, y0, r, n) < pCap * (1.0 - 1e-12)) {
      ok = true;
      break;
    }
    r /= 2.0;
  }
  if (!ok) throw std::runtime_error("derive_spec: no admissible source radius after 60 halvings");
  s.r = r;

  // image ball: shrink until q exceeds q1v - gamma on it and the closed-form
  // kernel minorant beats the triangle-inequality factor 2^{n-alpha}
  double qFloor = s.q1v - s.gamma;
  double c = surface_measure(n) / (n - s.beta) * std::pow(s.M, s.beta - n);
  double eps = s.M * s.r / 2.0;
  ok = false;
  for (int i = 0; i < kHalvings; ++i) {
    bool qOk = true;
    auto qAt = [&](const Vec& x) {
      double pv = p(x);
      double den = n - alpha * pv;
      return den > 0.0 ? n * pv / den : -1.0;
    };
    if (n == 1) {
      const int steps = 512;
      for (int j = 0; j <= steps && qOk; ++j) {
        double qv = qAt(Vec(ay0[0] + eps * (2.0 * j / steps - 1.0)));
        if (!(qv > qFloor)) qOk = false;
      }
    } else {
      const int steps = 64;
      for (int i2 = 0; i2 <= steps && qOk; ++i2)
        for (int j = 0; j <= steps && qOk; ++j) {
          Vec x(ay0[0] + eps * (2.0 * i2 / steps - 1.0), ay0[1] + eps * (2.0 * j / steps - 1.0));
          if (dist(x, ay0, 2) > eps) continue;
          double qv = qAt(x);
          if (!(qv > qFloor)) qOk = false;
        }
    }
    bool kernelOk = c * std::pow(eps, -(s.beta - alpha)) > std::pow(2.0, n - alpha);
    if (qOk && kernelOk) {
      ok = true;
      break;
    }
    eps /= 2.0;
  }
  if (!ok) throw std::runtime_error("derive_spec: no admissible image radius after 60 halvings");
  s.eps = eps;

  // re-verify every invariant rather than trusting the algebra
  require(s.gamma > 0.0, "gamma must be positive");
  require((s.beta - alpha) * (s.q1v - s.gamma) > static_cast<double>(n),
          "(beta-alpha)(q1v-gamma) must exceed dim");
  require(std::abs(s.beta - npp * (1.0 - s.delta)) <= 1e-12 * npp,
          "beta must equal (dim/p0)(1-delta)");
  require(s.delta > 0.0, "delta must be positive");
  require(s.eps < s.M * s.r, "eps must stay below M r");
  require(s.beta > alpha, "beta must exceed alpha");
  require(s.beta < static_cast<double>(n), "beta must stay below dim");
  return s;
}

GridFunction build_counterexample(const CounterexampleSpec& spec, const DomainBox& domain,
                                  const ExponentField& p, const BuildOptions& opts) {
  int n = spec.dim;
  if (domain.dim != n) throw std::invalid_argument("build_counterexample: dimension mismatch");
  if (!(spec.r > 0.0)) throw std::invalid_argument("build_counterexample: empty source ball");
  for (int d = 0; d < n; ++d)
    if (spec.y0[d] - spec.r < domain.lo[d] || spec.y0[d] + spec.r > domain.hi[d])
      throw std::invalid_argument("build_counterexample: source ball not inside the domain");

  double s0 = spec.beta * p(spec.y0);
  if (s0 >= n * (1.0 - 1e-12))
    throw std::runtime_error(
        "spec inconsistent: the source modular diverges (beta * p reaches dim at the "
        "singularity)");

  auto spike = [&](const DomainBox& box) {
    GridFunction f = make_grid(box);
    for (long i = 0; i < box.cellCount(); ++i) {
      Vec y = box.midpoint(i);
      double d = dist(y, spec.y0, n);
      if (d > spec.r) continue;
      if (d < 1e-12 * box.maxWidth())
        throw std::invalid_argument(
            "build_counterexample: a grid midpoint coincides with the singularity; shift the "
            "domain or change the resolution");
      f[i] = std::pow(d, -spec.beta);
    }
    return f;
  };

  GridFunction f = spike(domain);

  // Stability gate. The modular mass concentrates at the singularity when
  // beta p is close to dim, where midpoint sums converge too slowly to
  // compare across refinements; the disk |y-y0| <= rho is therefore taken in
  // closed form (exponent frozen at y0) and only the smooth remainder is
  // compared. rho is held fixed across the refinement.
  double rho = 4.0 * domain.maxWidth();
  if (rho < spec.r) {
    auto outer_modular = [&](const DomainBox& box) {
      double acc = 0.0;
      double vol = box.cellVolume();
      for (long i = 0; i < box.cellCount(); ++i) {
        Vec y = box.midpoint(i);
        double d = dist(y, spec.y0, n);
        if (d <= rho || d > spec.r) continue;
        double sp = spec.beta * p(y);
        if (sp >= n * (1.0 - 1e-12))
          throw std::runtime_error(
              "spec inconsistent: beta * p reaches dim inside the source ball");
        acc += std::pow(d, -sp) * vol;
      }
      return acc;
    };
    double disk = surface_measure(n) / (n - s0) * std::pow(rho, n - s0);
    double coarse = outer_modular(domain) + disk;
    double fine = outer_modular(domain.refined(2)) + disk;
    double drift = std::abs(fine - coarse) / coarse;
    if (drift >= opts.stabilityTol) {
      std::ostringstream os;
      os << "spec inconsistent: source modular drifts " << drift * 100.0
         << "% under one refinement";
      throw std::runtime_error(os.str());
    }
  }
  return f;
}

DivergenceReport divergence_experiment(const CounterexampleSpec& spec, const GridFunction& f,
                                       const ExponentField& p, std::vector<double> cutoffs,
                                       long outputResolution, const KernelApplyConfig& ap) {
  int n = spec.dim;
  bool zero = true;
  for (double v : f.values)
    if (v != 0.0) zero = false;
  if (zero) throw std::invalid_argument("divergence_experiment: f vanishes identically");
  if (cutoffs.size() < 3)
    throw std::invalid_argument("divergence_experiment: need at least 3 cutoffs");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (!(cutoffs[i] > 0.0) || !(cutoffs[i] < spec.eps))
      throw std::invalid_argument(
          "divergence_experiment: cutoffs must lie strictly between 0 and eps");
    if (i > 0 && !(cutoffs[i] < cutoffs[i - 1]))
      throw std::invalid_argument("divergence_experiment: cutoffs must be strictly decreasing");
  }

  Vec ay0 = apply(spec.A, spec.y0);
  Vec lo = ay0, hi = ay0;
  for (int d = 0; d < n; ++d) {
    lo[d] -= spec.eps;
    hi[d] += spec.eps;
  }
  std::array<long, 2> res{outputResolution, n == 2 ? outputResolution : 1};
  DomainBox out(n, lo, hi, res);
  double h = out.maxWidth();

  DivergenceReport rep;
  rep.cutoffs = cutoffs;
  rep.usedEps = spec.eps;
  rep.predictedSlope = n - (spec.beta - spec.alpha) * (spec.q1v - spec.gamma);

  int usable = 0;
  for (double d : cutoffs)
    if (d >= 8.0 * h) ++usable;
  rep.usableCutoffs = usable;
  if (usable < 3) {
    std::ostringstream os;
    os << "refine grid: only " << usable << " of " << cutoffs.size()
       << " cutoffs exceed the grid scale (8 cells)";
    throw std::runtime_error(os.str());
  }

  KernelSpec kernel = single_matrix_kernel(spec.A, spec.alpha);
  KernelApplyResult tf = apply_kernel(f, kernel, out, ap);

  // one pass over the grid accumulates every annulus in fixed index order
  std::vector<double> acc(cutoffs.size(), 0.0);
  double vol = out.cellVolume();
  for (long j = 0; j < out.cellCount(); ++j) {
    Vec x = out.midpoint(j);
    double d = dist(x, ay0, n);
    if (d >= spec.eps) continue;
    double pv = p(x);
    double den = n - spec.alpha * pv;
    if (!(den > 0.0))
      throw std::runtime_error("divergence_experiment: Sobolev exponent undefined on the annulus");
    double qv = n * pv / den;
    double integrand = std::pow(std::abs(tf.value[j]), qv) * vol;
    for (std::size_t i = 0; i < cutoffs.size(); ++i)
      if (d > cutoffs[i]) acc[i] += integrand;
  }
  rep.modulars = acc;

  // fit the local power on shell masses between consecutive usable cutoffs;
  // the cumulative integral is monotone in the cutoff, so fitting it directly
  // would drown the convergent control case in its transient
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i + 1 < cutoffs.size(); ++i) {
    if (cutoffs[i] < 8.0 * h || cutoffs[i + 1] < 8.0 * h) continue;
    double shell = acc[i + 1] - acc[i];
    if (!(shell > 0.0)) continue;
    lx.push_back(std::log(std::sqrt(cutoffs[i] * cutoffs[i + 1])));
    ly.push_back(std::log(shell));
  }
  if (lx.size() < 2)
    throw std::runtime_error("refine grid: too few resolved shells for a slope fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double m = static_cast<double>(lx.size());
  rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  rep.pass = rep.slope < 0.0 && rep.slope <= rep.predictedSlope * 0.85;
  return rep;
}

NecessityReport necessity_scan(const ExponentField& p, const Matrix& A, int N, int samples,
                               const DomainBox& box, std::uint64_t seed, double tol) {
  if (N < 1) throw std::invalid_argument("necessity_scan: the period must be at least 1");
  if (samples < 1) throw std::invalid_argument("necessity_scan: need at least one sample");
  int n = A.dim;
  if (box.dim != n) throw std::invalid_argument("necessity_scan: dimension mismatch");

  Matrix power = Matrix::identity(n);
  for (int k = 0; k < N; ++k) power = multiply(A, power);
  double err = frobenius(subtract(power, Matrix::identity(n)));
  if (!(err < 1e-9)) {
    std::ostringstream os;
    os << "matrix is not periodic: ||A^" << N << " - I|| = " << err << " exceeds 1e-9";
    throw std::invalid_argument(os.str());
  }

  NecessityReport rep;
  rep.samples = samples;
  SplitMix64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    Vec y;
    for (int d = 0; d < n; ++d) y[d] = rng.uniform(box.lo[d], box.hi[d]);
    double py = p(y);
    double pay = p(apply(A, y));
    double dev = std::abs(pay - py);
    rep.maxDeviation = std::max(rep.maxDeviation, dev);
    if (dev <= tol) continue;

    OrbitViolation v;
    v.point = y;
    Vec cur = y;
    for (int k = 0; k <= N; ++k) {
      v.orbit.push_back(p(cur));
      cur = apply(A, cur);
    }
    // the orbit closes, so a drop somewhere forces a rise somewhere else
    double bestRise = 0.0;
    for (int k = 0; k < N; ++k) {
      double rise = v.orbit[static_cast<std::size_t>(k) + 1] - v.orbit[static_cast<std::size_t>(k)];
      if (rise > bestRise) {
        bestRise = rise;
        v.increaseIndex = k;
      }
    }
    rep.violations.push_back(std::move(v));
  }
  return rep;
}

}  // namespace varlex
