#pragma once

// Slow independent oracles used to cross-check the library. Everything here
// recomputes from first principles: direct window scans instead of prefix
// sums, fresh bisection instead of the norm solver, adaptive quadrature
// instead of midpoint sums. Keep grids small; costs are cubic.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "varlex/grid.hpp"
#include "varlex/maximal.hpp"

namespace oracle {

// Same admissible-window rule as the production operator: every axis-aligned
// box with grid-node corners, squares in 2d, side capped by cfg.maxWindow.
inline long window_cap(const varlex::DomainBox& box, const varlex::MaximalConfig& cfg) {
  long full = box.res[0];
  if (box.dim == 2) full = std::min(full, box.res[1]);
  if (cfg.maxWindow <= 0.0) return full;
  long cap = static_cast<long>(std::floor(cfg.maxWindow / box.maxWidth() + 1e-9));
  return std::max(1L, std::min(cap, full));
}

// Maximal operator by direct enumeration of every window containing each
// midpoint. The per-window arithmetic (sum, divide by count, scale) follows
// the production expression order so dyadic-valued inputs agree bitwise.
inline varlex::GridFunction brute_maximal(const varlex::GridFunction& f, double alpha,
                                          const varlex::MaximalConfig& cfg = {}) {
  const varlex::DomainBox& box = f.domain;
  if (box.cellCount() > (box.dim == 1 ? 512L : 64L * 64L))
    throw std::invalid_argument("brute_maximal: grid too large for the cubic scan");
  double n = static_cast<double>(box.dim);
  long K = window_cap(box, cfg);
  varlex::GridFunction out = varlex::make_grid(box);

  if (box.dim == 1) {
    long N = box.res[0];
    for (long k = 1; k <= K; ++k) {
      double count = static_cast<double>(k);
      double scale = std::pow(count * box.width(0), alpha / n);
      for (long i = 0; i < N; ++i) {
        double best = -1.0;
        for (long s = std::max(0L, i - k + 1); s <= std::min(i, N - k); ++s) {
          double sum = 0.0;
          for (long j = s; j < s + k; ++j) sum += std::abs(f[j]);
          best = std::max(best, sum);
        }
        if (best < 0.0) continue;
        double v = scale * (best / count);
        if (v > out[i]) out[i] = v;
      }
    }
    return out;
  }

  long N0 = box.res[0], N1 = box.res[1];
  for (long k = 1; k <= K; ++k) {
    double count = static_cast<double>(k) * static_cast<double>(k);
    double scale = std::pow((static_cast<double>(k) * box.width(0)) *
                                (static_cast<double>(k) * box.width(1)),
                            alpha / n);
    for (long i0 = 0; i0 < N0; ++i0)
      for (long i1 = 0; i1 < N1; ++i1) {
        double best = -1.0;
        for (long s0 = std::max(0L, i0 - k + 1); s0 <= std::min(i0, N0 - k); ++s0)
          for (long s1 = std::max(0L, i1 - k + 1); s1 <= std::min(i1, N1 - k); ++s1) {
            double sum = 0.0;
            for (long j0 = s0; j0 < s0 + k; ++j0)
              for (long j1 = s1; j1 < s1 + k; ++j1)
                sum += std::abs(f[box.flatIndex(j0, j1)]);
            best = std::max(best, sum);
          }
        if (best < 0.0) continue;
        double v = scale * (best / count);
        long flat = box.flatIndex(i0, i1);
        if (v > out[flat]) out[flat] = v;
      }
  }
  return out;
}

// Real root of x^3 = x + 1, by plain sign bisection on [1, 2].
inline double plastic_root(double tol = 1e-12) {
  double lo = 1.0, hi = 2.0;
  auto g = [](double x) { return x * x * x - x - 1.0; };
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& fn, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = fn(lm), frm = fn(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(fn, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(fn, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson quadrature; the integrand must be finite on [a, b].
inline double integrate(const std::function<double(double)>& fn, double a, double b,
                        double tol = 1e-10) {
  double m = 0.5 * (a + b);
  double fa = fn(a), fb = fn(b), fm = fn(m);
  double whole = detail::simpson(a, fa, b, fb, fm);
  return detail::adapt(fn, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace oracle
