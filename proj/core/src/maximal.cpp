#include "varlex/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "varlex/norms.hpp"
#include "varlex/rng.hpp"

namespace varlex {

namespace {

long max_window_cells(const DomainBox& box, const MaximalConfig& cfg) {
  long full = box.res[0];
  if (box.dim == 2) full = std::min(full, box.res[1]);
  if (cfg.maxWindow <= 0.0) return full;
  long cap = static_cast<long>(std::floor(cfg.maxWindow / box.maxWidth() + 1e-9));
  return std::clamp(cap, 1L, full);
}

// sliding max of W over s in [i-k+1, i] ∩ [0, smax], written through accum
template <class Accum>
void sliding_max_1d(const std::vector<double>& W, long n, long k, long smax, Accum&& accum) {
  std::deque<long> dq;
  for (long i = 0; i < n; ++i) {
    if (i <= smax) {
      while (!dq.empty() && W[static_cast<std::size_t>(dq.back())] <=
                                W[static_cast<std::size_t>(i)])
        dq.pop_back();
      dq.push_back(i);
    }
    while (!dq.empty() && dq.front() < i - k + 1) dq.pop_front();
    accum(i, W[static_cast<std::size_t>(dq.front())]);
  }
}

GridFunction maximal_impl(const GridFunction& f, double alpha, const MaximalConfig& cfg) {
  const DomainBox& box = f.domain;
  double n = static_cast<double>(box.dim);
  long K = max_window_cells(box, cfg);
  GridFunction out = make_grid(box);

  if (box.dim == 1) {
    long N = box.res[0];
    std::vector<double> prefix(static_cast<std::size_t>(N + 1), 0.0);
    for (long i = 0; i < N; ++i)
      prefix[static_cast<std::size_t>(i + 1)] =
          prefix[static_cast<std::size_t>(i)] + std::abs(f[i]);

    std::vector<double> W;
    for (long k = 1; k <= K; ++k) {
      long smax = N - k;
      W.assign(static_cast<std::size_t>(smax + 1), 0.0);
      for (long s = 0; s <= smax; ++s)
        W[static_cast<std::size_t>(s)] =
            prefix[static_cast<std::size_t>(s + k)] - prefix[static_cast<std::size_t>(s)];
      double count = static_cast<double>(k);
      double scale = std::pow(count * box.width(0), alpha / n);
      sliding_max_1d(W, N, k, smax, [&](long i, double best) {
        double v = scale * (best / count);
        if (v > out[i]) out[i] = v;
      });
    }
    return out;
  }

  long N0 = box.res[0], N1 = box.res[1];
  // 2d prefix sums: P[i][j] = sum over cells [0,i) x [0,j)
  std::vector<double> P(static_cast<std::size_t>((N0 + 1) * (N1 + 1)), 0.0);
  auto Pat = [&](long i, long j) -> double& {
    return P[static_cast<std::size_t>(i * (N1 + 1) + j)];
  };
  for (long i = 0; i < N0; ++i)
    for (long j = 0; j < N1; ++j)
      Pat(i + 1, j + 1) =
          std::abs(f[box.flatIndex(i, j)]) + Pat(i, j + 1) + Pat(i + 1, j) - Pat(i, j);

  std::vector<double> W, rowmax, colsrc;
  for (long k = 1; k <= K; ++k) {
    long s0max = N0 - k, s1max = N1 - k;
    // square-window sums at every valid corner
    W.assign(static_cast<std::size_t>((s0max + 1) * (s1max + 1)), 0.0);
    for (long s0 = 0; s0 <= s0max; ++s0)
      for (long s1 = 0; s1 <= s1max; ++s1)
        W[static_cast<std::size_t>(s0 * (s1max + 1) + s1)] =
            Pat(s0 + k, s1 + k) - Pat(s0, s1 + k) - Pat(s0 + k, s1) + Pat(s0, s1);

    // max over s1 for each midpoint column, then over s0 for each row
    rowmax.assign(static_cast<std::size_t>((s0max + 1) * N1), 0.0);
    std::vector<double> row(static_cast<std::size_t>(s1max + 1));
    for (long s0 = 0; s0 <= s0max; ++s0) {
      for (long s1 = 0; s1 <= s1max; ++s1)
        row[static_cast<std::size_t>(s1)] = W[static_cast<std::size_t>(s0 * (s1max + 1) + s1)];
      sliding_max_1d(row, N1, k, s1max, [&](long i1, double best) {
        rowmax[static_cast<std::size_t>(s0 * N1 + i1)] = best;
      });
    }
    double count = static_cast<double>(k) * static_cast<double>(k);
    double scale = std::pow((static_cast<double>(k) * box.width(0)) *
                                (static_cast<double>(k) * box.width(1)),
                            alpha / n);
    colsrc.assign(static_cast<std::size_t>(s0max + 1), 0.0);
    for (long i1 = 0; i1 < N1; ++i1) {
      for (long s0 = 0; s0 <= s0max; ++s0)
        colsrc[static_cast<std::size_t>(s0)] = rowmax[static_cast<std::size_t>(s0 * N1 + i1)];
      sliding_max_1d(colsrc, N0, k, s0max, [&](long i0, double best) {
        double v = scale * (best / count);
        long flat = box.flatIndex(i0, i1);
        if (v > out[flat]) out[flat] = v;
      });
    }
  }
  return out;
}

}  // namespace

GridFunction hl_maximal(const GridFunction& f, const MaximalConfig& cfg) {
  return maximal_impl(f, 0.0, cfg);
}

GridFunction frac_maximal(const GridFunction& f, double alpha, const MaximalConfig& cfg) {
  if (!(alpha >= 0.0) || !(alpha < static_cast<double>(f.domain.dim)))
    throw std::invalid_argument("frac_maximal: alpha must lie in [0, dim)");
  return maximal_impl(f, alpha, cfg);
}

RubioResult rubio_defrancia(const GridFunction& h, const ExponentField& dualExponent,
                            const RubioConfig& cfg) {
  if (cfg.terms < 1) throw std::invalid_argument("rubio_defrancia: need at least one term");
  double N = cfg.normBound > 0.0
                 ? cfg.normBound
                 : estimate_maximal_norm(dualExponent, h.domain, 12, 2026, cfg.maximal);
  if (!(N >= 1.0)) N = 1.0;  // the maximal operator never contracts sup norms

  RubioResult res;
  res.normBound = N;
  res.terms = cfg.terms;

  GridFunction cur = pointwise_map(h, [](double v) { return std::abs(v); });
  GridFunction acc = cur;
  double x = 1.0 / (2.0 * N);
  double wk = 1.0;
  for (int k = 1; k <= cfg.terms; ++k) {
    cur = hl_maximal(cur, cfg.maximal);
    wk *= x;
    long n = acc.domain.cellCount();
    for (long i = 0; i < n; ++i) acc[i] += wk * cur[i];
  }
  double supH = 0.0;
  for (double v : h.values) supH = std::max(supH, std::abs(v));
  // every iterate is bounded by sup|h|, so the dropped terms sum geometrically
  res.tailBound = supH * wk * x / (1.0 - x);
  res.rh = std::move(acc);
  res.lastIterate = std::move(cur);
  return res;
}

double estimate_maximal_norm(const ExponentField& dualExponent, const DomainBox& box,
                             int probes, std::uint64_t seed, const MaximalConfig& cfg) {
  if (probes < 1) throw std::invalid_argument("estimate_maximal_norm: need probes >= 1");
  std::vector<GridFunction> family;
  family.push_back(make_grid(box, 1.0));

  for (int k = 0; static_cast<int>(family.size()) < probes; ++k) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(k));
    GridFunction g = make_grid(box);
    long n = box.cellCount();
    if (k % 3 == 2) {
      // smooth bump at a random center
      Vec c;
      double rad = 0.0;
      for (int d = 0; d < box.dim; ++d) {
        double half = 0.5 * (box.hi[d] - box.lo[d]);
        c[d] = 0.5 * (box.lo[d] + box.hi[d]) + rng.uniform(-0.4, 0.4) * half;
        double r = rng.uniform(0.15, 0.45) * half;
        rad = d == 0 ? r : std::min(rad, r);
      }
      for (long i = 0; i < n; ++i) {
        double t = dist(box.midpoint(i), c, box.dim) / rad;
        g[i] = t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
      }
    } else {
      // random subbox indicator
      Vec rlo, rhi;
      for (int d = 0; d < box.dim; ++d) {
        double a = rng.uniform(box.lo[d], box.hi[d]);
        double b = rng.uniform(box.lo[d], box.hi[d]);
        rlo[d] = std::min(a, b);
        rhi[d] = std::max(a, b);
        double w = box.width(d);
        if (rhi[d] - rlo[d] < 2.0 * w) rhi[d] = rlo[d] + 2.0 * w;  // keep a midpoint inside
      }
      for (long i = 0; i < n; ++i)
        g[i] = region_contains(BoxRegion{rlo, rhi}, box.midpoint(i), box.dim) ? 1.0 : 0.0;
    }
    bool nonzero = false;
    for (double v : g.values)
      if (v != 0.0) nonzero = true;
    if (nonzero) family.push_back(std::move(g));
  }

  double worst = 0.0;
  for (const GridFunction& g : family) {
    double denom = luxemburg_norm(g, dualExponent);
    if (denom == 0.0) continue;
    double num = luxemburg_norm(hl_maximal(g, cfg), dualExponent);
    worst = std::max(worst, num / denom);
  }
  return 2.0 * worst;
}

}  // namespace varlex
