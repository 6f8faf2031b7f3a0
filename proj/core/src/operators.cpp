#include "varlex/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "varlex/norms.hpp"
#include "varlex/parallel.hpp"

namespace varlex {

namespace {

constexpr long kMaxRes1d = 8192;
constexpr long kMaxRes2d = 128;

void check_resolution_cap(const DomainBox& box, const char* what) {
  long cap = box.dim == 1 ? kMaxRes1d : kMaxRes2d;
  for (int d = 0; d < box.dim; ++d)
    if (box.res[d] > cap) {
      std::ostringstream os;
      os << what << ": resolution " << box.res[d]
         << " exceeds the kernel quadrature cap (" << kMaxRes1d << " in 1d, " << kMaxRes2d
         << " per axis in 2d)";
      throw std::invalid_argument(os.str());
    }
}

struct SourceCell {
  double y0, y1;
  double fv;
  double absMass;
};

std::vector<SourceCell> nonzero_cells(const GridFunction& f) {
  std::vector<SourceCell> cells;
  double vol = f.domain.cellVolume();
  long n = f.domain.cellCount();
  for (long i = 0; i < n; ++i) {
    double v = f[i];
    if (v == 0.0) continue;
    Vec y = f.domain.midpoint(i);
    cells.push_back({y[0], y[1], v * vol, std::abs(v) * vol});
  }
  return cells;
}

// The exclusion discs around each factor's singular point drop kernel mass of
// order h^(n - alpha_i), which dominates the quadrature error. This puts the
// disc integral back, with f and the other factors frozen at the singular
// point. Skipped when another singularity sits within the frozen radius; the
// residual there is one order smaller and confined to a shrinking set.
double singular_correction(const GridFunction& f, const KernelSpec& k, const Vec& x, double h) {
  const int n = f.domain.dim;
  const std::size_t m = k.family.mats.size();
  double corr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    Vec ys = apply(inverse(k.family.mats[i]), x);
    double fval = interp(f, ys);
    if (fval == 0.0) continue;
    double frozen = 1.0;
    bool clean = true;
    for (std::size_t l = 0; l < m; ++l) {
      if (l == i) continue;
      double d = dist(x, apply(k.family.mats[l], ys), n);
      if (d < 2.0 * h * std::max(1.0, k.family.norms[l])) {
        clean = false;
        break;
      }
      frozen *= std::pow(d, -k.alphas[l]);
    }
    if (!clean) continue;
    double a = k.alphas[i];
    double disc = n == 2 ? 2.0 * M_PI * std::pow(h, 2.0 - a) / (2.0 - a)
                         : 2.0 * std::pow(h, 1.0 - a) / (1.0 - a);
    corr += fval * frozen * disc / std::abs(det(k.family.mats[i]));
  }
  return corr;
}

}  // namespace

KernelSpec make_kernel(MatrixFamily family, std::vector<double> alphas) {
  int n = family.dim;
  if (alphas.size() != family.mats.size())
    throw std::invalid_argument("make_kernel: one factor exponent per matrix required");
  if (alphas.empty()) throw std::invalid_argument("make_kernel: empty matrix family");
  double sum = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0) || !(a < static_cast<double>(n)))
      throw std::invalid_argument("make_kernel: factor exponents must lie in (0, dim)");
    sum += a;
  }
  double alpha = static_cast<double>(n) - sum;
  if (alpha < -1e-12 || alpha >= static_cast<double>(n))
    throw std::invalid_argument(
        "make_kernel: factor exponents must sum into (0, dim] so the order lands in [0, dim)");
  KernelSpec k;
  k.family = std::move(family);
  k.alphas = std::move(alphas);
  k.alpha = std::max(0.0, alpha);
  return k;
}

KernelSpec single_matrix_kernel(const Matrix& A, double alpha) {
  int n = A.dim;
  if (!(alpha > 0.0) || !(alpha < static_cast<double>(n)))
    throw std::invalid_argument("single_matrix_kernel: order must lie in (0, dim)");
  return make_kernel(make_family(n, {A}), {static_cast<double>(n) - alpha});
}

DomainBox default_output_box(const KernelSpec& k, const DomainBox& in) {
  double scale = 1.0;
  for (double nrm : k.family.norms) scale = std::max(scale, nrm);
  Vec c = 0.5 * (in.lo + in.hi);
  Vec lo = c + scale * (in.lo - c);
  Vec hi = c + scale * (in.hi - c);
  return DomainBox(in.dim, lo, hi, in.res);
}

KernelApplyResult apply_kernel(const GridFunction& f, const KernelSpec& k,
                               const DomainBox& out, const KernelApplyConfig& cfg) {
  int n = f.domain.dim;
  if (k.family.dim != n || out.dim != n)
    throw std::invalid_argument("apply_kernel: dimension mismatch");
  check_resolution_cap(f.domain, "apply_kernel input");
  check_resolution_cap(out, "apply_kernel output");

  const std::vector<SourceCell> cells = nonzero_cells(f);
  const double h = f.domain.maxWidth();
  const double h2 = h * h;
  const std::size_t m = k.family.mats.size();

  // flattened matrix entries; 1d uses a00 only
  std::vector<double> a00(m), a01(m), a10(m), a11(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Matrix& A = k.family.mats[i];
    a00[i] = A.a[0];
    a01[i] = n == 2 ? A.a[1] : 0.0;
    a10[i] = n == 2 ? A.a[2] : 0.0;
    a11[i] = n == 2 ? A.a[3] : 1.0;
  }
  bool fused = true;
  for (double a : k.alphas)
    if (a != k.alphas[0]) fused = false;
  const double fusedExp = -0.5 * k.alphas[0];
  std::vector<double> halfExp(m);
  for (std::size_t i = 0; i < m; ++i) halfExp[i] = -0.5 * k.alphas[i];

  KernelApplyResult res;
  res.value = make_grid(out);
  res.skippedMass = make_grid(out);

  parallel_for(out.cellCount(), cfg.threads, [&](long j) {
    Vec x = out.midpoint(j);
    const double x0 = x[0], x1 = x[1];
    double acc = 0.0;
    double skip = 0.0;
    for (const SourceCell& cell : cells) {
      double prod = 1.0;
      double kernel = 1.0;
      bool excluded = false;
      for (std::size_t i = 0; i < m; ++i) {
        double d0 = x0 - (a00[i] * cell.y0 + a01[i] * cell.y1);
        double d1 = n == 2 ? x1 - (a10[i] * cell.y0 + a11[i] * cell.y1) : 0.0;
        double d2 = d0 * d0 + d1 * d1;
        if (d2 < h2) {
          excluded = true;
          break;
        }
        if (fused)
          prod *= d2;
        else
          kernel *= std::pow(d2, halfExp[i]);
      }
      if (excluded) {
        skip += cell.absMass;
        continue;
      }
      acc += (fused ? std::pow(prod, fusedExp) : kernel) * cell.fv;
    }
    res.value[j] = acc + singular_correction(f, k, x, h);
    res.skippedMass[j] = skip;
  });

  double totalAbs = 0.0;
  for (const SourceCell& cell : cells) totalAbs += cell.absMass;
  for (long j = 0; j < out.cellCount(); ++j)
    res.skippedMassMax = std::max(res.skippedMassMax, res.skippedMass[j]);
  res.skippedMassMaxRel = totalAbs > 0.0 ? res.skippedMassMax / totalAbs : 0.0;
  return res;
}

double apply_kernel_at(const GridFunction& f, const KernelSpec& k, const Vec& x) {
  int n = f.domain.dim;
  if (k.family.dim != n) throw std::invalid_argument("apply_kernel_at: dimension mismatch");
  const double h = f.domain.maxWidth();
  const std::size_t m = k.family.mats.size();
  double acc = 0.0;
  double vol = f.domain.cellVolume();
  for (long i = 0; i < f.domain.cellCount(); ++i) {
    double fv = f[i];
    if (fv == 0.0) continue;
    Vec y = f.domain.midpoint(i);
    double kernel = 1.0;
    bool excluded = false;
    for (std::size_t j = 0; j < m; ++j) {
      double d = dist(x, apply(k.family.mats[j], y), n);
      if (d < h) {
        excluded = true;
        break;
      }
      kernel *= std::pow(d, -k.alphas[j]);
    }
    if (!excluded) acc += kernel * fv * vol;
  }
  return acc + singular_correction(f, k, x, h);
}

DominationReport maximal_domination_check(const GridFunction& f, const KernelSpec& k,
                                          const GridFunction& w, double p,
                                          const MaximalConfig& m, const KernelApplyConfig& ap) {
  if (!(p > 0.0)) throw std::invalid_argument("maximal_domination_check: p must be positive");
  for (double v : w.values)
    if (v < 0.0)
      throw std::invalid_argument("maximal_domination_check: weight must be nonnegative");

  DominationReport rep;
  bool zero = true;
  for (double v : f.values)
    if (v != 0.0) zero = false;
  if (zero) {
    rep.trivial = true;
    return rep;
  }

  DomainBox out = default_output_box(k, f.domain);
  KernelApplyResult tf = apply_kernel(f, k, out, ap);
  rep.skippedMassMaxRel = tf.skippedMassMaxRel;
  double lhs = 0.0;
  double outVol = out.cellVolume();
  for (long j = 0; j < out.cellCount(); ++j)
    lhs += std::pow(std::abs(tf.value[j]), p) * interp(w, out.midpoint(j)) * outVol;

  GridFunction mf = frac_maximal(f, k.alpha, m);
  double rhs = 0.0;
  double inVol = f.domain.cellVolume();
  for (const Matrix& A : k.family.mats) {
    double s = 0.0;
    for (long j = 0; j < f.domain.cellCount(); ++j)
      s += std::pow(mf[j], p) * interp(w, apply(A, f.domain.midpoint(j))) * inVol;
    rhs += s;
  }

  rep.lhs = lhs;
  rep.rhs = rhs;
  if (rhs == 0.0) {
    if (lhs > 0.0)
      throw std::runtime_error(
          "maximal_domination_check: right-hand side vanished while the left did not; "
          "quadrature too coarse for this weight");
    rep.trivial = true;
    return rep;
  }
  rep.cEmpirical = lhs / rhs;
  return rep;
}

namespace {

enum class SweepKind { Strong, Weak };

BoundCheckReport run_sweep(const std::vector<GridFunction>& testFamily, const KernelSpec& k,
                           const ExponentField& p, const SweepConfig& cfg, SweepKind kind) {
  if (testFamily.empty()) throw std::invalid_argument("empty test family");
  int n = k.family.dim;
  for (const GridFunction& f : testFamily) {
    if (f.domain.dim != n) throw std::invalid_argument("bound sweep: dimension mismatch");
    bool zero = true;
    for (double v : f.values)
      if (v != 0.0) zero = false;
    if (zero)
      throw std::invalid_argument("bound sweep: test family contains an identically zero function");
  }

  DerivedExponents derived = sobolev_exponent(p, k.alpha, n);
  for (std::size_t i = 0; i < k.family.mats.size(); ++i) {
    InvarianceReport inv =
        check_matrix_invariance(p, k.family.mats[i], testFamily.front().domain, cfg.invarianceTol);
    if (!inv.pass) {
      std::ostringstream os;
      os << "bound sweep: exponent is not invariant under family matrix " << (i + 1)
         << " (max deviation " << inv.maxDeviation
         << "); the boundedness hypothesis fails here, probe divergence with the "
            "counterexample pipeline instead";
      throw std::invalid_argument(os.str());
    }
  }

  BoundCheckReport rep;
  auto ratio_of = [&](const GridFunction& f) {
    DomainBox out = default_output_box(k, f.domain);
    KernelApplyResult tf = apply_kernel(f, k, out, cfg.apply);
    rep.skippedMassMaxRel = std::max(rep.skippedMassMaxRel, tf.skippedMassMaxRel);
    double den = luxemburg_norm(f, p);
    double num = 0.0;
    if (kind == SweepKind::Strong) {
      num = luxemburg_norm(tf.value, derived.q);
    } else {
      double top = 0.0;
      for (long j = 0; j < out.cellCount(); ++j) top = std::max(top, std::abs(tf.value[j]));
      if (top > 0.0)
        num = weak_quasinorm(tf.value, derived.q, log_levels(top, cfg.weakLevels, cfg.weakSpan))
                  .value;
    }
    return num / den;
  };

  for (const GridFunction& f : testFamily) {
    rep.ratios.push_back(ratio_of(f));
    rep.maxRatio = std::max(rep.maxRatio, rep.ratios.back());
  }
  for (const GridFunction& f : testFamily)
    rep.refinedMaxRatio = std::max(rep.refinedMaxRatio, ratio_of(subdivide(f)));
  rep.refinementDelta =
      rep.maxRatio > 0.0 ? std::abs(rep.refinedMaxRatio - rep.maxRatio) / rep.maxRatio : 0.0;
  rep.stableUnderRefinement = rep.refinementDelta < cfg.refinementTol;
  return rep;
}

}  // namespace

BoundCheckReport strong_bound_sweep(const std::vector<GridFunction>& testFamily,
                                    const KernelSpec& k, const ExponentField& p,
                                    const SweepConfig& cfg) {
  return run_sweep(testFamily, k, p, cfg, SweepKind::Strong);
}

BoundCheckReport weak_bound_sweep(const std::vector<GridFunction>& testFamily,
                                  const KernelSpec& k, const ExponentField& p,
                                  const SweepConfig& cfg) {
  return run_sweep(testFamily, k, p, cfg, SweepKind::Weak);
}

}  // namespace varlex
