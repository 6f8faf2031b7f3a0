#include "varlex/testfam.hpp"

#include <algorithm>
#include <cmath>

#include "varlex/rng.hpp"

namespace varlex {

namespace {

// one additive component evaluated at a midpoint
struct Component {
  int kind = 0;  // 0 ball, 1 box, 2 bump, 3 spike, 4 annulus (radial families)
  Vec center;
  double r0 = 0.0, r1 = 0.0;
  double amp = 1.0;
  double beta = 0.0;
  double clip = 0.0;

  double eval(const Vec& y, int dim) const {
    double d = dist(y, center, dim);
    switch (kind) {
      case 0:
        return d <= r1 ? amp : 0.0;
      case 1: {
        for (int k = 0; k < dim; ++k)
          if (y[k] < center[k] - r1 || y[k] > center[k] + r1) return 0.0;
        return amp;
      }
      case 2: {
        if (d >= r1) return 0.0;
        double c = std::cos(M_PI * d / (2.0 * r1));
        return amp * c * c;
      }
      case 3: {
        if (d > r1) return 0.0;
        return amp * std::min(clip, std::pow(std::max(d, 1e-300), -beta));
      }
      default:
        return (d >= r0 && d <= r1) ? amp : 0.0;
    }
  }
};

}  // namespace

std::vector<GridFunction> make_test_family(const DomainBox& box, const TestFamilyOptions& opts) {
  int dim = box.dim;
  double betaCap = opts.spikeBetaMax > 0.0 ? opts.spikeBetaMax : 0.3 * dim;
  double half = 0.0;
  Vec boxCenter = 0.5 * (box.lo + box.hi);
  for (int d = 0; d < dim; ++d) half = std::max(half, 0.5 * (box.hi[d] - box.lo[d]));
  double reach = 0.5 * half;  // supports stay in the middle half of the box
  double minR = 2.0 * box.maxWidth();

  std::vector<GridFunction> family;
  family.reserve(static_cast<std::size_t>(opts.count));
  for (int i = 0; i < opts.count; ++i) {
    SplitMix64 rng = SplitMix64::substream(opts.seed, static_cast<std::uint64_t>(i));
    int parts = 1 + static_cast<int>(rng.uniform_int(0, std::max(0, opts.maxComponents - 1)));
    std::vector<Component> comps;
    for (int c = 0; c < parts; ++c) {
      Component comp;
      int kindMax = opts.allowSpikes ? 3 : 2;
      comp.kind = static_cast<int>(rng.uniform_int(0, kindMax));
      comp.amp = rng.uniform(0.5, 2.0);
      if (opts.radialOnly) {
        comp.center = boxCenter;
        double a = rng.uniform(minR, 0.8 * reach);
        double b = rng.uniform(minR, 0.8 * reach);
        comp.r0 = std::min(a, b);
        comp.r1 = std::max(a, b) + minR;
        if (comp.kind == 0 && rng.uniform() < 0.5) comp.kind = 4;  // annulus
        if (comp.kind == 1) comp.kind = 0;  // boxes are not radial
      } else {
        for (int d = 0; d < dim; ++d)
          comp.center[d] = boxCenter[d] + rng.uniform(-0.5 * reach, 0.5 * reach);
        comp.r1 = rng.uniform(minR, 0.5 * reach);
      }
      if (comp.kind == 3) {
        comp.beta = rng.uniform(0.1, betaCap);
        comp.clip = std::pow(0.1 * box.maxWidth(), -comp.beta);
      }
      comps.push_back(comp);
    }

    GridFunction f = make_grid(box);
    for (long j = 0; j < box.cellCount(); ++j) {
      Vec y = box.midpoint(j);
      double v = 0.0;
      for (const Component& comp : comps) v += comp.eval(y, dim);
      f[j] = v;
    }
    bool zero = true;
    for (double v : f.values)
      if (v != 0.0) zero = false;
    if (zero) {
      // tiny components can fall between midpoints; back-fill a visible ball
      Ball fallback{boxCenter, std::max(minR * 2.0, 0.25 * reach)};
      GridFunction ind = indicator(box, fallback);
      for (long j = 0; j < box.cellCount(); ++j) f[j] += ind[j];
    }
    family.push_back(std::move(f));
  }
  return family;
}

}  // namespace varlex
