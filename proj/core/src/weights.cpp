#include "varlex/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace varlex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// per-cube sums of preprocessed cell arrays, walked level by level
struct CubeScan {
  const DomainBox& box;
  int depth;

  template <class Visit>
  void run(Visit&& visit) const {
    for (int level = 0; level <= depth; ++level) {
      long cubes1 = 1L << level;
      long side0 = box.res[0] / cubes1;
      long side1 = box.dim == 2 ? box.res[1] / cubes1 : 1;
      long total = box.dim == 2 ? cubes1 * cubes1 : cubes1;
      for (long c = 0; c < total; ++c) {
        long c0 = box.dim == 2 ? c / cubes1 : c;
        long c1 = box.dim == 2 ? c % cubes1 : 0;
        visit(level, c, c0 * side0, c1 * side1, side0, side1);
      }
    }
  }
};

void finish_depth_flags(WeightReport& rep) {
  // the strong single-grid rule: two consecutive >= 10x jumps of the running sup
  const auto& s = rep.perDepthSup;
  for (std::size_t l = 2; l < s.size(); ++l)
    if (s[l] >= 10.0 * s[l - 1] && s[l - 1] >= 10.0 * s[l - 2] && s[l - 2] > 0.0)
      rep.divergent = true;
}

WeightReport bracket_sup(const GridFunction& w, const DyadicFamily& fam,
                         const std::vector<double>& left, const std::vector<double>& right,
                         double leftPow, double rightPow, bool rightIsSup) {
  const DomainBox& box = w.domain;
  WeightReport rep;
  rep.perDepthSup.assign(static_cast<std::size_t>(fam.depth + 1), 0.0);
  double best = -1.0;
  bool sawBad = false;
  DyadicCube badCube;

  CubeScan{box, fam.depth}.run([&](int level, long cubeIdx, long o0, long o1, long s0, long s1) {
    double suml = 0.0, sumr = 0.0, supr = 0.0;
    long count = 0;
    for (long i0 = o0; i0 < o0 + s0; ++i0) {
      if (box.dim == 1) {
        suml += left[static_cast<std::size_t>(i0)];
        sumr += right[static_cast<std::size_t>(i0)];
        supr = std::max(supr, right[static_cast<std::size_t>(i0)]);
        ++count;
      } else {
        for (long i1 = o1; i1 < o1 + s1; ++i1) {
          std::size_t flat = static_cast<std::size_t>(box.flatIndex(i0, i1));
          suml += left[flat];
          sumr += right[flat];
          supr = std::max(supr, right[flat]);
          ++count;
        }
      }
    }
    double cnt = static_cast<double>(count);
    double lv = std::pow(suml / cnt, leftPow);
    double rv = rightIsSup ? supr : std::pow(sumr / cnt, rightPow);
    double prod = lv * rv;
    if (!std::isfinite(prod)) {
      if (!sawBad) badCube = {level, cubeIdx};
      sawBad = true;
      return;
    }
    if (prod > best) {
      best = prod;
      rep.worstCube = {level, cubeIdx};
    }
    auto& sup = rep.perDepthSup[static_cast<std::size_t>(level)];
    sup = std::max(sup, prod);
  });

  for (std::size_t l = 1; l < rep.perDepthSup.size(); ++l)
    rep.perDepthSup[l] = std::max(rep.perDepthSup[l], rep.perDepthSup[l - 1]);
  rep.constant = best < 0.0 ? kInf : best;
  if (sawBad) {
    rep.divergent = true;
    rep.worstCube = badCube;
    rep.constant = kInf;
  }
  finish_depth_flags(rep);
  return rep;
}

}  // namespace

DyadicFamily::DyadicFamily(DomainBox root_, int depth_) : root(root_), depth(depth_) {
  if (depth < 0) throw std::invalid_argument("DyadicFamily: depth must be >= 0");
  long need = 1L << depth;
  for (int d = 0; d < root.dim; ++d) {
    long r = root.res[d];
    if (depth > 0 && (r % need) != 0)
      throw std::invalid_argument(
          "DyadicFamily: resolution must be divisible by 2^depth so cube edges land on "
          "grid nodes");
    if ((1L << depth) > r)
      throw std::invalid_argument("DyadicFamily: depth exceeds log2(resolution)");
  }
}

long DyadicFamily::cubesAtLevel(int level) const {
  long c = 1L << level;
  return root.dim == 2 ? c * c : c;
}

WeightReport ap_constant(const GridFunction& w, double p, const DyadicFamily& fam) {
  if (!(p > 1.0)) throw std::invalid_argument("ap_constant: p must exceed 1");
  if (!fam.root.sameShape(w.domain))
    throw std::invalid_argument("ap_constant: family root must match the weight grid");
  for (double v : w.values)
    if (v < 0.0) throw std::invalid_argument("ap_constant: weight must be nonnegative");
  std::vector<double> dual(w.values.size());
  double e = -1.0 / (p - 1.0);
  for (std::size_t i = 0; i < w.values.size(); ++i)
    dual[i] = std::pow(w.values[i], e);  // w = 0 yields +inf, recorded per cube
  return bracket_sup(w, fam, w.values, dual, 1.0, p - 1.0, false);
}

WeightReport a1_constant(const GridFunction& w, const DyadicFamily& fam,
                         const MaximalConfig& cfg) {
  if (!fam.root.sameShape(w.domain))
    throw std::invalid_argument("a1_constant: family root must match the weight grid");
  for (double v : w.values)
    if (!(v > 0.0)) throw std::invalid_argument("a1_constant: weight must be positive");
  GridFunction mw = hl_maximal(w, cfg);
  WeightReport rep;
  rep.perDepthSup.assign(static_cast<std::size_t>(fam.depth + 1), 0.0);
  long n = w.domain.cellCount();
  for (long i = 0; i < n; ++i) {
    double r = mw[i] / w[i];
    if (r > rep.constant) {
      rep.constant = r;
      rep.worstCube = {-1, i};  // level -1: a midpoint, not a cube
    }
  }
  for (auto& s : rep.perDepthSup) s = rep.constant;
  return rep;
}

WeightReport apq_constant(const GridFunction& w, double p, double q, const DyadicFamily& fam) {
  if (!(p >= 1.0)) throw std::invalid_argument("apq_constant: p must be >= 1");
  if (!(q > 0.0)) throw std::invalid_argument("apq_constant: q must be positive");
  if (!fam.root.sameShape(w.domain))
    throw std::invalid_argument("apq_constant: family root must match the weight grid");
  for (double v : w.values)
    if (v < 0.0) throw std::invalid_argument("apq_constant: weight must be nonnegative");

  std::vector<double> wq(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i) wq[i] = std::pow(w.values[i], q);

  if (p > 1.0) {
    double pc = p / (p - 1.0);
    std::vector<double> dual(w.values.size());
    for (std::size_t i = 0; i < w.values.size(); ++i) dual[i] = std::pow(w.values[i], -pc);
    return bracket_sup(w, fam, wq, dual, 1.0 / q, 1.0 / pc, false);
  }
  // p = 1: the dual side is the essential sup of 1/w over the cube, realized
  // as the max over its midpoints
  std::vector<double> inv(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i) inv[i] = 1.0 / w.values[i];
  return bracket_sup(w, fam, wq, inv, 1.0 / q, 1.0, true);
}

ImplicationReport a1_implies_apq_check(const GridFunction& w, double p, double q,
                                       const DyadicFamily& fam, const MaximalConfig& cfg,
                                       double antecedentCap) {
  ImplicationReport rep;
  rep.antecedentCap = antecedentCap;
  rep.a1 = a1_constant(w, fam, cfg);
  rep.apq = apq_constant(w, p, q, fam);
  rep.antecedentHolds =
      std::isfinite(rep.a1.constant) && !rep.a1.divergent && rep.a1.constant <= antecedentCap;
  rep.implicationHolds =
      !rep.antecedentHolds || (std::isfinite(rep.apq.constant) && !rep.apq.divergent);
  return rep;
}

DivergenceProbe divergence_probe(const std::function<double(const Vec&)>& w,
                                 const DomainBox& rootShape, double p, double q,
                                 const std::vector<int>& depths, int resPadLog2,
                                 double driftTol) {
  if (depths.size() < 3)
    throw std::invalid_argument("divergence_probe: need at least 3 depths");
  if (!std::is_sorted(depths.begin(), depths.end()))
    throw std::invalid_argument("divergence_probe: depths must be ascending");

  DivergenceProbe probe;
  for (int depth : depths) {
    long res = 1L << (depth + resPadLog2);
    std::array<long, 2> rr{res, rootShape.dim == 2 ? res : 1};
    DomainBox box(rootShape.dim, rootShape.lo, rootShape.hi, rr);
    GridFunction wg = sample(box, w);
    DyadicFamily fam(box, depth);
    WeightReport rep = q > 0.0 ? apq_constant(wg, p, q, fam) : ap_constant(wg, p, fam);
    probe.depths.push_back(depth);
    probe.constants.push_back(rep.constant);
    if (rep.divergent) probe.divergent = true;
  }
  const auto& c = probe.constants;
  for (std::size_t i = 2; i < c.size(); ++i) {
    if (!std::isfinite(c[i])) {
      probe.divergent = true;
      continue;
    }
    bool monotone = c[i] > c[i - 1] && c[i - 1] > c[i - 2];
    bool sustained =
        c[i] >= (1.0 + driftTol) * c[i - 1] && c[i - 1] >= (1.0 + driftTol) * c[i - 2];
    bool jump = c[i] >= 10.0 * c[i - 1];
    if ((monotone && sustained) || jump) probe.divergent = true;
  }
  return probe;
}

}  // namespace varlex
