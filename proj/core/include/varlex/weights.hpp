#pragma once

#include <functional>
#include <vector>

#include "varlex/grid.hpp"
#include "varlex/maximal.hpp"

namespace varlex {

struct DyadicCube {
  int level = 0;   // 0 is the root box; level -1 marks a single midpoint (A1 reports)
  long index = 0;  // row-major among the 2^(dim*level) cubes of that level
};

// All dyadic subcubes of the root box down to `depth`. Cube edges must land
// on grid nodes, so the resolution has to be divisible by 2^depth.
struct DyadicFamily {
  DomainBox root;
  int depth = 0;

  DyadicFamily(DomainBox root, int depth);
  long cubesAtLevel(int level) const;
};

struct WeightReport {
  double constant = 0.0;
  DyadicCube worstCube;
  bool divergent = false;
  // running sup over cubes of level <= l, nondecreasing in l
  std::vector<double> perDepthSup;
};

// sup over cubes of avg(w) * avg(w^{-1/(p-1)})^{p-1}; cubes whose bracket is
// non-finite are recorded as divergent and excluded from the sup
WeightReport ap_constant(const GridFunction& w, double p, const DyadicFamily& fam);

// sup over midpoints of Mw / w; requires w > 0 everywhere
WeightReport a1_constant(const GridFunction& w, const DyadicFamily& fam,
                         const MaximalConfig& cfg = {});

// p > 1: sup over cubes of (avg w^q)^{1/q} (avg w^{-p'})^{1/p'}
// p = 1: sup over cubes of (max over cube of 1/w) (avg w^q)^{1/q}
WeightReport apq_constant(const GridFunction& w, double p, double q, const DyadicFamily& fam);

struct ImplicationReport {
  WeightReport a1;
  WeightReport apq;
  bool antecedentHolds = false;   // A1 constant finite and below the cap
  bool implicationHolds = false;  // vacuously true when the antecedent fails
  double antecedentCap = 0.0;
};

ImplicationReport a1_implies_apq_check(const GridFunction& w, double p, double q,
                                       const DyadicFamily& fam, const MaximalConfig& cfg = {},
                                       double antecedentCap = 1e3);

struct DivergenceProbe {
  std::vector<int> depths;
  std::vector<double> constants;
  bool divergent = false;
};

// Re-samples a closed-form weight at resolution 2^(depth + resPadLog2) per
// depth and watches the constant: sustained monotone growth beyond driftTol
// across the last two depth increments (or a single >= 10x jump) flags
// divergence. On a fixed grid the sup cannot grow with depth alone, so the
// probe couples depth to resolution.
DivergenceProbe divergence_probe(const std::function<double(const Vec&)>& w,
                                 const DomainBox& rootShape, double p,
                                 double q,  // q <= 0 selects the ap bracket
                                 const std::vector<int>& depths, int resPadLog2 = 4,
                                 double driftTol = 0.05);

}  // namespace varlex
