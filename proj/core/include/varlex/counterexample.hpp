#pragma once

#include <cstdint>
#include <vector>

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"
#include "varlex/matrix.hpp"
#include "varlex/operators.hpp"

namespace varlex {

// Parameters of the divergence construction f = indicator(B(y0, r)) |y-y0|^{-beta}
// for a single-matrix kernel of order alpha when the exponent is not invariant
// under A (p(Ay0) > p(y0)). All fields are derived, then re-verified.
struct CounterexampleSpec {
  int dim = 1;
  Matrix A = Matrix::identity(1);
  Vec y0{0.0};
  double alpha = 0.0;
  double p0 = 0.0, p1 = 0.0;    // exponent at y0 and at Ay0
  double q0v = 0.0, q1v = 0.0;  // Sobolev image exponents at those points
  double gamma = 0.0;           // (q1v - q0v) / 2
  double beta = 0.0;            // spike order, (dim/p0)(1 - delta)
  double delta = 0.0;
  double r = 0.0;    // source ball radius
  double eps = 0.0;  // image ball radius, < M r
  double M = 0.0;    // operator norm of A
};

// Derives gamma, beta, delta and searches r and eps by geometric halving (60
// steps each). Throws "hypothesis not violated" when p(Ay0) <= p(y0).
CounterexampleSpec derive_spec(const ExponentField& p, const Matrix& A, const Vec& y0,
                               double alpha, int n);

struct BuildOptions {
  double stabilityTol = 0.05;  // allowed drift of the source modular under one refinement
};

// Samples the spike on `domain` and gates on quadrature stability of its
// modular: the near-singular disk is integrated in closed form (exponent
// frozen at the center) and the remainder compared across one refinement.
GridFunction build_counterexample(const CounterexampleSpec& spec, const DomainBox& domain,
                                  const ExponentField& p, const BuildOptions& opts = {});

struct DivergenceReport {
  std::vector<double> cutoffs;   // descending inner radii
  std::vector<double> modulars;  // integral of (Tf)^q over {cutoff < |x-Ay0| < eps}
  double slope = 0.0;            // log-log power fitted on the shell masses
  double predictedSlope = 0.0;   // dim - (beta - alpha)(q1v - gamma)
  bool pass = false;             // slope < 0 and <= 0.85 * predictedSlope
  double usedEps = 0.0;
  int usableCutoffs = 0;
};

// Measures the growth of the target-space modular of Tf on shrinking annuli
// around Ay0. The exponent field supplies q pointwise, so an invariant field
// yields the convergent control case.
DivergenceReport divergence_experiment(const CounterexampleSpec& spec, const GridFunction& f,
                                       const ExponentField& p, std::vector<double> cutoffs,
                                       long outputResolution = 4096,
                                       const KernelApplyConfig& ap = {});

struct OrbitViolation {
  Vec point;
  std::vector<double> orbit;  // p along y, Ay, ..., A^N y
  int increaseIndex = 0;      // k with the largest rise p(A^{k+1}y) - p(A^k y)
};

struct NecessityReport {
  int samples = 0;
  double maxDeviation = 0.0;  // max |p(Ay) - p(y)| over the sample
  std::vector<OrbitViolation> violations;
};

// For A with A^N = I: any sampled y with p(Ay) != p(y) forces a strict rise
// somewhere along its orbit (the orbit closes), which is incompatible with
// boundedness; every such point is reported with its orbit.
NecessityReport necessity_scan(const ExponentField& p, const Matrix& A, int N, int samples,
                               const DomainBox& box, std::uint64_t seed = 2026,
                               double tol = 1e-9);

}  // namespace varlex
