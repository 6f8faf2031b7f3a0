#pragma once

#include <vector>

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"
#include "varlex/matrix.hpp"
#include "varlex/maximal.hpp"

namespace varlex {

// Product-power kernel prod_i |x - A_i y|^{-alphas[i]}. The operator order
// alpha = dim - sum(alphas) must land in [0, dim); each factor exponent must
// lie in (0, dim).
struct KernelSpec {
  MatrixFamily family;
  std::vector<double> alphas;
  double alpha = 0.0;
};

KernelSpec make_kernel(MatrixFamily family, std::vector<double> alphas);
// single factor |x - Ay|^{-(dim-alpha)} of order alpha in (0, dim)
KernelSpec single_matrix_kernel(const Matrix& A, double alpha);

struct KernelApplyConfig {
  int threads = 1;
};

struct KernelApplyResult {
  GridFunction value;
  // |f|-mass of the near-singular cells excluded at each output midpoint
  GridFunction skippedMass;
  double skippedMassMax = 0.0;
  double skippedMassMaxRel = 0.0;  // relative to the total |f|-mass, 0 for f == 0
};

// input box dilated about its center by max(1, max_i ||A_i||), same cell
// counts, so the images A_i(supp f) stay interior
DomainBox default_output_box(const KernelSpec& k, const DomainBox& in);

// Midpoint quadrature of the kernel integral at every output midpoint. Cells
// with |x - A_i y| < h for any factor (h = the input grid's largest cell
// width) are excluded and their |f|-mass reported instead. Cost is
// O(outputs x nonzero cells); resolutions above 8192 (1d) or 128 per axis
// (2d) are rejected.
KernelApplyResult apply_kernel(const GridFunction& f, const KernelSpec& k,
                               const DomainBox& out, const KernelApplyConfig& cfg = {});

// same quadrature and exclusion rule at a single point
double apply_kernel_at(const GridFunction& f, const KernelSpec& k, const Vec& x);

struct DominationReport {
  double lhs = 0.0;         // integral of |Tf|^p w
  double rhs = 0.0;         // sum_j integral of (frac maximal f)^p (w o A_j)
  double cEmpirical = 0.0;  // lhs / rhs
  bool trivial = false;     // f == 0, both sides vanish
  double skippedMassMaxRel = 0.0;
};

// Quadrature check that the weighted p-mass of Tf is controlled by the
// composed-weight p-masses of the fractional maximal function.
DominationReport maximal_domination_check(const GridFunction& f, const KernelSpec& k,
                                          const GridFunction& w, double p,
                                          const MaximalConfig& m = {},
                                          const KernelApplyConfig& ap = {});

struct BoundCheckReport {
  std::vector<double> ratios;  // target norm / source norm, one per test function
  double maxRatio = 0.0;
  double refinedMaxRatio = 0.0;
  double refinementDelta = 0.0;  // |refined - base| / base
  bool stableUnderRefinement = false;
  double skippedMassMaxRel = 0.0;  // worst over every kernel application
};

struct SweepConfig {
  double refinementTol = 0.10;   // stability threshold on maxRatio drift
  double invarianceTol = 1e-7;   // |p(A_i x) - p(x)| allowed before rejecting
  int weakLevels = 16;           // level grid size for the weak quasi-norm
  double weakSpan = 1e3;
  KernelApplyConfig apply;
};

// ||Tf||_{q} / ||f||_{p} over the family with q the Sobolev image of p, plus
// the same ratios after one 2x grid refinement of each test function.
BoundCheckReport strong_bound_sweep(const std::vector<GridFunction>& testFamily,
                                    const KernelSpec& k, const ExponentField& p,
                                    const SweepConfig& cfg = {});

// sup_t t ||indicator{Tf > t}||_q / ||f||_p with log-spaced levels over the
// range of Tf
BoundCheckReport weak_bound_sweep(const std::vector<GridFunction>& testFamily,
                                  const KernelSpec& k, const ExponentField& p,
                                  const SweepConfig& cfg = {});

}  // namespace varlex
