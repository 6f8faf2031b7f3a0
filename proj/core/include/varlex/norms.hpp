#pragma once

#include <vector>

#include "varlex/exponent.hpp"
#include "varlex/grid.hpp"

namespace varlex {

struct ModularValue {
  double value = 0.0;
  bool finite = true;  // false when the sum saturated to +inf (not an error)
};

// rho(f/lambda) = sum (|f_i|/lambda)^{p(x_i)} * cellVolume, row-major order
ModularValue modular(const GridFunction& f, const ExponentField& p, double lambda);

struct LuxemburgOptions {
  double tol = 1e-9;  // acceptance band |modular - 1| <= tol
  int maxIter = 200;  // bisection steps after bracketing
};

// inf{lambda > 0 : modular(f, p, lambda) <= 1}; 0 for the zero function.
// Bisection starts from [max|f| * min(1,|O|), max|f| * max(1,|O|)] (|O| the
// box volume), expands geometrically until the modular straddles 1, and
// throws with the bracket state if the band is never hit.
double luxemburg_norm(const GridFunction& f, const ExponentField& p,
                      const LuxemburgOptions& opts = {});

struct WeakQuasinormResult {
  double value = 0.0;
  double worstT = 0.0;  // level achieving the max
};

// sup over the level grid of t * ||indicator{g > t}||_q
WeakQuasinormResult weak_quasinorm(const GridFunction& g, const ExponentField& q,
                                   const std::vector<double>& tGrid);

// log-spaced levels spanning [maxValue/span, maxValue]
std::vector<double> log_levels(double maxValue, int count = 16, double span = 1e3);

}  // namespace varlex
