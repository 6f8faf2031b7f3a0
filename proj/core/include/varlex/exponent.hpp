#pragma once

#include <functional>
#include <string>
#include <vector>

#include "varlex/grid.hpp"

namespace varlex {

// Exponents above this value behave as the essential-sup endpoint: the power
// (t)^cap underflows to 0 for t < 1 and overflows for t > 1 at double
// precision, which is exactly the modular convention for infinite exponents.
inline constexpr double kExponentCap = 1e6;

// Pointwise exponent p(x) with cached essential bounds over its reference
// box. Closed-form descriptors stay evaluable off-grid, which matrix
// composition needs.
struct ExponentField {
  std::function<double(const Vec&)> eval;
  double pMinus = 1.0;
  double pPlus = 1.0;
  std::string describe = "constant(1)";

  double operator()(const Vec& x) const { return eval(x); }
};

ExponentField constant_exponent(double c);
// a + b / (1 + |x|); bounds taken over `box`
ExponentField radial_exponent(double a, double b, const DomainBox& box);
// step function of the first coordinate: value[i] on [breaks[i-1], breaks[i])
ExponentField piecewise_exponent(std::vector<double> breaks, std::vector<double> values);
// continuous piecewise-linear interpolation of (node, value) pairs in the
// first coordinate, constant beyond the end nodes
ExponentField pwlinear_exponent(std::vector<double> nodes, std::vector<double> values);
// multilinear interpolation of a stored grid; queries are clamped into the box
ExponentField table_exponent(GridFunction table);
ExponentField custom_exponent(std::function<double(const Vec&)> fn, double pMinus, double pPlus,
                              std::string describe);

// Holder conjugate p/(p-1); requires pMinus > 1
ExponentField conjugate(const ExponentField& p);

struct DerivedExponents {
  ExponentField q;          // pointwise n p / (n - alpha p)
  double q0 = 0.0;          // q evaluated at pMinus
  ExponentField qTilde;     // q / q0, touches 1 where p attains pMinus
  ExponentField qTildeConj; // pointwise conjugate of qTilde, capped at kExponentCap
};

// requires 0 <= alpha < dim and pPlus < dim/alpha when alpha > 0
DerivedExponents sobolev_exponent(const ExponentField& p, double alpha, int dim);

struct LogHolderReport {
  double cLocal = 0.0;     // sup |p(x)-p(y)| * (-log|x-y|) over sampled |x-y| < 1/2
  double cInfinity = 0.0;  // sup |p(x)-p(y)| * log(e+|x|) over sampled |y| >= |x|
  Vec worstLocalX, worstLocalY;
  Vec worstInfX, worstInfY;
};

struct LogHolderOptions {
  long pairsPerScale = 64;
  int scales = 24;  // pair separations 2^-1 .. 2^-scales
  std::uint64_t seed = 1;
};

LogHolderReport check_log_holder(const ExponentField& p, const DomainBox& box,
                                 const LogHolderOptions& opts = {});

struct Matrix;  // matrix.hpp

struct InvarianceReport {
  double maxDeviation = 0.0;
  Vec worst;
  bool pass = true;
};

// max |p(Ax) - p(x)| over the midpoints of `box`
InvarianceReport check_matrix_invariance(const ExponentField& p, const Matrix& A,
                                         const DomainBox& box, double tol = 1e-9);

}  // namespace varlex
