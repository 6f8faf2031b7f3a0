#pragma once

#include <string>
#include <vector>

#include "varlex/grid.hpp"

namespace varlex {

// Row-major n x n matrix, n <= 2. 1d matrices use a[0] only.
struct Matrix {
  int dim = 1;
  double a[4] = {1.0, 0.0, 0.0, 1.0};

  static Matrix identity(int dim);
  static Matrix scalar1d(double c);
  static Matrix rotation(double theta);           // 2d
  static Matrix diagonal(double d0, double d1);   // 2d
  static Matrix general(double a00, double a01, double a10, double a11);  // 2d
};

Vec apply(const Matrix& A, const Vec& x);
double det(const Matrix& A);
Matrix inverse(const Matrix& A);
Matrix multiply(const Matrix& A, const Matrix& B);
Matrix subtract(const Matrix& A, const Matrix& B);
double frobenius(const Matrix& A);
// operator norm via power iteration on A^T A (200 iterations, tol 1e-12)
double spectral_norm(const Matrix& A);
std::string format(const Matrix& A);

// Finite family {A_1, ..., A_m}; every member and every pairwise difference
// must be invertible (thresholded at 1e-12 relative to the norm scale).
struct MatrixFamily {
  int dim = 1;
  std::vector<Matrix> mats;
  std::vector<double> norms;  // spectral norms
  std::vector<double> dets;
  double C = 1.0;  // min |det A_j|
  double D = 1.0;  // max |det A_j^{-1}| = 1/C
};

MatrixFamily make_family(int dim, std::vector<Matrix> mats);

// x -> f(Ax) sampled at the midpoints of f's own domain, multilinear
// interpolation inside, zero outside
GridFunction compose(const GridFunction& f, const Matrix& A);

struct MaximalConfig;  // maximal.hpp

struct CommutationReport {
  double cEmpirical = 0.0;
  double cTheory = 0.0;     // ||A||^n |det A^{-1}|
  bool pass = false;
  long pointsUsed = 0;      // midpoints x with Ax inside the domain
};

// Empirical constant in M(f∘A) <= c (Mf)∘A over midpoints whose image Ax
// stays inside the domain; passes when cEmpirical <= cTheory (1 + gridSlack).
CommutationReport composition_maximal_check(const GridFunction& f, const Matrix& A,
                                            const MaximalConfig& cfg, double gridSlack = 0.15);

}  // namespace varlex
