#include "varlex/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "varlex/maximal.hpp"

namespace varlex {

Matrix Matrix::identity(int dim) {
  Matrix m;
  m.dim = dim;
  return m;
}

Matrix Matrix::scalar1d(double c) {
  Matrix m;
  m.dim = 1;
  m.a[0] = c;
  return m;
}

Matrix Matrix::rotation(double theta) {
  Matrix m;
  m.dim = 2;
  double c = std::cos(theta), s = std::sin(theta);
  m.a[0] = c;
  m.a[1] = -s;
  m.a[2] = s;
  m.a[3] = c;
  return m;
}

Matrix Matrix::diagonal(double d0, double d1) {
  Matrix m;
  m.dim = 2;
  m.a[0] = d0;
  m.a[1] = 0.0;
  m.a[2] = 0.0;
  m.a[3] = d1;
  return m;
}

Matrix Matrix::general(double a00, double a01, double a10, double a11) {
  Matrix m;
  m.dim = 2;
  m.a[0] = a00;
  m.a[1] = a01;
  m.a[2] = a10;
  m.a[3] = a11;
  return m;
}

Vec apply(const Matrix& A, const Vec& x) {
  if (A.dim == 1) return Vec(A.a[0] * x[0]);
  return Vec(A.a[0] * x[0] + A.a[1] * x[1], A.a[2] * x[0] + A.a[3] * x[1]);
}

double det(const Matrix& A) {
  return A.dim == 1 ? A.a[0] : A.a[0] * A.a[3] - A.a[1] * A.a[2];
}

Matrix inverse(const Matrix& A) {
  double d = det(A);
  if (d == 0.0) throw std::invalid_argument("inverse: singular matrix");
  Matrix m;
  m.dim = A.dim;
  if (A.dim == 1) {
    m.a[0] = 1.0 / d;
    return m;
  }
  m.a[0] = A.a[3] / d;
  m.a[1] = -A.a[1] / d;
  m.a[2] = -A.a[2] / d;
  m.a[3] = A.a[0] / d;
  return m;
}

Matrix multiply(const Matrix& A, const Matrix& B) {
  if (A.dim != B.dim) throw std::invalid_argument("multiply: dimension mismatch");
  Matrix m;
  m.dim = A.dim;
  if (A.dim == 1) {
    m.a[0] = A.a[0] * B.a[0];
    return m;
  }
  m.a[0] = A.a[0] * B.a[0] + A.a[1] * B.a[2];
  m.a[1] = A.a[0] * B.a[1] + A.a[1] * B.a[3];
  m.a[2] = A.a[2] * B.a[0] + A.a[3] * B.a[2];
  m.a[3] = A.a[2] * B.a[1] + A.a[3] * B.a[3];
  return m;
}

Matrix subtract(const Matrix& A, const Matrix& B) {
  if (A.dim != B.dim) throw std::invalid_argument("subtract: dimension mismatch");
  Matrix m;
  m.dim = A.dim;
  for (int i = 0; i < 4; ++i) m.a[i] = A.a[i] - B.a[i];
  return m;
}

double frobenius(const Matrix& A) {
  if (A.dim == 1) return std::abs(A.a[0]);
  return std::sqrt(A.a[0] * A.a[0] + A.a[1] * A.a[1] + A.a[2] * A.a[2] + A.a[3] * A.a[3]);
}

double spectral_norm(const Matrix& A) {
  if (A.dim == 1) return std::abs(A.a[0]);
  // power iteration on A^T A
  double g00 = A.a[0] * A.a[0] + A.a[2] * A.a[2];
  double g01 = A.a[0] * A.a[1] + A.a[2] * A.a[3];
  double g11 = A.a[1] * A.a[1] + A.a[3] * A.a[3];
  double v0 = 1.0, v1 = 0.7071067811865476;
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    double w0 = g00 * v0 + g01 * v1;
    double w1 = g01 * v0 + g11 * v1;
    double nw = std::sqrt(w0 * w0 + w1 * w1);
    if (nw == 0.0) return 0.0;
    w0 /= nw;
    w1 /= nw;
    double next = (g00 * w0 + g01 * w1) * w0 + (g01 * w0 + g11 * w1) * w1;
    if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
    v0 = w0;
    v1 = w1;
  }
  return std::sqrt(lambda);
}

std::string format(const Matrix& A) {
  char buf[128];
  if (A.dim == 1)
    std::snprintf(buf, sizeof buf, "[%.12g]", A.a[0]);
  else
    std::snprintf(buf, sizeof buf, "[%.12g,%.12g;%.12g,%.12g]", A.a[0], A.a[1], A.a[2], A.a[3]);
  return buf;
}

MatrixFamily make_family(int dim, std::vector<Matrix> mats) {
  if (mats.empty()) throw std::invalid_argument("make_family: family must be nonempty");
  MatrixFamily fam;
  fam.dim = dim;
  fam.mats = std::move(mats);
  double n = static_cast<double>(dim);
  for (std::size_t i = 0; i < fam.mats.size(); ++i) {
    const Matrix& A = fam.mats[i];
    if (A.dim != dim) throw std::invalid_argument("make_family: matrix dimension mismatch");
    double nm = spectral_norm(A);
    double dt = det(A);
    // det scales like norm^n, so the singularity threshold does too
    double scale = std::max(1.0, std::pow(std::max(nm, frobenius(A)), n));
    if (std::abs(dt) <= 1e-12 * scale)
      throw std::invalid_argument("make_family: matrix " + std::to_string(i + 1) +
                                  " is singular");
    fam.norms.push_back(nm);
    fam.dets.push_back(dt);
  }
  for (std::size_t i = 0; i < fam.mats.size(); ++i)
    for (std::size_t j = i + 1; j < fam.mats.size(); ++j) {
      Matrix d = subtract(fam.mats[i], fam.mats[j]);
      double scale = std::max(1.0, std::pow(frobenius(d), n));
      if (std::abs(det(d)) <= 1e-12 * scale)
        throw std::invalid_argument("make_family: difference of matrices " +
                                    std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                    " is singular");
    }
  fam.C = std::abs(fam.dets[0]);
  for (double dt : fam.dets) fam.C = std::min(fam.C, std::abs(dt));
  fam.D = 1.0 / fam.C;
  return fam;
}

GridFunction compose(const GridFunction& f, const Matrix& A) {
  if (A.dim != f.domain.dim)
    throw std::invalid_argument("compose: matrix/grid dimension mismatch");
  GridFunction g = make_grid(f.domain);
  long n = f.domain.cellCount();
  for (long i = 0; i < n; ++i) g[i] = interp(f, apply(A, f.domain.midpoint(i)));
  return g;
}

CommutationReport composition_maximal_check(const GridFunction& f, const Matrix& A,
                                            const MaximalConfig& cfg, double gridSlack) {
  const DomainBox& box = f.domain;
  if (A.dim != box.dim)
    throw std::invalid_argument("composition_maximal_check: dimension mismatch");
  GridFunction mf = hl_maximal(f, cfg);
  GridFunction g = compose(f, A);
  GridFunction mg = hl_maximal(g, cfg);

  CommutationReport rep;
  double n = static_cast<double>(box.dim);
  rep.cTheory = std::pow(spectral_norm(A), n) / std::abs(det(A));

  double eps = 2.220446049250313e-16;
  double margin = box.maxWidth();  // keep Ax away from the boundary half-cells
  long cells = box.cellCount();
  for (long i = 0; i < cells; ++i) {
    Vec x = box.midpoint(i);
    Vec ax = apply(A, x);
    if (!box.strictlyInside(ax, margin)) continue;
    ++rep.pointsUsed;
    double denom = interp(mf, ax) + eps;
    double r = mg[i] / denom;
    rep.cEmpirical = std::max(rep.cEmpirical, r);
  }
  if (rep.pointsUsed == 0)
    throw std::runtime_error(
        "composition_maximal_check: no midpoint maps back into the domain");
  rep.pass = rep.cEmpirical <= rep.cTheory * (1.0 + gridSlack);
  return rep;
}

}  // namespace varlex
