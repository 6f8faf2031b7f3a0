#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "varlex/matrix.hpp"
#include "varlex/maximal.hpp"

using namespace varlex;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("matrix") {

TEST_CASE("basic algebra") {
  Matrix A = Matrix::general(1.0, 2.0, 3.0, 4.0);
  CHECK(det(A) == doctest::Approx(-2.0));
  Matrix Ai = inverse(A);
  Matrix I = multiply(A, Ai);
  CHECK(I.a[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(I.a[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(I.a[3] == doctest::Approx(1.0).epsilon(1e-12));

  Vec v = apply(Matrix::rotation(kPi / 2.0), Vec(1.0, 0.0));
  CHECK(v[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(frobenius(Matrix::identity(2)) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS(inverse(Matrix::general(1.0, 2.0, 2.0, 4.0)));
}

TEST_CASE("spectral norm by power iteration") {
  CHECK(spectral_norm(Matrix::scalar1d(-2.0)) == doctest::Approx(2.0));
  CHECK(spectral_norm(Matrix::rotation(0.7)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(spectral_norm(Matrix::diagonal(2.0, 0.5)) == doctest::Approx(2.0).epsilon(1e-10));
  // sharp value for a shear: ||[1,1;0,1]|| = golden ratio
  double phi = 0.5 * (1.0 + std::sqrt(5.0));
  CHECK(spectral_norm(Matrix::general(1.0, 1.0, 0.0, 1.0)) ==
        doctest::Approx(phi).epsilon(1e-10));
}

TEST_CASE("family validation") {
  MatrixFamily ok = make_family(
      2, {Matrix::identity(2), Matrix::general(2.0, 0.0, 0.0, 2.0)});
  CHECK(ok.mats.size() == 2);

  CHECK_THROWS_WITH_AS(make_family(2, {Matrix::identity(2), Matrix::identity(2)}),
                       doctest::Contains("difference of matrices 1 and 2"),
                       std::invalid_argument);

  MatrixFamily three = make_family(
      2, {Matrix::identity(2), Matrix::general(-1.0, 0.0, 0.0, -1.0), Matrix::rotation(kPi / 2)});
  CHECK(three.mats.size() == 3);

  CHECK_THROWS_WITH_AS(make_family(2, {Matrix::general(1.0, 2.0, 2.0, 4.0)}),
                       doctest::Contains("matrix 1 is singular"), std::invalid_argument);
}

TEST_CASE("determinant bookkeeping: D equals 1/C") {
  MatrixFamily single = make_family(1, {Matrix::scalar1d(3.0)});
  CHECK(single.D * single.C == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(single.D == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  MatrixFamily fam = make_family(2, {Matrix::diagonal(2.0, 0.5), Matrix::diagonal(3.0, 3.0)});
  CHECK(fam.C == doctest::Approx(1.0).epsilon(1e-12));  // min |det| = 1
  CHECK(fam.D == doctest::Approx(1.0 / fam.C).epsilon(1e-12));
}

TEST_CASE("compose against set images") {
  DomainBox b(1, Vec(-2.0), Vec(2.0), {512, 1});
  GridFunction chi = indicator(b, BoxRegion{Vec(0.0), Vec(1.0)});

  GridFunction same = compose(chi, Matrix::scalar1d(1.0));
  for (long i = 0; i < b.cellCount(); ++i) CHECK(same[i] == doctest::Approx(chi[i]));

  // f(2x) = indicator of [0, 1/2], up to one cell at each edge
  GridFunction half = compose(chi, Matrix::scalar1d(2.0));
  double h = b.width(0);
  for (long i = 0; i < b.cellCount(); ++i) {
    double x = b.midpoint(i)[0];
    if (x > h && x < 0.5 - h) CHECK(half[i] == doctest::Approx(1.0));
    if (x < -h || x > 0.5 + h) CHECK(half[i] == doctest::Approx(0.0));
  }

  // radial profile is preserved by rotations away from the boundary
  DomainBox b2(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {64, 64});
  GridFunction rad = sample(b2, [](const Vec& x) {
    double r = std::hypot(x[0], x[1]);
    return std::exp(-4.0 * r * r);
  });
  GridFunction rot = compose(rad, Matrix::rotation(kPi / 3.0));
  for (long i = 0; i < b2.cellCount(); ++i) {
    Vec x = b2.midpoint(i);
    if (std::hypot(x[0], x[1]) > 0.9) continue;  // image leaves the box near corners
    CHECK(rot[i] == doctest::Approx(rad[i]).epsilon(0.05).scale(1.0));
  }
}

TEST_CASE("compose round trip error is O(h)") {
  DomainBox b(1, Vec(-2.0), Vec(2.0), {1024, 1});
  // Lipschitz profile with constant 1, supported well inside the box
  GridFunction f = sample(b, [](const Vec& x) {
    return std::max(0.0, 1.0 - std::abs(x[0]));
  });
  Matrix A = Matrix::scalar1d(1.25);
  GridFunction back = compose(compose(f, A), inverse(A));
  double h = b.width(0);
  double worst = 0.0;
  for (long i = 0; i < b.cellCount(); ++i) {
    double x = b.midpoint(i)[0];
    if (std::abs(x) > 1.5) continue;  // round trip leaves the domain near edges
    worst = std::max(worst, std::abs(back[i] - f[i]));
  }
  CHECK(worst <= 10.0 * h * 1.0);
}

TEST_CASE("maximal commutation bound") {
  DomainBox b(1, Vec(-4.0), Vec(4.0), {256, 1});
  GridFunction chi = indicator(b, BoxRegion{Vec(0.0), Vec(1.0)});

  CommutationReport idrep = composition_maximal_check(chi, Matrix::scalar1d(1.0), {});
  CHECK(idrep.cTheory == doctest::Approx(1.0));
  CHECK(idrep.cEmpirical <= 1.0 + 1e-9);
  CHECK(idrep.pass);

  // A = (2): cTheory = ||A||^n |det A^-1| = 2 * (1/2) = 1
  CommutationReport two = composition_maximal_check(chi, Matrix::scalar1d(2.0), {});
  CHECK(two.cTheory == doctest::Approx(1.0));
  CHECK(two.pass);

  // Orthogonal matrix on a radial profile. Square windows reach farther along
  // diagonals, so a rotation only commutes tightly when the profile has
  // bounded contrast; a floor keeps every window average within a 2:1 band.
  DomainBox b2(2, Vec(-2.0, -2.0), Vec(2.0, 2.0), {64, 64});
  GridFunction rad = sample(b2, [](const Vec& x) {
    double r = std::hypot(x[0], x[1]);
    double c = std::cos(0.25 * kPi * std::min(r, 2.0));
    return 1.0 + c * c;
  });
  CommutationReport orth = composition_maximal_check(rad, Matrix::rotation(kPi / 3.0), {});
  CHECK(orth.cTheory == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(orth.cEmpirical <= 1.15);
  CHECK(orth.pass);

  // anisotropic diagonal map: theory constant 4 absorbs the square-window slack
  GridFunction cone = sample(b2, [](const Vec& x) {
    double r = std::hypot(x[0], x[1]);
    return r < 1.0 ? 1.0 - r : 0.0;
  });
  CommutationReport dg = composition_maximal_check(cone, Matrix::diagonal(2.0, 0.5), {});
  CHECK(dg.cTheory == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(dg.pass);
}

}  // TEST_SUITE
