#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "varlex/counterexample.hpp"
#include "varlex/rng.hpp"

using namespace varlex;

namespace {

// p(1) = 4/3 and p(2) = 3/2 with the rise confined to [1.25, 1.75]; the
// dilation y -> 2y moves y0 = 1 across the rise
ExponentField step_up_exponent() {
  return pwlinear_exponent({1.25, 1.75}, {4.0 / 3.0, 1.5});
}

CounterexampleSpec worked_spec() {
  return derive_spec(step_up_exponent(), Matrix::scalar1d(2.0), Vec(1.0), 0.5, 1);
}

}  // namespace

TEST_SUITE("counterexample") {

TEST_CASE("spike parameters for the dilation across a rising exponent") {
  CounterexampleSpec s = worked_spec();
  CHECK(s.dim == 1);
  CHECK(s.p0 == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(s.p1 == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(s.q0v == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(s.q1v == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(s.gamma == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.beta == doctest::Approx(29.0 / 40.0).epsilon(1e-9));
  CHECK(s.delta == doctest::Approx(1.0 / 30.0).epsilon(1e-7));
  CHECK(s.M == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.r == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.eps == doctest::Approx(0.25).epsilon(1e-12));

  // the divergence margin that the derivation re-verifies
  CHECK((s.beta - s.alpha) * (s.q1v - s.gamma) == doctest::Approx(1.125).epsilon(1e-9));
  CHECK(s.beta > s.alpha);
  CHECK(s.beta < 1.0);
  CHECK(s.eps < s.M * s.r);
}

TEST_CASE("derivation rejects invariant or falling exponents") {
  Matrix A = Matrix::scalar1d(2.0);
  CHECK_THROWS_WITH_AS(derive_spec(constant_exponent(1.5), A, Vec(1.0), 0.5, 1),
                       doctest::Contains("hypothesis not violated"), std::invalid_argument);
  ExponentField down = pwlinear_exponent({1.25, 1.75}, {1.5, 4.0 / 3.0});
  CHECK_THROWS_WITH_AS(derive_spec(down, A, Vec(1.0), 0.5, 1),
                       doctest::Contains("hypothesis not violated"), std::invalid_argument);

  CHECK_THROWS_WITH_AS(derive_spec(step_up_exponent(), A, Vec(1.0), 1.0, 1),
                       doctest::Contains("order must lie in"), std::invalid_argument);
  CHECK_THROWS_AS(derive_spec(step_up_exponent(), Matrix::identity(2), Vec(1.0), 0.5, 1),
                  std::invalid_argument);
}

TEST_CASE("derivation at order zero still leaves a divergence margin") {
  CounterexampleSpec s = derive_spec(step_up_exponent(), Matrix::scalar1d(2.0), Vec(1.0), 0.0, 1);
  CHECK(s.alpha == 0.0);
  CHECK(s.q0v == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(s.q1v == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(s.gamma > 0.0);
  CHECK(s.delta > 0.0);
  CHECK(s.beta * (s.q1v - s.gamma) > 1.0);
  CHECK(s.eps < s.M * s.r);
}

TEST_CASE("spike construction and its stability gate") {
  CounterexampleSpec s = worked_spec();
  DomainBox box(1, Vec(0.0), Vec(2.0), {4096, 1});
  GridFunction f = build_counterexample(s, box, step_up_exponent());

  // the spike is |y - y0|^{-beta} inside the ball and zero outside
  long inside = 0;
  for (long i = 0; i < box.cellCount(); ++i) {
    double d = std::abs(box.midpoint(i)[0] - 1.0);
    if (d > s.r) {
      CHECK(f[i] == 0.0);
    } else {
      ++inside;
      CHECK(f[i] == doctest::Approx(std::pow(d, -s.beta)).epsilon(1e-12));
    }
  }
  CHECK(inside == 1024);

  DomainBox narrow(1, Vec(0.0), Vec(1.1), {512, 1});
  CHECK_THROWS_WITH_AS(build_counterexample(s, narrow, step_up_exponent()),
                       doctest::Contains("source ball not inside the domain"),
                       std::invalid_argument);

  DomainBox flat(2, Vec(0.0, 0.0), Vec(2.0, 2.0), {32, 32});
  CHECK_THROWS_AS(build_counterexample(s, flat, step_up_exponent()), std::invalid_argument);

  CounterexampleSpec empty = s;
  empty.r = 0.0;
  CHECK_THROWS_WITH_AS(build_counterexample(empty, box, step_up_exponent()),
                       doctest::Contains("empty source ball"), std::invalid_argument);

  // a midpoint landing on the singularity is refused, not sampled
  CounterexampleSpec shifted = s;
  shifted.y0 = Vec(0.5);
  DomainBox tiny(1, Vec(0.0), Vec(2.0), {2, 1});
  CHECK_THROWS_WITH_AS(build_counterexample(shifted, tiny, step_up_exponent()),
                       doctest::Contains("coincides with the singularity"), std::invalid_argument);

  // beta large enough to make the source modular itself divergent is refused
  CounterexampleSpec hot = s;
  hot.beta = 0.76;
  CHECK_THROWS_WITH_AS(build_counterexample(hot, box, step_up_exponent()),
                       doctest::Contains("source modular diverges"), std::runtime_error);
}

TEST_CASE("triangle bound behind the kernel minorant") {
  // for y in B(y0, |x - Ay0| / M) every kernel distance obeys
  // |x - Ay| <= 2 |x - Ay0|, which is what freezes the kernel on small balls
  SplitMix64 rng(7);
  auto check_matrix = [&](const Matrix& A, int n, const Vec& y0, double span) {
    double M = spectral_norm(A);
    Vec ay0 = apply(A, y0);
    for (int t = 0; t < 200; ++t) {
      Vec x = ay0;
      for (int d = 0; d < n; ++d) x[d] += rng.uniform(-span, span);
      double rad = dist(x, ay0, n);
      if (rad == 0.0) continue;
      Vec y = y0;
      for (int d = 0; d < n; ++d) y[d] += rng.uniform(-1.0, 1.0) * rad / (M * std::sqrt(2.0));
      if (dist(y, y0, n) > rad / M) continue;
      CHECK(dist(x, apply(A, y), n) <= 2.0 * rad * (1.0 + 1e-12));
    }
  };
  check_matrix(Matrix::scalar1d(2.0), 1, Vec(1.0), 0.5);
  check_matrix(Matrix::general(1.1, 0.2, -0.3, 0.9), 2, Vec(0.3, -0.4), 0.5);
}

TEST_CASE("image modular grows along shrinking annuli at the predicted rate") {
  CounterexampleSpec s = worked_spec();
  DomainBox box(1, Vec(0.0), Vec(2.0), {8192, 1});
  ExponentField p = step_up_exponent();
  GridFunction f = build_counterexample(s, box, p);

  std::vector<double> cutoffs;
  for (int k = 1; k <= 6; ++k) cutoffs.push_back(s.eps / std::pow(2.0, k));

  DivergenceReport rep = divergence_experiment(s, f, p, cutoffs, 4096);
  CHECK(rep.predictedSlope == doctest::Approx(-0.125).epsilon(1e-9));
  CHECK(rep.usableCutoffs == 6);
  CHECK(rep.usedEps == s.eps);
  REQUIRE(rep.modulars.size() == cutoffs.size());
  // shrinking the inner radius only adds mass
  for (std::size_t i = 0; i + 1 < rep.modulars.size(); ++i)
    CHECK(rep.modulars[i + 1] >= rep.modulars[i]);
  CHECK(rep.slope < 0.0);
  CHECK(rep.slope <= 0.85 * rep.predictedSlope);
  CHECK(rep.slope > -0.8);
  CHECK(rep.pass);

  // the same spike measured with an invariant exponent converges instead;
  // p = 1 keeps the image exponent well inside the convergent range, away
  // from the slow transient of the frozen-kernel prefactor
  DivergenceReport control = divergence_experiment(s, f, constant_exponent(1.0), cutoffs, 4096);
  CHECK(control.slope >= 0.0);
  CHECK_FALSE(control.pass);
}

TEST_CASE("experiment input validation") {
  CounterexampleSpec s = worked_spec();
  DomainBox box(1, Vec(0.0), Vec(2.0), {1024, 1});
  ExponentField p = step_up_exponent();
  GridFunction f = build_counterexample(s, box, p);

  CHECK_THROWS_WITH_AS(divergence_experiment(s, make_grid(box), p, {0.1, 0.05, 0.02}),
                       doctest::Contains("vanishes identically"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(divergence_experiment(s, f, p, {0.1, 0.05}),
                       doctest::Contains("at least 3 cutoffs"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(divergence_experiment(s, f, p, {0.3, 0.2, 0.1}),
                       doctest::Contains("strictly between 0 and eps"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(divergence_experiment(s, f, p, {0.1, 0.1, 0.05}),
                       doctest::Contains("strictly decreasing"), std::invalid_argument);

  // cutoffs below the grid scale are counted out rather than silently fitted
  CHECK_THROWS_WITH_AS(divergence_experiment(s, f, p, {6e-3, 5e-3, 4e-3}, 512),
                       doctest::Contains("refine grid"), std::runtime_error);
}

TEST_CASE("periodic orbit scan finds exactly the moving exponents") {
  DomainBox box(2, Vec(-2.0, -2.0), Vec(2.0, 2.0), {16, 16});
  Matrix R = Matrix::rotation(std::numbers::pi / 2.0);

  ExponentField radial = radial_exponent(2.0, 1.0, box);
  NecessityReport quiet = necessity_scan(radial, R, 4, 200, box);
  CHECK(quiet.samples == 200);
  CHECK(quiet.violations.empty());
  CHECK(quiet.maxDeviation < 1e-9);

  // one-third turn closes after three steps as well
  NecessityReport third = necessity_scan(radial, Matrix::rotation(2.0 * std::numbers::pi / 3.0), 3,
                                         200, box);
  CHECK(third.violations.empty());

  ExponentField skew = custom_exponent([](const Vec& x) { return 2.0 + x[1] * x[1] / 10.0; }, 2.0,
                                       2.4, "2 + y^2/10");
  NecessityReport loud = necessity_scan(skew, R, 4, 200, box);
  CHECK(loud.maxDeviation > 0.01);
  REQUIRE(!loud.violations.empty());
  for (const OrbitViolation& v : loud.violations) {
    REQUIRE(v.orbit.size() == 5);
    // the orbit closes, so every observed rise is balanced by a drop
    CHECK(v.orbit.front() == doctest::Approx(v.orbit.back()).epsilon(1e-9));
    CHECK(v.increaseIndex >= 0);
    CHECK(v.increaseIndex < 4);
    CHECK(v.orbit[static_cast<std::size_t>(v.increaseIndex) + 1] >
          v.orbit[static_cast<std::size_t>(v.increaseIndex)]);
  }

  NecessityReport again = necessity_scan(skew, R, 4, 200, box);
  CHECK(again.violations.size() == loud.violations.size());
  CHECK(again.maxDeviation == loud.maxDeviation);

  NecessityReport self = necessity_scan(skew, Matrix::identity(2), 1, 50, box);
  CHECK(self.violations.empty());
}

TEST_CASE("orbit scan validates the period") {
  DomainBox box(1, Vec(-1.0), Vec(1.0), {16, 1});
  ExponentField p = constant_exponent(2.0);
  CHECK_THROWS_WITH_AS(necessity_scan(p, Matrix::scalar1d(2.0), 3, 10, box),
                       doctest::Contains("matrix is not periodic"), std::invalid_argument);

  DomainBox box2(2, Vec(-1.0, -1.0), Vec(1.0, 1.0), {8, 8});
  CHECK_THROWS_WITH_AS(necessity_scan(p, Matrix::rotation(std::numbers::pi / 3.0), 3, 10, box2),
                       doctest::Contains("exceeds 1e-9"), std::invalid_argument);

  CHECK_THROWS_WITH_AS(necessity_scan(p, Matrix::scalar1d(1.0), 0, 10, box),
                       doctest::Contains("period must be at least 1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(necessity_scan(p, Matrix::scalar1d(1.0), 1, 0, box),
                       doctest::Contains("at least one sample"), std::invalid_argument);
}

}  // TEST_SUITE
