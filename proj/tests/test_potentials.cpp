#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <functional>
#include <numbers>

#include "latwave/potentials.hpp"

using namespace latwave;

namespace {

// test-side composite Simpson rule, independent of the library quadrature
double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("curvature values at zero for the built-in models") {
  CHECK(registry("ex1").psi2(0.0) == 1.0);
  CHECK(registry("ex2").psi2(0.0) == 1.0);
  CHECK(registry("ex3").psi2(0.0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(registry("linear:0.8").psi2(3.7) == 0.8);
}

TEST_CASE("registry metadata") {
  PotentialModel ex1 = registry("ex1");
  REQUIRE(ex1.bounds().has_value());
  CHECK(ex1.bounds()->low == 0.5);
  CHECK(ex1.bounds()->high == 1.0);
  CHECK_FALSE(ex1.nonuniform());

  PotentialModel ex3 = registry("ex3");
  CHECK(ex3.nonuniform());

  PotentialModel quartic = registry("quartic");
  CHECK(quartic.side() == PotentialSide::primal);
  CHECK(quartic.flux(1.0) == 2.0);
  CHECK_THROWS_AS(quartic.psi2(0.0), UnsupportedSide);

  CHECK(registry("linear(2.0)").psi1(3.0) == 6.0);
  CHECK_THROWS_AS(registry("nosuch"), UnknownModel);
  CHECK_THROWS_AS(registry("linear:abc"), UnknownModel);
  CHECK_THROWS_AS(registry("linear:-1"), InvalidModel);
}

TEST_CASE("dual derivative against an independent quadrature oracle") {
  // psi_q'(zeta) = int_0^zeta psi''(q + s) ds, checked by test-side Simpson sums
  for (const char* name : {"ex1", "ex2", "ex3"}) {
    PotentialModel m = registry(name);
    for (double q : {0.0, 0.6}) {
      for (double z : {-2.0, -0.5, 1.0, 2.5}) {
        const double oracle = simpson([&](double s) { return m.psi2(q + s); }, 0.0, z);
        CHECK(m.psi_q_prime(q, z) == Catch::Approx(oracle).margin(1e-12));
      }
    }
  }
}

TEST_CASE("normalization and frozen values of the dual derivative") {
  PotentialModel ex1 = registry("ex1");
  CHECK(ex1.psi_q_prime(0.0, 0.0) == 0.0);
  CHECK(ex1.psi_q_prime(0.0, 1.0) == Catch::Approx(0.8734120664062135).margin(1e-12));
  PotentialModel lin = registry("linear:1.7");
  CHECK(lin.psi_q_prime(2.3, 4.0) == Catch::Approx(1.7 * 4.0).margin(1e-13));
}

TEST_CASE("dual potential against a nested quadrature oracle") {
  PotentialModel ex1 = registry("ex1");
  CHECK(ex1.psi_q(0.0, 0.0) == 0.0);
  const double nested =
      simpson([&](double s) { return ex1.psi_q_prime(0.0, s); }, 0.0, 1.0);
  CHECK(ex1.psi_q(0.0, 1.0) == Catch::Approx(nested).margin(1e-10));
  CHECK(ex1.psi_q(0.0, 1.0) == Catch::Approx(0.4653819266990741).margin(1e-12));
  CHECK(ex1.psi_q(0.0, 1.0) > 0.0);

  PotentialModel lin = registry("linear:2.0");
  for (double z : {-3.0, 0.5, 2.0})
    CHECK(lin.psi_q(0.9, z) == Catch::Approx(0.5 * 2.0 * z * z).margin(1e-13));
}

TEST_CASE("tabulated reconstruction matches a known closed form") {
  // run the generic cached-antiderivative path on the ex1 curvature and compare
  PotentialModel closed = registry("ex1");
  PotentialModel tab = PotentialModel::dual_tabulated(
      "ex1-tabulated", [](double z) { return 0.5 + 0.5 * std::exp(-z * z); });
  for (double z = -6.0; z <= 6.0; z += 0.37) {
    CHECK(tab.psi1(z) == Catch::Approx(closed.psi1(z)).margin(1e-12));
    CHECK(tab.psi(z) == Catch::Approx(closed.psi(z)).margin(1e-12));
  }
}

TEST_CASE("ex2 and ex3 against independently derived antiderivatives") {
  PotentialModel ex2 = registry("ex2");
  CHECK(ex2.psi1(1.0) == Catch::Approx(0.7756586173321274).margin(1e-12));
  CHECK(ex2.psi(1.0) == Catch::Approx(0.41634138475465887).margin(1e-12));
  PotentialModel ex3 = registry("ex3");
  CHECK(ex3.psi1(1.0) == Catch::Approx(0.2986320123663313).margin(1e-13));
  CHECK(ex3.psi(1.0) == Catch::Approx(0.06598267284983234).margin(1e-13));
}

TEST_CASE("shift identity of the normalized dual potential") {
  for (const char* name : {"ex1", "ex2", "ex3"}) {
    PotentialModel m = registry(name);
    for (double q : {-1.0, 0.3}) {
      for (double z : {-1.5, 0.7, 2.0}) {
        CHECK(m.psi_q_prime(q, z) ==
              Catch::Approx(m.psi1(q + z) - m.psi1(q)).margin(1e-13));
      }
    }
  }
}

TEST_CASE("primal flux: direct, linear, and round-trip inversion") {
  PotentialModel lin = registry("linear:1.0");
  CHECK(lin.flux(2.0) == Catch::Approx(2.0).margin(1e-12));

  PotentialModel quartic = registry("quartic");
  CHECK(quartic.flux(1.0) == 2.0);  // u + u^3 at u = 1

  PotentialModel ex1 = registry("ex1");
  for (double z : {-2.0, -1.0, 0.0, 1.0, 2.0})
    CHECK(ex1.flux(ex1.psi1(z)) == Catch::Approx(z).margin(1e-10));
}

TEST_CASE("flux warm start agrees with the bracketed solve") {
  PotentialModel ex2 = registry("ex2");
  for (double w : {-2.0, 0.3, 1.8}) {
    const double cold = ex2.flux(w);
    CHECK(ex2.flux(w, cold + 0.05) == Catch::Approx(cold).margin(1e-10));
  }
}

TEST_CASE("legendre consistency of the primal potential") {
  // phi(u) recovered through duality must differentiate back to flux
  PotentialModel ex1 = registry("ex1");
  for (double u : {-1.0, 0.4, 1.7}) {
    const double h = 1e-6;
    const double numeric =
        (ex1.flux_potential(u + h) - ex1.flux_potential(u - h)) / (2.0 * h);
    CHECK(numeric == Catch::Approx(ex1.flux(u)).margin(1e-8));
  }
  CHECK(ex1.flux_potential(0.0) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("convexity floor from the curvature bounds") {
  PotentialModel ex1 = registry("ex1");
  for (double z : {-3.0, -0.5, 0.25, 2.0}) {
    CHECK(ex1.psi_q(0.0, z) >= 0.0);
    CHECK(ex1.psi_q(0.0, z) >= 0.5 * ex1.bounds()->low * z * z - 1e-12);
  }
}

TEST_CASE("evaluation cap and bracket failures") {
  PotentialModel ex3 = registry("ex3");
  CHECK_THROWS_AS(ex3.psi1(60.0), RangeCap);
  CHECK_THROWS_AS(ex3.flux(1e30), RootBracketFailure);
}

TEST_CASE("custom expression models") {
  PotentialModel m = registry("psi2:0.5+0.5*exp(-zeta^2)");
  PotentialModel ex1 = registry("ex1");
  CHECK(m.psi1(1.2) == Catch::Approx(ex1.psi1(1.2)).margin(1e-12));
  CHECK_FALSE(m.nonuniform());

  PotentialModel degenerate = registry("psi2:x^2");
  CHECK(degenerate.nonuniform());

  CHECK_THROWS_AS(registry("psi2:-1"), InvalidModel);

  PotentialModel prim = registry("phi1:u+u^3");
  CHECK(prim.flux(1.0) == 2.0);
  CHECK(prim.flux_potential(1.0) == Catch::Approx(0.75).margin(1e-12));
  CHECK(prim.flux_second(1.0) == Catch::Approx(4.0).margin(1e-6));
}

TEST_CASE("quadrature verification rejects rough integrands") {
  CHECK_THROWS_AS(PotentialModel::dual_tabulated(
                      "rough", [](double z) { return z > 0.03 ? 1.0 : 0.5; }),
                  QuadratureFailure);
}
