#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subdyn/continuum.hpp"

using namespace subdyn;

namespace {
const double pi = std::numbers::pi;
QuadratureSpec quad() { return QuadratureSpec{}; }
// rho(w) = w e^{-w}: its transform has a closed form through the exponential integral,
// checked here against values independent of the quadrature.
cplx rho(cplx w) { return w * std::exp(-w); }
}  // namespace

TEST_SUITE("continuum") {
  TEST_CASE("band integral of a known density") {
    auto f = [](double w) -> cplx { return w * std::exp(-w); };
    CHECK(std::abs(integrate_band(f, quad()) - 1.0) < 1e-12);
    CHECK(std::abs(integrate(f, 0.0, 1.0, quad()) - (1.0 - 2.0 / std::exp(1.0))) < 1e-14);
  }

  TEST_CASE("off-axis transform matches the direct integral") {
    // int_0^inf w e^{-w} / (w - i) dw = 1 + i e^{-i} E1(-i)
    const cplx v = cauchy(rho, cplx(0.0, 1.0), Side::above, quad());
    CHECK(v.real() == doctest::Approx(0.378550375764).epsilon(1e-10));
    CHECK(v.imag() == doctest::Approx(0.343377961556).epsilon(1e-10));
  }

  TEST_CASE("boundary values differ by 2 pi i rho on the band") {
    for (double x : {0.3, 1.0, 4.0}) {
      const cplx a = cauchy_real(rho, x, Side::above, quad());
      const cplx b = cauchy_real(rho, x, Side::below, quad());
      CHECK(std::abs((a - b) - cplx(0.0, 2.0 * pi) * rho(x)) < 1e-12);
      CHECK(std::abs(a.real() - b.real()) < 1e-12);
    }
  }

  TEST_CASE("continuation is analytic across the band") {
    // Approaching x from above and continuing from below give the same limit.
    const double x = 1.0;
    const cplx up = cauchy(rho, cplx(x, 1e-7), Side::above, quad());
    const cplx down = cauchy(rho, cplx(x, -1e-7), Side::above, quad());
    CHECK(std::abs(up - down) < 1e-6);
    const cplx edge = cauchy_real(rho, x, Side::above, quad());
    CHECK(std::abs(up - edge) < 1e-6);
  }

  TEST_CASE("principal value below the band is real") {
    const cplx v = cauchy_real(rho, -1.0, Side::above, quad());
    // int_0^inf w e^{-w}/(w+1) dw = 1 - e E1(1) = 0.403652637676806
    CHECK(std::abs(v.imag()) < 1e-15);
    CHECK(v.real() == doctest::Approx(0.403652637676806).epsilon(1e-11));
  }

  TEST_CASE("extrapolation to the real axis") {
    auto g = [](cplx z) { return std::exp(z) + z * z; };
    const auto e = boundary_limit(g, 0.5, {1e-2, 1e-3, 1e-4});
    CHECK(std::abs(e.value - g(0.5)) < 1e-9);
    CHECK(e.error < 1e-6);
  }

  TEST_CASE("derivative and residue helpers") {
    auto f = [](cplx z) { return std::sin(z); };
    const cplx z(0.3, -0.2);
    CHECK(std::abs(holomorphic_derivative(f, z) - std::cos(z)) < 1e-8);
    const cplx p(1.0, -0.01);
    auto h = [&](cplx w) { return std::exp(w) / (w - p); };
    CHECK(std::abs(residue_limit(h, p) - std::exp(p)) < 1e-8);
  }
}
