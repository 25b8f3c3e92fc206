#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subdyn/errors.hpp"
#include "subdyn/greens.hpp"

using namespace subdyn;

namespace {
const double pi = std::numbers::pi;
// Frozen from tests/reference/independent_values.py (closed-form transform, mpmath roots).
const cplx kExcitedPole(0.988528167759032, -0.00281230546079349);
const cplx kExcitedResidue(0.9996598997773, -0.00256619492889617);
const double kGroundPole = -0.00797567963538115;
const cplx kThetaBar(0.0, -0.00566784830915861);
const cplx kThetaBarComposed(0.0, -0.00562461092158698);
const cplx kDelta10(0.99651718587739, -0.00281950548268562);
const cplx kA10(0.499224664416447, -0.00127707726404802);
const double kA1sq = 0.999365041854032;

ModelSpec with_g2(double g2) {
  ModelSpec s;
  s.form_factor.g2 = g2;
  return s;
}
}  // namespace

TEST_SUITE("greens") {
  TEST_CASE("excited pole and residue") {
    const ModelSpec s;
    const PoleData p = find_pole(s, Level::excited);
    CHECK(std::abs(p.location - kExcitedPole) < 1e-11);
    CHECK(std::abs(p.residue - kExcitedResidue) < 1e-8);
    CHECK(p.solver_residual < 1e-12);
    // Decay width agrees with the golden-rule rate to leading order.
    CHECK(-2.0 * p.location.imag() == doctest::Approx(2.0 * pi * eval_v2(s.form_factor, 1.0)).epsilon(0.02));
  }

  TEST_CASE("ground pole is real and shifted down") {
    const PoleData p = find_pole(ModelSpec{}, Level::ground);
    CHECK(p.location.imag() == 0.0);
    CHECK(std::abs(p.location.real() - kGroundPole) < 1e-11);
  }

  TEST_CASE("bar poles mirror the physical ones") {
    const PoleSet ps = find_all_poles(ModelSpec{});
    CHECK(ps.bar_excited.location == -std::conj(ps.excited.location));
    CHECK(ps.bar_ground.location == -ps.ground.location);
    CHECK(ps.bar_excited.kind == PoleKind::bar_excited);
    CHECK_THROWS_AS(bar_pole(ps.bar_ground), Error);
  }

  TEST_CASE("Green's function is singular at its pole") {
    const ModelSpec s;
    try {
      eval_eta_inv(with_g2(0.0), Level::excited, cplx(1.0, 0.0));
      FAIL("expected a singular error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::singular);
    }
    const auto g = eval_eta_inv(s, Level::excited, cplx(1.0, 0.5));
    CHECK_FALSE(g.continued);
    CHECK(std::abs(g.value - 1.0 / (cplx(1.0, 0.5) - 1.0 - eval_f(s, Level::excited, cplx(1.0, 0.5)).value)) < 1e-15);
  }

  TEST_CASE("continued self-energy is flagged below the axis") {
    const ModelSpec s;
    CHECK(eval_f(s, Level::excited, cplx(1.0, -0.1)).continued);
    CHECK_FALSE(eval_f(s, Level::excited, cplx(1.0, 0.1)).continued);
  }

  TEST_CASE("composed Liouville poles") {
    const LiouvillePoles lp = find_all_poles(ModelSpec{}).liouville;
    CHECK(std::abs(lp.theta_bar - kThetaBar) < 1e-11);
    CHECK(std::abs(lp.theta_bar_greens - kThetaBarComposed) < 1e-11);
    CHECK(std::abs(lp.delta10 - kDelta10) < 1e-11);
    CHECK(std::abs(lp.delta01 + std::conj(kDelta10)) < 1e-11);
    CHECK(std::abs(lp.A10 - kA10) < 1e-7);
    CHECK(std::abs(lp.A1sq - kA1sq) < 1e-7);
    // Circle and derivative residues agree.
    CHECK(std::abs(lp.A1sq - lp.A1sq_derivative) < 1e-6);
    CHECK(std::abs(lp.A10 - lp.A10_derivative) < 1e-6);
    CHECK(lp.theta_residual < 1e-12);
    CHECK(lp.delta_residual < 1e-12);
  }

  TEST_CASE("resolvent and composed poles differ at fourth order") {
    auto gap_between = [](double g2) {
      const LiouvillePoles lp = find_all_poles(with_g2(g2)).liouville;
      return std::abs(lp.theta_bar - lp.theta_bar_greens);
    };
    const double r = gap_between(1e-3) / gap_between(5e-4);
    CHECK(r == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("free theory") {
    const PoleSet ps = find_all_poles(with_g2(0.0));
    CHECK(ps.excited.location == cplx(1.0, 0.0));
    CHECK(ps.ground.location == cplx(0.0, 0.0));
    CHECK(std::abs(ps.excited.residue - 1.0) < 1e-15);
    CHECK(std::abs(ps.liouville.theta_bar) < 1e-15);
    CHECK(std::abs(ps.liouville.delta10 - 1.0) < 1e-15);
  }

  TEST_CASE("reduced resolvent has the decay pole") {
    const ModelSpec s;
    const cplx th = find_all_poles(s).liouville.theta_bar;
    const cplx z = th + cplx(1e-6, 0.0);
    CHECK(std::abs(reduced_resolvent_11_11(s, z)) > 1e4);
  }
}
