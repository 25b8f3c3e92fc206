#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subdyn/dressing.hpp"
#include "subdyn/errors.hpp"

using namespace subdyn;

namespace {
const double pi = std::numbers::pi;
const double kChiDet = 0.997570740640466;

const KineticSet& baseline() {
  static const KineticSet ks = build_kinetic_set(ModelSpec{});
  return ks;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

ModelSpec with_g2(double g2) {
  ModelSpec s;
  s.form_factor.g2 = g2;
  return s;
}
}  // namespace

TEST_SUITE("dressing") {
  TEST_CASE("diagonal dressing is a similarity") {
    const KineticSet& ks = baseline();
    const DressingSet d = build_chi_diag(ks);
    const auto r = verify_similarity(build_theta_diag(ks), d);
    CHECK(r.forward < 1e-15);
    CHECK(r.backward < 1e-15);
    CHECK(std::abs(d.chi.matrix.determinant() - kChiDet) < 1e-12);
    CHECK(max_abs(d.chi.matrix * d.chi_inv.matrix - Eigen::Matrix2cd::Identity()) < 1e-15);
  }

  TEST_CASE("physical diagonal generator") {
    const KineticSet& ks = baseline();
    const DressingSet d = build_chi_diag(ks);
    const cplx th = ks.poles.liouville.theta_bar;
    for (double t : {0.0, 10.0, 300.0}) {
      const Eigen::MatrixXcd U = evolve(d.phi.matrix, t);
      const cplx e = std::exp(cplx(0.0, -1.0) * th * t);
      CHECK(std::abs(U(0, 0) - e) < 1e-13);
      CHECK(std::abs(U(1, 0) - (1.0 - e)) < 1e-13);
      CHECK(std::abs(U(0, 1)) < 1e-13);
      CHECK(std::abs(U(1, 1) - 1.0) < 1e-13);
      // Populations stay normalized.
      CHECK(std::abs(U.col(0).sum() - 1.0) < 1e-13);
    }
  }

  TEST_CASE("dipolar dressing") {
    const KineticSet& ks = baseline();
    const DressingSet d = build_chi_dipolar(ks);
    const auto r = verify_similarity(build_theta_dipolar(ks), d);
    CHECK(r.forward < 1e-12);
    CHECK(r.backward < 1e-12);
    const Eigen::Matrix2cd c = d.chi.matrix;
    CHECK(max_abs(c - c.adjoint()) < 1e-15);
    const cplx det_chi = c.determinant();
    CHECK(std::abs(det_chi * det_chi - build_A_dipolar(ks).matrix.determinant()) < 1e-12);
    REQUIRE(d.free_param.has_value());
    CHECK(d.free_param->x_from_normalization);
    CHECK(d.free_param->y > 0.0);
    CHECK(d.free_param->y < d.free_param->x);
    CHECK(std::abs(d.phi(0, 0) - ks.poles.liouville.delta10) < 1e-16);
    CHECK(std::abs(d.phi(1, 1) - ks.poles.liouville.delta01) < 1e-16);
  }

  TEST_CASE("supplied scale keeps the similarity") {
    const KineticSet& ks = baseline();
    const DressingSet d = build_chi_dipolar(ks, 1.7);
    CHECK(d.free_param->x == 1.7);
    CHECK_FALSE(d.free_param->x_from_normalization);
    CHECK(verify_similarity(build_theta_dipolar(ks), d).forward < 1e-12);
    const DressingSet a = build_chi_dipolar(ks);
    CHECK(d.free_param->y / d.free_param->x == doctest::Approx(a.free_param->y / a.free_param->x).epsilon(1e-12));
    CHECK_THROWS_AS(build_chi_dipolar(ks, -1.0), Error);
  }

  TEST_CASE("dressing tends to the identity at weak coupling") {
    double prev = 1.0;
    for (double g2 : {1e-3, 1e-4, 1e-5}) {
      const KineticSet ks = build_kinetic_set(with_g2(g2));
      const double dd = max_abs(build_chi_diag(ks).chi.matrix - Eigen::Matrix2cd::Identity());
      const double dp = max_abs(build_chi_dipolar(ks).chi.matrix - Eigen::Matrix2cd::Identity());
      CHECK(dd < prev);
      CHECK(dp < 10.0 * g2);
      prev = dd;
    }
    const KineticSet free = build_kinetic_set(with_g2(0.0));
    CHECK(max_abs(build_chi_diag(free).chi.matrix - Eigen::Matrix2cd::Identity()) == 0.0);
    CHECK(max_abs(build_chi_dipolar(free).chi.matrix - Eigen::Matrix2cd::Identity()) < 1e-14);
  }

  TEST_CASE("sector mismatch is a contract error") {
    const KineticSet& ks = baseline();
    CHECK_THROWS_AS(verify_similarity(build_theta_diag(ks), build_chi_dipolar(ks)), Error);
  }

  TEST_CASE("bare vertex target") {
    const ModelSpec s;
    const DressedVertex v = build_X_and_phi_vertex(s, 0.8, VertexTarget{});
    const double bare = std::sqrt(eval_v2(s.form_factor, 0.8));
    CHECK(v.X == cplx(0.0));
    CHECK(v.phi1 == cplx(bare));
    CHECK(v.absorb_left == cplx(bare));
    CHECK(v.emit_left == cplx(bare));
    CHECK(v.emit_right == cplx(-bare));
  }

  TEST_CASE("causal vertex at the origin") {
    const ModelSpec s;
    VertexTarget t;
    t.kind = VertexTarget::Kind::causal;
    const double vres = std::sqrt(eval_v2(s.form_factor, 1.0));
    for (double w : {0.3, 1.0, 1.0 + 1e-9, 2.5}) {
      const DressedVertex v = build_X_and_phi_vertex(s, w, t);
      CHECK(std::isfinite(std::abs(v.X)));
      CHECK(std::abs(v.X) < 0.1);
      CHECK(v.phi_abs == doctest::Approx(vres).epsilon(1e-14));
      // phi1 is the target element by construction.
      CHECK(std::abs(v.phi1 - v.absorb_left) < 1e-14);
      CHECK(std::abs(v.emit_right + v.absorb_left) < 1e-16);
    }
    // At resonance the dressed vertex equals the bare one.
    const DressedVertex r = build_X_and_phi_vertex(s, 1.0, t);
    CHECK(std::abs(r.phi1 - vres) < 1e-14);
  }

  TEST_CASE("causal vertex needs a commensurate position") {
    const ModelSpec s;
    VertexTarget t;
    t.kind = VertexTarget::Kind::causal;
    t.position = {0.0, 0.0, 2.0 * pi};
    const DressedVertex v = build_X_and_phi_vertex(s, 0.6, t);
    CHECK(std::abs(v.phi1 - v.absorb_left) < 1e-14);
    CHECK(std::abs(v.absorb_right - std::conj(v.absorb_left)) < 1e-16);
    t.position = {0.0, 0.0, 1.0};
    try {
      build_X_and_phi_vertex(s, 0.6, t);
      FAIL("expected a singular error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::singular);
    }
    CHECK_THROWS_AS(build_X_and_phi_vertex(s, 0.0, VertexTarget{}), Error);
  }
}
