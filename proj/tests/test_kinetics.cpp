#include <doctest.h>

#include <cmath>

#include "subdyn/errors.hpp"
#include "subdyn/kinetics.hpp"

using namespace subdyn;

namespace {
const double kP = 0.00121462967976725;
const double kQ = 0.998785370320233;
const cplx kTheta0000Fourth(0.0, -6.91388476442115e-6);

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

TEST_SUITE("kinetics") {
  TEST_CASE("diagonal weights") {
    const KineticSet& ks = baseline();
    CHECK(std::abs(ks.p - kP) < 1e-12);
    CHECK(std::abs(ks.q - kQ) < 1e-12);
    CHECK(std::abs(ks.p + ks.q - 1.0) < 1e-15);
    REQUIRE(ks.fourth.has_value());
    CHECK_FALSE(ks.free_theory);
  }

  TEST_CASE("diagonal blocks conserve probability") {
    const KineticSet& ks = baseline();
    const Eigen::Matrix2cd A = build_A_diag(ks).matrix;
    const Eigen::Matrix2cd T = build_theta_diag(ks).matrix;
    for (int c = 0; c < 2; ++c) {
      CHECK(std::abs(A.col(c).sum() - 1.0) < 1e-12);
      CHECK(std::abs(T.col(c).sum()) < 1e-16);
    }
    CHECK(max_abs(A * invert_A_diag(ks).matrix - Eigen::Matrix2cd::Identity()) < 1e-12);
  }

  TEST_CASE("generator reproduces the reduced evolution") {
    const KineticSet& ks = baseline();
    const Eigen::Matrix2cd A = build_A_diag(ks).matrix;
    const Eigen::MatrixXcd T = build_theta_diag(ks).matrix;
    for (double t : {0.0, 1.0, 50.0, 400.0})
      CHECK(max_abs(evolve(T, t) * A - sigma_diag(ks, t).matrix) < 1e-12);
    const Eigen::Matrix2cd AD = build_A_dipolar(ks).matrix;
    const Eigen::MatrixXcd TD = build_theta_dipolar(ks).matrix;
    for (double t : {0.0, 3.0, 120.0})
      CHECK(max_abs(evolve(TD, t) * AD - sigma_dipolar(ks, t).matrix) < 1e-12);
  }

  TEST_CASE("generator elements") {
    const KineticSet& ks = baseline();
    const auto T = build_theta_diag(ks);
    const cplx th = ks.poles.liouville.theta_bar;
    CHECK(std::abs(T(0, 0) - th * kQ) < 1e-14);
    CHECK(std::abs(T(1, 1) - th * kP) < 1e-14);
    const FourthOrderTheta f = theta_00_00_fourth_order(ks);
    CHECK(std::abs(f.value - kTheta0000Fourth) < 1e-15);
    CHECK(std::abs(f.value - f.target) < 1e-12 * std::abs(f.target));
  }

  TEST_CASE("dipolar generator has the coherence poles as eigenvalues") {
    const KineticSet& ks = baseline();
    const Eigen::Matrix2cd T = build_theta_dipolar(ks).matrix;
    const cplx tr = T.trace(), det = T.determinant();
    const auto& lp = ks.poles.liouville;
    CHECK(std::abs(tr - (lp.delta10 + lp.delta01)) < 1e-12);
    CHECK(std::abs(det - lp.delta10 * lp.delta01) < 1e-12);
    CHECK(std::isfinite(std::abs(dipolar_bracket(ks))));
  }

  TEST_CASE("resolvent matrices") {
    const ModelSpec s;
    const cplx z(0.4, 0.3);
    const Eigen::Matrix2cd R = diag_resolvent(s, z);
    // Each column of z R - 1 sums to zero because W does.
    const Eigen::Matrix2cd M = z * R - Eigen::Matrix2cd::Identity();
    CHECK(std::abs(M.col(0).sum()) < 1e-12);
    CHECK(std::abs(M.col(1).sum()) < 1e-12);
    const Eigen::Matrix2cd RD = dipolar_resolvent(s, cplx(1.0, 0.2));
    CHECK(max_abs(RD) < 1e3);
  }

  TEST_CASE("free theory") {
    const KineticSet ks = build_kinetic_set(with_g2(0.0));
    CHECK(ks.free_theory);
    CHECK(max_abs(build_theta_diag(ks).matrix) < 1e-15);
    const Eigen::Matrix2cd T = build_theta_dipolar(ks).matrix;
    CHECK(std::abs(T(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(T(1, 1) + 1.0) < 1e-14);
    CHECK(std::abs(T(0, 1)) < 1e-14);
  }

  TEST_CASE("spectator photon shifts the generator") {
    const KineticSet& ks = baseline();
    const auto base = build_theta_diag(ks);
    const auto l = theta_passive(base, 0.7, PhotonSide::left);
    const auto r = theta_passive(base, 0.7, PhotonSide::right);
    CHECK(max_abs(l.matrix - base.matrix - 0.7 * Eigen::Matrix2cd::Identity()) < 1e-16);
    CHECK(max_abs(r.matrix - base.matrix + 0.7 * Eigen::Matrix2cd::Identity()) < 1e-16);
    CHECK(l.rows[0] == "11+l");
  }

  TEST_CASE("absorbing photon sector") {
    const KineticSet& ks = baseline();
    for (double w : {0.5, 1.0, 2.0}) {
      const PhotonSector L = theta_absorb(ks, w, PhotonSide::left);
      const PhotonSector R = theta_absorb(ks, w, PhotonSide::right);
      // The mixed block of the full generator is the closed-form one.
      CHECK(max_abs(L.theta_full.topRightCorner<2, 2>() - L.theta_mixed.matrix) < 1e-12);
      CHECK(max_abs(L.A_full.topRightCorner<2, 2>() - L.sigma_full(ks, 0.0).topRightCorner<2, 2>()) < 1e-14);
      // Right photons mirror left photons with the columns swapped.
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          CHECK(std::abs(R.theta_mixed(r, c) + std::conj(L.theta_mixed(r, 1 - c))) < 1e-12);
      CHECK(L.theta_mixed.cols[0] == "1l0");
      CHECK(R.theta_mixed.cols[1] == "01l");
    }
    CHECK_THROWS_AS(theta_absorb(ks, 0.0), Error);
  }

  TEST_CASE("mixed generator tends to the bare vertex") {
    auto deviation = [](double g2) {
      const KineticSet ks = build_kinetic_set(with_g2(g2));
      const PhotonSector L = theta_absorb(ks, 1.0);
      return std::abs(L.theta_mixed(0, 1) / L.vertex(0, 1) - 1.0);
    };
    const double d3 = deviation(1e-3), d4 = deviation(1e-4);
    CHECK(d4 < 1e-3);
    CHECK(d4 / d3 == doctest::Approx(0.1).epsilon(0.05));
  }

  TEST_CASE("negative time is rejected") {
    CHECK_THROWS_AS(sigma_diag(baseline(), -1.0), Error);
    CHECK_THROWS_AS(sigma_dipolar(baseline(), -1.0), Error);
  }
}
