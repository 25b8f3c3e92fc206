#include "subdyn/kinetics.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "subdyn/errors.hpp"

namespace subdyn {

namespace {

const cplx I(0.0, 1.0);
constexpr double kSingular = 1e-14;

Eigen::Matrix2cd adjugate(const Eigen::Matrix2cd& m) {
  Eigen::Matrix2cd a;
  a << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return a;
}

Eigen::Matrix2cd diag_W(const ModelSpec& s, cplx z) {
  Eigen::Matrix2cd w;
  w << eval_W2_diag(s, DiagElement::e11_11, z), eval_W2_diag(s, DiagElement::e11_00, z),
      eval_W2_diag(s, DiagElement::e00_11, z), eval_W2_diag(s, DiagElement::e00_00, z);
  return w;
}

Eigen::Matrix2cd dipolar_W(const ModelSpec& s, cplx z) {
  Eigen::Matrix2cd w;
  w << eval_W_dipolar(s, DipoleElement::e10_10, z), eval_W_dipolar(s, DipoleElement::e10_01, z),
      eval_W_dipolar(s, DipoleElement::e01_10, z), eval_W_dipolar(s, DipoleElement::e01_01, z);
  return w;
}

Eigen::Matrix2cd free_dipolar(const ModelSpec& s) {
  Eigen::Matrix2cd l0 = Eigen::Matrix2cd::Zero();
  l0(0, 0) = s.gap();
  l0(1, 1) = -s.gap();
  return l0;
}

// z - L0 - W(z) in the dipole sector.
Eigen::Matrix2cd dipolar_kernel(const ModelSpec& s, cplx z, const Eigen::Matrix2cd& w) {
  return z * Eigen::Matrix2cd::Identity() - free_dipolar(s) - w;
}

SectorBlock make_block(SectorKind k, const char* label, const Eigen::MatrixXcd& m,
                       std::vector<std::string> rows, std::vector<std::string> cols) {
  SectorBlock b;
  b.sector = k;
  b.label = label;
  b.rows = std::move(rows);
  b.cols = std::move(cols);
  b.matrix = m;
  return b;
}

const std::vector<std::string> kDiag{"11", "00"};
const std::vector<std::string> kDip{"10", "01"};

}  // namespace

std::string to_string(SectorKind k) {
  switch (k) {
    case SectorKind::diag: return "diag";
    case SectorKind::dipole: return "dipole";
    case SectorKind::passive_photon: return "passive_photon";
    case SectorKind::absorb_photon: return "absorb_photon";
  }
  return "?";
}

std::string to_string(PhotonSide s) { return s == PhotonSide::left ? "left" : "right"; }

Eigen::Matrix2cd diag_resolvent(const ModelSpec& s, cplx z) {
  return (z * Eigen::Matrix2cd::Identity() - diag_W(s, z)).inverse();
}

Eigen::Matrix2cd dipolar_resolvent(const ModelSpec& s, cplx z) {
  return dipolar_kernel(s, z, dipolar_W(s, z)).inverse();
}

KineticSet build_kinetic_set(const ModelSpec& spec) {
  require_valid(spec);
  KineticSet ks;
  ks.spec = spec;
  ks.poles = find_all_poles(spec);
  const auto& lp = ks.poles.liouville;
  auto& w = ks.w;
  w.w11_0 = eval_W2_diag(spec, DiagElement::e11_11, 0.0);
  w.w00_0_order2 = eval_W2_diag(spec, DiagElement::e00_00, 0.0);
  w.w00_0_order4 = 0.0;
  if (spec.w00_order == 4 && spec.form_factor.g2 > 0.0) {
    ks.fourth = eval_W4_0000_at0(spec);
    w.w00_0_order4 = ks.fourth->total;
  }
  w.w00_0 = w.w00_0_order2 + w.w00_0_order4;
  w.w11_theta = eval_W2_diag(spec, DiagElement::e11_11, lp.theta_bar);
  w.w00_theta = eval_W2_diag(spec, DiagElement::e00_00, lp.theta_bar);
  w.wd_at_d10 = dipolar_W(spec, lp.delta10);
  w.wd_at_d01 = dipolar_W(spec, lp.delta01);

  ks.free_theory = spec.form_factor.g2 == 0.0;
  if (ks.free_theory) {
    // Limits of the weights as the coupling vanishes.
    ks.S = 0.0;
    ks.p = 0.0;
    ks.q = 1.0;
    ks.kappa = 1.0;
    ks.ra = 1.0;
    ks.rb = 0.0;
  } else {
    ks.S = w.w11_0 + w.w00_0;
    if (std::abs(ks.S) < kSingular)
      fail(ErrorKind::singular, "W11.11(0) + W00.00(0) vanishes: diagonal weights undefined");
    ks.p = w.w00_0 / ks.S;
    ks.q = w.w11_0 / ks.S;
    ks.kappa = lp.A1sq;
    ks.ra = w.w11_theta / lp.theta_bar;
    ks.rb = w.w00_theta / lp.theta_bar;
  }
  ks.alpha = lp.A10 * adjugate(dipolar_kernel(spec, lp.delta10, w.wd_at_d10));
  ks.beta = lp.A01 * adjugate(dipolar_kernel(spec, lp.delta01, w.wd_at_d01));
  return ks;
}

Eigen::Matrix2cd diag_residue_at_zero(const KineticSet& ks) {
  Eigen::Matrix2cd m;
  m << ks.p, ks.p, ks.q, ks.q;
  return m;
}

Eigen::Matrix2cd diag_residue_at_theta(const KineticSet& ks) {
  Eigen::Matrix2cd m;
  m << ks.ra, -ks.rb, -ks.ra, ks.rb;
  return ks.kappa * m;
}

SectorBlock sigma_diag(const KineticSet& ks, double t) {
  if (t < 0.0) fail(ErrorKind::contract, "time must be nonnegative");
  const cplx e = std::exp(-I * ks.poles.liouville.theta_bar * t);
  Eigen::Matrix2cd m = diag_residue_at_zero(ks) + e * diag_residue_at_theta(ks);
  return make_block(SectorKind::diag, "Sigma(t)", m, kDiag, kDiag);
}

SectorBlock build_A_diag(const KineticSet& ks) {
  auto b = sigma_diag(ks, 0.0);
  b.label = "A";
  return b;
}

SectorBlock invert_A_diag(const KineticSet& ks) {
  const Eigen::Matrix2cd a = build_A_diag(ks).matrix;
  if (std::abs(a.determinant()) < kSingular) fail(ErrorKind::singular, "diagonal A is singular");
  const cplx k = ks.kappa;
  Eigen::Matrix2cd m;
  m << ks.q / k + ks.rb, -ks.p / k + ks.rb, -ks.q / k + ks.ra, ks.p / k + ks.ra;
  return make_block(SectorKind::diag, "Ainv", m, kDiag, kDiag);
}

SectorBlock build_theta_diag(const KineticSet& ks) {
  const cplx th = ks.poles.liouville.theta_bar;
  Eigen::Matrix2cd m;
  m << ks.q, -ks.p, -ks.q, ks.p;
  return make_block(SectorKind::diag, "Theta", th * m, kDiag, kDiag);
}

FourthOrderTheta theta_00_00_fourth_order(const KineticSet& ks) {
  FourthOrderTheta r{0.0, 0.0, 0.0};
  if (ks.free_theory) return r;
  r.theta2 = ks.w.w11_0 + ks.w.w00_0_order2;
  r.value = r.theta2 * ks.w.w00_0_order4 / ks.w.w11_0;
  r.target = r.theta2 * inverse_square_moment(ks.spec);
  return r;
}

SectorBlock sigma_dipolar(const KineticSet& ks, double t) {
  if (t < 0.0) fail(ErrorKind::contract, "time must be nonnegative");
  const auto& lp = ks.poles.liouville;
  Eigen::Matrix2cd m =
      std::exp(-I * lp.delta10 * t) * ks.alpha + std::exp(-I * lp.delta01 * t) * ks.beta;
  return make_block(SectorKind::dipole, "Sigma(t)", m, kDip, kDip);
}

SectorBlock build_A_dipolar(const KineticSet& ks) {
  auto b = sigma_dipolar(ks, 0.0);
  b.label = "A";
  return b;
}

SectorBlock invert_A_dipolar(const KineticSet& ks) {
  const Eigen::Matrix2cd a = ks.alpha + ks.beta;
  const cplx det = a.determinant();
  if (std::abs(det) < kSingular) fail(ErrorKind::singular, "dipolar A is singular");
  return make_block(SectorKind::dipole, "Ainv", adjugate(a) / det, kDip, kDip);
}

SectorBlock build_theta_dipolar(const KineticSet& ks) {
  const auto& lp = ks.poles.liouville;
  const Eigen::Matrix2cd ainv = invert_A_dipolar(ks).matrix;
  Eigen::Matrix2cd m = (lp.delta10 * ks.alpha + lp.delta01 * ks.beta) * ainv;
  return make_block(SectorKind::dipole, "Theta", m, kDip, kDip);
}

cplx dipolar_bracket(const KineticSet& ks) {
  const auto& lp = ks.poles.liouville;
  return (ks.alpha + ks.beta).determinant() / (lp.A10 * lp.A01);
}

SectorBlock theta_passive(const SectorBlock& base, double omega, PhotonSide side) {
  SectorBlock b = base;
  const double shift = side == PhotonSide::left ? omega : -omega;
  b.matrix = base.matrix + shift * Eigen::MatrixXcd::Identity(base.matrix.rows(), base.matrix.cols());
  b.sector = SectorKind::passive_photon;
  b.omega_lambda = omega;
  b.side = side;
  const char* tag = side == PhotonSide::left ? "+l" : "+r";
  for (auto& r : b.rows) r += tag;
  for (auto& c : b.cols) c += tag;
  return b;
}

PhotonSector theta_absorb(const KineticSet& ks, double omega, PhotonSide side) {
  if (!(omega > 0.0)) fail(ErrorKind::contract, "photon frequency must be positive");
  const ModelSpec& s = ks.spec;
  const auto& lp = ks.poles.liouville;
  const double sh = side == PhotonSide::left ? omega : -omega;

  PhotonSector ps;
  ps.omega_lambda = omega;
  ps.side = side;
  if (side == PhotonSide::left) {
    ps.vertex << eval_W_one_photon(s, PhotonElement::l_11_1l0, omega),
        eval_W_one_photon(s, PhotonElement::l_11_0l1, omega),
        eval_W_one_photon(s, PhotonElement::l_00_1l0, omega),
        eval_W_one_photon(s, PhotonElement::l_00_0l1, omega);
  } else {
    ps.vertex << eval_W_one_photon(s, PhotonElement::r_11_10l, omega),
        eval_W_one_photon(s, PhotonElement::r_11_01l, omega),
        eval_W_one_photon(s, PhotonElement::r_00_10l, omega),
        eval_W_one_photon(s, PhotonElement::r_00_01l, omega);
  }
  const Eigen::Matrix2cd& V = ps.vertex;

  // Poles of R_d(z) V R_D(z - shift): two from the diagonal block, two shifted coherences.
  const cplx th = lp.theta_bar;
  ps.pole_locations = {0.0, th, lp.delta10 + sh, lp.delta01 + sh};
  ps.mixed_residues = {
      diag_residue_at_zero(ks) * V * dipolar_resolvent(s, -sh),
      diag_residue_at_theta(ks) * V * dipolar_resolvent(s, th - sh),
      diag_resolvent(s, lp.delta10 + sh) * V * ks.alpha,
      diag_resolvent(s, lp.delta01 + sh) * V * ks.beta,
  };
  ps.A_mixed.setZero();
  ps.thetaA_mixed.setZero();
  for (size_t k = 0; k < 4; ++k) {
    ps.A_mixed += ps.mixed_residues[k];
    ps.thetaA_mixed += ps.pole_locations[k] * ps.mixed_residues[k];
  }

  const Eigen::Matrix2cd Ad = build_A_diag(ks).matrix;
  const Eigen::Matrix2cd Td = build_theta_diag(ks).matrix;
  const Eigen::Matrix2cd AD = build_A_dipolar(ks).matrix;
  const Eigen::Matrix2cd TD = build_theta_dipolar(ks).matrix + sh * Eigen::Matrix2cd::Identity();

  ps.A_full.setZero();
  ps.A_full.topLeftCorner<2, 2>() = Ad;
  ps.A_full.topRightCorner<2, 2>() = ps.A_mixed;
  ps.A_full.bottomRightCorner<2, 2>() = AD;
  Eigen::Matrix4cd thetaA = Eigen::Matrix4cd::Zero();
  thetaA.topLeftCorner<2, 2>() = Td * Ad;
  thetaA.topRightCorner<2, 2>() = ps.thetaA_mixed;
  thetaA.bottomRightCorner<2, 2>() = TD * AD;
  const Eigen::Matrix4cd Ainv = ps.A_full.inverse();
  ps.theta_full = thetaA * Ainv;
  ps.Ainv_mixed = Ainv.topRightCorner<2, 2>();

  // Theta_dl = ((Theta A)_dl - Theta_d A_dl) A_D^-1
  const Eigen::Matrix2cd mixed = (ps.thetaA_mixed - Td * ps.A_mixed) * AD.inverse();
  std::vector<std::string> cols = side == PhotonSide::left
                                      ? std::vector<std::string>{"1l0", "0l1"}
                                      : std::vector<std::string>{"10l", "01l"};
  ps.theta_mixed = make_block(SectorKind::absorb_photon, "Theta", mixed, kDiag, cols);
  ps.theta_mixed.omega_lambda = omega;
  ps.theta_mixed.side = side;
  return ps;
}

Eigen::Matrix4cd PhotonSector::sigma_full(const KineticSet& ks, double t) const {
  const double sh = side == PhotonSide::left ? omega_lambda : -omega_lambda;
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m.topLeftCorner<2, 2>() = sigma_diag(ks, t).matrix;
  m.bottomRightCorner<2, 2>() = std::exp(-I * sh * t) * sigma_dipolar(ks, t).matrix;
  Eigen::Matrix2cd mixed = Eigen::Matrix2cd::Zero();
  for (size_t k = 0; k < pole_locations.size(); ++k)
    mixed += std::exp(-I * pole_locations[k] * t) * mixed_residues[k];
  m.topRightCorner<2, 2>() = mixed;
  return m;
}

Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& m, double t) {
  Eigen::MatrixXcd arg = (-I * t) * m;
  return arg.exp();
}

}  // namespace subdyn
