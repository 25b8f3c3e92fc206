#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "subdyn/collision.hpp"
#include "subdyn/greens.hpp"
#include "subdyn/model.hpp"

namespace subdyn {

enum class SectorKind { diag, dipole, passive_photon, absorb_photon };
enum class PhotonSide { left, right };

std::string to_string(SectorKind k);
std::string to_string(PhotonSide s);

// Small dense matrix over ordered atomic index pairs, optionally carrying a photon line.
struct SectorBlock {
  SectorKind sector = SectorKind::diag;
  std::string label;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  Eigen::MatrixXcd matrix;
  double omega_lambda = 0.0;
  PhotonSide side = PhotonSide::left;

  cplx operator()(Eigen::Index r, Eigen::Index c) const { return matrix(r, c); }
};

// Collision-operator values the kinetic blocks are built from.
struct WValues {
  cplx w11_0;        // W11.11(0), order 2
  cplx w00_0;        // W00.00(0) at the configured order
  cplx w00_0_order2;
  cplx w00_0_order4; // zero when order 4 is not requested
  cplx w11_theta;    // W11.11 at the decay pole
  cplx w00_theta;
  // Dipolar elements at each coherence pole, rows/cols ordered (10, 01).
  Eigen::Matrix2cd wd_at_d10;
  Eigen::Matrix2cd wd_at_d01;
};

struct KineticSet {
  ModelSpec spec;
  PoleSet poles;
  WValues w;
  std::optional<FourthOrderGround> fourth;
  bool free_theory = false;
  // Diagonal sector: weights of the stationary and decaying parts.
  cplx S;      // W11.11(0) + W00.00(0)
  cplx p;      // W00.00(0) / S
  cplx q;      // W11.11(0) / S
  cplx kappa;  // residue of the excited-excited reduced resolvent at the decay pole
  cplx ra;     // W11.11(theta) / theta
  cplx rb;     // W00.00(theta) / theta
  // Dipole sector: residue matrices at the two coherence poles, basis (10, 01).
  Eigen::Matrix2cd alpha;
  Eigen::Matrix2cd beta;
};

KineticSet build_kinetic_set(const ModelSpec& spec);

// Diagonal sector, basis (11, 00).
SectorBlock sigma_diag(const KineticSet& ks, double t);
SectorBlock build_A_diag(const KineticSet& ks);
SectorBlock invert_A_diag(const KineticSet& ks);
SectorBlock build_theta_diag(const KineticSet& ks);
Eigen::Matrix2cd diag_residue_at_zero(const KineticSet& ks);
Eigen::Matrix2cd diag_residue_at_theta(const KineticSet& ks);

// Fourth-order ground-ground element of the generator and its closed-form target.
struct FourthOrderTheta {
  cplx value;   // theta2 * W00.00^(4)(0) / W11.11^(2)(0)
  cplx target;  // theta2 * int v2 / (gap + w)^2
  cplx theta2;  // second-order decay pole
};
FourthOrderTheta theta_00_00_fourth_order(const KineticSet& ks);

// Dipole sector, basis (10, 01).
SectorBlock sigma_dipolar(const KineticSet& ks, double t);
SectorBlock build_A_dipolar(const KineticSet& ks);
SectorBlock invert_A_dipolar(const KineticSet& ks);
SectorBlock build_theta_dipolar(const KineticSet& ks);
// det A_D divided by the product of the coherence residues.
cplx dipolar_bracket(const KineticSet& ks);

// Reduced resolvents of the two atomic sectors at complex z.
Eigen::Matrix2cd diag_resolvent(const ModelSpec& spec, cplx z);
Eigen::Matrix2cd dipolar_resolvent(const ModelSpec& spec, cplx z);

// Spectator photon: the atomic generator shifted by +-omega.
SectorBlock theta_passive(const SectorBlock& base, double omega_lambda, PhotonSide side);

// Sector with one photon line feeding the diagonal block. Basis of the full 4x4 blocks:
// (11, 00, 1l0, 0l1) for a left photon, (11, 00, 10l, 01l) for a right photon.
struct PhotonSector {
  double omega_lambda;
  PhotonSide side;
  Eigen::Matrix2cd vertex;       // first-order W from the photon states into (11, 00)
  Eigen::Matrix2cd A_mixed;      // A from photon states into (11, 00)
  Eigen::Matrix2cd thetaA_mixed; // (Theta A) from photon states into (11, 00)
  Eigen::Matrix2cd Ainv_mixed;
  SectorBlock theta_mixed;       // Theta from photon states into (11, 00)
  Eigen::Matrix4cd A_full;
  Eigen::Matrix4cd theta_full;
  // Pole data for the time-dependent block.
  std::vector<cplx> pole_locations;
  std::vector<Eigen::Matrix2cd> mixed_residues;
  Eigen::Matrix4cd sigma_full(const KineticSet& ks, double t) const;
};

PhotonSector theta_absorb(const KineticSet& ks, double omega_lambda,
                          PhotonSide side = PhotonSide::left);

// exp(-i M t) for a small dense matrix.
Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& m, double t);

}  // namespace subdyn
