#pragma once

#include <array>
#include <optional>
#include <string>

#include "subdyn/kinetics.hpp"

namespace subdyn {

// The dipolar dressing is fixed only up to one real scale; this records how it was chosen.
struct DressingParameter {
  double x = 1.0;
  double y = 0.0;
  double phase_difference = 0.0;  // phi - psi
  bool x_from_normalization = true;
  std::string phase_convention;
};

struct DressingSet {
  SectorKind sector = SectorKind::diag;
  SectorBlock chi;
  SectorBlock chi_inv;
  SectorBlock phi;  // physical generator chi^-1 Theta chi
  std::optional<DressingParameter> free_param;
};

// Populations: closed form from W(0); the ground level is left invariant.
DressingSet build_chi_diag(const KineticSet& ks);

// Coherences: hermitian-symmetric parametrization with phase of the diagonal set to zero.
// An empty x means det(chi)^2 = det(A_D).
DressingSet build_chi_dipolar(const KineticSet& ks, std::optional<double> x = std::nullopt);

struct SimilarityResidual {
  double forward;   // max |chi Phi chi^-1 - Theta|
  double backward;  // max |chi^-1 Theta chi - Phi|
};
SimilarityResidual verify_similarity(const SectorBlock& theta, const DressingSet& d);

// First-order vertex between the excited state and ground plus one photon.
struct VertexTarget {
  enum class Kind { bare, causal };
  Kind kind = Kind::bare;
  std::array<double, 3> position{0.0, 0.0, 0.0};
  std::array<double, 3> direction{0.0, 0.0, 1.0};  // unit propagation direction of the photon
};

struct DressedVertex {
  double omega_lambda = 0.0;
  cplx bare;      // sqrt(v2(omega))
  cplx X;
  cplx phi1;      // bare - (omega0 + omega - omega1) X
  double phi_abs = 0.0;
  double phi_em = 0.0;
  // Local-coupling elements: absorption on the left and right, emission on the left and right.
  cplx absorb_left, absorb_right, emit_left, emit_right;
};

DressedVertex build_X_and_phi_vertex(const ModelSpec& spec, double omega_lambda,
                                     const VertexTarget& target);

}  // namespace subdyn
