#pragma once

#include <string>
#include <vector>

#include "subdyn/continuum.hpp"
#include "subdyn/model.hpp"

namespace subdyn {

// Irreducible operator family: psi (no connecting vertex), T (at least one), W = psi + T.
enum class Irreducible { psi, T, W };

// Atomic index pairs written row.col, e.g. e11_00 maps 00 into 11.
enum class DiagElement { e11_11, e00_00, e11_00, e00_11 };
enum class DipoleElement { e10_10, e01_01, e10_01, e01_10 };

// One-photon elements: vacuum row (11 or 00) fed by a state with one photon line.
// l_ prefix: photon on the left (ket) side, r_ prefix: photon on the right (bra) side.
enum class PhotonElement {
  l_11_0l1, l_00_0l1, l_00_1l0, l_11_1l0,
  r_11_10l, r_00_10l, r_00_01l, r_11_01l
};

std::string to_string(DiagElement e);
std::string to_string(DipoleElement e);
std::string to_string(PhotonElement e);
std::string to_string(Irreducible op);

// Second-order elements at complex z. Real z gives the boundary value from above;
// Im z < 0 gives the continuation from above.
cplx eval_irreducible_diag(const ModelSpec& spec, Irreducible op, DiagElement e, cplx z);
cplx eval_W2_diag(const ModelSpec& spec, DiagElement e, cplx z);

// Same boundary value at real x, obtained by extrapolating x + i eps over spec.epsilon_limit.
Extrapolated eval_W2_diag_limit(const ModelSpec& spec, DiagElement e, double x);

cplx eval_irreducible_dipolar(const ModelSpec& spec, Irreducible op, DipoleElement e, cplx z);
cplx eval_W_dipolar(const ModelSpec& spec, DipoleElement e, cplx z);

// Denominator of the dipolar reduced resolvent.
cplx dipolar_denominator(const ModelSpec& spec, cplx z);

// First-order vertex for absorbing a photon of frequency omega_lambda.
cplx eval_W_one_photon(const ModelSpec& spec, PhotonElement e, double omega_lambda);

struct FourthOrderTerm {
  std::string name;   // c1 ... c8, c1p ... c8p
  Irreducible group;  // psi or T
  cplx value;
};

struct CancellationCheck {
  std::string name;
  cplx lhs;
  cplx rhs;
  double residual;    // |lhs - rhs| relative to the scale
  double scale;
  double tolerance;
  bool pass;
};

struct FourthOrderGround {
  std::vector<FourthOrderTerm> terms;   // the sixteen contributions
  std::vector<CancellationCheck> checks;
  cplx psi_total;
  cplx t_total;
  cplx total;
  cplx closed_form;                     // -2 pi i v2(gap) int v2(w) / (gap + w)^2
};

// Fourth-order ground-ground element at z -> 0+ from the sixteen contributions.
// Throws an invariant error naming the first failing check when `strict`.
FourthOrderGround eval_W4_0000_at0(const ModelSpec& spec, bool strict = true,
                                   double tolerance = 1e-8);

// int_0^L v2(w) / (gap + w)^2 dw.
double inverse_square_moment(const ModelSpec& spec);

// Ground-ground element at zero including order 4 when spec.w00_order == 4.
cplx W00_00_at0(const ModelSpec& spec);

}  // namespace subdyn
