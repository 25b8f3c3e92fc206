#pragma once

#include <string>

#include "subdyn/model.hpp"

namespace subdyn {

enum class Level { ground = 0, excited = 1 };

struct SheetedValue {
  cplx value;
  bool continued;  // true iff Im z <= 0
};

// Second-order self-energy of a level, continued from above into Im z < 0.
SheetedValue eval_f(const ModelSpec& spec, Level level, cplx z);

// Diagonal Green's function 1 / (z - omega_level - f(z)); throws near a pole.
SheetedValue eval_eta_inv(const ModelSpec& spec, Level level, cplx z);

enum class PoleKind { excited, ground, bar_excited, bar_ground };
std::string to_string(PoleKind k);

struct PoleData {
  PoleKind kind;
  cplx location;
  cplx residue;
  double solver_residual;
  int iterations;
};

// Physical pole of a Green's function: complex for the excited level, real for the ground.
PoleData find_pole(const ModelSpec& spec, Level level);

// Pole of the function continued with -H: -conj for the excited pole, negation for the ground.
PoleData bar_pole(const PoleData& p);

struct LiouvillePoles {
  // Compositions of the Green's-function shifts.
  cplx theta_bar_greens;
  cplx delta10_greens;
  cplx delta01_greens;
  // Poles of the reduced resolvents, used downstream.
  cplx theta_bar;
  cplx delta10;
  cplx delta01;
  // Residues by the circle limit and by the derivative formula.
  cplx A1sq;
  cplx A10;
  cplx A01;
  cplx A1sq_derivative;
  cplx A10_derivative;
  cplx A01_derivative;
  double theta_residual;
  double delta_residual;
};

LiouvillePoles compose_liouville_poles(const ModelSpec& spec, const PoleData& excited,
                                       const PoleData& ground, const PoleData& bar_excited,
                                       const PoleData& bar_ground);

// Convenience: all four poles and the composed set.
struct PoleSet {
  PoleData excited, ground, bar_excited, bar_ground;
  LiouvillePoles liouville;
};
PoleSet find_all_poles(const ModelSpec& spec);

// Reduced-resolvent elements of the diagonal and dipolar sectors (order 2).
cplx reduced_resolvent_11_11(const ModelSpec& spec, cplx z);

}  // namespace subdyn
