#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace subdyn {

using cplx = std::complex<double>;

enum class FormFactorFamily { exponential_ohmic };

// Continuum coupling density v^2(w) = g2 * w * exp(-w / cutoff) on w > 0.
struct FormFactor {
  FormFactorFamily family = FormFactorFamily::exponential_ohmic;
  double g2 = 1e-3;
  double cutoff = 10.0;
};

// v^2 on the real axis; zero for w <= 0.
double eval_v2(const FormFactor& ff, double omega);

// Entire extension of the positive-axis rule, used for analytic continuation.
cplx eval_v2_analytic(const FormFactor& ff, cplx omega);

struct QuadratureSpec {
  int max_depth = 15;         // adaptive bisection levels per panel
  double abs_tol = 1e-15;
  double rel_tol = 1e-12;
  double cutoff = 500.0;      // upper limit of every frequency integral
};

struct SolverSpec {
  int max_iter = 60;
  double tol = 1e-13;
  double damping = 1.0;       // Newton step multiplier
};

struct OracleSpec {
  int n_modes = 200;
  double omega_max = 20.0;
  int nmax = 2;
  long dense_cap = 4000;      // largest dimension diagonalized densely
  long basis_cap = 200000;    // largest basis built at all
};

struct ModelSpec {
  double omega1 = 1.0;
  double omega0 = 0.0;
  FormFactor form_factor;
  QuadratureSpec quadrature;
  SolverSpec pole_solver;
  std::vector<double> epsilon_limit{1e-3, 1e-4, 1e-5};
  OracleSpec oracle;
  int w00_order = 4;                   // 2 or 4: order kept in the ground-ground element at zero
  std::optional<double> dressing_x;    // empty means normalize by the determinant

  double gap() const { return omega1 - omega0; }
};

struct Violation {
  std::string field;
  std::string rule;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string message() const;
};

ValidationReport validate(const ModelSpec& spec);

// Returns the model unchanged or throws a config error listing every violation.
const ModelSpec& require_valid(const ModelSpec& spec);

// INI text with sections [atom], [coupling], [numerics]; unknown keys are rejected.
ModelSpec parse_config(const std::string& text);
ModelSpec load_config(const std::string& path);
std::string format_config(const ModelSpec& spec);

}  // namespace subdyn
