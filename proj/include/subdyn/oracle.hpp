#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <optional>
#include <vector>

#include "subdyn/greens.hpp"
#include "subdyn/model.hpp"

namespace subdyn {

// Photon occupations stored as a nondecreasing list of mode indices.
struct FockState {
  int atom = 0;
  std::vector<int> photons;
  int total_photons() const { return static_cast<int>(photons.size()); }
};

// Which states to keep. H conserves the parity of (atom level + photon number), so a
// run starting from a definite state only needs one parity class.
enum class ParitySector { full, odd, even };

struct FockBasis {
  int n_modes = 0;
  double omega_max = 0.0;
  double delta_omega = 0.0;
  int nmax = 0;
  ParitySector parity = ParitySector::full;
  std::vector<double> mode_frequencies;  // midpoints of a uniform grid on (0, omega_max]
  std::vector<double> mode_couplings;    // sqrt(v2(w_k) dw)
  std::vector<FockState> states;
  std::map<std::pair<int, std::vector<int>>, long> index;

  long dimension() const { return static_cast<long>(states.size()); }
  long find(int atom, const std::vector<int>& photons) const;  // -1 if absent
};

// Number of states with both atom levels and up to nmax photons in n_modes modes.
long full_dimension(int n_modes, int nmax);

FockBasis build_basis(const FormFactor& ff, int n_modes, double omega_max, int nmax,
                      ParitySector parity = ParitySector::full, long cap = 200000);

// Real symmetric H with rotating and counter-rotating couplings.
Eigen::SparseMatrix<double> build_hamiltonian(const FockBasis& basis, double omega1, double omega0);

struct EvolutionSample {
  double t;
  cplx amplitude;            // <1,vac| e^{-iHt} |1,vac>
  double population;         // excited-level probability summed over field states
  double norm;               // total probability, 1 for exact unitary evolution
  double top_shell_weight;   // probability in states with nmax photons
};

// Exact evolution of |1,vac>, dense below the cap and Chebyshev propagation above.
class ExactSystem {
 public:
  ExactSystem(const ModelSpec& spec, int n_modes, double omega_max, int nmax,
              ParitySector parity);
  ExactSystem(const ModelSpec& spec, ParitySector parity = ParitySector::odd);

  const FockBasis& basis() const { return basis_; }
  const Eigen::SparseMatrix<double>& hamiltonian() const { return H_; }
  bool dense() const { return dense_; }

  // Times must be nonnegative and nondecreasing.
  std::vector<EvolutionSample> evolve_excited(const std::vector<double>& times) const;

  // Diagonal vacuum element of (z - H)^-1 for the given level; Im z > 0.
  cplx resolvent_diag(Level level, cplx z) const;

  // Lowest eigenvalue of H in this basis; must lie below every top-shell energy.
  double lowest_eigenvalue() const;

 private:
  // States below the top photon shell and the exact elimination of that shell, whose
  // block of H is diagonal because couplings only lead back down.
  Eigen::MatrixXcd schur(cplx z) const;
  double lowest_from_schur() const;

  ModelSpec spec_;
  FockBasis basis_;
  std::vector<long> low_;        // basis index of each low state
  std::vector<long> low_of_;     // basis index -> low position or -1
  Eigen::MatrixXd H_low_;
  std::vector<long> top_;        // basis indices of top-shell states
  Eigen::VectorXd top_energy_;
  std::vector<std::vector<std::pair<long, double>>> top_links_;  // per top state: (low pos, coupling)
  Eigen::SparseMatrix<double> H_;
  bool dense_ = false;
  // Filled on the first dense evolution.
  mutable Eigen::VectorXd evals_;
  mutable Eigen::MatrixXd evecs_;
  void ensure_eigensystem() const;
};

// Linear-log fit of P(t) = c exp(-rate t) on [t0, t1].
struct ExponentialFit {
  double rate;
  double prefactor;
  double r2;
  int points;
};
ExponentialFit fit_exponential(const std::vector<EvolutionSample>& s, double t0, double t1);

// Fit of 1 - P(t) = c t^2 through the origin on [0, t1].
struct QuadraticFit {
  double coefficient;
  double r2;
  int points;
};
QuadraticFit fit_zeno(const std::vector<EvolutionSample>& s, double t1);

struct ComparisonReport {
  double max_relative;
  double rms_relative;
  int points;
  double max_top_shell_weight;
};
ComparisonReport compare_kinetic(const std::vector<double>& predicted,
                                 const std::vector<EvolutionSample>& observed, double t0,
                                 double t1);

// Copy of the model whose frequency integrals stop at the oracle's highest mode edge, so the
// continuum and discretized models describe the same bath.
ModelSpec matched_cutoff(const ModelSpec& spec, double omega_max);

}  // namespace subdyn
