#include "subdyn/dressing.hpp"

#include <cmath>
#include <sstream>

#include "subdyn/errors.hpp"

namespace subdyn {

namespace {

const cplx I(0.0, 1.0);

// Combinations of alpha and beta that are real for a consistent kinetic set.
double real_part_checked(cplx v, const char* name) {
  if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real()))) {
    std::ostringstream os;
    os.precision(17);
    os << name << " has imaginary part " << v.imag() << "; the dipolar kinetic set is inconsistent";
    fail(ErrorKind::invariant, os.str());
  }
  return v.real();
}

SectorBlock block_like(const SectorBlock& base, const char* label, const Eigen::MatrixXcd& m) {
  SectorBlock b = base;
  b.label = label;
  b.matrix = m;
  return b;
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace

DressingSet build_chi_diag(const KineticSet& ks) {
  const SectorBlock theta = build_theta_diag(ks);
  const cplx diff = ks.w.w11_0 - ks.w.w00_0;
  DressingSet d;
  d.sector = SectorKind::diag;
  if (!ks.free_theory && std::abs(diff) <= 1e-14)
    fail(ErrorKind::singular, "dressing: W11.11(0) and W00.00(0) coincide");
  const cplx p = ks.p, q = ks.q;
  Eigen::Matrix2cd chi, inv, phi;
  chi << q, p, p, q;
  inv << q, -p, -p, q;
  inv /= (q - p);
  const cplx th = ks.poles.liouville.theta_bar;
  phi << th, 0.0, -th, 0.0;
  d.chi = block_like(theta, "chi", chi);
  d.chi_inv = block_like(theta, "chi_inv", inv);
  d.phi = block_like(theta, "Phi", phi);
  return d;
}

DressingSet build_chi_dipolar(const KineticSet& ks, std::optional<double> x_in) {
  const SectorBlock theta = build_theta_dipolar(ks);
  const Eigen::Matrix2cd& a = ks.alpha;
  const Eigen::Matrix2cd& b = ks.beta;
  // Index 0 is 10, index 1 is 01.
  const double P = real_part_checked(a(0, 0) * b(1, 1) - a(0, 1) * b(1, 0), "alpha10.10 beta01.01 - alpha10.01 beta01.10");
  const double Q = real_part_checked(a(1, 1) * b(0, 0) - a(1, 0) * b(0, 1), "alpha01.01 beta10.10 - alpha01.10 beta10.01");
  const double det = real_part_checked((a + b).determinant(), "det A_D");
  if (!(P != 0.0) || !(det > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "dipolar dressing: degenerate normalization (P = " << P << ", det A_D = " << det << ")";
    fail(ErrorKind::singular, os.str());
  }
  const double ratio = -Q / P;  // y^2 / x^2
  if (ratio < 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "dipolar dressing: y^2 would be negative; alpha01.01 beta10.10 - alpha01.10 beta10.01 = " << Q
       << ", alpha10.10 beta01.01 - alpha10.01 beta01.10 = " << P;
    fail(ErrorKind::invariant, os.str());
  }

  DressingParameter fp;
  fp.x_from_normalization = !x_in.has_value();
  if (x_in) {
    if (!(*x_in > 0.0)) fail(ErrorKind::config, "dressing_x must be positive");
    fp.x = *x_in;
  } else {
    fp.x = std::sqrt(P / std::sqrt(det));
  }
  fp.y = fp.x * std::sqrt(ratio);
  const double dchi = fp.x * fp.x - fp.y * fp.y;
  if (!(dchi > 0.0)) fail(ErrorKind::singular, "dipolar dressing: x^2 - y^2 is not positive");

  // x y e^{i(phi-psi)} fixed by the off-diagonal relation.
  const cplx rhs = dchi / det * (a(1, 0) * b(1, 1) - a(1, 1) * b(1, 0));
  fp.phase_difference = std::abs(rhs) > 0.0 ? std::arg(rhs) : 0.0;
  fp.phase_convention = fp.x_from_normalization
                            ? "phase of chi10.10 set to zero; x fixed by det(chi)^2 = det(A_D)"
                            : "phase of chi10.10 set to zero; x supplied by configuration";
  const double psi = -fp.phase_difference;

  Eigen::Matrix2cd chi;
  chi << fp.x, fp.y * std::exp(I * psi), fp.y * std::exp(-I * psi), fp.x;
  Eigen::Matrix2cd inv;
  inv << chi(1, 1), -chi(0, 1), -chi(1, 0), chi(0, 0);
  inv /= dchi;
  Eigen::Matrix2cd phi = Eigen::Matrix2cd::Zero();
  phi(0, 0) = ks.poles.liouville.delta10;
  phi(1, 1) = ks.poles.liouville.delta01;

  DressingSet d;
  d.sector = SectorKind::dipole;
  d.chi = block_like(theta, "chi", chi);
  d.chi_inv = block_like(theta, "chi_inv", inv);
  d.phi = block_like(theta, "Phi", phi);
  d.free_param = fp;
  return d;
}

SimilarityResidual verify_similarity(const SectorBlock& theta, const DressingSet& d) {
  if (theta.sector != d.sector) fail(ErrorKind::contract, "verify_similarity: sector mismatch");
  const Eigen::MatrixXcd& c = d.chi.matrix;
  const Eigen::MatrixXcd& ci = d.chi_inv.matrix;
  const Eigen::MatrixXcd& f = d.phi.matrix;
  const Eigen::MatrixXcd& t = theta.matrix;
  return {(c * f * ci - t).cwiseAbs().maxCoeff(), (ci * t * c - f).cwiseAbs().maxCoeff()};
}

DressedVertex build_X_and_phi_vertex(const ModelSpec& s, double omega, const VertexTarget& target) {
  if (!(omega > 0.0)) fail(ErrorKind::contract, "photon frequency must be positive");
  const double gap = s.gap();
  const double v_res = std::sqrt(eval_v2(s.form_factor, gap));
  auto bare_at = [&](double w) { return std::sqrt(eval_v2(s.form_factor, w)); };

  DressedVertex r;
  r.omega_lambda = omega;
  r.bare = bare_at(omega);
  if (target.kind == VertexTarget::Kind::bare) {
    r.X = 0.0;
    r.phi1 = r.bare;
    r.phi_abs = r.phi_em = r.bare.real() * std::sqrt(omega);
    r.absorb_left = r.absorb_right = r.emit_left = r.bare;
    r.emit_right = -r.bare;
    return r;
  }

  // Causal target: constant strength matched to the bare vertex at resonance.
  r.phi_abs = r.phi_em = v_res * std::sqrt(gap);
  const double kr_per_omega = dot3(target.direction, target.position);
  auto plane = [&](double w) { return std::exp(I * w * kr_per_omega) / std::sqrt(w); };
  auto numerator = [&](double w) { return bare_at(w) - r.phi_abs * plane(w); };

  const cplx n_res = numerator(gap);
  if (std::abs(n_res) > 1e-12 * std::max(v_res, 1e-300) && v_res > 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "causal vertex: numerator does not vanish at resonance (|N| = " << std::abs(n_res)
       << "); X would have a pole";
    fail(ErrorKind::singular, os.str());
  }
  const double detune = omega - gap;  // omega0 + omega - omega1
  if (std::abs(detune) < 1e-7 * std::max(1.0, gap)) {
    const double h = 1e-5 * std::max(1.0, gap);
    r.X = (numerator(gap + h) - numerator(gap - h)) / (2.0 * h);
  } else {
    r.X = numerator(omega) / detune;
  }
  r.phi1 = r.bare - detune * r.X;
  const cplx e = plane(omega);
  r.absorb_left = r.phi_abs * e;
  r.absorb_right = r.phi_abs * std::conj(e);
  r.emit_left = r.phi_em * std::conj(e);
  r.emit_right = -r.phi_em * e;
  return r;
}

}  // namespace subdyn
