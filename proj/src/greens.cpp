#include "subdyn/greens.hpp"

#include <cmath>
#include <sstream>

#include "subdyn/collision.hpp"
#include "subdyn/continuum.hpp"
#include "subdyn/errors.hpp"

namespace subdyn {

namespace {

double level_energy(const ModelSpec& s, Level l) { return l == Level::excited ? s.omega1 : s.omega0; }

// The intermediate state of the loop carries the other level plus one photon.
double other_energy(const ModelSpec& s, Level l) { return l == Level::excited ? s.omega0 : s.omega1; }

cplx f_value(const ModelSpec& s, Level l, cplx z) {
  if (s.form_factor.g2 == 0.0) return 0.0;
  auto rho = [ff = s.form_factor](cplx w) { return eval_v2_analytic(ff, w); };
  return -cauchy(rho, z - other_energy(s, l), Side::above, s.quadrature);
}

[[noreturn]] void no_convergence(const char* what, cplx last, double residual) {
  std::ostringstream os;
  os.precision(17);
  os << what << " did not converge; last iterate " << last.real() << (last.imag() < 0 ? "" : "+")
     << last.imag() << "i, residual " << residual;
  fail(ErrorKind::convergence, os.str());
}

}  // namespace

std::string to_string(PoleKind k) {
  switch (k) {
    case PoleKind::excited: return "excited";
    case PoleKind::ground: return "ground";
    case PoleKind::bar_excited: return "bar_excited";
    case PoleKind::bar_ground: return "bar_ground";
  }
  return "?";
}

SheetedValue eval_f(const ModelSpec& s, Level l, cplx z) {
  return {f_value(s, l, z), z.imag() <= 0.0};
}

SheetedValue eval_eta_inv(const ModelSpec& s, Level l, cplx z) {
  const cplx eta = z - level_energy(s, l) - f_value(s, l, z);
  if (std::abs(eta) < 1e-14) fail(ErrorKind::singular, "Green's function evaluated at its pole");
  return {1.0 / eta, z.imag() <= 0.0};
}

PoleData find_pole(const ModelSpec& s, Level l) {
  const auto& ps = s.pole_solver;
  const double e = level_energy(s, l);
  auto f = [&](cplx z) { return f_value(s, l, z); };
  if (l == Level::excited) {
    // Start from the boundary value at the bare energy.
    cplx z = e + f(cplx(e, 0.0));
    double res = std::abs(z - e - f(z));
    int it = 0;
    while (res >= ps.tol) {
      if (it >= ps.max_iter) no_convergence("excited pole search", z, res);
      const cplx g = z - e - f(z);
      const cplx dg = 1.0 - holomorphic_derivative(f, z);
      z -= ps.damping * g / dg;
      res = std::abs(z - e - f(z));
      ++it;
    }
    const cplx residue = 1.0 / (1.0 - holomorphic_derivative(f, z));
    return {PoleKind::excited, z, residue, res, it};
  }
  // Ground level: f is real below the threshold, so iterate on the real axis.
  auto fr = [&](double x) { return f(cplx(x, 0.0)).real(); };
  double x = e + fr(e);
  double res = std::abs(x - e - fr(x));
  int it = 0;
  while (res >= ps.tol) {
    if (it >= ps.max_iter) no_convergence("ground pole search", x, res);
    const double h = 1e-7 * std::max(1.0, std::abs(x));
    const double dg = 1.0 - (fr(x + h) - fr(x - h)) / (2.0 * h);
    x -= ps.damping * (x - e - fr(x)) / dg;
    res = std::abs(x - e - fr(x));
    ++it;
  }
  const double h = 1e-7 * std::max(1.0, std::abs(x));
  const double df = (fr(x + h) - fr(x - h)) / (2.0 * h);
  return {PoleKind::ground, cplx(x, 0.0), 1.0 / (1.0 - df), res, it};
}

PoleData bar_pole(const PoleData& p) {
  PoleData b = p;
  switch (p.kind) {
    case PoleKind::excited:
      b.kind = PoleKind::bar_excited;
      b.location = -std::conj(p.location);
      b.residue = std::conj(p.residue);
      return b;
    case PoleKind::ground:
      b.kind = PoleKind::bar_ground;
      b.location = -p.location;
      return b;
    default:
      fail(ErrorKind::contract, "bar_pole expects an excited or ground pole");
  }
}

cplx reduced_resolvent_11_11(const ModelSpec& s, cplx z) {
  const cplx a = eval_W2_diag(s, DiagElement::e11_11, z);
  const cplx b = eval_W2_diag(s, DiagElement::e00_00, z);
  return (z - b) / (z * (z - a - b));
}

LiouvillePoles compose_liouville_poles(const ModelSpec& s, const PoleData& ex, const PoleData& gr,
                                       const PoleData& bex, const PoleData& bgr) {
  if (ex.kind != PoleKind::excited || gr.kind != PoleKind::ground ||
      bex.kind != PoleKind::bar_excited || bgr.kind != PoleKind::bar_ground)
    fail(ErrorKind::contract, "compose_liouville_poles: pole kinds out of order");
  const double w1 = s.omega1, w0 = s.omega0, gap = s.gap();
  const cplx zeta = ex.location - w1;
  const cplx delta = gr.location - w0;
  const cplx zeta_bar = bex.location + w1;
  const cplx delta_bar = bgr.location + w0;

  LiouvillePoles lp{};
  lp.theta_bar_greens = zeta + zeta_bar;
  lp.delta10_greens = w1 + zeta - w0 + delta_bar;
  lp.delta01_greens = w0 + delta - w1 + zeta_bar;

  if (s.form_factor.g2 == 0.0) {
    lp.theta_bar = 0.0;
    lp.delta10 = gap;
    lp.delta01 = -gap;
    lp.A1sq = lp.A1sq_derivative = 1.0;
    lp.A10 = lp.A10_derivative = 1.0 / (2.0 * gap);
    lp.A01 = lp.A01_derivative = -1.0 / (2.0 * gap);
    return lp;
  }

  const auto& ps = s.pole_solver;

  // Decay pole: root of z = W11.11(z) + W00.00(z). The function is purely imaginary on
  // the imaginary axis, so the search stays there.
  auto a = [&](cplx z) { return eval_W2_diag(s, DiagElement::e11_11, z); };
  auto b = [&](cplx z) { return eval_W2_diag(s, DiagElement::e00_00, z); };
  auto g = [&](cplx z) { return z - a(z) - b(z); };
  double y = lp.theta_bar_greens.imag();
  double res = std::abs(g(cplx(0.0, y)));
  for (int it = 0; res >= ps.tol * std::max(1.0, std::abs(y)); ++it) {
    if (it >= ps.max_iter) no_convergence("decay pole search", cplx(0.0, y), res);
    const cplx z(0.0, y);
    const double dy = g(z).imag() / holomorphic_derivative(g, z).real();
    y -= ps.damping * dy;
    res = std::abs(g(cplx(0.0, y)));
  }
  lp.theta_bar = cplx(0.0, y);
  lp.theta_residual = res;

  // Coherence poles: roots of the dipolar denominator near the composed values.
  auto D = [&](cplx z) { return dipolar_denominator(s, z); };
  cplx z = lp.delta10_greens;
  res = std::abs(D(z));
  for (int it = 0; res >= ps.tol; ++it) {
    if (it >= ps.max_iter) no_convergence("coherence pole search", z, res);
    z -= ps.damping * D(z) / holomorphic_derivative(D, z);
    res = std::abs(D(z));
  }
  lp.delta10 = z;
  lp.delta01 = -std::conj(z);
  lp.delta_residual = res;

  // Residues. The circle must stay well inside the distance to the pole at zero.
  const double r1 = std::min(1e-6, 0.05 * std::abs(lp.theta_bar));
  lp.A1sq = residue_limit([&](cplx w) { return reduced_resolvent_11_11(s, w); }, lp.theta_bar, r1);
  const cplx th = lp.theta_bar;
  lp.A1sq_derivative = (th - b(th)) / (th * (1.0 - holomorphic_derivative([&](cplx w) {
                                                  return a(w) + b(w);
                                                }, th)));
  auto invD = [&](cplx w) { return 1.0 / D(w); };
  lp.A10 = residue_limit(invD, lp.delta10);
  lp.A01 = residue_limit(invD, lp.delta01);
  lp.A10_derivative = 1.0 / holomorphic_derivative(D, lp.delta10);
  lp.A01_derivative = 1.0 / holomorphic_derivative(D, lp.delta01);

  // Consistency: the decay pole must be purely imaginary and in the lower half plane.
  if (!(std::abs(lp.theta_bar_greens.real()) <= 1e-10 * std::abs(lp.theta_bar_greens.imag()) + 1e-14) ||
      !(lp.theta_bar.imag() < 0.0)) {
    fail(ErrorKind::invariant, "decay pole is not purely imaginary in the lower half plane");
  }
  return lp;
}

PoleSet find_all_poles(const ModelSpec& s) {
  PoleSet p;
  p.excited = find_pole(s, Level::excited);
  p.ground = find_pole(s, Level::ground);
  p.bar_excited = bar_pole(p.excited);
  p.bar_ground = bar_pole(p.ground);
  p.liouville = compose_liouville_poles(s, p.excited, p.ground, p.bar_excited, p.bar_ground);
  return p;
}

}  // namespace subdyn
