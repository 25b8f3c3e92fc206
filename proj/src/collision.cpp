#include "subdyn/collision.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "subdyn/errors.hpp"
#include "subdyn/parallel.hpp"

namespace subdyn {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

AnalyticDensity v2_of(const ModelSpec& s) {
  return [ff = s.form_factor](cplx w) { return eval_v2_analytic(ff, w); };
}

// Upper-side and lower-side Cauchy transforms of v2.
cplx Fa(const ModelSpec& s, cplx w) { return cauchy(v2_of(s), w, Side::above, s.quadrature); }
cplx Fb(const ModelSpec& s, cplx w) { return cauchy(v2_of(s), w, Side::below, s.quadrature); }

// Excited-excited element: left loop through 0k1, right loop through 10k.
cplx w11_11(const ModelSpec& s, cplx z) { return -Fa(s, s.gap() + z) + Fb(s, s.gap() - z); }

// Ground-ground element: counter-rotating loops through 1k0 and 01k.
cplx w00_00(const ModelSpec& s, cplx z) { return -Fa(s, z - s.gap()) + Fb(s, -s.gap() - z); }

// Both coherences share the same loop pair.
cplx w10_10(const ModelSpec& s, cplx z) { return -Fa(s, z) + Fb(s, -z); }

}  // namespace

std::string to_string(DiagElement e) {
  switch (e) {
    case DiagElement::e11_11: return "11.11";
    case DiagElement::e00_00: return "00.00";
    case DiagElement::e11_00: return "11.00";
    case DiagElement::e00_11: return "00.11";
  }
  return "?";
}

std::string to_string(DipoleElement e) {
  switch (e) {
    case DipoleElement::e10_10: return "10.10";
    case DipoleElement::e01_01: return "01.01";
    case DipoleElement::e10_01: return "10.01";
    case DipoleElement::e01_10: return "01.10";
  }
  return "?";
}

std::string to_string(PhotonElement e) {
  switch (e) {
    case PhotonElement::l_11_0l1: return "11.0l1";
    case PhotonElement::l_00_0l1: return "00.0l1";
    case PhotonElement::l_00_1l0: return "00.1l0";
    case PhotonElement::l_11_1l0: return "11.1l0";
    case PhotonElement::r_11_10l: return "11.10l";
    case PhotonElement::r_00_10l: return "00.10l";
    case PhotonElement::r_00_01l: return "00.01l";
    case PhotonElement::r_11_01l: return "11.01l";
  }
  return "?";
}

std::string to_string(Irreducible op) {
  switch (op) {
    case Irreducible::psi: return "psi";
    case Irreducible::T: return "T";
    case Irreducible::W: return "W";
  }
  return "?";
}

cplx eval_irreducible_diag(const ModelSpec& s, Irreducible op, DiagElement e, cplx z) {
  if (s.form_factor.g2 == 0.0) return 0.0;
  // Diagonal-to-diagonal elements with the same atomic pair have no connecting vertex at
  // this order; the crossing elements consist of connecting vertices only.
  const bool crossing = e == DiagElement::e11_00 || e == DiagElement::e00_11;
  if (op == Irreducible::psi && crossing) return 0.0;
  if (op == Irreducible::T && !crossing) return 0.0;
  switch (e) {
    case DiagElement::e11_11: return w11_11(s, z);
    case DiagElement::e00_00: return w00_00(s, z);
    case DiagElement::e11_00: return -w00_00(s, z);
    case DiagElement::e00_11: return -w11_11(s, z);
  }
  fail(ErrorKind::contract, "unknown diagonal element");
}

cplx eval_W2_diag(const ModelSpec& s, DiagElement e, cplx z) {
  return eval_irreducible_diag(s, Irreducible::W, e, z);
}

Extrapolated eval_W2_diag_limit(const ModelSpec& s, DiagElement e, double x) {
  return boundary_limit([&](cplx z) { return eval_W2_diag(s, e, z); }, x, s.epsilon_limit);
}

cplx eval_irreducible_dipolar(const ModelSpec& s, Irreducible op, DipoleElement e, cplx z) {
  if (s.form_factor.g2 == 0.0) return 0.0;
  const bool crossing = e == DipoleElement::e10_01 || e == DipoleElement::e01_10;
  if (op == Irreducible::psi && crossing) return 0.0;
  if (op == Irreducible::T && !crossing) return 0.0;
  const cplx w = w10_10(s, z);
  return crossing ? -w : w;
}

cplx eval_W_dipolar(const ModelSpec& s, DipoleElement e, cplx z) {
  return eval_irreducible_dipolar(s, Irreducible::W, e, z);
}

cplx dipolar_denominator(const ModelSpec& s, cplx z) {
  const double d = s.gap();
  const cplx a = eval_W_dipolar(s, DipoleElement::e10_10, z);
  const cplx b = eval_W_dipolar(s, DipoleElement::e01_01, z);
  return z * z - z * (a + b) - d * d + d * (b - a);
}

cplx eval_W_one_photon(const ModelSpec& s, PhotonElement e, double omega_lambda) {
  if (!(omega_lambda > 0.0)) fail(ErrorKind::contract, "photon frequency must be positive");
  const double v = std::sqrt(eval_v2(s.form_factor, omega_lambda));
  // Left action enters with +, right action with -; absorbing on the excited side of the
  // ket raises the atom, absorbing on the ground side lowers it.
  switch (e) {
    case PhotonElement::l_11_0l1: return v;
    case PhotonElement::l_00_0l1: return -v;
    case PhotonElement::l_00_1l0: return v;
    case PhotonElement::l_11_1l0: return -v;
    case PhotonElement::r_11_10l: return -v;
    case PhotonElement::r_00_10l: return v;
    case PhotonElement::r_00_01l: return -v;
    case PhotonElement::r_11_01l: return v;
  }
  fail(ErrorKind::contract, "unsupported one-photon element");
}

double inverse_square_moment(const ModelSpec& s) {
  const double d = s.gap();
  auto f = [&](double w) -> cplx { return eval_v2(s.form_factor, w) / ((d + w) * (d + w)); };
  return integrate_band(f, s.quadrature).real();
}

FourthOrderGround eval_W4_0000_at0(const ModelSpec& s, bool strict, double tol) {
  const double D = s.gap();
  const auto& q = s.quadrature;
  const auto& ff = s.form_factor;
  auto v = [&](double w) { return eval_v2(ff, w); };
  auto v_over = [&](double w) -> cplx { return v(w) / (D + w); };
  auto v_real = [&](double w) -> cplx { return v(w); };

  // Inner integrals over the second photon.
  auto G = [&](double w) {  // int v' / (w + w')
    return integrate_band([&](double u) -> cplx { return v(u) / (w + u); }, q, w);
  };
  auto H = [&](double w) {  // int v' / ((w + w')(D + w'))
    return integrate_band([&](double u) -> cplx { return v(u) / ((w + u) * (D + u)); }, q, w);
  };
  auto Bv = [&](double w, Side side) { return cauchy_real(v_real, w, side, q); };
  auto Bvd = [&](double w, Side side) { return cauchy_real(v_over, w, side, q); };

  using Fn = std::function<cplx()>;
  struct Spec {
    const char* name;
    Irreducible group;
    Fn eval;
  };
  // Each term is written with its own propagators; primed terms flip every frequency.
  std::vector<Spec> specs = {
      {"c1", Irreducible::psi, [&] {
         return integrate_band([&](double w) {
           return v(w) / ((-D - w) * (-D - w)) * (-G(w));
         }, q);
       }},
      {"c2", Irreducible::psi, [&] {
         return integrate_band([&](double w) { return v(w) / (-D - w) * H(w); }, q);
       }},
      {"c3", Irreducible::psi, [&] {
         return integrate_band([&](double w) {
           return v(w) / ((D + w) * (D + w)) * Bv(w, Side::below);
         }, q);
       }},
      {"c4", Irreducible::psi, [&] {
         return integrate_band([&](double w) {
           return v(w) / (-D - w) * Bvd(w, Side::below);
         }, q);
       }},
      {"c1p", Irreducible::psi, [&] {
         return integrate_band([&](double w) {
           return v(w) / ((D + w) * (D + w)) * G(w);
         }, q);
       }},
      {"c2p", Irreducible::psi, [&] {
         return integrate_band([&](double w) { return v(w) / (D + w) * H(w); }, q);
       }},
      {"c3p", Irreducible::psi, [&] {
         return integrate_band([&](double w) {
           return v(w) / ((D + w) * (D + w)) * (-Bv(w, Side::above));
         }, q);
       }},
      {"c4p", Irreducible::psi, [&] {
         return integrate_band([&](double w) {
           return v(w) / (D + w) * Bvd(w, Side::above);
         }, q);
       }},
      {"c5", Irreducible::T, [&] {
         return -cauchy_real([&](double w) { return v(w) * G(w) / (D + w); }, D, Side::above, q);
       }},
      {"c6", Irreducible::T, [&] {
         return -cauchy_real([&](double w) { return v(w) * H(w); }, D, Side::above, q);
       }},
      {"c7", Irreducible::T, [&] {
         return cauchy_real([&](double w) { return v(w) / (D + w) * Bv(w, Side::below); }, D,
                            Side::above, q);
       }},
      {"c8", Irreducible::T, [&] {
         return -cauchy_real([&](double w) { return v(w) * Bvd(w, Side::below); }, D,
                             Side::above, q);
       }},
      {"c5p", Irreducible::T, [&] {
         return cauchy_real([&](double w) { return v(w) * G(w) / (D + w); }, D, Side::below, q);
       }},
      {"c6p", Irreducible::T, [&] {
         return cauchy_real([&](double w) { return v(w) * H(w); }, D, Side::below, q);
       }},
      {"c7p", Irreducible::T, [&] {
         return -cauchy_real([&](double w) { return v(w) / (D + w) * Bv(w, Side::above); }, D,
                             Side::below, q);
       }},
      {"c8p", Irreducible::T, [&] {
         return cauchy_real([&](double w) { return v(w) * Bvd(w, Side::above); }, D,
                            Side::below, q);
       }},
  };

  FourthOrderGround out;
  out.terms.resize(specs.size());
  parallel_for(specs.size(), [&](size_t i) {
    out.terms[i] = {specs[i].name, specs[i].group, specs[i].eval()};
  });

  auto val = [&](const char* n) {
    for (const auto& t : out.terms)
      if (t.name == n) return t.value;
    fail(ErrorKind::contract, "missing term");
  };

  out.psi_total = 0.0;
  out.t_total = 0.0;
  for (const auto& t : out.terms) (t.group == Irreducible::psi ? out.psi_total : out.t_total) += t.value;
  out.total = out.psi_total + out.t_total;

  const double vD = v(D);
  const double m2 = inverse_square_moment(s);
  const cplx GD = G(D);
  out.closed_form = -2.0 * pi * I * vD * m2;

  // Regular double integral the resonant pair reduces to.
  const cplx m1 = integrate_band([&](double w) -> cplx { return v(w) / (D + w); }, q);
  const cplx c34_regular = integrate_band(
      [&](double w) -> cplx { return v(w) / ((D + w) * (D + w)); }, q) * m1;

  auto add = [&](const std::string& name, cplx lhs, cplx rhs, double scale) {
    const double r = scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
    out.checks.push_back({name, lhs, rhs, r, scale, tol, r <= tol});
  };
  const cplx c1 = val("c1"), c2 = val("c2"), c34 = val("c3") + val("c4");
  add("c1+c1p", c1 + val("c1p"), 0.0, std::abs(c1));
  add("c2+c2p", c2 + val("c2p"), 0.0, std::abs(c2));
  add("c34 regular limit", c34, c34_regular, std::abs(c34_regular));
  add("c34+c3p4p", c34 + val("c3p") + val("c4p"), 0.0, std::abs(c34));
  const cplx rho5 = vD * GD / (2.0 * D);
  const cplx rho6 = vD * m2;
  add("c56+c5p6p", val("c5") + val("c6") + val("c5p") + val("c6p"), -2.0 * pi * I * (rho5 + rho6),
      std::abs(rho5 + rho6) * 2.0 * pi);
  add("c78+c7p8p", val("c7") + val("c8") + val("c7p") + val("c8p"),
      2.0 * pi * I * vD / (2.0 * D) * m1, std::abs(2.0 * pi * vD / (2.0 * D) * m1));
  add("total vs closed form", out.total, out.closed_form, std::abs(out.closed_form));

  if (strict && s.form_factor.g2 > 0.0) {
    for (const auto& c : out.checks) {
      if (!c.pass) {
        std::ostringstream os;
        os << "fourth-order check '" << c.name << "' failed: residual " << c.residual
           << " > " << c.tolerance;
        fail(ErrorKind::invariant, os.str());
      }
    }
  }
  return out;
}

cplx W00_00_at0(const ModelSpec& s) {
  cplx w = eval_W2_diag(s, DiagElement::e00_00, 0.0);
  if (s.w00_order == 4 && s.form_factor.g2 > 0.0) w += eval_W4_0000_at0(s).total;
  return w;
}

}  // namespace subdyn
