#include "subdyn/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <sstream>

#include "subdyn/errors.hpp"

namespace subdyn {

namespace {

const cplx I(0.0, 1.0);

double decay_rate(const PoleSet& p) { return -2.0 * p.excited.location.imag(); }

// Sample times for the sector blocks: zero plus one and five lifetimes (or gap periods).
std::vector<double> block_times(const KineticSet& ks) {
  const double g = -ks.poles.liouville.theta_bar.imag();
  const double unit = g > 0.0 ? 1.0 / g : 1.0 / ks.spec.gap();
  return {0.0, unit, 5.0 * unit};
}

// Distance between two small spectra under the best pairing of their elements.
double spectrum_distance(const Eigen::MatrixXcd& m, const std::vector<cplx>& expected) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<size_t> perm(expected.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double d = 0.0;
    for (size_t i = 0; i < perm.size(); ++i)
      d = std::max(d, std::abs(es.eigenvalues()(static_cast<Eigen::Index>(i)) - expected[perm[i]]));
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

Json w_table(const KineticSet& ks) {
  const auto& lp = ks.poles.liouville;
  Json t = Json::array();
  auto row = [&](const std::string& e, int order, cplx z, cplx v) {
    t.push_back(Json{{"element", e}, {"order", order}, {"z", to_json(z)}, {"value", to_json(v)}});
  };
  row("11.11", 2, 0.0, ks.w.w11_0);
  row("00.00", 2, 0.0, ks.w.w00_0_order2);
  if (ks.fourth) row("00.00", 4, 0.0, ks.w.w00_0_order4);
  row("11.11", 2, lp.theta_bar, ks.w.w11_theta);
  row("00.00", 2, lp.theta_bar, ks.w.w00_theta);
  const char* names[2][2] = {{"10.10", "10.01"}, {"01.10", "01.01"}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) row(names[r][c], 2, lp.delta10, ks.w.wd_at_d10(r, c));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) row(names[r][c], 2, lp.delta01, ks.w.wd_at_d01(r, c));
  return t;
}

Json dressing_json(const DressingSet& d, const SimilarityResidual& r) {
  Json j{{"chi", to_json(d.chi)}, {"chi_inv", to_json(d.chi_inv)}, {"Phi", to_json(d.phi)}};
  if (d.free_param) {
    const auto& f = *d.free_param;
    j["free_parameter"] = Json{{"x", f.x},
                               {"y", f.y},
                               {"phase_difference", f.phase_difference},
                               {"x_from_normalization", f.x_from_normalization},
                               {"phase_convention", f.phase_convention}};
  }
  j["similarity_residual"] = Json{{"forward", r.forward}, {"backward", r.backward}};
  return j;
}

Json vertex_json(const DressedVertex& v) {
  return Json{{"omega_lambda", v.omega_lambda},     {"bare", to_json(v.bare)},
              {"X", to_json(v.X)},                   {"Phi1", to_json(v.phi1)},
              {"phi_abs", v.phi_abs},                {"phi_em", v.phi_em},
              {"absorb_left", to_json(v.absorb_left)}, {"absorb_right", to_json(v.absorb_right)},
              {"emit_left", to_json(v.emit_left)},   {"emit_right", to_json(v.emit_right)}};
}

std::vector<double> photon_frequencies(const ModelSpec& s) {
  return {0.5 * s.gap(), s.gap(), 2.0 * s.gap()};
}

ModelSpec with_overrides(ModelSpec s, const RunOptions& o) {
  if (o.nmax) s.oracle.nmax = *o.nmax;
  if (o.modes) s.oracle.n_modes = *o.modes;
  return require_valid(s);
}

struct SeriesData {
  std::vector<EvolutionSample> samples;
  std::vector<double> predicted;
  Json report;
  std::string csv;
};

// Exact excited-state evolution against the pole prediction |A1|^2 exp(-gamma t).
SeriesData oracle_series(const ModelSpec& spec, const PoleSet& poles, const KineticSet* ks) {
  SeriesData d;
  const ExactSystem sys(spec, ParitySector::odd);
  const auto times = default_time_grid(spec);
  d.samples = sys.evolve_excited(times);
  const double gamma = decay_rate(poles);
  const double a1 = std::norm(poles.excited.residue);
  for (double t : times) d.predicted.push_back(a1 * std::exp(-gamma * t));

  double unitarity = 0.0;
  for (const auto& e : d.samples) unitarity = std::max(unitarity, std::abs(e.norm - 1.0));

  Json j{{"n_modes", sys.basis().n_modes},
         {"omega_max", sys.basis().omega_max},
         {"nmax", sys.basis().nmax},
         {"dimension", sys.basis().dimension()},
         {"method", sys.dense() ? "dense" : "chebyshev"},
         {"decay_rate", gamma},
         {"excited_weight", a1},
         {"max_norm_deviation", unitarity}};
  if (gamma > 0.0) {
    const double t0 = 0.2 / gamma, t1 = 3.0 / gamma;
    const auto fit = fit_exponential(d.samples, t0, t1);
    const auto cmp = compare_kinetic(d.predicted, d.samples, t0, t1);
    j["window"] = Json::array({t0, t1});
    j["exponential_fit"] = Json{{"rate", fit.rate},
                                {"prefactor", fit.prefactor},
                                {"r2", fit.r2},
                                {"points", fit.points},
                                {"relative_rate_deviation", fit.rate / gamma - 1.0}};
    j["comparison"] = Json{{"max_relative", cmp.max_relative},
                           {"rms_relative", cmp.rms_relative},
                           {"points", cmp.points},
                           {"max_top_shell_weight", cmp.max_top_shell_weight}};
    std::vector<double> zt;
    for (int i = 0; i <= 20; ++i) zt.push_back(i * 0.01 / gamma / 20.0);
    const auto zeno = fit_zeno(sys.evolve_excited(zt), 0.01 / gamma);
    j["short_time_fit"] = Json{{"window_end", 0.01 / gamma}, {"coefficient", zeno.coefficient}, {"r2", zeno.r2}};
    // Recurrences of the discretized bath set in after 2 pi / d_omega.
    j["recurrence_time"] = 2.0 * std::acos(-1.0) / sys.basis().delta_omega;
  }
  d.report = j;

  std::ostringstream csv;
  csv << "t,population,re_amplitude,im_amplitude,kinetic_prediction,deviation";
  if (ks) csv << ",sigma_11_11";
  csv << "\n";
  char buf[512];
  for (size_t i = 0; i < d.samples.size(); ++i) {
    const auto& e = d.samples[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", e.t, e.population,
                  e.amplitude.real(), e.amplitude.imag(), d.predicted[i], d.predicted[i] - e.population);
    csv << buf;
    if (ks) {
      std::snprintf(buf, sizeof buf, ",%.17g", sigma_diag(*ks, e.t).matrix(0, 0).real());
      csv << buf;
    }
    csv << "\n";
  }
  d.csv = csv.str();
  return d;
}

Json ground_energy_json(const ModelSpec& spec) {
  const ModelSpec m = matched_cutoff(spec, spec.oracle.omega_max);
  const ExactSystem even(m, ParitySector::even);
  const double e = even.lowest_eigenvalue();
  const double g = find_pole(m, Level::ground).location.real();
  return Json{{"lowest_eigenvalue", e}, {"ground_pole_matched_cutoff", g}, {"offset", e - g}};
}

Json kinetic_json(const KineticSet& ks, SectorChoice sector) {
  Json j;
  if (sector == SectorChoice::diag) {
    Json sig = Json::array();
    for (double t : block_times(ks)) sig.push_back(Json{{"t", t}, {"block", to_json(sigma_diag(ks, t))}});
    j["Sigma"] = sig;
    j["A"] = to_json(build_A_diag(ks));
    j["A_inv"] = to_json(invert_A_diag(ks));
    j["Theta"] = to_json(build_theta_diag(ks));
    const auto f = theta_00_00_fourth_order(ks);
    j["Theta_00_00_order4"] = Json{{"value", to_json(f.value)}, {"target", to_json(f.target)}};
  } else if (sector == SectorChoice::dipole) {
    Json sig = Json::array();
    for (double t : block_times(ks)) sig.push_back(Json{{"t", t}, {"block", to_json(sigma_dipolar(ks, t))}});
    j["Sigma"] = sig;
    j["A"] = to_json(build_A_dipolar(ks));
    j["A_inv"] = to_json(invert_A_dipolar(ks));
    j["Theta"] = to_json(build_theta_dipolar(ks));
    j["alpha"] = to_json(Eigen::MatrixXcd(ks.alpha));
    j["beta"] = to_json(Eigen::MatrixXcd(ks.beta));
    j["det_A_over_residues"] = to_json(dipolar_bracket(ks));
  } else {
    Json arr = Json::array();
    const SectorBlock td = build_theta_diag(ks);
    for (double w : photon_frequencies(ks.spec)) {
      for (auto side : {PhotonSide::left, PhotonSide::right}) {
        const auto ps = theta_absorb(ks, w, side);
        arr.push_back(Json{{"omega_lambda", w},
                           {"side", to_string(side)},
                           {"vertex", to_json(Eigen::MatrixXcd(ps.vertex))},
                           {"Theta_passive", to_json(theta_passive(td, w, side))},
                           {"Theta_mixed", to_json(ps.theta_mixed)},
                           {"A_mixed", to_json(Eigen::MatrixXcd(ps.A_mixed))},
                           {"A_inv_mixed", to_json(Eigen::MatrixXcd(ps.Ainv_mixed))}});
      }
    }
    j["photon"] = arr;
  }
  return j;
}

Json dress_json(const KineticSet& ks, SectorChoice sector) {
  if (sector == SectorChoice::diag) {
    const auto d = build_chi_diag(ks);
    return dressing_json(d, verify_similarity(build_theta_diag(ks), d));
  }
  if (sector == SectorChoice::dipole) {
    const auto d = build_chi_dipolar(ks, ks.spec.dressing_x);
    return dressing_json(d, verify_similarity(build_theta_dipolar(ks), d));
  }
  Json arr = Json::array();
  for (double w : photon_frequencies(ks.spec)) {
    VertexTarget bare, causal;
    causal.kind = VertexTarget::Kind::causal;
    arr.push_back(Json{{"omega_lambda", w},
                       {"bare", vertex_json(build_X_and_phi_vertex(ks.spec, w, bare))},
                       {"causal", vertex_json(build_X_and_phi_vertex(ks.spec, w, causal))}});
  }
  return Json{{"vertex", arr}};
}

}  // namespace

void CheckSuite::at_most(const std::string& name, double value, double tolerance) {
  items_.push_back({name, value, tolerance, CheckRecord::Bound::at_most, value <= tolerance});
}

void CheckSuite::at_least(const std::string& name, double value, double bound) {
  items_.push_back({name, value, bound, CheckRecord::Bound::at_least, value >= bound});
}

void CheckSuite::add(const CancellationCheck& c) {
  items_.push_back({c.name, c.residual, c.tolerance, CheckRecord::Bound::at_most, c.pass});
}

bool CheckSuite::all_pass() const {
  for (const auto& c : items_)
    if (!c.pass) return false;
  return true;
}

Json CheckSuite::to_json() const {
  Json arr = Json::array();
  for (const auto& c : items_) {
    arr.push_back(Json{{"name", c.name},
                       {"value", c.value},
                       {c.bound == CheckRecord::Bound::at_most ? "tolerance" : "lower_bound", c.tolerance},
                       {"pass", c.pass}});
  }
  return arr;
}

std::optional<Command> parse_command(const std::string& s) {
  if (s == "poles") return Command::poles;
  if (s == "kinetic") return Command::kinetic;
  if (s == "dress") return Command::dress;
  if (s == "oracle") return Command::oracle;
  if (s == "verify") return Command::verify;
  if (s == "evolve") return Command::evolve;
  return std::nullopt;
}

std::optional<SectorChoice> parse_sector(const std::string& s) {
  if (s == "diag") return SectorChoice::diag;
  if (s == "dipole") return SectorChoice::dipole;
  if (s == "photon") return SectorChoice::photon;
  return std::nullopt;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::poles: return "poles";
    case Command::kinetic: return "kinetic";
    case Command::dress: return "dress";
    case Command::oracle: return "oracle";
    case Command::verify: return "verify";
    case Command::evolve: return "evolve";
  }
  return "?";
}

std::string to_string(SectorChoice s) {
  switch (s) {
    case SectorChoice::diag: return "diag";
    case SectorChoice::dipole: return "dipole";
    case SectorChoice::photon: return "photon";
  }
  return "?";
}

Json to_json(cplx v) { return Json::array({v.real(), v.imag()}); }

Json to_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const SectorBlock& b) {
  Json j{{"sector", to_string(b.sector)}, {"label", b.label}, {"rows", b.rows}, {"cols", b.cols},
         {"matrix", to_json(b.matrix)}};
  if (b.sector == SectorKind::passive_photon || b.sector == SectorKind::absorb_photon) {
    j["omega_lambda"] = b.omega_lambda;
    j["side"] = to_string(b.side);
  }
  return j;
}

Json to_json(const PoleSet& p) {
  auto pole = [](const PoleData& d) {
    return Json{{"kind", to_string(d.kind)}, {"location", to_json(d.location)}, {"residue", to_json(d.residue)},
                {"solver_residual", d.solver_residual}, {"iterations", d.iterations}};
  };
  const auto& l = p.liouville;
  return Json{
      {"green", Json::array({pole(p.excited), pole(p.ground), pole(p.bar_excited), pole(p.bar_ground)})},
      {"liouville",
       Json{{"theta_bar", to_json(l.theta_bar)},
            {"theta_bar_composed", to_json(l.theta_bar_greens)},
            {"delta10", to_json(l.delta10)},
            {"delta10_composed", to_json(l.delta10_greens)},
            {"delta01", to_json(l.delta01)},
            {"delta01_composed", to_json(l.delta01_greens)},
            {"A1sq", to_json(l.A1sq)},
            {"A1sq_derivative", to_json(l.A1sq_derivative)},
            {"A10", to_json(l.A10)},
            {"A10_derivative", to_json(l.A10_derivative)},
            {"A01", to_json(l.A01)},
            {"A01_derivative", to_json(l.A01_derivative)},
            {"theta_residual", l.theta_residual},
            {"delta_residual", l.delta_residual}}},
      {"decay_rate", decay_rate(p)}};
}

Json to_json(const FourthOrderGround& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms)
    terms.push_back(Json{{"name", t.name}, {"group", to_string(t.group)}, {"value", to_json(t.value)}});
  Json checks = Json::array();
  for (const auto& c : f.checks)
    checks.push_back(Json{{"name", c.name}, {"lhs", to_json(c.lhs)}, {"rhs", to_json(c.rhs)},
                          {"residual", c.residual}, {"scale", c.scale}, {"tolerance", c.tolerance},
                          {"pass", c.pass}});
  return Json{{"terms", terms},          {"checks", checks},
              {"psi_total", to_json(f.psi_total)}, {"t_total", to_json(f.t_total)},
              {"total", to_json(f.total)}, {"closed_form", to_json(f.closed_form)}};
}

Json config_json(const ModelSpec& s) {
  Json eps = Json::array();
  for (double e : s.epsilon_limit) eps.push_back(e);
  Json dx = s.dressing_x ? Json(*s.dressing_x) : Json("auto");
  return Json{{"atom", Json{{"omega1", s.omega1}, {"omega0", s.omega0}}},
              {"coupling", Json{{"family", "exponential-ohmic"}, {"g2", s.form_factor.g2},
                                {"cutoff_omega", s.form_factor.cutoff}}},
              {"numerics",
               Json{{"quad_max_depth", s.quadrature.max_depth}, {"quad_abs_tol", s.quadrature.abs_tol},
                    {"quad_rel_tol", s.quadrature.rel_tol}, {"quad_cutoff", s.quadrature.cutoff},
                    {"solver_max_iter", s.pole_solver.max_iter}, {"solver_tol", s.pole_solver.tol},
                    {"solver_damping", s.pole_solver.damping}, {"epsilon_limit", eps},
                    {"oracle_modes", s.oracle.n_modes}, {"oracle_omega_max", s.oracle.omega_max},
                    {"oracle_nmax", s.oracle.nmax}, {"oracle_dense_cap", s.oracle.dense_cap},
                    {"oracle_basis_cap", s.oracle.basis_cap}, {"w00_order", s.w00_order},
                    {"dressing_x", dx}}}};
}

std::vector<cplx> resolvent_probe_points(const ModelSpec& s) {
  const double a = s.omega1, b = s.omega0, g = s.gap();
  return {{a, 0.5},           {0.5 * (a + b), 0.2}, {a + g, 1.0},        {b, 0.3},
          {a, 0.2},           {a + 0.5 * g, 0.4},   {b - 0.5 * g, 0.3},  {a + 2.0 * g, 2.0},
          {b + 0.8 * g, 0.25}, {a + 0.2 * g, 0.6}};
}

double resolvent_deviation(const ModelSpec& spec, int n_modes, int nmax) {
  const ModelSpec m = matched_cutoff(spec, spec.oracle.omega_max);
  const ExactSystem odd(m, n_modes, m.oracle.omega_max, nmax, ParitySector::odd);
  const ExactSystem even(m, n_modes, m.oracle.omega_max, nmax, ParitySector::even);
  double worst = 0.0;
  for (cplx z : resolvent_probe_points(m)) {
    for (Level l : {Level::excited, Level::ground}) {
      const cplx exact = (l == Level::excited ? odd : even).resolvent_diag(l, z);
      const cplx model = eval_eta_inv(m, l, z).value;
      worst = std::max(worst, std::abs(exact - model) / std::abs(model));
    }
  }
  return worst;
}

std::vector<double> default_time_grid(const ModelSpec& spec, int n) {
  const PoleData ex = find_pole(spec, Level::excited);
  const double gamma = -2.0 * ex.location.imag();
  const double t_max = gamma > 0.0 ? 3.0 / gamma : 10.0 / spec.gap();
  std::vector<double> t;
  for (int i = 0; i <= n; ++i) t.push_back(t_max * i / n);
  return t;
}

CheckSuite invariant_suite(const ModelSpec& spec) {
  CheckSuite c;
  const KineticSet ks = build_kinetic_set(spec);
  const auto& p = ks.poles;
  const auto& lp = p.liouville;
  const double g2 = spec.form_factor.g2;

  // Poles.
  c.at_most("excited pole solver residual", p.excited.solver_residual, 1e-12);
  c.at_most("ground pole solver residual", p.ground.solver_residual, 1e-12);
  c.at_most("ground shift is real", std::abs(p.ground.location.imag()), 1e-10 * g2);
  c.at_most("decay pole is imaginary",
            std::abs(lp.theta_bar) > 0 ? std::abs(lp.theta_bar.real()) / std::abs(lp.theta_bar) : 0.0, 1e-10);
  c.at_most("composed decay pole is imaginary",
            std::abs(lp.theta_bar_greens) > 0
                ? std::abs(lp.theta_bar_greens.real()) / std::abs(lp.theta_bar_greens) : 0.0, 1e-10);
  c.at_most("coherence poles mirror", std::abs(lp.delta01 + std::conj(lp.delta10)), 1e-12);
  c.at_most("decay residue circle vs derivative", std::abs(lp.A1sq - lp.A1sq_derivative), 1e-8);
  c.at_most("coherence residue circle vs derivative", std::abs(lp.A10 - lp.A10_derivative), 1e-8);

  // Populations.
  const Eigen::MatrixXcd A = build_A_diag(ks).matrix;
  const Eigen::MatrixXcd Ai = invert_A_diag(ks).matrix;
  const Eigen::MatrixXcd T = build_theta_diag(ks).matrix;
  c.at_most("diag det A equals decay residue", std::abs(A.determinant() - lp.A1sq), 1e-10);
  c.at_most("diag A times closed-form inverse", max_abs(A * Ai - Eigen::MatrixXcd::Identity(2, 2)), 1e-10);
  double sum_rule = 0.0, evol = 0.0;
  for (double t : block_times(ks)) {
    const Eigen::MatrixXcd S = sigma_diag(ks, t).matrix;
    sum_rule = std::max(sum_rule, std::abs(S(0, 0) + S(1, 0) - 1.0));
    evol = std::max(evol, max_abs(evolve(T, t) * A - S));
    c.at_most("diag population sum rule at t=" + fmt_time(t), std::abs(S(0, 0) + S(1, 0) - 1.0), 1e-10);
  }
  c.at_most("diag Theta column sums", max_abs(T.colwise().sum()), 1e-12);
  c.at_most("diag Theta spectrum", spectrum_distance(T, {0.0, lp.theta_bar}), 1e-8);
  c.at_most("diag exp(-i Theta t) A equals Sigma(t)", evol, 1e-8);
  const auto f4 = theta_00_00_fourth_order(ks);
  if (ks.fourth) {
    for (const auto& chk : ks.fourth->checks) c.add(chk);
    c.at_most("Theta00.00 order 4 vs closed form (relative)", std::abs(f4.value - f4.target) / std::abs(f4.target), 1e-6);
    c.at_least("Theta00.00 order 4 magnitude", std::abs(f4.value), 1e-300);
  }

  // Coherences.
  const Eigen::MatrixXcd AD = build_A_dipolar(ks).matrix;
  const Eigen::MatrixXcd TD = build_theta_dipolar(ks).matrix;
  c.at_most("dipole det alpha", std::abs(ks.alpha.determinant()), 1e-8);
  c.at_most("dipole det beta", std::abs(ks.beta.determinant()), 1e-8);
  c.at_most("dipole Theta spectrum", spectrum_distance(TD, {lp.delta10, lp.delta01}), 1e-8);
  double evol_d = 0.0;
  for (double t : block_times(ks)) evol_d = std::max(evol_d, max_abs(evolve(TD, t) * AD - sigma_dipolar(ks, t).matrix));
  c.at_most("dipole exp(-i Theta t) A equals Sigma(t)", evol_d, 1e-8);

  // Dressing.
  const auto dd = build_chi_diag(ks);
  const auto rd = verify_similarity(build_theta_diag(ks), dd);
  c.at_most("diag chi Phi chi^-1 = Theta", rd.forward, 1e-10);
  c.at_most("diag chi^-1 Theta chi = Phi", rd.backward, 1e-10);
  c.at_most("diag chi chi^-1 = 1", max_abs(dd.chi.matrix * dd.chi_inv.matrix - Eigen::MatrixXcd::Identity(2, 2)), 1e-12);
  const auto& X = dd.chi.matrix;
  const auto& Xi = dd.chi_inv.matrix;
  c.at_most("diag dressing trace conditions",
            std::max(std::abs(X(0, 0) + X(1, 0) - 1.0), std::abs(Xi(0, 0) + Xi(1, 0) - 1.0)), 1e-12);
  if (!ks.free_theory)
    c.at_most("diag dressing determinant",
              std::abs(X.determinant() - (ks.w.w11_0 - ks.w.w00_0) / (ks.w.w11_0 + ks.w.w00_0)), 1e-12);
  c.at_most("diag Theta and Phi spectra", spectrum_distance(T, {0.0, lp.theta_bar}) +
                                               spectrum_distance(dd.phi.matrix, {0.0, lp.theta_bar}), 1e-10);
  const auto dp = build_chi_dipolar(ks, spec.dressing_x);
  const auto rp = verify_similarity(build_theta_dipolar(ks), dp);
  c.at_most("dipole chi Phi chi^-1 = Theta", rp.forward, 1e-8);
  c.at_most("dipole chi^-1 Theta chi = Phi", rp.backward, 1e-8);
  c.at_most("dipole chi chi^-1 = 1", max_abs(dp.chi.matrix * dp.chi_inv.matrix - Eigen::MatrixXcd::Identity(2, 2)), 1e-12);
  const auto& Y = dp.chi.matrix;
  c.at_most("dipole dressing hermiticity",
            std::max(std::abs(Y(0, 0) - std::conj(Y(1, 1))), std::abs(Y(1, 0) - std::conj(Y(0, 1)))), 1e-12);
  if (!spec.dressing_x)
    c.at_most("dipole dressing normalization",
              std::abs(Y.determinant() * Y.determinant() - AD.determinant()), 1e-10);

  // One-photon sector, away from the free coherence frequency.
  const double w = 0.5 * spec.gap();
  const auto left = theta_absorb(ks, w, PhotonSide::left);
  const auto right = theta_absorb(ks, w, PhotonSide::right);
  double evol_p = 0.0;
  for (const auto* ps : {&left, &right})
    for (double t : block_times(ks))
      evol_p = std::max(evol_p, max_abs(evolve(ps->theta_full, t) * ps->A_full - ps->sigma_full(ks, t)));
  c.at_most("photon exp(-i Theta t) A equals Sigma(t)", evol_p, 1e-8);
  // A bra-side photon mirrors a ket-side one: columns swap and conjugate with a sign.
  const Eigen::Matrix2cd& Lm = left.theta_mixed.matrix;
  const Eigen::Matrix2cd& Rm = right.theta_mixed.matrix;
  double mirror = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int col = 0; col < 2; ++col) mirror = std::max(mirror, std::abs(Rm(r, col) + std::conj(Lm(r, 1 - col))));
  c.at_most("photon left/right mirror", mirror, 1e-10);

  // Vertex at resonance.
  VertexTarget bare, causal;
  causal.kind = VertexTarget::Kind::causal;
  const auto vb = build_X_and_phi_vertex(spec, spec.gap(), bare);
  const auto vc = build_X_and_phi_vertex(spec, spec.gap(), causal);
  c.at_most("bare vertex at resonance", std::abs(vb.phi1 - vb.bare), 1e-14);
  c.at_most("causal vertex at resonance", std::abs(vc.phi1 - vc.bare), 1e-12);

  // Oracle resolvent at the configured grid.
  c.at_most("oracle resolvent vs Green's function (relative)",
            resolvent_deviation(spec, spec.oracle.n_modes, spec.oracle.nmax), 1e-3);
  return c;
}

RunOutput run_command(const ModelSpec& in, const RunOptions& opt) {
  const ModelSpec spec = with_overrides(in, opt);
  RunOutput out;
  Json& r = out.report;
  r["schema"] = 1;
  r["command"] = to_string(opt.command);
  r["config"] = config_json(spec);

  switch (opt.command) {
    case Command::poles: {
      r["poles"] = to_json(find_all_poles(spec));
      break;
    }
    case Command::kinetic: {
      const KineticSet ks = build_kinetic_set(spec);
      r["sector"] = to_string(opt.sector);
      r["poles"] = to_json(ks.poles);
      r["W"] = w_table(ks);
      r["blocks"] = kinetic_json(ks, opt.sector);
      if (ks.fourth) r["fourth_order_cancellations"] = to_json(*ks.fourth);
      break;
    }
    case Command::dress: {
      const KineticSet ks = build_kinetic_set(spec);
      r["sector"] = to_string(opt.sector);
      r["Theta"] = opt.sector == SectorChoice::diag     ? to_json(build_theta_diag(ks))
                   : opt.sector == SectorChoice::dipole ? to_json(build_theta_dipolar(ks))
                                                        : Json();
      r["dressing"] = dress_json(ks, opt.sector);
      break;
    }
    case Command::oracle:
    case Command::evolve: {
      const PoleSet poles = find_all_poles(spec);
      std::optional<KineticSet> ks;
      if (opt.command == Command::evolve) ks = build_kinetic_set(spec);
      auto series = oracle_series(spec, poles, ks ? &*ks : nullptr);
      r["poles"] = to_json(poles);
      r["oracle"] = series.report;
      r["oracle"]["ground_energy"] = ground_energy_json(spec);
      double unitarity = series.report["max_norm_deviation"].get<double>();
      CheckSuite c;
      c.at_most("oracle unitarity", unitarity, 1e-10);
      r["checks"] = c.to_json();
      out.passed = c.all_pass();
      out.csv = series.csv;
      break;
    }
    case Command::verify: {
      const KineticSet ks = build_kinetic_set(spec);
      r["poles"] = to_json(ks.poles);
      r["W"] = w_table(ks);
      Json blocks;
      blocks["diag"] = kinetic_json(ks, SectorChoice::diag);
      blocks["dipole"] = kinetic_json(ks, SectorChoice::dipole);
      blocks["dressing_diag"] = dress_json(ks, SectorChoice::diag);
      blocks["dressing_dipole"] = dress_json(ks, SectorChoice::dipole);
      r["blocks"] = blocks;
      if (ks.fourth) r["fourth_order_cancellations"] = to_json(*ks.fourth);
      const CheckSuite c = invariant_suite(spec);
      r["checks"] = c.to_json();
      out.passed = c.all_pass();
      break;
    }
  }
  r["verdict"] = out.passed;
  return out;
}

}  // namespace subdyn
