#include "subdyn/model.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "subdyn/errors.hpp"

namespace subdyn {

double eval_v2(const FormFactor& ff, double omega) {
  if (!(omega > 0.0)) return 0.0;
  return ff.g2 * omega * std::exp(-omega / ff.cutoff);
}

cplx eval_v2_analytic(const FormFactor& ff, cplx omega) {
  return ff.g2 * omega * std::exp(-omega / ff.cutoff);
}

std::string ValidationReport::message() const {
  std::ostringstream os;
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].field << ": " << violations[i].rule;
  }
  return os.str();
}

ValidationReport validate(const ModelSpec& s) {
  ValidationReport r;
  auto bad = [&](const char* f, const char* rule) { r.violations.push_back({f, rule}); };
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(s.omega1) || !finite(s.omega0)) bad("atom", "energies must be finite");
  else if (!(s.omega1 > s.omega0)) bad("atom.omega1", "omega1 > omega0");
  if (!finite(s.form_factor.g2) || s.form_factor.g2 < 0.0) bad("coupling.g2", "v² nonnegative");
  if (!(s.form_factor.cutoff > 0.0)) bad("coupling.cutoff_omega", "cutoff_omega > 0");
  const auto& q = s.quadrature;
  if (!(q.abs_tol > 0.0)) bad("numerics.quad_abs_tol", "tolerance > 0");
  if (!(q.rel_tol > 0.0)) bad("numerics.quad_rel_tol", "tolerance > 0");
  if (q.max_depth < 1) bad("numerics.quad_max_depth", "max_depth >= 1");
  if (finite(s.omega1) && finite(s.omega0) && !(q.cutoff > 10.0 * (s.omega1 - s.omega0)))
    bad("numerics.quad_cutoff", "cutoff > 10*(omega1-omega0)");
  if (s.pole_solver.max_iter < 1) bad("numerics.solver_max_iter", "max_iter >= 1");
  if (!(s.pole_solver.tol > 0.0)) bad("numerics.solver_tol", "tolerance > 0");
  if (!(s.pole_solver.damping > 0.0 && s.pole_solver.damping <= 1.0))
    bad("numerics.solver_damping", "0 < damping <= 1");
  if (s.epsilon_limit.empty()) bad("numerics.epsilon_limit", "at least one offset");
  for (double e : s.epsilon_limit)
    if (!(e > 0.0)) bad("numerics.epsilon_limit", "offsets > 0");
  if (s.oracle.n_modes < 2) bad("numerics.oracle_modes", "n_modes >= 2");
  if (!(s.oracle.omega_max > 0.0)) bad("numerics.oracle_omega_max", "omega_max > 0");
  if (s.oracle.nmax < 1) bad("numerics.oracle_nmax", "nmax >= 1");
  if (s.oracle.dense_cap < 1 || s.oracle.basis_cap < 1) bad("numerics.oracle_caps", "caps >= 1");
  if (s.w00_order != 2 && s.w00_order != 4) bad("numerics.w00_order", "order is 2 or 4");
  if (s.dressing_x && !(*s.dressing_x > 0.0)) bad("numerics.dressing_x", "x > 0 or auto");
  return r;
}

const ModelSpec& require_valid(const ModelSpec& spec) {
  auto r = validate(spec);
  if (!r.ok()) fail(ErrorKind::config, r.message());
  return spec;
}

namespace {

namespace pt = boost::property_tree;

double to_real(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorKind::config, key + ": expected a number, got '" + v + "'");
  }
}

long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    fail(ErrorKind::config, key + ": expected an integer, got '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

ModelSpec parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::config, std::string("config syntax: ") + e.message() + " (line " +
                                std::to_string(e.line()) + ")");
  }
  ModelSpec s;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      fail(ErrorKind::config, section + ": key outside of a section");
    for (const auto& [key, node] : body) {
      const std::string name = section + "." + key;
      const std::string v = trim(node.data());
      if (section == "atom") {
        if (key == "omega1") s.omega1 = to_real(name, v);
        else if (key == "omega0") s.omega0 = to_real(name, v);
        else fail(ErrorKind::config, name + ": unknown key");
      } else if (section == "coupling") {
        if (key == "family") {
          if (v != "exponential-ohmic") fail(ErrorKind::config, name + ": unknown family '" + v + "'");
          s.form_factor.family = FormFactorFamily::exponential_ohmic;
        } else if (key == "g2") s.form_factor.g2 = to_real(name, v);
        else if (key == "cutoff_omega") s.form_factor.cutoff = to_real(name, v);
        else fail(ErrorKind::config, name + ": unknown key");
      } else if (section == "numerics") {
        if (key == "quad_max_depth") s.quadrature.max_depth = int(to_int(name, v));
        else if (key == "quad_abs_tol") s.quadrature.abs_tol = to_real(name, v);
        else if (key == "quad_rel_tol") s.quadrature.rel_tol = to_real(name, v);
        else if (key == "quad_cutoff") s.quadrature.cutoff = to_real(name, v);
        else if (key == "solver_max_iter") s.pole_solver.max_iter = int(to_int(name, v));
        else if (key == "solver_tol") s.pole_solver.tol = to_real(name, v);
        else if (key == "solver_damping") s.pole_solver.damping = to_real(name, v);
        else if (key == "epsilon_limit") {
          s.epsilon_limit.clear();
          std::istringstream list(v);
          std::string item;
          while (std::getline(list, item, ',')) s.epsilon_limit.push_back(to_real(name, trim(item)));
        } else if (key == "oracle_modes") s.oracle.n_modes = int(to_int(name, v));
        else if (key == "oracle_omega_max") s.oracle.omega_max = to_real(name, v);
        else if (key == "oracle_nmax") s.oracle.nmax = int(to_int(name, v));
        else if (key == "oracle_dense_cap") s.oracle.dense_cap = to_int(name, v);
        else if (key == "oracle_basis_cap") s.oracle.basis_cap = to_int(name, v);
        else if (key == "w00_order") s.w00_order = int(to_int(name, v));
        else if (key == "dressing_x") {
          if (v == "auto") s.dressing_x.reset();
          else s.dressing_x = to_real(name, v);
        } else fail(ErrorKind::config, name + ": unknown key");
      } else {
        fail(ErrorKind::config, section + ": unknown section");
      }
    }
  }
  return require_valid(s);
}

ModelSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const ModelSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "[atom]\nomega1 = " << s.omega1 << "\nomega0 = " << s.omega0 << "\n\n";
  os << "[coupling]\nfamily = exponential-ohmic\ng2 = " << s.form_factor.g2
     << "\ncutoff_omega = " << s.form_factor.cutoff << "\n\n";
  os << "[numerics]\nquad_max_depth = " << s.quadrature.max_depth
     << "\nquad_abs_tol = " << s.quadrature.abs_tol << "\nquad_rel_tol = " << s.quadrature.rel_tol
     << "\nquad_cutoff = " << s.quadrature.cutoff << "\nsolver_max_iter = " << s.pole_solver.max_iter
     << "\nsolver_tol = " << s.pole_solver.tol << "\nsolver_damping = " << s.pole_solver.damping
     << "\nepsilon_limit = ";
  for (size_t i = 0; i < s.epsilon_limit.size(); ++i) os << (i ? ", " : "") << s.epsilon_limit[i];
  os << "\noracle_modes = " << s.oracle.n_modes << "\noracle_omega_max = " << s.oracle.omega_max
     << "\noracle_nmax = " << s.oracle.nmax << "\noracle_dense_cap = " << s.oracle.dense_cap
     << "\noracle_basis_cap = " << s.oracle.basis_cap << "\nw00_order = " << s.w00_order
     << "\ndressing_x = ";
  if (s.dressing_x) os << *s.dressing_x;
  else os << "auto";
  os << "\n";
  return os.str();
}

}  // namespace subdyn
