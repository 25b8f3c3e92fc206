#include "subdyn/oracle.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "subdyn/errors.hpp"

namespace subdyn {

namespace {

const cplx I(0.0, 1.0);

bool keep(ParitySector p, int atom, int n) {
  switch (p) {
    case ParitySector::full: return true;
    case ParitySector::odd: return (atom + n) % 2 == 1;
    case ParitySector::even: return (atom + n) % 2 == 0;
  }
  return true;
}

long kept_dimension(int n_modes, int nmax, ParitySector p) {
  long total = 0;
  long long shell = 1;  // C(n_modes + n - 1, n)
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) shell = shell * (n_modes + n - 1) / n;
    for (int atom = 0; atom < 2; ++atom)
      if (keep(p, atom, n)) total += static_cast<long>(shell);
  }
  return total;
}

// Calls fn on every nondecreasing index list of length n, in lexicographic order.
void for_each_multiset(int n_modes, int n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> cur(n, 0);
  if (n == 0) {
    fn(cur);
    return;
  }
  while (true) {
    fn(cur);
    int i = n - 1;
    while (i >= 0 && cur[i] == n_modes - 1) --i;
    if (i < 0) return;
    const int v = cur[i] + 1;
    for (int j = i; j < n; ++j) cur[j] = v;
  }
}

}  // namespace

long FockBasis::find(int atom, const std::vector<int>& photons) const {
  auto it = index.find({atom, photons});
  return it == index.end() ? -1 : it->second;
}

long full_dimension(int n_modes, int nmax) { return kept_dimension(n_modes, nmax, ParitySector::full); }

FockBasis build_basis(const FormFactor& ff, int n_modes, double omega_max, int nmax,
                      ParitySector parity, long cap) {
  if (n_modes < 1 || nmax < 1 || !(omega_max > 0.0))
    fail(ErrorKind::config, "oracle basis needs n_modes >= 1, nmax >= 1 and omega_max > 0");
  const long dim = kept_dimension(n_modes, nmax, parity);
  if (dim > cap) {
    std::ostringstream os;
    os << "oracle basis dimension " << dim << " exceeds the cap " << cap;
    fail(ErrorKind::resource, os.str());
  }
  FockBasis b;
  b.n_modes = n_modes;
  b.omega_max = omega_max;
  b.delta_omega = omega_max / n_modes;
  b.nmax = nmax;
  b.parity = parity;
  for (int k = 0; k < n_modes; ++k) {
    const double w = (k + 0.5) * b.delta_omega;
    b.mode_frequencies.push_back(w);
    b.mode_couplings.push_back(std::sqrt(eval_v2(ff, w) * b.delta_omega));
  }
  b.states.reserve(dim);
  for (int n = 0; n <= nmax; ++n) {
    for_each_multiset(n_modes, n, [&](const std::vector<int>& occ) {
      for (int atom = 0; atom < 2; ++atom) {
        if (!keep(parity, atom, n)) continue;
        b.index.emplace(std::make_pair(atom, occ), static_cast<long>(b.states.size()));
        b.states.push_back({atom, occ});
      }
    });
  }
  return b;
}

Eigen::SparseMatrix<double> build_hamiltonian(const FockBasis& b, double omega1, double omega0) {
  std::vector<Eigen::Triplet<double>> trip;
  const long dim = b.dimension();
  for (long i = 0; i < dim; ++i) {
    const FockState& s = b.states[i];
    double e = s.atom == 1 ? omega1 : omega0;
    for (int k : s.photons) e += b.mode_frequencies[k];
    trip.emplace_back(i, i, e);
    // Removing one photon from each occupied mode, with the atom flipped either way.
    // The reverse (creation) entries come from the transpose.
    for (size_t p = 0; p < s.photons.size(); ++p) {
      if (p > 0 && s.photons[p] == s.photons[p - 1]) continue;
      const int k = s.photons[p];
      int count = 0;
      for (int q : s.photons) count += (q == k);
      std::vector<int> less = s.photons;
      less.erase(less.begin() + p);
      const long j = b.find(1 - s.atom, less);
      if (j < 0) continue;
      const double a = b.mode_couplings[k] * std::sqrt(static_cast<double>(count));
      if (a == 0.0) continue;
      trip.emplace_back(i, j, a);
      trip.emplace_back(j, i, a);
    }
  }
  Eigen::SparseMatrix<double> H(dim, dim);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

ExactSystem::ExactSystem(const ModelSpec& spec, int n_modes, double omega_max, int nmax,
                         ParitySector parity)
    : spec_(spec) {
  basis_ = build_basis(spec.form_factor, n_modes, omega_max, nmax, parity, spec.oracle.basis_cap);
  H_ = build_hamiltonian(basis_, spec.omega1, spec.omega0);
  dense_ = basis_.dimension() <= spec.oracle.dense_cap;

  const long dim = basis_.dimension();
  low_of_.assign(dim, -1);
  for (long i = 0; i < dim; ++i) {
    if (basis_.states[i].total_photons() < basis_.nmax) {
      low_of_[i] = static_cast<long>(low_.size());
      low_.push_back(i);
    } else {
      top_.push_back(i);
    }
  }
  const long nl = static_cast<long>(low_.size());
  if (nl > spec.oracle.dense_cap) {
    std::ostringstream os;
    os << "oracle: " << nl << " states below the top photon shell exceed the dense cap";
    fail(ErrorKind::resource, os.str());
  }
  H_low_ = Eigen::MatrixXd::Zero(nl, nl);
  top_energy_.resize(static_cast<long>(top_.size()));
  top_links_.resize(top_.size());
  std::vector<long> top_of(dim, -1);
  for (size_t t = 0; t < top_.size(); ++t) top_of[top_[t]] = static_cast<long>(t);
  for (int col = 0; col < H_.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(H_, col); it; ++it) {
      const long r = it.row(), c = it.col();
      if (low_of_[r] >= 0 && low_of_[c] >= 0) H_low_(low_of_[r], low_of_[c]) = it.value();
      else if (top_of[c] >= 0 && r == c) top_energy_(top_of[c]) = it.value();
      else if (top_of[c] >= 0 && low_of_[r] >= 0) top_links_[top_of[c]].emplace_back(low_of_[r], it.value());
    }
  }
}

void ExactSystem::ensure_eigensystem() const {
  if (evals_.size()) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(H_)};
  if (es.info() != Eigen::Success) fail(ErrorKind::convergence, "oracle diagonalization failed");
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

ExactSystem::ExactSystem(const ModelSpec& spec, ParitySector parity)
    : ExactSystem(spec, spec.oracle.n_modes, spec.oracle.omega_max, spec.oracle.nmax, parity) {}

std::vector<EvolutionSample> ExactSystem::evolve_excited(const std::vector<double>& times) const {
  const long i0 = basis_.find(1, {});
  if (i0 < 0) fail(ErrorKind::contract, "basis does not contain the excited vacuum state");
  const long dim = basis_.dimension();
  std::vector<char> excited(dim), top(dim);
  for (long i = 0; i < dim; ++i) {
    excited[i] = basis_.states[i].atom == 1;
    top[i] = basis_.states[i].total_photons() == basis_.nmax;
  }
  auto sample = [&](double t, const Eigen::VectorXcd& psi) {
    EvolutionSample s{t, psi(i0), 0.0, 0.0, 0.0};
    for (long i = 0; i < dim; ++i) {
      const double w = std::norm(psi(i));
      s.norm += w;
      if (excited[i]) s.population += w;
      if (top[i]) s.top_shell_weight += w;
    }
    return s;
  };

  std::vector<EvolutionSample> out;
  out.reserve(times.size());
  double prev = 0.0;
  for (double t : times) {
    if (t < prev) fail(ErrorKind::contract, "evolution times must be nonnegative and nondecreasing");
    prev = t;
  }

  if (dense_) {
    ensure_eigensystem();
    const Eigen::VectorXd c = evecs_.row(i0).transpose();
    for (double t : times) {
      Eigen::VectorXcd phase(dim);
      for (long k = 0; k < dim; ++k) phase(k) = std::exp(-I * evals_(k) * t) * c(k);
      Eigen::VectorXcd psi(dim);
      psi.real() = evecs_ * phase.real();
      psi.imag() = evecs_ * phase.imag();
      out.push_back(sample(t, psi));
    }
    return out;
  }

  // Chebyshev expansion of exp(-iH dt) on the Gershgorin interval.
  double lo = 1e300, hi = -1e300;
  for (long col = 0; col < dim; ++col) {
    double diag = 0.0, off = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(H_, col); it; ++it) {
      if (it.row() == col)
        diag = it.value();
      else
        off += std::abs(it.value());
    }
    lo = std::min(lo, diag - off);
    hi = std::max(hi, diag + off);
  }
  const double half = 0.5 * (hi - lo) * 1.01 + 1e-12, mid = 0.5 * (hi + lo);
  // Row-major copy so each Chebyshev term is one fused pass over the nonzeros.
  const Eigen::SparseMatrix<double, Eigen::RowMajor> Hr = H_;
  const auto* outer = Hr.outerIndexPtr();
  const auto* inner = Hr.innerIndexPtr();
  const double* val = Hr.valuePtr();

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(i0) = 1.0;
  Eigen::VectorXcd older(dim), newer(dim), acc(dim);
  double now = 0.0;
  for (double t : times) {
    const double dt = t - now;
    if (dt > 0.0) {
      const double x = half * dt;
      // T0 = psi, T1 = Hs psi, T(k+1) = 2 Hs T(k) - T(k-1); older holds T(k-1), newer T(k).
      acc = std::cyl_bessel_j(0.0, x) * psi;
      older = psi;
      for (long i = 0; i < dim; ++i) {
        cplx h = 0.0;
        for (auto p = outer[i]; p < outer[i + 1]; ++p) h += val[p] * psi(inner[p]);
        newer(i) = (h - mid * psi(i)) / half;
      }
      cplx phase = -I;
      acc += 2.0 * phase * std::cyl_bessel_j(1.0, x) * newer;
      for (int k = 2;; ++k) {
        const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
        phase *= -I;
        const cplx c = 2.0 * phase * jk;
        for (long i = 0; i < dim; ++i) {
          cplx h = 0.0;
          for (auto p = outer[i]; p < outer[i + 1]; ++p) h += val[p] * newer(inner[p]);
          older(i) = 2.0 * (h - mid * newer(i)) / half - older(i);
          acc(i) += c * older(i);
        }
        older.swap(newer);
        if (k > x && std::abs(jk) < 1e-17) break;
      }
      psi = std::exp(-I * mid * dt) * acc;
      now = t;
    }
    out.push_back(sample(t, psi));
  }
  return out;
}

Eigen::MatrixXcd ExactSystem::schur(cplx z) const {
  Eigen::MatrixXcd S = -H_low_.cast<cplx>();
  S.diagonal().array() += z;
  for (size_t t = 0; t < top_.size(); ++t) {
    const cplx g = 1.0 / (z - top_energy_(static_cast<long>(t)));
    for (auto [i, vi] : top_links_[t])
      for (auto [j, vj] : top_links_[t]) S(i, j) -= vi * vj * g;
  }
  return S;
}

cplx ExactSystem::resolvent_diag(Level level, cplx z) const {
  if (!(z.imag() > 0.0)) fail(ErrorKind::contract, "oracle resolvent needs Im z > 0");
  const long i = basis_.find(level == Level::excited ? 1 : 0, {});
  if (i < 0) fail(ErrorKind::contract, "basis does not contain the requested vacuum state");
  // The vacuum lies below the top shell, so the reduced system gives the element exactly.
  const long li = low_of_[i];
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(schur(z));
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<long>(low_.size()));
  rhs(li) = 1.0;
  const cplx r = lu.solve(rhs)(li);
  if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
    fail(ErrorKind::singular, "oracle resolvent solve failed");
  return r;
}

double ExactSystem::lowest_from_schur() const {
  // Below every top-shell energy, E is an eigenvalue iff it is the lowest eigenvalue of
  // H_low + B (E - D)^-1 B^T; that map is decreasing in E, so iterate to the fixed point.
  const double dmin = top_energy_.size() ? top_energy_.minCoeff() : 1e300;
  auto lowest_eff = [&](double e) {
    const Eigen::MatrixXd m = (-schur(cplx(e, 0.0)).real()).eval();
    Eigen::MatrixXd h = m;
    h.diagonal().array() += e;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  double e = H_low_.diagonal().minCoeff();
  for (int it = 0; it < 200; ++it) {
    if (!(e < dmin)) break;
    const double next = lowest_eff(e);
    if (std::abs(next - e) < 1e-15 * std::max(1.0, std::abs(e))) return next;
    e = next;
  }
  fail(ErrorKind::convergence, "oracle lowest eigenvalue did not converge below the top photon shell");
}

double ExactSystem::lowest_eigenvalue() const {
  return lowest_from_schur();
}

ExponentialFit fit_exponential(const std::vector<EvolutionSample>& s, double t0, double t1) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& e : s) {
    if (e.t < t0 || e.t > t1 || !(e.population > 0.0)) continue;
    const double y = std::log(e.population);
    pts.emplace_back(e.t, y);
    n += 1;
    sx += e.t;
    sy += y;
    sxx += e.t * e.t;
    sxy += e.t * y;
  }
  if (n < 3) fail(ErrorKind::contract, "exponential fit needs at least three samples in the window");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (auto [x, y] : pts) {
    ss_res += std::pow(y - icpt - slope * x, 2);
    ss_tot += std::pow(y - mean, 2);
  }
  return {-slope, std::exp(icpt), ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0, static_cast<int>(n)};
}

QuadraticFit fit_zeno(const std::vector<EvolutionSample>& s, double t1) {
  double st4 = 0, syt2 = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& e : s) {
    if (e.t < 0.0 || e.t > t1) continue;
    const double y = 1.0 - e.population;
    pts.emplace_back(e.t, y);
    st4 += std::pow(e.t, 4);
    syt2 += y * e.t * e.t;
  }
  if (pts.size() < 3 || st4 == 0.0) fail(ErrorKind::contract, "quadratic fit needs at least three samples");
  const double c = syt2 / st4;
  double mean = 0;
  for (auto [t, y] : pts) mean += y;
  mean /= pts.size();
  double ss_res = 0, ss_tot = 0;
  for (auto [t, y] : pts) {
    ss_res += std::pow(y - c * t * t, 2);
    ss_tot += std::pow(y - mean, 2);
  }
  return {c, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0, static_cast<int>(pts.size())};
}

ComparisonReport compare_kinetic(const std::vector<double>& predicted,
                                 const std::vector<EvolutionSample>& observed, double t0, double t1) {
  if (predicted.size() != observed.size()) fail(ErrorKind::contract, "comparison grids differ in length");
  ComparisonReport r{0.0, 0.0, 0, 0.0};
  double sq = 0.0;
  for (size_t i = 0; i < observed.size(); ++i) {
    const auto& o = observed[i];
    r.max_top_shell_weight = std::max(r.max_top_shell_weight, o.top_shell_weight);
    if (o.t < t0 || o.t > t1) continue;
    const double scale = std::abs(o.population);
    const double d = scale > 0 ? std::abs(predicted[i] - o.population) / scale
                               : std::abs(predicted[i] - o.population);
    r.max_relative = std::max(r.max_relative, d);
    sq += d * d;
    ++r.points;
  }
  r.rms_relative = r.points ? std::sqrt(sq / r.points) : 0.0;
  return r;
}

ModelSpec matched_cutoff(const ModelSpec& spec, double omega_max) {
  ModelSpec m = spec;
  m.quadrature.cutoff = omega_max;
  return m;
}

}  // namespace subdyn
