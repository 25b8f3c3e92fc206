#include "subdyn/continuum.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "subdyn/errors.hpp"

namespace subdyn {

namespace {

constexpr double pi = std::numbers::pi;

// Distance below which the difference quotient is replaced by a derivative.
constexpr double kMerge = 1e-9;

std::vector<double> panel_breaks(double L, double extra = -1.0) {
  std::vector<double> b{0.0};
  for (double x = 1.0; x < L; x *= 4.0) b.push_back(x);
  b.push_back(L);
  if (extra > 0.0 && extra < L) {
    // Replace a nearby interior break instead of creating a sliver panel.
    for (size_t i = 1; i + 1 < b.size(); ++i)
      if (std::abs(b[i] - extra) < 0.05 * b[i]) b[i] = extra;
    b.push_back(extra);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
  return b;
}

cplx integrate_panels(const RealDensity& f, const std::vector<double>& b, const QuadratureSpec& q);

bool in_band(double x, double L) { return x > 0.0 && x < L; }

}  // namespace

namespace {

struct Raw {
  cplx value;
  double err;
  double l1;
};

Raw integrate_raw(const RealDensity& f, double a, double b, const QuadratureSpec& q) {
  if (!(b > a)) return {0.0, 0.0, 0.0};
  double err = 0.0;
  double l1 = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  // Integrate over the unit interval: the library's error estimate is not rescaled by
  // the panel width, which would stall refinement on short panels.
  const double w = b - a;
  auto g = [&](double t) { return f(a + w * t); };
  cplx v = w * GK::integrate(g, 0.0, 1.0, unsigned(q.max_depth), q.rel_tol, &err, &l1);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    fail(ErrorKind::convergence, "quadrature produced a non-finite value");
  return {v, err * w, l1 * w};
}

cplx checked(const Raw& r, double a, double b, const QuadratureSpec& q) {
  const double target = std::max(q.abs_tol, q.rel_tol * r.l1);
  if (r.err > 100.0 * target) {
    std::ostringstream os;
    os.precision(10);
    os << "quadrature on [" << a << ", " << b << "] missed tolerance: error estimate " << r.err
       << " vs target " << target;
    fail(ErrorKind::convergence, os.str());
  }
  return r.value;
}

cplx integrate_panels(const RealDensity& f, const std::vector<double>& b, const QuadratureSpec& q) {
  Raw total{0.0, 0.0, 0.0};
  for (size_t i = 0; i + 1 < b.size(); ++i) {
    Raw r = integrate_raw(f, b[i], b[i + 1], q);
    total.value += r.value;
    total.err += r.err;
    total.l1 += r.l1;
  }
  return checked(total, b.front(), b.back(), q);
}

}  // namespace

cplx integrate(const RealDensity& f, double a, double b, const QuadratureSpec& q) {
  return checked(integrate_raw(f, a, b, q), a, b, q);
}

cplx integrate_band(const RealDensity& f, const QuadratureSpec& q, double scale) {
  auto b = panel_breaks(q.cutoff);
  if (scale > 0.0 && scale < 0.25) {
    // Geometric refinement from the feature scale up to the first regular break.
    for (double x = scale; x < 1.0; x *= 4.0) b.push_back(x);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
  return integrate_panels(f, b, q);
}

namespace {

// int_0^L (rho(u) - rho(w)) / (u - w) du; rho_w and drho_w are rho and rho' at w.
cplx subtracted(const std::function<cplx(double)>& rho, cplx w, cplx rho_w, cplx drho_w,
                const QuadratureSpec& q) {
  const double scale = kMerge * std::max(1.0, std::abs(w));
  auto f = [&](double u) -> cplx {
    cplx d = u - w;
    if (std::abs(d) < scale) return drho_w;
    return (rho(u) - rho_w) / d;
  };
  // A break at Re w keeps nodes away from the removable singularity.
  return integrate_panels(f, panel_breaks(q.cutoff, w.real()), q);
}

cplx log_term(cplx w, double L) { return std::log(cplx(L) - w) - std::log(-w); }

}  // namespace

cplx cauchy(const AnalyticDensity& rho, cplx w, Side side, const QuadratureSpec& q) {
  const double L = q.cutoff;
  const double x = w.real(), y = w.imag();
  if (y == 0.0) {
    return cauchy_real([&](double u) { return rho(cplx(u, 0.0)); }, x, side, q);
  }
  // Far from the band: no singularity near the path.
  const double dist = x < 0.0 ? std::hypot(x, y) : (x > L ? std::hypot(x - L, y) : std::abs(y));
  cplx value;
  if (dist > 0.25) {
    value = integrate_band([&](double u) { return rho(cplx(u, 0.0)) / (u - w); }, q);
  } else {
    const double h = 1e-5 * std::max(1.0, std::abs(w));
    const cplx rho_w = rho(w);
    const cplx drho_w = (rho(w + h) - rho(w - h)) / (2.0 * h);
    value = subtracted([&](double u) { return rho(cplx(u, 0.0)); }, w, rho_w, drho_w, q) +
            rho_w * log_term(w, L);
  }
  if (in_band(x, L)) {
    if (side == Side::above && y < 0.0) value += cplx(0.0, 2.0 * pi) * rho(w);
    if (side == Side::below && y > 0.0) value -= cplx(0.0, 2.0 * pi) * rho(w);
  }
  return value;
}

cplx cauchy_real(const RealDensity& rho, double x, Side side, const QuadratureSpec& q) {
  const double L = q.cutoff;
  if (!in_band(x, L)) {
    if (x == 0.0 || x == L) fail(ErrorKind::contract, "Cauchy transform evaluated at a band edge");
    // Off the band the integrand is regular except possibly near the edges.
    const double gap = x < 0.0 ? -x : x - L;
    if (gap > 0.25) return integrate_band([&](double u) { return rho(u) / (u - x); }, q);
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    // Edge-adjacent: subtract using a linear extrapolation of rho beyond the band.
    const double anchor = x < 0.0 ? h : L - h;
    const cplx r0 = rho(anchor);
    const cplx dr = (rho(anchor + h) - rho(anchor - h)) / (2.0 * h);
    auto lin = [&](double u) { return r0 + dr * (u - anchor); };
    cplx reg = integrate_band([&](double u) { return (rho(u) - lin(u)) / (u - x); }, q);
    // int_0^L (r0 + dr (u - anchor)) / (u - x) du in closed form.
    const double lg = std::log(std::abs((L - x) / x));
    return reg + (r0 + dr * (x - anchor)) * lg + dr * L;
  }
  const double h = std::min(1e-5 * std::max(1.0, x), 0.5 * std::min(x, L - x));
  const cplx rho_x = rho(x);
  const cplx drho_x = (rho(x + h) - rho(x - h)) / (2.0 * h);
  cplx pv = subtracted(rho, cplx(x, 0.0), rho_x, drho_x, q) + rho_x * std::log((L - x) / x);
  const cplx jump = cplx(0.0, pi) * rho_x;
  return side == Side::above ? pv + jump : pv - jump;
}

namespace {

cplx neville_at_zero(std::vector<double> e, std::vector<cplx> p) {
  const size_t n = p.size();
  for (size_t m = 1; m < n; ++m)
    for (size_t i = 0; i + m < n; ++i) p[i] = (e[i + m] * p[i] - e[i] * p[i + 1]) / (e[i + m] - e[i]);
  return p[0];
}

}  // namespace

Extrapolated boundary_limit(const std::function<cplx(cplx)>& g, double x,
                            const std::vector<double>& offsets) {
  if (offsets.empty()) fail(ErrorKind::contract, "boundary_limit needs at least one offset");
  std::vector<double> e = offsets;
  std::sort(e.begin(), e.end(), std::greater<double>());
  std::vector<cplx> p(e.size());
  for (size_t i = 0; i < e.size(); ++i) p[i] = g(cplx(x, e[i]));
  const cplx v = neville_at_zero(e, p);
  if (e.size() == 1) return {v, std::abs(v)};
  // Error estimate: drop the largest offset and compare.
  const cplx w = neville_at_zero({e.begin() + 1, e.end()}, {p.begin() + 1, p.end()});
  return {v, std::abs(v - w)};
}

cplx holomorphic_derivative(const std::function<cplx(cplx)>& f, cplx z) {
  const double h = 1e-7 * std::max(1.0, std::abs(z));
  const cplx ih(0.0, h);
  const cplx along_real = (f(z + h) - f(z - h)) / (2.0 * h);
  const cplx along_imag = (f(z + ih) - f(z - ih)) / (2.0 * ih);
  return 0.5 * (along_real + along_imag);
}

cplx residue_limit(const std::function<cplx(cplx)>& f, cplx p, double r) {
  // Angles offset from the axes so no sample lands on the real axis.
  cplx sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    const cplx d = std::polar(r, pi / 4.0 + k * pi / 2.0);
    sum += d * f(p + d);
  }
  return sum / 4.0;
}

}  // namespace subdyn
