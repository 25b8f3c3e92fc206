#pragma once

#include <functional>
#include <vector>

#include "subdyn/model.hpp"

namespace subdyn {

// Which side of the positive real axis a Cauchy transform is continued from.
enum class Side { above, below };

using RealDensity = std::function<cplx(double)>;
using AnalyticDensity = std::function<cplx(cplx)>;

// Adaptive Gauss-Kronrod on [a, b]; throws a convergence error if the estimate misses tolerance.
cplx integrate(const RealDensity& f, double a, double b, const QuadratureSpec& q);

// Integral over [0, q.cutoff] split into geometrically growing panels. A positive `scale`
// adds panels resolving a feature of that width next to the origin.
cplx integrate_band(const RealDensity& f, const QuadratureSpec& q, double scale = 0.0);

// Cauchy transform C(w) = int_0^L rho(u) / (u - w) du for complex w.
// `side` selects the branch: the transform defined in the upper (above) or lower (below)
// half plane, continued across the band (0, L) through the real axis. Points on the real
// axis inside the band get the boundary value from that side.
cplx cauchy(const AnalyticDensity& rho, cplx w, Side side, const QuadratureSpec& q);

// Same transform restricted to real w, for densities only known on the real axis.
cplx cauchy_real(const RealDensity& rho, double x, Side side, const QuadratureSpec& q);

struct Extrapolated {
  cplx value;
  double error;
};

// Limit of g(x + i eps) as eps -> 0+ by polynomial (Neville) extrapolation over the offsets.
Extrapolated boundary_limit(const std::function<cplx(cplx)>& g, double x,
                            const std::vector<double>& offsets);

// Derivative of a holomorphic function by central differences along both axes,
// step 1e-7 * max(1, |z|).
cplx holomorphic_derivative(const std::function<cplx(cplx)>& f, cplx z);

// lim (z - p) f(z) estimated on a circle of radius r around p, averaged over 4 angles.
cplx residue_limit(const std::function<cplx(cplx)>& f, cplx p, double r = 1e-6);

}  // namespace subdyn
