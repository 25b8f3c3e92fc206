#include <doctest.h>

#include <cmath>

#include "subdyn/errors.hpp"
#include "subdyn/oracle.hpp"

using namespace subdyn;

namespace {
// Frozen from the independent numpy builder in tests/reference/independent_values.py:
// three modes on (0, 20], up to two photons, both parities.
const double kLowest = -0.00709351563957496;
const cplx kAmp07(0.7654656111342741, -0.6385074699837493);
const double kPop07 = 0.9936416421219368;
const cplx kAmp25(0.9162202232373331, 0.3898053090153117);
const double kPop25 = 0.9914192507527733;
const cplx kRes(0.042125203121593235, -1.9927180508291278);

ExactSystem tiny(long dense_cap) {
  ModelSpec s;
  s.oracle.dense_cap = dense_cap;
  return ExactSystem(s, 3, 20.0, 2, ParitySector::full);
}

std::vector<EvolutionSample> synthetic(double rate, double t1, int n) {
  std::vector<EvolutionSample> s;
  for (int i = 0; i <= n; ++i) {
    const double t = t1 * i / n;
    s.push_back({t, 0.0, std::exp(-rate * t), 1.0, 0.0});
  }
  return s;
}
}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("basis dimensions") {
    CHECK(full_dimension(1, 1) == 4);
    CHECK(full_dimension(2, 2) == 12);
    CHECK(full_dimension(200, 1) == 402);
    const FormFactor ff;
    CHECK(build_basis(ff, 200, 20.0, 1).dimension() == 402);
    CHECK(build_basis(ff, 200, 20.0, 2, ParitySector::odd).dimension() == 20301);
    const auto odd = build_basis(ff, 4, 20.0, 2, ParitySector::odd);
    const auto even = build_basis(ff, 4, 20.0, 2, ParitySector::even);
    CHECK(odd.dimension() + even.dimension() == full_dimension(4, 2));
    CHECK(odd.find(1, {}) >= 0);
    CHECK(odd.find(0, {}) == -1);
    CHECK(even.find(0, {}) >= 0);
  }

  TEST_CASE("basis cap is a resource error") {
    try {
      build_basis(FormFactor{}, 200, 20.0, 2, ParitySector::full, 1000);
      FAIL("expected a resource error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::resource);
    }
  }

  TEST_CASE("mode grid and couplings") {
    const FormFactor ff;
    const auto b = build_basis(ff, 4, 20.0, 1);
    CHECK(b.delta_omega == 5.0);
    CHECK(b.mode_frequencies[0] == 2.5);
    CHECK(b.mode_frequencies[3] == 17.5);
    CHECK(b.mode_couplings[1] == doctest::Approx(std::sqrt(eval_v2(ff, 7.5) * 5.0)).epsilon(1e-15));
  }

  TEST_CASE("Hamiltonian entries") {
    const FormFactor ff;
    const auto b = build_basis(ff, 3, 20.0, 2);
    const Eigen::MatrixXd H(build_hamiltonian(b, 1.0, 0.0));
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const long e = b.find(1, {}), g = b.find(0, {});
    const double v0 = b.mode_couplings[0];
    // Rotating: excited vacuum to ground plus one photon.
    CHECK(H(e, b.find(0, {0})) == doctest::Approx(v0));
    // Counter-rotating: ground vacuum to excited plus one photon.
    CHECK(H(g, b.find(1, {0})) == doctest::Approx(v0));
    // Stimulated factor for a second photon in the same mode.
    CHECK(H(b.find(1, {0}), b.find(0, {0, 0})) == doctest::Approx(v0 * std::sqrt(2.0)));
    CHECK(H(b.find(0, {0, 2}), b.find(0, {0, 2})) == doctest::Approx(b.mode_frequencies[0] + b.mode_frequencies[2]));
    CHECK(H(e, e) == 1.0);
  }

  TEST_CASE("small system matches the independent builder") {
    for (long cap : {4000L, 10L}) {
      const ExactSystem sys = tiny(cap);
      CHECK(sys.dense() == (cap == 4000));
      CHECK(sys.basis().dimension() == 20);
      const auto s = sys.evolve_excited({0.0, 0.7, 25.0});
      CHECK(std::abs(s[0].amplitude - 1.0) < 1e-12);
      CHECK(std::abs(s[1].amplitude - kAmp07) < 1e-10);
      CHECK(s[1].population == doctest::Approx(kPop07).epsilon(1e-10));
      CHECK(std::abs(s[2].amplitude - kAmp25) < 1e-10);
      CHECK(s[2].population == doctest::Approx(kPop25).epsilon(1e-10));
      for (const auto& e : s) CHECK(std::abs(e.norm - 1.0) < 1e-11);
      CHECK(sys.lowest_eigenvalue() == doctest::Approx(kLowest).epsilon(1e-12));
      CHECK(std::abs(sys.resolvent_diag(Level::excited, cplx(1.0, 0.5)) - kRes) < 1e-12);
    }
  }

  TEST_CASE("uncoupled atom oscillates freely") {
    ModelSpec s;
    s.form_factor.g2 = 0.0;
    const ExactSystem sys(s, 10, 20.0, 2, ParitySector::odd);
    for (const auto& e : sys.evolve_excited({0.0, 1.3, 40.0})) {
      CHECK(std::abs(e.amplitude - std::exp(cplx(0.0, -e.t))) < 1e-12);
      CHECK(e.population == doctest::Approx(1.0));
    }
  }

  TEST_CASE("resolvent limits") {
    const ExactSystem sys(ModelSpec{}, 20, 20.0, 2, ParitySector::odd);
    const cplx far(0.0, 1e6);
    CHECK(std::abs(sys.resolvent_diag(Level::excited, far) * far - 1.0) < 1e-5);
    const cplx r = sys.resolvent_diag(Level::excited, cplx(2.0, 1e-3));
    CHECK(std::abs(r - 1.0) < 0.05);
    CHECK_THROWS_AS(sys.resolvent_diag(Level::excited, cplx(1.0, 0.0)), Error);
    CHECK_THROWS_AS(sys.resolvent_diag(Level::ground, cplx(1.0, 0.5)), Error);
  }

  TEST_CASE("photon truncation barely matters at weak coupling") {
    const ModelSpec s;
    // Mode spacing 0.01 keeps the recurrence time beyond the sampled times.
    const ExactSystem a(s, 200, 2.0, 1, ParitySector::odd);
    const ExactSystem b(s, 200, 2.0, 2, ParitySector::odd);
    const std::vector<double> t{20.0, 150.0, 500.0};
    const auto pa = a.evolve_excited(t), pb = b.evolve_excited(t);
    for (size_t i = 0; i < t.size(); ++i)
      CHECK(std::abs(pa[i].population - pb[i].population) < 0.01 * pb[i].population);
    CHECK(pb.back().top_shell_weight < 1e-3);
  }

  TEST_CASE("short-time decay is quadratic") {
    // Well inside the bath correlation time 1 / omega_max.
    const ExactSystem sys(ModelSpec{}, 100, 20.0, 1, ParitySector::odd);
    std::vector<double> t;
    for (int i = 0; i <= 20; ++i) t.push_back(0.001 * i);
    const QuadraticFit f = fit_zeno(sys.evolve_excited(t), 0.02);
    CHECK(f.r2 > 0.999);
    // The coefficient approaches the total coupling strength sum_k V_k^2.
    double sum = 0.0;
    for (double v : sys.basis().mode_couplings) sum += v * v;
    CHECK(f.coefficient == doctest::Approx(sum).epsilon(0.1));
  }

  TEST_CASE("fitting helpers") {
    const auto s = synthetic(0.01, 100.0, 50);
    const ExponentialFit e = fit_exponential(s, 10.0, 90.0);
    CHECK(e.rate == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(e.prefactor == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.r2 == doctest::Approx(1.0));
    CHECK(e.points == 41);
    std::vector<double> pred;
    for (const auto& x : s) pred.push_back(x.population * 1.01);
    const ComparisonReport c = compare_kinetic(pred, s, 0.0, 100.0);
    CHECK(c.max_relative == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(c.points == 51);
    CHECK_THROWS_AS(fit_exponential(s, 200.0, 300.0), Error);
    CHECK_THROWS_AS(compare_kinetic({1.0}, s, 0.0, 1.0), Error);
  }

  TEST_CASE("matched cutoff only changes the integration limit") {
    const ModelSpec s;
    const ModelSpec m = matched_cutoff(s, 20.0);
    CHECK(m.quadrature.cutoff == 20.0);
    CHECK(m.form_factor.cutoff == s.form_factor.cutoff);
  }
}
