#include <doctest.h>

#include <cmath>
#include <fstream>

#include "subdyn/errors.hpp"
#include "subdyn/model.hpp"

using namespace subdyn;

TEST_SUITE("model") {
  TEST_CASE("defaults describe the baseline atom") {
    ModelSpec s;
    CHECK(s.omega1 == 1.0);
    CHECK(s.omega0 == 0.0);
    CHECK(s.form_factor.g2 == 1e-3);
    CHECK(s.form_factor.cutoff == 10.0);
    CHECK(s.gap() == 1.0);
    CHECK(validate(s).ok());
  }

  TEST_CASE("form factor vanishes off the positive axis and is linear near zero") {
    FormFactor ff;
    CHECK(eval_v2(ff, 0.0) == 0.0);
    CHECK(eval_v2(ff, -1.0) == 0.0);
    CHECK(eval_v2(ff, 1e-8) == doctest::Approx(1e-11).epsilon(1e-8));
    CHECK(eval_v2(ff, 1.0) == doctest::Approx(1e-3 * std::exp(-0.1)).epsilon(1e-15));
    // The analytic extension agrees on the positive axis.
    for (double w : {0.3, 1.0, 7.5, 40.0}) CHECK(std::abs(eval_v2_analytic(ff, w) - eval_v2(ff, w)) < 1e-18);
  }

  TEST_CASE("validation names the offending field") {
    ModelSpec s;
    s.omega1 = -0.5;
    auto r = validate(s);
    REQUIRE_FALSE(r.ok());
    CHECK(r.message().find("omega1 > omega0") != std::string::npos);
    CHECK_THROWS_AS(require_valid(s), Error);
    try {
      require_valid(s);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
    ModelSpec n;
    n.form_factor.g2 = -1.0;
    CHECK(validate(n).message().find("v² nonnegative") != std::string::npos);
  }

  TEST_CASE("config round trip is exact") {
    ModelSpec s;
    s.form_factor.g2 = 2.5e-3;
    s.epsilon_limit = {1e-2, 1e-3};
    s.dressing_x = 1.25;
    s.oracle.n_modes = 77;
    const ModelSpec t = parse_config(format_config(s));
    CHECK(t.form_factor.g2 == s.form_factor.g2);
    CHECK(t.epsilon_limit == s.epsilon_limit);
    REQUIRE(t.dressing_x.has_value());
    CHECK(*t.dressing_x == 1.25);
    CHECK(t.oracle.n_modes == 77);
    CHECK(format_config(t) == format_config(s));
  }

  TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(parse_config("[atom]\nomega2 = 1\n"), Error);
    CHECK_THROWS_AS(parse_config("[extras]\nx = 1\n"), Error);
    CHECK_THROWS_AS(parse_config("[coupling]\nfamily = lorentzian\n"), Error);
    CHECK_THROWS_AS(parse_config("[atom]\nomega1 = abc\n"), Error);
  }

  TEST_CASE("missing file is a config error") {
    try {
      load_config("/nonexistent/config.ini");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
  }

  TEST_CASE("shipped configs load") {
    const ModelSpec b = load_config(SUBDYN_SOURCE_DIR "/configs/baseline.ini");
    CHECK(b.form_factor.g2 == 1e-3);
    CHECK_FALSE(b.dressing_x.has_value());
    const ModelSpec f = load_config(SUBDYN_SOURCE_DIR "/configs/free.ini");
    CHECK(f.form_factor.g2 == 0.0);
    CHECK_THROWS_AS(load_config(SUBDYN_SOURCE_DIR "/configs/inverted.ini"), Error);
  }
}
