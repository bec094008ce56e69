#include <doctest.h>

#include "vecctl/params.hpp"

using namespace vecctl;

TEST_SUITE("params") {
  TEST_CASE("dengue preset puts the wild equilibrium at the human population") {
    const auto p = EpiParams::dengue();
    CHECK(p.k_star() == doctest::Approx(p.H).epsilon(1e-14));
    CHECK(p.K == doctest::Approx(65596.33).epsilon(1e-7));
    CHECK(EpiParams::dengue_printed_k().K == 65234.0);
    CHECK(p.b_H == doctest::Approx(0.013 / 365.0));
  }

  TEST_CASE("presets by name") {
    CHECK(params_preset("dengue") == EpiParams::dengue());
    CHECK(params_preset("printed-k") == EpiParams::dengue_printed_k());
    CHECK_THROWS_AS(params_preset("zika"), ValidationError);
  }

  TEST_CASE("validation rejects nonpositive rates and out-of-range fractions") {
    auto p = EpiParams::dengue();
    CHECK_NOTHROW(p.validate());
    p.d_M = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = EpiParams::dengue();
    p.s_h = 1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = EpiParams::dengue();
    p.s_h = 0.0;  // no incompatibility is allowed
    CHECK_NOTHROW(p.validate());
    p = EpiParams::dengue();
    p.s_c = 1.2;
    CHECK_THROWS_AS(p.validate(), ValidationError);
  }

  TEST_CASE("parse and format round-trip every key") {
    auto p = EpiParams::dengue();
    p.K = 70000.125;
    p.beta_WH = 0.1 / 3.0;
    CHECK(parse_params(format_params(p)) == p);
  }

  TEST_CASE("parse errors carry the line number") {
    CHECK_THROWS_WITH_AS(parse_params("K = 1\nKK = 2\n"), doctest::Contains("line 2"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_params("K = 1\nK = 2\n"), doctest::Contains("duplicate"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_params("d_M = fast\n"), doctest::Contains("line 1"), ValidationError);
    CHECK(parse_params("# comment\n\nK = 65234  # printed\n").K == 65234.0);
  }

  TEST_CASE("get and set by key") {
    auto p = EpiParams::dengue();
    for (const auto& k : EpiParams::keys()) {
      p.set(k, p.get(k) * 2.0);
      CHECK(p.get(k) == doctest::Approx(EpiParams::dengue().get(k) * 2.0));
    }
    CHECK_THROWS_AS((void)p.get("nope"), ValidationError);
  }
}
