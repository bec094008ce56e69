#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "vecctl/plots.hpp"
#include "vecctl/published.hpp"
#include "vecctl/scenario.hpp"

using namespace vecctl;

TEST_SUITE("scenario") {
  TEST_CASE("literal schedule with overrides") {
    const auto sc = parse_scenario(R"(
[scenario]
model = sit
times = 10, 20
weights = 1e6, 2e6
T = 300
trajectory = out.csv

[params]
K = 65234
)");
    CHECK(sc.model == ScenarioModel::sit);
    CHECK(sc.times == std::vector<double>{10, 20});
    CHECK(sc.horizon == 300.0);
    CHECK(sc.params.K == 65234.0);
    CHECK(sc.schedule().budget == 3e6);
    CHECK(sc.trajectory_csv == "out.csv");
    CHECK_FALSE(sc.optimize.has_value());
  }

  TEST_CASE("optimizer request") {
    const auto sc = parse_scenario("[scenario]\nmodel = wb\nn = 5\nC = 2e4\nmode = times-only\nseed = 9\n");
    REQUIRE(sc.optimize.has_value());
    CHECK(sc.optimize->n == 5);
    CHECK(sc.optimize->budget == 2e4);
    CHECK(sc.optimize->mode == OptimizeMode::times_only);
    CHECK(sc.optimize->seed == 9);
    CHECK(sc.kind() == ModelKind::wb);
  }

  TEST_CASE("round trip through the file format") {
    Scenario a;
    a.model = ScenarioModel::wb;
    a.preset = "printed-k";
    a.params = EpiParams::dengue_printed_k();
    a.params.s_h = 0.85;
    a.ih0 = 3.5;
    a.times = {0.0, 147.5};
    a.weights = {1e3, 1.0 / 3.0};
    a.budget = 1000.5;
    a.tol = {1e-9, 1e-7};
    a.summary_json = "s.json";
    CHECK(parse_scenario(format_scenario(a)) == a);

    Scenario b;
    b.optimize = OptimizeRequest{20, 6e7, OptimizeMode::times_and_weights, 3, 17};
    b.history_csv = "h.csv";
    CHECK(parse_scenario(format_scenario(b)) == b);
  }

  TEST_CASE("unknown keys, sections and duplicates are rejected with line numbers") {
    CHECK_THROWS_WITH_AS(parse_scenario("[scenario]\nmodle = sit\n"), doctest::Contains("line 2"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_scenario("[scenario]\nmodel = sit\n[parms]\nK = 1\n"),
                         doctest::Contains("unknown section"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_scenario("[params]\nKay = 1\n"), doctest::Contains("unknown parameter"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_scenario("[scenario]\nT = 1\nT = 2\n"), doctest::Contains("duplicate"),
                         ValidationError);
    CHECK_THROWS_AS(parse_scenario("model = sit\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("[scenario]\nmodel = dengue\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("[scenario]\npreset = other\n"), ValidationError);
  }

  TEST_CASE("inconsistent requests") {
    CHECK_THROWS_AS(parse_scenario("[scenario]\nn = 3\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("[scenario]\nn = 3\nC = 1e7\ntimes = 1\nweights = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("[scenario]\ntimes = 1, 2\nweights = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("[scenario]\nmodel = seir\ntimes = 1\nweights = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("[scenario]\ntimes = 500\nweights = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("[scenario]\nn = 2.5\nC = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_scenario("[params]\nd_M = -1\n"), ValidationError);
  }
}

TEST_SUITE("published") {
  TEST_CASE("tables are complete") {
    CHECK(table_ids().size() == 5);
    CHECK(all_published_rows().size() == 10);
    for (const auto& row : all_published_rows()) {
      CHECK(row.schedule.size() == row.n);
      CHECK(row.schedule.total() == doctest::Approx(row.budget).epsilon(1e-6));
      CHECK_NOTHROW(row.schedule.validate());
    }
    CHECK_THROWS_AS(published_rows("sit30"), ValidationError);
  }

  TEST_CASE("replay tolerance policy") {
    CHECK(replay_within(250000.0, 250375.4));
    CHECK_FALSE(replay_within(240000.0, 250375.4));
    CHECK(replay_within(2124.4 + 400.0, 2124.4));  // 500 absolute beats 15%
    CHECK_FALSE(replay_within(2124.4 + 600.0, 2124.4));
  }

  TEST_CASE("published schedules replay within tolerance") {
    const auto q = EpiParams::dengue();
    for (const auto& row : all_published_rows()) {
      const double j = cost_of(row.model, q, row.schedule);
      CHECK_MESSAGE(replay_within(j, row.cost), row.source << ": " << j << " vs " << row.cost);
    }
  }

  TEST_CASE("replayed reductions") {
    const auto q = EpiParams::dengue();
    const double j0 = uncontrolled_cost(ModelKind::sit, q, 450);
    const auto t2 = published_rows("sit10")[1];
    CHECK((j0 - cost_of(ModelKind::sit, q, t2.schedule)) / j0 * 100 == doctest::Approx(75.2).epsilon(1.0 / 75.2));
    const double w0 = uncontrolled_cost(ModelKind::wb, q, 450);
    const auto w = published_rows("wb")[0];
    CHECK((w0 - cost_of(ModelKind::wb, q, w.schedule)) / w0 * 100 == doctest::Approx(2.1).epsilon(0.5 / 2.1));
  }
}

TEST_SUITE("plots") {
  TEST_CASE("script picks the control channel from the header and is deterministic") {
    PlotRequest r;
    r.trajectory_csv = "run.csv";
    r.baseline_csv = "base.csv";
    r.image = "fig.png";
    r.title = "it's SIT";
    const std::vector<std::string> sit = {"time", "S_H", "E_H", "I_H", "S_M", "E_M", "I_M", "M_S", "cost"};
    const auto a = plot_script(r, sit);
    CHECK(a == plot_script(r, sit));
    CHECK(a.find("using 1:8") != std::string::npos);
    CHECK(a.find("using 1:4") != std::string::npos);
    CHECK(a.find("'base.csv'") != std::string::npos);
    CHECK(a.find("it''s SIT") != std::string::npos);
    const std::vector<std::string> wb = {"time", "S_H", "E_H", "I_H", "E_M", "I_M", "E_W", "I_W", "p", "cost"};
    CHECK(plot_script(r, wb).find("using 1:9") != std::string::npos);
    CHECK_THROWS_AS(plot_script(r, {"time", "x"}), ValidationError);
  }

  TEST_CASE("header reader diagnoses missing files") {
    CHECK_THROWS_AS(read_csv_header("/nonexistent/run.csv"), ValidationError);
    const std::string path = "plots_header_test.csv";
    {
      std::ofstream out(path);
      out << "time,S_H,E_H,I_H,p,cost\n0,1,2,3,4,5\n";
    }
    CHECK(read_csv_header(path).size() == 6);
    std::remove(path.c_str());
  }
}
