#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mixsens/config.hpp"
#include "mixsens/experiments.hpp"
#include "mixsens/result_table.hpp"

using namespace mixsens;

TEST_CASE("config parsing reports positions") {
  const auto c = parse_config(R"({"scenario": "clock", "seed": 7, "clock": {"m": 1, "starts": 5}})");
  CHECK(c.scenario == "clock");
  CHECK(c.seed == 7);
  CHECK(c.clock.starts == 5);
  CHECK_THROWS_WITH_AS(parse_config(R"({"clock": {"m": "one"}})"), doctest::Contains("/clock/m"), Error);
  CHECK_THROWS_WITH_AS(parse_config(R"({"sweep": {"deltaz": []}})"), doctest::Contains("/sweep/deltaz: unknown key"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_config("{\"seed\": 1,,}"), doctest::Contains("byte"), Error);
  CHECK_THROWS_WITH_AS(parse_config(R"({"separation": {"quantile": 1.5}})"), doctest::Contains("/separation/quantile"),
                       Error);
}

TEST_CASE("config hash tracks content") {
  ExperimentConfig a, b;
  CHECK(a.hash() == b.hash());
  b.separation.delta = 1.0;
  CHECK(a.hash() != b.hash());
  CHECK(parse_config(a.canonical()).canonical() == a.canonical());
}

TEST_CASE("result tables") {
  ResultTable t("coupling");
  t.add_row({std::int64_t{1}, std::int64_t{0}, std::int64_t{1}, 0.1});
  t.add_row({std::int64_t{1}, std::int64_t{1}, std::int64_t{0}, std::numeric_limits<double>::infinity()});
  CHECK_THROWS_AS(t.add_row({1.0}), Error);
  const auto csv = t.to_csv({"abc", 5, "v1"});
  CHECK(csv.find("# config_hash: abc\n# seed: 5\n# version: v1\nseed,trial,coalesced,time\n1,0,1,0.1\n1,1,0,inf\n") !=
        std::string::npos);
  CHECK(t.number(0, "time") == 0.1);
  CHECK(format_cell(std::string("a,b")) == "\"a,b\"");
  CHECK_THROWS_AS(ResultTable("nope"), Error);
}

TEST_CASE("documented schemas match the code") {
  std::ifstream in(std::string(MIXSENS_SOURCE_DIR) + "/docs/schema.md");
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto doc = ss.str();
  for (const auto& s : table_schemas()) {
    CAPTURE(s.name);
    CHECK(doc.find("`" + s.hash() + "`") != std::string::npos);
    std::string cols;
    for (std::size_t i = 0; i < s.columns.size(); ++i) cols += (i ? "," : "") + s.columns[i];
    CHECK(doc.find("`" + cols + "`") != std::string::npos);
  }
}

TEST_CASE("grids, seeds and caps") {
  const auto g = geometric_grid(1.0, 2.0, 1.25);
  CHECK(g.size() == 4);
  CHECK(g.back() == doctest::Approx(1.953125));
  CHECK(sub_seed(1, "a") != sub_seed(1, "b"));
  CHECK(sub_seed(1, "a", 2) == sub_seed(1, "a", 2));
  Caps caps;
  caps.max_vertices = 100;
  CHECK_THROWS_AS(check_caps(GadgetSpec::preset("desk", 2, 0.2), caps), Error);
  caps.max_vertices = 1'000'000;
  caps.max_memory_mb = 0;
  CHECK_THROWS_WITH_AS(check_caps(GadgetSpec::preset("desk", 2, 0.2), caps), doctest::Contains("MiB"), Error);
}

TEST_CASE("experiments are deterministic") {
  ExperimentConfig cfg;
  cfg.sweep.trials = 100;
  const auto p = provenance_for(cfg);
  CHECK(run_weighted_sweep(cfg).to_csv(p) == run_weighted_sweep(cfg).to_csv(p));
  CHECK(run_weighted_sweep(cfg).rows() == cfg.sweep.deltas.size() * static_cast<std::size_t>(cfg.sweep.u));
}
