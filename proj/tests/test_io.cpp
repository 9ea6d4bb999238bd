#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hiresim/config_json.hpp"
#include "hiresim/presets.hpp"
#include "hiresim/results.hpp"

using namespace hiresim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(HIRESIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("empty config body resolves to the stock market") {
  for (const std::string body : {std::string("{}"), std::string(""), std::string("  \n")}) {
    const SimConfig sc = parse_config_text(body);
    CHECK(sc.market.d == 1);
    REQUIRE(sc.market.groups.size() == 2);
    CHECK(sc.market.groups[0].count == 10);
    CHECK(sc.market.groups[1].count == 2);
    CHECK(sc.market.groups[0].n0 == 10);
    CHECK(sc.market.groups[1].n0 == 2);
    CHECK(sc.market.groups[0].mu_x[0] == 3.0);
    CHECK(sc.market.groups[0].sigma_x == 2.0);
    CHECK(sc.market.groups[0].theta[0] == 1.0);
    CHECK(sc.market.sigma_eps == 2.0);
    CHECK(sc.market.sigma_eta == 0.0);
    CHECK(sc.market.horizon == 1000);
    CHECK(sc.market.lambda_reg == 1.0);
    CHECK(sc.market.delta == 0.1);
    CHECK(sc.market.a_hybrid == 1.0);
    CHECK(sc.market.k_finalists == 2);
    CHECK(sc.market.radius_variant == RadiusVariant::DetBased);
    CHECK(sc.policy.kind == PolicyKind::LaissezFaire);
    CHECK(sc.subsidy == SubsidyRule::None);
    CHECK(sc.runs == 4000);
  }
}

TEST_CASE("parse failures carry the field path") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"delta": 1.5})"),
                       "delta must lie in (0,1)", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"frobnicate": 1})"),
                       "frobnicate is not a recognized field", ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"d": "one"})"),
                       "d must be an integer", ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"d": 2, "groups": [{"mu_x": [1.0]}]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"policy": "warpdrive"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"subsidy": "gold"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"policy": "hybrid:x"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"runs": 0})"), ConfigError);
  // pairing checked at parse time too
  CHECK_THROWS_AS(parse_config_text(R"({"policy": "rooney", "k_finalists": 1})"),
                  ConfigError);
}

TEST_CASE("policy and subsidy spellings") {
  CHECK(parse_policy("lf").kind == PolicyKind::LaissezFaire);
  CHECK(parse_policy("ucb").kind == PolicyKind::Ucb);
  const PolicySpec h = parse_policy("hybrid:0.5");
  CHECK(h.kind == PolicyKind::Hybrid);
  CHECK(h.a == 0.5);
  CHECK(parse_policy("hybrid").a == -1.0);  // falls back to the config scale
  CHECK(parse_policy("rooney_then_lf:50").switch_round == 50);
  CHECK(parse_policy("warmstart_lf:20").n0_total == 20);
  CHECK(parse_subsidy("hybrid_cost_saving") == SubsidyRule::HybridCostSaving);
  CHECK(parse_radius("l_based") == RadiusVariant::LBased);
  CHECK_THROWS_AS(parse_radius("psychic"), ConfigError);
}

TEST_CASE("config json round-trips") {
  const std::string body = R"({
    "d": 2,
    "groups": [
      {"label": "maj", "count": 4, "mu_x": [3.0, 1.0], "sigma_x": 1.5, "theta": [1.0, -0.5], "n0": 4},
      {"label": "min", "count": 2, "mu_x": 2.0, "sigma_x": 2.0, "theta": 0.5, "n0": 2}
    ],
    "sigma_eps": 1.0, "sigma_eta": 2.0, "horizon": 500, "lambda": 0.5,
    "delta": 0.05, "a_hybrid": 0.7, "k_finalists": 3, "seed": 99,
    "radius": "l_based", "policy": "rooney", "subsidy": "none", "runs": 12
  })";
  const SimConfig sc = parse_config_text(body);
  CHECK(sc.market.groups[1].mu_x[1] == 2.0);  // scalar broadcast
  CHECK(sc.market.groups[1].theta[0] == 0.5);

  const nlohmann::json j = to_json(sc);
  const SimConfig rt = parse_config_text(j.dump());
  CHECK(to_json(rt) == j);
  CHECK(rt.market.seed == 99);
  CHECK(rt.market.radius_variant == RadiusVariant::LBased);
  CHECK(rt.policy.kind == PolicyKind::Rooney);
  CHECK(rt.runs == 12);
}

TEST_CASE("config hash is stable and content-sensitive") {
  const nlohmann::json a = to_json(parse_config_text("{}"));
  const nlohmann::json b = to_json(parse_config_text(R"({"seed": 1})"));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) == config_hash(a));
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("g17 floats survive the round trip") {
  for (const double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02e23, 0.0, 123456.789}) {
    const std::string s = fmt_g17(v);
    CHECK(std::stod(s) == v);
  }
  Table t;
  t.filename = "t.csv";
  t.header = {"a", "b"};
  t.rows = {{"1", "x"}, {"2", "y"}};
  CHECK(csv_text(t) == "a,b\n1,x\n2,y\n");
}

TEST_CASE("fig1 bundle uses the sweep schema") {
  const ResultsBundle b = run_preset(preset("fig1_pu_vs_k1"), 4, 1);
  REQUIRE(b.tables.size() == 1);
  const Table& t = b.tables[0];
  CHECK(t.filename == "pu_frequency.csv");
  CHECK(t.header == std::vector<std::string>{"k1", "freq", "ci_halfwidth", "runs"});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0][0] == "2");
  CHECK(t.rows[3][0] == "100");
  for (const auto& row : t.rows) CHECK(row.back() == "4");
  CHECK(b.manifest.at("config_hash") ==
        config_hash(b.manifest.at("config")));
}

TEST_CASE("fig2 bundle uses the series schema") {
  const ResultsBundle b = run_preset(preset("fig2_lf_vs_ucb"), 2, 1);
  REQUIRE(b.tables.size() == 1);
  const Table& t = b.tables[0];
  CHECK(t.filename == "regret.csv");
  CHECK(t.header ==
        std::vector<std::string>{"round", "policy", "mean", "p5", "p95"});
  // two policies, 988 main-phase rounds each
  CHECK(t.rows.size() == 2 * 988);
  CHECK(t.rows.front()[0] == "13");
  CHECK(t.rows.front()[1] == "lf");
  CHECK(t.rows.back()[0] == "1000");
  CHECK(t.rows.back()[1] == "ucb");
}

TEST_CASE("emitting a bundle twice writes identical bytes") {
  const ResultsBundle b = run_preset(preset("fig1_pu_vs_k1"), 2, 1);
  const fs::path d1 = fresh_dir("hiresim_io_a");
  const fs::path d2 = fresh_dir("hiresim_io_b");
  emit_results(b, d1.string());
  emit_results(b, d2.string());
  for (const char* name : {"manifest.json", "pu_frequency.csv"})
    CHECK(slurp(d1 / name) == slurp(d2 / name));
  // idempotent overwrite into the same directory
  emit_results(b, d1.string());
  CHECK(slurp(d1 / "pu_frequency.csv") == slurp(d2 / "pu_frequency.csv"));
}

TEST_CASE("unknown preset names are rejected") {
  CHECK_THROWS_AS(preset("fig99_dreams"), ConfigError);
  CHECK(all_presets().size() == 10);
  CHECK(preset("fig3_ucb_vs_hybrid_regret").base.a_hybrid == 1.0);
  CHECK(preset("fig1_pu_vs_k1").sweep_values ==
        std::vector<double>{2, 10, 30, 100});
  CHECK(preset("fig6_costsaving_long").base.horizon == 10000);
  CHECK(preset("fig6_costsaving_long").runs == 50);
  CHECK(preset("fig7_rooney_pu").sweep_values ==
        std::vector<double>{0.25, 1, 4, 16});
}

TEST_CASE("cli exit codes") {
  const fs::path dir = fresh_dir("hiresim_cli");
  const fs::path good = dir / "good.json";
  std::ofstream(good) << R"({"horizon": 100, "runs": 2})";
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"delta": 1.5})";

  CHECK(run_cli("validate --config " + good.string()) == 0);
  CHECK(run_cli("validate --config " + bad.string()) == 2);
  CHECK(run_cli("validate --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("simulate") == 2);  // --config is required
  CHECK(run_cli("--bogus-flag") == 2);
  CHECK(run_cli("preset --name fig99_dreams --runs 1") == 2);

  const fs::path out = dir / "sim";
  CHECK(run_cli("simulate --config " + good.string() + " --runs 2 --out " +
                out.string()) == 0);
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "regret.csv"));
  CHECK(fs::exists(out / "pu_frequency.csv"));
  CHECK(fs::exists(out / "totals.csv"));

  // malformed worker override is a config error
  const fs::path out2 = dir / "sim2";
  const int env_st = std::system(
      (std::string("HIRESIM_WORKERS=abc ") + HIRESIM_CLI_PATH +
       " simulate --config " + good.string() + " --runs 1 --out " +
       out2.string() + " >/dev/null 2>&1")
          .c_str());
  CHECK((WIFEXITED(env_st) ? WEXITSTATUS(env_st) : -1) == 2);

  // resolved config is printed on stdout
  const fs::path echo = dir / "echo.txt";
  std::system((std::string(HIRESIM_CLI_PATH) + " validate --config " +
               good.string() + " > " + echo.string() + " 2>/dev/null")
                  .c_str());
  const std::string text = slurp(echo);
  CHECK(text.find("\"horizon\": 100") != std::string::npos);
  CHECK(text.find("\"delta\": 0.1") != std::string::npos);
}

TEST_CASE("preset list runs without a name") {
  CHECK(run_cli("preset") == 0);
  const fs::path dir = fresh_dir("hiresim_preset_out");
  CHECK(run_cli("preset --name fig1_pu_vs_k1 --runs 2 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "pu_frequency.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
  // --scale shrinks the preset's stock run count (4000 * 0.002 -> 8)
  const fs::path dir2 = fresh_dir("hiresim_preset_scale");
  CHECK(run_cli("preset --name fig1_pu_vs_k1 --scale 0.002 --out " + dir2.string()) == 0);
  const std::string manifest = slurp(dir2 / "manifest.json");
  CHECK(manifest.find("\"runs\": 8") != std::string::npos);
}
