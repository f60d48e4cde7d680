#include "helpers.hpp"

#include "mfg/error.hpp"
#include "mfg/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>

using namespace mfg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path tmp(std::string const &name)
{
  char const *env = std::getenv("MFG_TEST_TMP");
  fs::path const root = env ? fs::path(env) : fs::temp_directory_path() / "mfg_io_test";
  fs::path const p = root / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(fs::path const &p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<unsigned char> pixels(fs::path const &p, int count)
{
  std::string const s = slurp(p);
  REQUIRE(s.size() >= static_cast<std::size_t>(count));
  std::vector<unsigned char> out;
  for (std::size_t i = s.size() - count; i < s.size(); ++i) out.push_back(static_cast<unsigned char>(s[i]));
  return out;
}

} // namespace

TEST_CASE("config parsing")
{
  RunConfig const d = parse_config_text(R"({"preset": "spread"})");
  CHECK(d.preset == "spread");
  CHECK(d.grid.nx == 64);
  CHECK(d.grid.nt == 32);
  CHECK(d.steps == StepSizes{});
  CHECK(d.max_iters == 5000);
  CHECK(d.tol == 1e-3);
  CHECK(d.history_stride == 10);
  CHECK(d.output_dir == "out");
  CHECK(d.snapshots == std::vector<double>{0.1, 0.5, 0.9});
  CHECK(d.wants("csv"));
  CHECK(d.wants("pgm"));

  RunConfig const f = parse_config_text(R"({"preset": "gauss_static", "overrides": {"order": 2},
    "grid": {"nx": 16, "nt": 8}, "steps": {"tau_rho": 0.02, "tau_phi0": 50},
    "max_iters": 10, "tol": 1e-5, "formats": ["csv"], "snapshots": [0.5]})");
  CHECK(f.overrides["order"] == 2);
  CHECK(f.grid.nx == 16);
  CHECK(f.steps.tau_rho == 0.02);
  CHECK(f.steps.tau_m == 0.5);
  CHECK(f.steps.tau_phi0 == 50.0);
  CHECK_FALSE(f.wants("pgm"));

  CHECK_THROWS_AS(parse_config_text(R"({"preset": "nope"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"preset": "spread", "bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"preset": "spread", "grid": {"nx": 16, "nz": 2}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"preset": "spread", "overrides": {"lambda9": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"preset": "spread", "tol": "small"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"preset": "spread", "max_iters": 1.5})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"preset": "spread", "formats": ["png"]})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"overrides": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config(tmp("missing") / "nope.json"), std::exception);
}

TEST_CASE("canonical serialisation round-trips")
{
  RunConfig c = parse_config_text(R"({"preset": "subregion", "overrides": {"mu": 3.5, "subregions": false},
    "grid": {"nx": 24, "nt": 12}, "tol": 2e-4, "snapshots": [0.25, 0.75]})");
  std::string const text = serialize_config(c);
  CHECK(text.back() == '\n');
  RunConfig const back = parse_config_text(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);

  fs::path const dir = tmp("config");
  {
    std::ofstream(dir / "c.json") << text;
  }
  CHECK(load_config(dir / "c.json") == c);
}

TEST_CASE("heatmap")
{
  fs::path const dir = tmp("heatmap");
  Grid const g = make_grid(0, 1, 0, 1, 3, 2, 2, Boundary::NoFlux);
  std::vector<double> const flat(g.cells(), 4.2);
  HeatmapScale const s = emit_heatmap(flat, g, dir / "flat.pgm");
  CHECK(s.min == 4.2);
  CHECK(s.max == 4.2);
  CHECK(slurp(dir / "flat.pgm").substr(0, 11) == "P5\n3 2\n255\n");
  for (auto p : pixels(dir / "flat.pgm", 6)) CHECK(p == 128);

  Grid const h = make_grid(0, 1, 0, 1, 2, 2, 2, Boundary::NoFlux);
  // j = 0 row holds 0, 1; j = 1 row holds 2, 3. The file starts at the top row.
  std::vector<double> const ramp = {0.0, 1.0, 2.0, 3.0};
  emit_heatmap(ramp, h, dir / "ramp.pgm");
  CHECK(pixels(dir / "ramp.pgm", 4) == std::vector<unsigned char>{170, 255, 0, 85});

  std::vector<double> bad = ramp;
  bad[2] = std::nan("");
  CHECK_THROWS_AS(emit_heatmap(bad, h, dir / "bad.pgm"), std::domain_error);
  CHECK_FALSE(fs::exists(dir / "bad.pgm"));
  CHECK_THROWS_AS(emit_heatmap(ramp, h, dir / "no" / "such" / "x.pgm"), IoError);
}

TEST_CASE("field csv round trip")
{
  fs::path const dir = tmp("csv");
  Grid const g = make_grid(-1, 1, 0, 2, 5, 3, 2, Boundary::NoFlux);
  std::mt19937_64 rng(51);
  auto const f = testutil::random_field(g.cells(), rng, -1e3, 1e3);
  write_field_csv(f, g, {{"field", "rho"}, {"t", "0.5"}}, dir / "f.csv");
  FieldCsv const r = read_field_csv(dir / "f.csv");
  CHECK(r.nx1 == 5);
  CHECK(r.nx2 == 3);
  CHECK(r.values == f);
  CHECK(r.meta.at("field") == "rho");
  CHECK(r.meta.at("t") == "0.5");
  CHECK_THROWS_AS(read_field_csv(dir / "missing.csv"), IoError);
}

TEST_CASE("run writes artifacts and is reproducible")
{
  fs::path const dir = tmp("run");
  RunConfig c = parse_config_text(R"({"preset": "trivial", "grid": {"nx": 8, "nt": 4}, "max_iters": 20,
    "tol": 1e-8, "history_stride": 1})");
  c.output_dir = (dir / "a").string();

  RunOptions dry;
  dry.dry_run = true;
  RunSummary const d = run(c, dry);
  CHECK(d.json["dry_run"] == true);
  CHECK(d.json["config"] == config_to_json(c));
  CHECK_FALSE(fs::exists(dir / "a"));

  long rows = 0;
  RunOptions opts;
  opts.on_history = [&](HistoryRow const &) { ++rows; };
  RunSummary const s = run(c, opts);
  CHECK(s.converged);
  CHECK(rows == s.iterations);
  CHECK(s.json["converged"] == true);
  CHECK(s.json["mass_drift_max"].get<double>() <= 1e-12);
  for (char const *f : {"summary.json", "residuals.csv", "rho_t0.100.csv", "rho_t0.500.pgm", "phi_t0.900.csv"})
    CHECK(fs::exists(dir / "a" / f));
  CHECK(slurp(dir / "a" / "residuals.csv").rfind("iter,continuity_res,a_fixedpoint_res,complementarity_res,objective\n", 0) == 0);
  json const written = json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(written["iterations"] == s.iterations);

  ProblemSpec const spec = preset("trivial", json::object(), {8, 4});
  FieldCsv const snap = read_field_csv(dir / "a" / "rho_t0.500.csv");
  CHECK(testutil::max_abs_diff(snap.values, spec.rho0) <= 1e-12);

  c.output_dir = (dir / "b").string();
  run(c);
  for (char const *f : {"rho_t0.100.csv", "phi_t0.500.csv", "rho_t0.900.pgm", "residuals.csv"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));

  RunConfig bad = c;
  bad.steps.tau_rho = -1.0;
  CHECK_THROWS_AS(run(bad), ConfigError);
}

TEST_CASE("kernel check")
{
  RunConfig c = parse_config_text(R"({"preset": "gauss_static", "overrides": {"mu": 5.0, "sigma1": 0.5, "sigma2": 0.5}})");
  KernelCheck const k = kernel_check(c, 9);
  REQUIRE(k.rows.size() == 9u);
  CHECK(k.rows[3].features == 10);
  CHECK(k.rows[8].sup_error < k.rows[2].sup_error);

  c = parse_config_text(R"({"preset": "spread"})");
  KernelCheck const s = kernel_check(c, 9);
  REQUIRE(s.rows.size() == 1u);
  CHECK(s.rows[0].sup_error <= 1e-12);

  c = parse_config_text(R"({"preset": "turnpike"})");
  KernelCheck const t = kernel_check(c, 8);
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i].sup_error <= t.rows[i - 1].sup_error + 1e-12);

  c = parse_config_text(R"({"preset": "subregion"})");
  CHECK(kernel_check(c, 8).rows.size() == 9u);
  CHECK_THROWS_AS(kernel_check(c, 1), ConfigError);
}
