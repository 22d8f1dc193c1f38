#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "semienv/error.hpp"
#include "semienv/experiment.hpp"
#include "semienv/verify.hpp"

using namespace semienv;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(SEMIENV_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json base_config(const fs::path& out) {
  return json{{"grid", {{"lower", -6}, {"upper", 6}, {"n_nodes", 481}}},
              {"norm", {{"p", 2}}},
              {"family", {{"family", "gaussian_drift"}, {"lambda_interval", {-1, 1}}}},
              {"initial", {{"kind", "bump"}, {"params", {{"radius", 1}}}}},
              {"time", {{"t", 0.5}, {"tol_rel", 1e-4}, {"n_max", 6}}},
              {"seeds", 7},
              {"output_dir", out.string()}};
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

struct Outcome {
  int code = -1;
  std::string output;
};

Outcome cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string("\"") + SEMIENV_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  o.output = ss.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing names the offending key") {
  const json good = base_config("out");
  CHECK_NOTHROW(parse_config(good));

  auto expect_key = [](json j, const std::string& key) {
    try {
      parse_config(j);
      FAIL("expected ConfigError for " << key);
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
    }
  };
  json j = good;
  j["grid"]["n_nodes"] = 1;
  expect_key(j, "grid.n_nodes");
  j = good;
  j["grid"]["spacing"] = 0.1;
  expect_key(j, "grid.spacing");
  j = good;
  j["norm"]["p"] = 0.5;
  expect_key(j, "norm.p");
  j = good;
  j["family"] = {{"family", "gaussian_drift"}, {"lambda_list", json::array()}};
  expect_key(j, "family.lambda_list");
  j = good;
  j["family"]["family"] = "levy";
  expect_key(j, "family.family");
  j = good;
  j["family"] = {{"family", "compound_poisson"}, {"lambda_list", {0, 1}}, {"jump_atoms", {{{"offset", 1}, {"weight", 0.5}}}}};
  expect_key(j, "family.jump_atoms");
  j = good;
  j.erase("time");
  expect_key(j, "time");
  j = good;
  j["time"]["t"] = -1;
  expect_key(j, "time.t");
}

TEST_CASE("shipped sample configs parse") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(SEMIENV_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    INFO(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
    ++seen;
  }
  CHECK(seen >= 3);
}

TEST_CASE("envelope run: artifacts, determinism and exit codes") {
  const fs::path dir = scratch("envelope");
  const fs::path cfg = write_config(dir, base_config(dir / "out"));

  const Outcome first = cli("envelope --config \"" + cfg.string() + "\"", dir);
  CHECK(first.code == 0);
  for (const char* name : {"report.json", "envelope.json", "envelope_final.csv", "convergence.csv", "timings.json"})
    CHECK(fs::exists(dir / "out" / name));
  const std::string report1 = slurp(dir / "out" / "report.json");
  const json parsed = json::parse(report1);
  CHECK(parsed["subcommand"] == "envelope");
  CHECK(slurp(dir / "out" / "convergence.csv").rfind("level,steps,h,increment_lp,norm_lp\n", 0) == 0);

  const Outcome second = cli("envelope --config \"" + cfg.string() + "\"", dir);
  CHECK(second.code == 0);
  CHECK(slurp(dir / "out" / "report.json") == report1);
}

TEST_CASE("a failing check exits 1 and still writes the report") {
  const fs::path dir = scratch("fail");
  json j = base_config(dir / "out");
  j["hjb"] = {{"tolerance", 1e-9}};
  const fs::path cfg = write_config(dir, j);
  const Outcome o = cli("compare-hjb --config \"" + cfg.string() + "\"", dir);
  CHECK(o.code == 1);
  CHECK(fs::exists(dir / "out" / "report.json"));
}

TEST_CASE("configuration errors exit 2 without artifacts") {
  const fs::path dir = scratch("config_error");
  json j = base_config(dir / "out");
  j["family"] = {{"family", "pure_shift"}, {"lambda_interval", {-1, 1}}};
  const fs::path cfg = write_config(dir, j);
  const Outcome o = cli("envelope --config \"" + cfg.string() + "\"", dir);
  CHECK(o.code == 2);
  CHECK(o.output.find("no envelope bound available") != std::string::npos);
  CHECK(o.output.find("use `counterexample`") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));

  json bad = base_config(dir / "out");
  bad["grid"]["n_nodes"] = 1;
  const Outcome o2 = cli("envelope --config \"" + write_config(dir, bad).string() + "\"", dir);
  CHECK(o2.code == 2);
  CHECK(o2.output.find("grid.n_nodes") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));

  const Outcome o3 = cli("compare-ode --config \"" + cfg.string() + "\"", dir);
  CHECK(o3.code == 2);
  CHECK(cli("envelope", dir).code == 2);
  CHECK(cli("no-such-command --config x", dir).code == 2);
  CHECK(cli("envelope --config \"" + (dir / "missing.json").string() + "\"", dir).code == 2);
}

TEST_CASE("--out and --seed override the config") {
  const fs::path dir = scratch("override");
  const fs::path cfg = write_config(dir, base_config(dir / "ignored"));
  const Outcome o = cli("envelope --config \"" + cfg.string() + "\" --out \"" + (dir / "elsewhere").string() + "\" --seed 99", dir);
  CHECK(o.code == 0);
  CHECK(fs::exists(dir / "elsewhere" / "envelope.json"));
  CHECK_FALSE(fs::exists(dir / "ignored"));
  CHECK(json::parse(slurp(dir / "elsewhere" / "report.json"))["provenance"]["seed"] == 99);
}

TEST_CASE("verify suite at small scale") {
  const Report r = verify_suite({});
  CHECK(r.checks.size() == verify_check_names().size());
  for (const auto& c : r.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed());
  }
}

TEST_CASE("verify catches a downwind hamiltonian") {
  VerifyOptions opts;
  opts.hamiltonian = [](double dp, double dm, double lb) { return -upwind_abs_gradient(dp, dm, lb); };
  const Report r = verify_suite(opts);
  bool seen = false;
  for (const auto& c : r.checks) {
    if (c.name == "reference.hjb_monotone") {
      seen = true;
      CHECK(c.status == CheckStatus::fail);
    }
  }
  CHECK(seen);
  CHECK_FALSE(r.all_passed());
}

TEST_CASE("an empty family fixture is a configuration error that leaves the suite intact") {
  VerifyOptions opts;
  opts.family_fixtures.push_back(json{{"family", "gaussian_drift"}, {"lambda_list", json::array()}});
  const Report r = verify_suite(opts);
  int config_errors = 0;
  for (const auto& c : r.checks) {
    if (c.name.rfind("fixture.", 0) == 0) {
      CHECK(c.status == CheckStatus::config_error);
      ++config_errors;
    } else {
      INFO(c.name);
      CHECK(c.passed());
    }
  }
  CHECK(config_errors == 1);
}
