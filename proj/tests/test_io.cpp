// SPDX-License-Identifier: Apache-2.0
// Configuration, checksums, reports and the command layer.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rollstab/checksum.hpp"
#include "rollstab/config.hpp"
#include "rollstab/error.hpp"
#include "rollstab/experiments.hpp"
#include "rollstab/report.hpp"

#ifndef ROLLSTAB_SOURCE_DIR
#error "ROLLSTAB_SOURCE_DIR must point at the source tree"
#endif

using namespace rollstab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rollstab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("key-value parsing") {
  const KeyValueConfig kv = KeyValueConfig::parse("# comment\n q = 0.2\nD=3   # inline\n\nout = a#b\n");
  CHECK(kv.get("q") == "0.2");
  CHECK(kv.get("D") == "3");
  CHECK(kv.get("out") == "a#b");
  CHECK_FALSE(kv.has("gamma"));
  CHECK_THROWS_AS(KeyValueConfig::parse("novalue\n"), Error);
  CHECK_THROWS_AS(KeyValueConfig::parse("= 3\n"), Error);
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/file.conf"), Error);
}

TEST_CASE("real parsing accepts a pi factor") {
  CHECK(parse_real("L", "200pi") == doctest::Approx(200.0 * std::numbers::pi));
  CHECK(parse_real("L", "0.5 pi") == doctest::Approx(0.5 * std::numbers::pi));
  CHECK(parse_real("L", "1e-3") == 1e-3);
  CHECK_THROWS_AS(parse_real("L", "abc"), Error);
  CHECK_THROWS_AS(parse_real("L", "1.0x"), Error);
}

TEST_CASE("reference defaults file matches the compiled defaults") {
  const KeyValueConfig file = KeyValueConfig::load(std::string(ROLLSTAB_SOURCE_DIR) + "/config/defaults.conf");
  ExperimentConfig c = ExperimentConfig::defaults();
  c.apply(file);
  const auto compiled = ExperimentConfig::defaults().to_kv().entries();
  CHECK(c.to_kv().entries() == compiled);
  for (const auto& [key, value] : compiled)
    if (key != "command") CHECK_MESSAGE(file.has(key), "defaults.conf lacks " << key);
}

TEST_CASE("configuration round trip and validation") {
  ExperimentConfig c = ExperimentConfig::defaults();
  c.params = {0.1, 2.0, 0.3};
  c.seed = 42;
  ExperimentConfig d = ExperimentConfig::defaults();
  d.apply(KeyValueConfig::parse(c.to_kv().to_text()));
  CHECK(d.to_kv().entries() == c.to_kv().entries());
  ExperimentConfig bad = ExperimentConfig::defaults();
  CHECK_THROWS_AS(bad.apply(KeyValueConfig::parse("unknown_key = 1\n")), Error);
  bad.N = 1000;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ExperimentConfig::defaults();
  bad.dt = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("resolution order") {
  const fs::path dir = scratch("resolve");
  {
    std::ofstream f(dir / "run.conf");
    f << "preset = realgl\nq = 0.25\neps = 0.02\n";
  }
  KeyValueConfig over;
  over.set("eps", "0.03");
  const ExperimentConfig c = resolve_config("simulate", (dir / "run.conf").string(), over);
  CHECK(c.params.q == 0.25);     // file beats preset
  CHECK(c.params.gamma == 0.0);  // preset beats defaults
  CHECK(c.eps == 0.03);          // overrides beat file
  CHECK(c.command == "simulate");
  CHECK_THROWS_AS(resolve_config("simulate", "", [] {
                    KeyValueConfig k;
                    k.set("preset", "nope");
                    return k;
                  }()),
                  Error);
  for (const std::string& name : preset_names()) {
    ExperimentConfig p = ExperimentConfig::defaults();
    CHECK_NOTHROW(apply_preset(p, name));
    CHECK_NOTHROW(p.validate());
  }
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifest") {
  const fs::path dir = scratch("manifest");
  fs::create_directories(dir / "sub");
  { std::ofstream(dir / "a.txt") << "hello"; }
  { std::ofstream(dir / "sub" / "b.csv") << "x,y\n1,2\n"; }
  const auto entries = write_manifest(dir.string());
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].name == "a.txt");
  CHECK(entries[0].bytes == 5);
  CHECK(entries[1].name == "sub/b.csv");
  CHECK(verify_manifest(dir.string()).empty());
  const Json j = Json::parse(slurp(dir / "manifest.json"));
  CHECK(j["files"].size() == 2);
  { std::ofstream(dir / "a.txt") << "changed"; }
  const auto changed = verify_manifest(dir.string());
  REQUIRE(changed.size() == 1);
  CHECK(changed[0] == "a.txt");
}

TEST_CASE("report helpers") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_number(v)) == v);
  const fs::path dir = scratch("report");
  write_series_csv((dir / "s.csv").string(), {0.0, 1.0}, {2.0, 0.5});
  CHECK(slurp(dir / "s.csv") == "t,value\n0,2\n1,0.5\n");
  const Json l = to_json(lambda1_pm({0.0, 2.0, 0.0}));
  CHECK(l["plus"].get<double>() == doctest::Approx(-1.0));
  CHECK(l["minus"].get<double>() == doctest::Approx(-2.0));
  const Json r = to_json(RollParams{0.3, 1.0, 0.5});
  CHECK(r["q"].get<double>() == 0.3);
  CHECK_THROWS_AS(write_text("/nonexistent_dir/x.txt", "x"), Error);
}

TEST_CASE("criterion selection") {
  CHECK(select_criteria("").size() == 12);
  CHECK(select_criteria("symbol") == std::vector<int>{1, 2, 3});
  CHECK(select_criteria("semigroup") == std::vector<int>{4, 5});
  CHECK(select_criteria("decay") == std::vector<int>{11});
  CHECK(select_criteria("dynamics") == std::vector<int>{6, 7, 8, 9, 10, 12});
  CHECK(select_criteria("5,symbol") == std::vector<int>{1, 2, 3, 5});
  CHECK_THROWS_AS(select_criteria("13"), Error);
  CHECK_THROWS_AS(select_criteria("bogus"), Error);
}

TEST_CASE("exit statuses") {
  CHECK(exit_status_for(ErrorCode::invalid_argument) == ExitStatus::usage);
  CHECK(exit_status_for(ErrorCode::io) == ExitStatus::usage);
  CHECK(exit_status_for(ErrorCode::divergence) == ExitStatus::divergence);
  CHECK(exit_status_for(ErrorCode::numerical) == ExitStatus::criterion_failed);
  CHECK(exit_status_for(ErrorCode::criterion_failed) == ExitStatus::criterion_failed);
}

TEST_CASE("spectrum command") {
  const fs::path dir = scratch("spectrum");
  ExperimentConfig c = ExperimentConfig::defaults();
  c.command = "spectrum";
  c.out = dir.string();
  SUBCASE("stable defaults") {
    const CommandResult r = run_command(c);
    CHECK(r.status == ExitStatus::pass);
    CHECK(r.summary["stability"]["verdict"] == "stable");
    CHECK(fs::exists(dir / "curves.csv"));
    CHECK(fs::exists(dir / "config.resolved"));
    CHECK(fs::exists(dir / "report.json"));
    CHECK(verify_manifest(dir.string()).empty());
    const ExperimentConfig echoed = resolve_config("spectrum", (dir / "config.resolved").string(), {});
    CHECK(echoed.to_kv().entries() == c.to_kv().entries());
  }
  SUBCASE("unstable rolls") {
    c.params = {0.6, 1.0, 0.0};
    const CommandResult r = run_command(c);
    CHECK(r.summary["stability"]["verdict"] == "unstable");
  }
  SUBCASE("q = 0 curvatures") {
    c.params = {0.0, 1.0, 0.0};
    const CommandResult r = run_command(c);
    CHECK(r.summary["lambda1"]["plus"].get<double>() == doctest::Approx(-1.0));
    CHECK(r.summary["lambda1"]["minus"].get<double>() == doctest::Approx(-1.0));
  }
}

TEST_CASE("simulate command is deterministic") {
  ExperimentConfig c = ExperimentConfig::defaults();
  c.command = "simulate";
  c.L = 20.0 * std::numbers::pi;
  c.N = 256;
  c.T = 10.0;
  c.fit_tmax = 10.0;
  std::string digests[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = scratch("simulate" + std::to_string(i));
    c.out = dir.string();
    const CommandResult r = run_command(c);
    CHECK(r.status == ExitStatus::pass);
    digests[i] = sha256_file((dir / "norms.csv").string()) + sha256_file((dir / "snapshot_phi.csv").string());
  }
  CHECK(digests[0] == digests[1]);
}
