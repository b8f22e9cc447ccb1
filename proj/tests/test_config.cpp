// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nrsense/config.hpp"
#include "nrsense/io.hpp"

using namespace nrs;

TEST_CASE("text parser handles comments, blanks and whitespace") {
  std::istringstream in(
      "# scenario\n"
      "\n"
      "prs.comb_size = 4   # staggered comb\n"
      "  rx.architecture=hybrid\n");
  const auto kv = parse_config_text(in);
  REQUIRE(kv.size() == 2);
  CHECK(kv.at("prs.comb_size") == "4");
  CHECK(kv.at("rx.architecture") == "hybrid");
}

TEST_CASE("text parser rejects lines without an equals sign") {
  std::istringstream in("prs.comb_size 4\n");
  CHECK_THROWS_AS(parse_config_text(in), std::invalid_argument);
}

TEST_CASE("unknown keys are reported by name") {
  KvMap kv{{"bg.bogus_key", "1"}};
  try {
    scenario_from_kv(kv);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("bg.bogus_key") != std::string::npos);
  }
}

TEST_CASE("bad values are reported with the offending key") {
  KvMap kv{{"prs.scs_hz", "abc"}};
  try {
    scenario_from_kv(kv);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("prs.scs_hz") != std::string::npos);
  }
}

TEST_CASE("keys map onto the scenario") {
  KvMap kv{{"prs.comb_size", "6"},
           {"prs.n_prs_symbols", "6"},
           {"rx.architecture", "analog"},
           {"aoa.method", "bartlett"},
           {"noise.si_power_dbm", "-90.5"},
           {"sector.yaw_deg", "45"},
           {"run.n_drops", "7"}};
  const auto scn = scenario_from_kv(kv);
  CHECK(scn.prs.comb_size == 6);
  CHECK(scn.rx_kind == RxKind::analog);
  CHECK(scn.aoa.method == AoaConfig::Method::bartlett);
  CHECK(scn.noise.si_power_dbm == -90.5);
  CHECK(scn.sector.yaw_deg == 45.0);
  CHECK(scn.array.boresight_yaw_deg == 45.0);  // array follows the sector
  CHECK(scn.n_drops == 7);
}

TEST_CASE("minus infinity self-interference round trips") {
  KvMap kv{{"noise.si_power_dbm", "-inf"}};
  const auto scn = scenario_from_kv(kv);
  CHECK(std::isinf(scn.noise.si_power_dbm));
  const auto back = scenario_to_kv(scn);
  CHECK(back.at("noise.si_power_dbm") == "-inf");
}

TEST_CASE("overrides replace file values") {
  KvMap kv{{"prs.comb_size", "2"}};
  const std::vector<std::string> ov{"prs.comb_size=12", "prs.n_prs_symbols = 12"};
  apply_overrides(kv, ov);
  CHECK(kv.at("prs.comb_size") == "12");
  CHECK(kv.at("prs.n_prs_symbols") == "12");
  CHECK_THROWS_AS(apply_overrides(kv, std::vector<std::string>{"nope"}),
                  std::invalid_argument);
}

TEST_CASE("resolved snapshot round trips bit-identically") {
  KvMap kv{{"prs.tx_power_dbm", "17.123456789012345"},
           {"sector.yaw_deg", "33.3"},
           {"rd.max_range_m", "512.25"}};
  const auto scn = scenario_from_kv(kv);
  const auto snap = scenario_to_kv(scn);
  const auto scn2 = scenario_from_kv(snap);
  const auto snap2 = scenario_to_kv(scn2);
  CHECK(snap == snap2);
  CHECK(scn2.prs.tx_power_dbm == scn.prs.tx_power_dbm);
}

TEST_CASE("manifest files reload as configs") {
  ScenarioConfig scn;
  scn.prs.comb_size = 4;
  scn.prs.n_prs_symbols = 2;
  scn.master_seed = 777;
  const std::string path = "test_manifest_tmp.json";
  write_manifest(path, scn, {{"campaign", 1.5}});
  const auto kv = load_config_file(path);
  const auto scn2 = scenario_from_kv(kv);
  CHECK(scn2.prs.comb_size == 4);
  CHECK(scn2.master_seed == 777);
  CHECK(scenario_to_kv(scn2) == scenario_to_kv(scn));
  std::remove(path.c_str());
}

TEST_CASE("missing config files are a config error") {
  CHECK_THROWS_AS(load_config_file("does_not_exist.cfg"), std::invalid_argument);
}
