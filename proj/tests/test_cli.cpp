#include "hocc/config.hpp"
#include "hocc/error.hpp"

#include "fixtures.hpp"
#include "support/testkit.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace hocc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string cli() { return HOCC_CLI_PATH; }

// Runs the CLI with stdout and stderr discarded; returns its exit status.
int hocc(const std::string& args) { return testkit::run_command(cli() + " " + args + " > /dev/null 2>&1"); }

fs::path corpus() {
  static const fs::path dir = [] {
    auto d = testkit::fresh_dir("cli_corpus");
    fixtures::write_corpus(d);
    return d;
  }();
  return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::vector<json> jsonl(const fs::path& p) {
  std::vector<json> out;
  std::istringstream in(testkit::slurp(p));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

// Scene id plus the colliding pair identifies a record across runs.
std::set<std::string> record_keys(const fs::path& p) {
  std::set<std::string> keys;
  for (const auto& r : jsonl(p)) keys.insert(r["scene"]["id"].get<std::string>() + "/" + r["impact"]["pair"].dump());
  return keys;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(hocc(""), 2);
  EXPECT_EQ(hocc("run --bogus"), 2);
  EXPECT_EQ(hocc("frobnicate"), 2);
  EXPECT_EQ(hocc("validate --out " + q(testkit::fresh_dir("cli_nomap"))), 2);
  EXPECT_EQ(hocc("scan --map " + q(corpus() / "map.json")), 2);
  EXPECT_EQ(hocc("run --epsilon notanumber --map x --tracks y"), 2);
}

TEST(Cli, RuntimeErrorsExitOne) {
  const auto out = testkit::fresh_dir("cli_missing");
  EXPECT_EQ(hocc("run --tracks " + q(out / "absent.csv") + " --map " + q(corpus() / "map.json") + " --out " + q(out)),
            1);
  std::ofstream(out / "bad.toml") << "no_such_key = 3\n";
  EXPECT_EQ(hocc("run --config " + q(out / "bad.toml") + " --tracks " + q(corpus() / "tagging_on_tracks.csv") +
                 " --map " + q(corpus() / "map.json") + " --out " + q(out)),
            1);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(hocc("--help"), 0); }

TEST(Cli, EmptyTrackFileGivesZeroReport) {
  const auto out = testkit::fresh_dir("cli_empty");
  const auto tracks = out / "empty.csv";
  {
    // Header only.
    std::istringstream src(testkit::slurp(corpus() / "tagging_on_tracks.csv"));
    std::string header;
    std::getline(src, header);
    std::ofstream(tracks) << header << "\n";
  }
  ASSERT_EQ(hocc("run --tracks " + q(tracks) + " --map " + q(corpus() / "map.json") + " --out " + q(out / "o")), 0);
  const auto report = json::parse(testkit::slurp(out / "o" / "report.json"));
  EXPECT_EQ(report["augmented"]["situations"], 0);
  EXPECT_EQ(report["augmented"]["occ_records"], 0);
  EXPECT_EQ(report["baseline"]["occ_records"], 0);
  EXPECT_TRUE(report["occ_gain_percent"].is_null());
  EXPECT_TRUE(jsonl(out / "o" / "occ_records.jsonl").empty());
}

TEST(Cli, LimitScenesCapsSituations) {
  const auto out = testkit::fresh_dir("cli_limit");
  ASSERT_EQ(hocc("extract --tracks " + q(corpus() / "tagging_on_tracks.csv") + " --map " + q(corpus() / "map.json") +
                 " --limit-scenes 3 --out " + q(out)),
            0);
  EXPECT_EQ(jsonl(out / "situations.jsonl").size(), 3u);
}

TEST(Cli, ScanFindsNothingOnUnoccludedTracks) {
  const auto out = testkit::fresh_dir("cli_scan");
  ASSERT_EQ(hocc("scan --tracks " + q(corpus() / "unoccluded_tracks.csv") + " --map " + q(corpus() / "map.json") +
                 " --out " + q(out)),
            0);
  EXPECT_TRUE(jsonl(out / "occlusion_scenes.jsonl").empty());
}

TEST(Cli, RaisingThetaOnlyDropsRecords) {
  const auto out = testkit::fresh_dir("cli_theta");
  const std::string map = " --map " + q(corpus() / "map.json");
  ASSERT_EQ(hocc("inject --tracks " + q(corpus() / "tagging_on_tracks.csv") + map + " --out " + q(out / "inj")), 0);
  const std::string scenes = " --scenes " + q(out / "inj" / "occlusion_scenes.jsonl");
  ASSERT_EQ(hocc("validate" + scenes + map + " --theta 0 --out " + q(out / "t0")), 0);
  ASSERT_EQ(hocc("validate" + scenes + map + " --theta 2 --out " + q(out / "t2")), 0);
  const auto loose = record_keys(out / "t0" / "occ_records.jsonl");
  const auto strict = record_keys(out / "t2" / "occ_records.jsonl");
  EXPECT_FALSE(strict.empty());
  for (const auto& k : strict) EXPECT_TRUE(loose.count(k)) << k;
  for (const auto& r : jsonl(out / "t2" / "occ_records.jsonl")) EXPECT_GE(r["dor"].get<double>(), 2.0);
}

TEST(Cli, ConfigFileAndFlagsCombine) {
  const auto out = testkit::fresh_dir("cli_config");
  std::ofstream(out / "c.toml") << "# override\ntheta = 3.5\nspacing = 4\n";
  ASSERT_EQ(hocc("run --tracks " + q(corpus() / "tagging_on_tracks.csv") + " --map " + q(corpus() / "map.json") +
                 " --config " + q(out / "c.toml") + " --spacing 3 --out " + q(out / "o")),
            0);
  RunConfig cfg;
  apply_config_file(cfg, out / "o" / "config.toml");
  EXPECT_DOUBLE_EQ(cfg.theta, 3.5);
  EXPECT_DOUBLE_EQ(cfg.spacing, 3.0);
}

TEST(Config, TextRoundTrip) {
  RunConfig cfg;
  cfg.theta = 1.25;
  cfg.epsilon = 7;
  cfg.seed = 99;
  cfg.cell_size = 0.2;
  RunConfig back;
  apply_config_text(back, config_to_text(cfg));
  EXPECT_EQ(config_to_text(back), config_to_text(cfg));
  EXPECT_EQ(back.epsilon, 7);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_TRUE(json::accept(config_to_json(cfg)));
}

TEST(Config, MalformedTextIsRejected) {
  RunConfig cfg;
  EXPECT_THROW(apply_config_text(cfg, "theta = fast\n"), ParseError);
  EXPECT_THROW(apply_config_text(cfg, "nonsense = 1\n"), ParseError);
  EXPECT_THROW(apply_config_text(cfg, "theta 2\n"), ParseError);
  EXPECT_NO_THROW(apply_config_text(cfg, "\n# only a comment\n  theta = 2.5  # trailing\n"));
  EXPECT_DOUBLE_EQ(cfg.theta, 2.5);
  cfg.cell_size = -1;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace hocc
