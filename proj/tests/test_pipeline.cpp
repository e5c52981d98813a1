#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "panap/common.hpp"
#include "panap/corpus.hpp"
#include "panap/pipeline.hpp"
#include "panap/table_io.hpp"

using namespace panap;
namespace fs = std::filesystem;

namespace {

constexpr int64_t kDay = 24 * 3600;

struct TempDir {
  fs::path root;
  TempDir() {
    root = fs::path("pipe_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter()++));
    fs::create_directories(root);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  std::string path(const std::string& name) const {
    return (root / name).string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Events span ~30 days so the 14-day tail becomes the test window. j9 only
// ever appears in the last two days, which forces the unseen filter to act.
void write_inputs(const TempDir& dir) {
  write_file(dir.path("jobs.tsv"),
             "job_id\ttitle\tdescription\trequirements\tcity\tstate\tcountry\n"
             "j1\tnurse icu\tacute care\trn license\tAustin\tTX\tUS\n"
             "j2\tnurse er\ttriage\trn license\tAustin\tTX\tUS\n"
             "j3\twelder\tpipe welds\tcert\tReno\tNV\tUS\n"
             "j4\twelder lead\tshop lead\tcert\tReno\tNV\tUS\n"
             "j9\tbarista\tespresso\tnone\tAustin\tTX\tUS\n");
  write_file(dir.path("seekers.tsv"),
             "user_id\tcity\tstate\tcountry\tdegree\tmajor\n"
             "u1\tAustin\tTX\tUS\tBS\tnursing\n"
             "u2\tReno\tNV\tUS\t\twelding\n");
  int64_t base = 1600000000;
  std::string apps = "user_id\tjob_id\ttimestamp\n";
  auto row = [&](const std::string& u, const std::string& j, int64_t t) {
    apps += u + "\t" + j + "\t" + std::to_string(t) + "\n";
  };
  // u1, day 0: one session (10-minute steps), then a separate session after
  // a 2-hour pause.
  row("u1", "j1", base);
  row("u1", "j2", base + 600);
  row("u1", "j1", base + 1200);
  row("u1", "j3", base + 1200 + 7200);
  row("u1", "j4", base + 1200 + 7800);
  // u2, day 1.
  row("u2", "j3", base + kDay);
  row("u2", "j4", base + kDay + 300);
  row("u2", "j2", base + kDay + 900);
  // Test window, day 29: u1 revisits known jobs, then hits unseen j9.
  row("u1", "j2", base + 29 * kDay);
  row("u1", "j1", base + 29 * kDay + 300);
  row("u1", "j9", base + 29 * kDay + 600);
  // A malformed row and a blank id, both skipped.
  apps += "u2\tj1\tnot-a-time\n";
  apps += "\tj1\t" + std::to_string(base) + "\n";
  write_file(dir.path("apps.tsv"), apps);
}

PrepareConfig config_for(const TempDir& dir) {
  PrepareConfig cfg;
  cfg.jobs_path = dir.path("jobs.tsv");
  cfg.seekers_path = dir.path("seekers.tsv");
  cfg.applications_path = dir.path("apps.tsv");
  return cfg;
}

}  // namespace

TEST_CASE("prepare_dataset writes a complete, accurate manifest") {
  TempDir dir;
  write_inputs(dir);
  std::string out = dir.path("prepared");
  nlohmann::json manifest = prepare_dataset(config_for(dir), out);

  CHECK(manifest.at("format") == "panap-prepared");
  CHECK(manifest.at("mode") == "gap_split");
  CHECK(manifest.at("gap_minutes") == 30);
  CHECK(manifest.at("test_days") == 14);
  CHECK(manifest.at("duplicates") == "kept");

  const auto& stats = manifest.at("stats");
  CHECK(stats.at("events_read") == 13);
  CHECK(stats.at("events_skipped") == 2);
  CHECK(stats.at("users") == 2);
  CHECK(stats.at("jobs_catalog") == 5);
  // Sessions: u1 day 0 splits at the 2h pause -> 2; u2 day 1 -> 1; u1 day 29
  // -> 1. Four total, one in the test window.
  CHECK(stats.at("sessions_total") == 4);
  CHECK(stats.at("sessions_train") == 3);
  CHECK(stats.at("sessions_test") == 1);
  CHECK(stats.at("events_train") == 8);
  // j9 never appears in training, so the unseen filter removes that event.
  CHECK(stats.at("unseen_events_removed") == 1);
  CHECK(stats.at("unseen_sessions_dropped") == 0);
  CHECK(stats.at("events_test") == 2);
  CHECK(stats.at("cardinality").at("job_state") == 2);
  CHECK(stats.at("cardinality").at("seeker_major") == 2);
  // u2's blank degree was normalized to UNKNOWN, which counts as a value.
  CHECK(stats.at("cardinality").at("seeker_degree") == 2);

  for (const char* f : {"jobs.tsv", "seekers.tsv", "train_sessions.tsv",
                        "test_sessions.tsv", "manifest.json"})
    CHECK(fs::exists(fs::path(out) / f));

  CHECK(read_manifest(out).at("stats") == stats);
}

TEST_CASE("load_prepared round-trips the dataset") {
  TempDir dir;
  write_inputs(dir);
  std::string out = dir.path("prepared");
  prepare_dataset(config_for(dir), out);
  Dataset d = load_prepared(out);

  CHECK(d.catalog.size() == 5);
  CHECK(d.catalog.at("j1").state == "TX");
  CHECK(d.catalog.at("j1").tokens ==
        std::vector<std::string>{"nurse", "icu", "acute", "care", "rn",
                                 "license"});
  CHECK(d.seekers.size() == 2);
  CHECK(d.seekers.at("u2").degree == "UNKNOWN");
  REQUIRE(d.train_sessions.size() == 3);
  REQUIRE(d.test_sessions.size() == 1);
  CHECK(d.train_sessions[0].events.size() == 3);
  CHECK(d.train_sessions[0].events[0].job_id == "j1");
  CHECK(d.test_sessions[0].events.size() == 2);

  // The rebuilt dataset must index cleanly.
  CorpusIndex corpus = build_corpus_index(d);
  CHECK(corpus.n_jobs() == 4);  // j9 was filtered, j1..j4 trained
  CHECK(corpus.n_users() == 3);  // UNKNOWN + u1 + u2

  // Preparing the prepared copy again is a fixed point.
  PrepareConfig cfg2;
  cfg2.jobs_path = (fs::path(out) / "jobs.tsv").string();
  cfg2.seekers_path = (fs::path(out) / "seekers.tsv").string();
  std::string out2 = dir.path("prepared2");
  // Session files are not application tables, so re-prepare from the
  // original applications but the normalized jobs/seekers.
  cfg2.applications_path = dir.path("apps.tsv");
  nlohmann::json m2 = prepare_dataset(cfg2, out2);
  CHECK(m2.at("stats") == read_manifest(out).at("stats"));
}

TEST_CASE("per_user mode keeps each user in one session") {
  TempDir dir;
  write_inputs(dir);
  PrepareConfig cfg = config_for(dir);
  cfg.mode = SessionMode::per_user;
  std::string out = dir.path("prepared_single");
  nlohmann::json manifest = prepare_dataset(cfg, out);
  CHECK(manifest.at("mode") == "per_user");
  CHECK(manifest.at("stats").at("sessions_total") == 2);
}

TEST_CASE("prepare rejects bad configs and empty inputs") {
  TempDir dir;
  write_inputs(dir);
  PrepareConfig cfg = config_for(dir);
  cfg.gap_minutes = 0;
  CHECK_THROWS_AS(prepare_dataset(cfg, dir.path("x1")), Error);
  cfg = config_for(dir);
  cfg.test_days = -1;
  CHECK_THROWS_AS(prepare_dataset(cfg, dir.path("x2")), Error);
  cfg = config_for(dir);
  cfg.applications_path = dir.path("nope.tsv");
  CHECK_THROWS_AS(prepare_dataset(cfg, dir.path("x3")), Error);

  write_file(dir.path("empty_apps.tsv"), "user_id\tjob_id\ttimestamp\n");
  cfg = config_for(dir);
  cfg.applications_path = dir.path("empty_apps.tsv");
  CHECK_THROWS_AS(prepare_dataset(cfg, dir.path("x4")), Error);
}

TEST_CASE("read_manifest rejects non-manifest directories") {
  TempDir dir;
  write_file(dir.path("manifest.json"), "{\"format\": \"something-else\"}\n");
  CHECK_THROWS_WITH_AS(read_manifest(dir.root.string()),
                       doctest::Contains("manifest"), Error);
  CHECK_THROWS_AS(read_manifest("no_such_dir_anywhere"), Error);
}
