#include "panap/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "panap/common.hpp"
#include "panap/sessions.hpp"
#include "panap/table_io.hpp"

namespace panap {
namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

size_t event_count(const std::vector<Session>& sessions) {
  size_t n = 0;
  for (const auto& s : sessions) n += s.size();
  return n;
}

double avg_len(const std::vector<Session>& sessions) {
  if (sessions.empty()) return 0.0;
  return static_cast<double>(event_count(sessions)) /
         static_cast<double>(sessions.size());
}

size_t distinct_users(const std::vector<Session>& sessions) {
  std::set<std::string> u;
  for (const auto& s : sessions) u.insert(s.user_id);
  return u.size();
}

}  // namespace

nlohmann::json prepare_dataset(const PrepareConfig& cfg,
                               const std::string& out_dir) {
  if (cfg.gap_minutes < 1) usage_error("prepare: gap must be positive");
  if (cfg.test_days < 1) usage_error("prepare: test days must be positive");

  ParseStats job_stats, seeker_stats, app_stats;
  std::vector<Job> jobs = read_jobs(cfg.jobs_path, cfg.delimiter, &job_stats);
  std::vector<JobSeeker> seekers =
      read_seekers(cfg.seekers_path, cfg.delimiter, &seeker_stats);
  std::vector<ApplicationEvent> events =
      read_applications(cfg.applications_path, cfg.delimiter, &app_stats);
  if (events.empty()) data_error("prepare: no usable application events");

  std::vector<Session> sessions =
      build_sessions(events, cfg.mode, cfg.gap_minutes);
  if (sessions.empty())
    data_error("prepare: no session has 2 or more events");
  SplitResult split = temporal_split(sessions, cfg.test_days);
  if (split.train.empty())
    data_error("prepare: every session fell into the test window; "
               "lower --test-days");
  FilterResult filtered = filter_unseen(split.test, job_id_set(split.train));

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) io_error("cannot create output directory: " + out_dir);

  // The directory is self-contained: normalized copies of the catalog and
  // seeker tables ride along with the session files.
  std::sort(jobs.begin(), jobs.end(),
            [](const Job& a, const Job& b) { return a.job_id < b.job_id; });
  std::sort(seekers.begin(), seekers.end(),
            [](const JobSeeker& a, const JobSeeker& b) {
              return a.user_id < b.user_id;
            });
  write_jobs(join(out_dir, "jobs.tsv"), jobs);
  write_seekers(join(out_dir, "seekers.tsv"), seekers);
  write_sessions(join(out_dir, "train_sessions.tsv"), split.train);
  write_sessions(join(out_dir, "test_sessions.tsv"), filtered.sessions);

  std::set<std::string> job_cities, job_states, job_countries;
  for (const Job& j : jobs) {
    job_cities.insert(j.city);
    job_states.insert(j.state);
    job_countries.insert(j.country);
  }
  std::set<std::string> s_cities, s_states, s_countries, s_degrees, s_majors;
  for (const JobSeeker& s : seekers) {
    s_cities.insert(s.city);
    s_states.insert(s.state);
    s_countries.insert(s.country);
    s_degrees.insert(s.degree);
    s_majors.insert(s.major);
  }

  nlohmann::json manifest;
  manifest["format"] = "panap-prepared";
  manifest["version"] = 1;
  manifest["inputs"] = {{"jobs", cfg.jobs_path},
                        {"seekers", cfg.seekers_path},
                        {"applications", cfg.applications_path}};
  manifest["mode"] = session_mode_name(cfg.mode);
  manifest["gap_minutes"] = cfg.gap_minutes;
  manifest["test_days"] = cfg.test_days;
  manifest["boundary"] = split.boundary;
  manifest["duplicates"] = "kept";
  manifest["files"] = {{"jobs", "jobs.tsv"},
                       {"seekers", "seekers.tsv"},
                       {"train_sessions", "train_sessions.tsv"},
                       {"test_sessions", "test_sessions.tsv"}};
  manifest["stats"] = {
      {"users", distinct_users(sessions)},
      {"jobs_catalog", jobs.size()},
      {"jobs_in_sessions", job_id_set(sessions).size()},
      {"seekers_table", seekers.size()},
      {"events_read", app_stats.rows_read},
      {"events_skipped", app_stats.rows_skipped},
      {"sessions_total", sessions.size()},
      {"sessions_train", split.train.size()},
      {"sessions_test", filtered.sessions.size()},
      {"events_train", event_count(split.train)},
      {"events_test", event_count(filtered.sessions)},
      {"avg_session_len", avg_len(sessions)},
      {"avg_session_len_train", avg_len(split.train)},
      {"avg_session_len_test", avg_len(filtered.sessions)},
      {"unseen_events_removed", filtered.events_removed},
      {"unseen_sessions_dropped", filtered.sessions_dropped},
      {"cardinality",
       {{"job_city", job_cities.size()},
        {"job_state", job_states.size()},
        {"job_country", job_countries.size()},
        {"seeker_city", s_cities.size()},
        {"seeker_state", s_states.size()},
        {"seeker_country", s_countries.size()},
        {"seeker_degree", s_degrees.size()},
        {"seeker_major", s_majors.size()}}}};
  write_text_file(join(out_dir, "manifest.json"), manifest.dump(2) + "\n");
  return manifest;
}

nlohmann::json read_manifest(const std::string& dir) {
  std::string text = read_text_file(join(dir, "manifest.json"));
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    data_error(dir + "/manifest.json: " + e.what());
  }
  if (!manifest.is_object() ||
      manifest.value("format", std::string()) != "panap-prepared")
    data_error(dir + "/manifest.json: not a prepared-data manifest");
  return manifest;
}

Dataset load_prepared(const std::string& dir) {
  nlohmann::json manifest = read_manifest(dir);
  auto file = [&](const char* key) {
    const auto& files = manifest["files"];
    auto it = files.find(key);
    if (it == files.end())
      data_error(dir + "/manifest.json: missing file entry: " +
                 std::string(key));
    return join(dir, it->get<std::string>());
  };

  Dataset data;
  for (Job& j : read_jobs(file("jobs"), kDefaultDelimiter, nullptr))
    data.catalog.emplace(j.job_id, std::move(j));
  for (JobSeeker& s : read_seekers(file("seekers"), kDefaultDelimiter, nullptr))
    data.seekers.emplace(s.user_id, std::move(s));
  data.train_sessions = read_sessions(file("train_sessions"));
  data.test_sessions = read_sessions(file("test_sessions"));
  data.mode = manifest.value("mode", std::string("gap_split")) == "per_user"
                  ? SessionMode::per_user
                  : SessionMode::gap_split;
  if (data.train_sessions.empty())
    data_error(dir + ": prepared directory has no training sessions");
  return data;
}

}  // namespace panap
