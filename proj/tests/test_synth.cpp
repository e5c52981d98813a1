#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "doctest.h"
#include "panap/common.hpp"
#include "panap/synth.hpp"

using namespace panap;

namespace {

SynthConfig small_config() {
  SynthConfig cfg;
  cfg.n_topics = 4;
  cfg.n_states = 3;
  cfg.cities_per_state = 2;
  cfg.n_jobs = 400;
  cfg.n_users = 300;
  cfg.session_len_min = 3;
  cfg.session_len_max = 5;
  return cfg;
}

}  // namespace

TEST_CASE("p_same_state=1 pins every application to the home state") {
  SynthConfig cfg = small_config();
  cfg.p_same_state = 1.0;
  auto out = generate_synthetic(cfg, 7);

  std::unordered_map<std::string, std::string> job_state, user_state;
  for (const auto& j : out.jobs) job_state[j.job_id] = j.state;
  for (const auto& u : out.seekers) user_state[u.user_id] = u.state;
  for (const auto& e : out.events)
    CHECK(job_state.at(e.job_id) == user_state.at(e.user_id));
}

TEST_CASE("p_topic_match=1 with one state pins every job topic") {
  SynthConfig cfg = small_config();
  cfg.n_states = 1;
  cfg.p_topic_match = 1.0;
  auto out = generate_synthetic(cfg, 11);

  // Planted labels: user topic lives in `major` ("topicNN" naming shared
  // with job majors is not stored on jobs, so recover it from tokens).
  std::unordered_map<std::string, std::string> job_topic;
  for (const auto& j : out.jobs) {
    for (const auto& t : j.tokens) {
      if (t.rfind("t", 0) == 0 && t.find('w') != std::string::npos) {
        job_topic[j.job_id] = t.substr(0, t.find('w'));
        break;
      }
    }
  }
  std::unordered_map<std::string, std::string> user_major;
  for (const auto& u : out.seekers) user_major[u.user_id] = u.major;

  for (const auto& e : out.events) {
    // major is "majorNN", topic token prefix is "tNN"
    std::string expect = "t" + user_major.at(e.user_id).substr(5);
    CHECK(job_topic.at(e.job_id) == expect);
  }
}

TEST_CASE("default knobs give an in-state fraction near 0.93") {
  SynthConfig cfg = small_config();
  cfg.n_users = 2500;
  cfg.session_len_min = 4;
  cfg.session_len_max = 4;  // 10^4 applications
  auto out = generate_synthetic(cfg, 13);
  REQUIRE(out.events.size() == 10000);

  std::unordered_map<std::string, std::string> job_state, user_state;
  for (const auto& j : out.jobs) job_state[j.job_id] = j.state;
  for (const auto& u : out.seekers) user_state[u.user_id] = u.state;
  size_t in_state = 0;
  for (const auto& e : out.events)
    if (job_state.at(e.job_id) == user_state.at(e.user_id)) ++in_state;
  double frac = static_cast<double>(in_state) / out.events.size();
  CHECK(std::fabs(frac - 0.93) < 0.02);
}

TEST_CASE("generation is bitwise reproducible for a fixed seed") {
  SynthConfig cfg = small_config();
  auto a = generate_synthetic(cfg, 99);
  auto b = generate_synthetic(cfg, 99);
  REQUIRE(a.jobs.size() == b.jobs.size());
  REQUIRE(a.events.size() == b.events.size());
  for (size_t i = 0; i < a.jobs.size(); ++i) {
    CHECK(a.jobs[i].job_id == b.jobs[i].job_id);
    CHECK(a.jobs[i].tokens == b.jobs[i].tokens);
    CHECK(a.jobs[i].city == b.jobs[i].city);
  }
  for (size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].user_id == b.events[i].user_id);
    CHECK(a.events[i].job_id == b.events[i].job_id);
    CHECK(a.events[i].timestamp == b.events[i].timestamp);
  }

  auto c = generate_synthetic(cfg, 100);
  bool differs = a.events.size() != c.events.size();
  for (size_t i = 0; !differs && i < a.events.size(); ++i)
    differs = a.events[i].job_id != c.events[i].job_id;
  CHECK(differs);
}

TEST_CASE("infeasible config names the empty cell") {
  SynthConfig cfg = small_config();
  cfg.n_jobs = 5;  // 4 topics x 3 states = 12 cells cannot all be covered
  try {
    generate_synthetic(cfg, 1);
    FAIL("expected generation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()).find("topic") != std::string::npos);
  }
}

TEST_CASE("session lengths and ids respect the config") {
  SynthConfig cfg = small_config();
  auto out = generate_synthetic(cfg, 21);
  CHECK(out.jobs.size() == static_cast<size_t>(cfg.n_jobs));
  CHECK(out.seekers.size() == static_cast<size_t>(cfg.n_users));

  std::map<std::string, int> per_user;
  for (const auto& e : out.events) per_user[e.user_id]++;
  for (const auto& [user, n] : per_user) {
    CHECK(n >= cfg.session_len_min);
    CHECK(n <= cfg.session_len_max);
  }

  // In-session gaps stay far below the 30-minute session threshold.
  std::map<std::string, std::vector<int64_t>> times;
  for (const auto& e : out.events) times[e.user_id].push_back(e.timestamp);
  for (auto& [user, ts] : times) {
    for (size_t i = 1; i < ts.size(); ++i) {
      CHECK(ts[i] > ts[i - 1]);
      CHECK(ts[i] - ts[i - 1] < 1800);
    }
  }
}

TEST_CASE("two-topic users expose both planted topics") {
  SynthConfig cfg = small_config();
  cfg.topics_per_user = 2;
  cfg.n_users = 500;
  cfg.p_topic_match = 1.0;
  cfg.n_states = 1;
  cfg.session_len_min = 6;
  cfg.session_len_max = 6;
  auto out = generate_synthetic(cfg, 31);

  std::unordered_map<std::string, std::string> job_topic;
  for (const auto& j : out.jobs)
    for (const auto& t : j.tokens)
      if (t.rfind("t", 0) == 0 && t.find('w') != std::string::npos) {
        job_topic[j.job_id] = t.substr(0, t.find('w'));
        break;
      }

  std::unordered_map<std::string, std::map<std::string, int>> topics_seen;
  for (const auto& e : out.events)
    topics_seen[e.user_id][job_topic.at(e.job_id)]++;

  size_t users_with_two = 0;
  for (const auto& [user, counts] : topics_seen) {
    CHECK(counts.size() <= 2);
    if (counts.size() == 2) ++users_with_two;
  }
  // With weight 0.8 and 6 draws, most users should show both topics.
  CHECK(users_with_two > topics_seen.size() / 2);
}
