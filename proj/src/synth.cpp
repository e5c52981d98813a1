#include "panap/synth.hpp"

#include <algorithm>

#include "panap/common.hpp"
#include "panap/rng.hpp"

namespace panap {

namespace {

std::string pad(int n, int width) {
  std::string s = std::to_string(n);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

std::string topic_token(int topic, int word) {
  return "t" + pad(topic, 2) + "w" + pad(word, 3);
}

}  // namespace

SynthResult generate_synthetic(const SynthConfig& cfg, uint64_t seed) {
  if (cfg.n_topics < 1 || cfg.n_states < 1 || cfg.cities_per_state < 1 ||
      cfg.n_jobs < 1 || cfg.n_users < 1 || cfg.session_len_min < 1 ||
      cfg.session_len_max < cfg.session_len_min)
    usage_error("generate_synthetic: invalid configuration");
  if (cfg.topics_per_user < 1 || cfg.topics_per_user > 2)
    usage_error("generate_synthetic: topics_per_user must be 1 or 2");

  Rng root(seed);
  SynthResult out;

  std::vector<std::string> states, cities;  // cities flattened state-major
  for (int s = 0; s < cfg.n_states; ++s) states.push_back("ST" + pad(s, 2));
  for (int s = 0; s < cfg.n_states; ++s)
    for (int c = 0; c < cfg.cities_per_state; ++c)
      cities.push_back(states[s] + "_C" + pad(c, 2));
  auto city_of = [&](int s, int c) { return cities[s * cfg.cities_per_state + c]; };

  const std::vector<std::string> degrees = {"highschool", "associate",
                                            "bachelor", "master", "phd"};

  // Jobs: topic and location uniform, tokens from topic vocab + noise pool.
  Rng jrng = root.fork("jobs");
  std::vector<int> job_topic(cfg.n_jobs), job_state(cfg.n_jobs), job_city(cfg.n_jobs);
  // (topic, state) -> job indices; city-level refinement nested inside.
  std::vector<std::vector<int>> cell(cfg.n_topics * cfg.n_states);
  std::vector<std::vector<int>> city_cell(cfg.n_topics * cfg.n_states *
                                          cfg.cities_per_state);
  for (int i = 0; i < cfg.n_jobs; ++i) {
    int t = static_cast<int>(jrng.below(cfg.n_topics));
    int s = static_cast<int>(jrng.below(cfg.n_states));
    int c = static_cast<int>(jrng.below(cfg.cities_per_state));
    job_topic[i] = t;
    job_state[i] = s;
    job_city[i] = c;
    cell[t * cfg.n_states + s].push_back(i);
    city_cell[(t * cfg.n_states + s) * cfg.cities_per_state + c].push_back(i);
    Job j;
    j.job_id = "J" + pad(i, 6);
    j.city = city_of(s, c);
    j.state = states[s];
    j.country = "US";
    j.tokens.reserve(cfg.tokens_per_job);
    for (int w = 0; w < cfg.tokens_per_job; ++w) {
      if (jrng.unit() < cfg.noise_fraction)
        j.tokens.push_back("noise" + pad(static_cast<int>(jrng.below(cfg.noise_vocab)), 3));
      else
        j.tokens.push_back(topic_token(t, static_cast<int>(jrng.below(cfg.vocab_per_topic))));
    }
    out.jobs.push_back(std::move(j));
  }

  for (int t = 0; t < cfg.n_topics; ++t)
    for (int s = 0; s < cfg.n_states; ++s)
      if (cell[t * cfg.n_states + s].empty())
        data_error("generate_synthetic: empty job cell topic=" + std::to_string(t) +
                   " state=" + states[s] +
                   " (add jobs or shrink the topic/state grid)");

  // Users.
  Rng urng = root.fork("users");
  std::vector<int> user_topic(cfg.n_users), user_topic2(cfg.n_users);
  std::vector<int> user_state(cfg.n_users), user_city(cfg.n_users);
  for (int u = 0; u < cfg.n_users; ++u) {
    int t = static_cast<int>(urng.below(cfg.n_topics));
    int t2 = t;
    if (cfg.topics_per_user == 2 && cfg.n_topics > 1) {
      t2 = static_cast<int>(urng.below(cfg.n_topics - 1));
      if (t2 >= t) ++t2;
    }
    int s = static_cast<int>(urng.below(cfg.n_states));
    int c = static_cast<int>(urng.below(cfg.cities_per_state));
    user_topic[u] = t;
    user_topic2[u] = t2;
    user_state[u] = s;
    user_city[u] = c;
    JobSeeker sk;
    sk.user_id = "U" + pad(u, 6);
    sk.city = city_of(s, c);
    sk.state = states[s];
    sk.country = "US";
    sk.degree = degrees[urng.below(degrees.size())];
    sk.major = "major" + pad(t, 2);  // planted topic label
    out.seekers.push_back(std::move(sk));
  }

  // Applications.
  Rng arng = root.fork("apps");
  int64_t span_seconds = static_cast<int64_t>(cfg.span_days) * 86400;
  const int64_t t0 = 1000000000;  // arbitrary fixed origin
  for (int u = 0; u < cfg.n_users; ++u) {
    for (int sess = 0; sess < cfg.sessions_per_user; ++sess) {
      int len = cfg.session_len_min +
                static_cast<int>(arng.below(cfg.session_len_max - cfg.session_len_min + 1));
      int64_t ts = t0 + static_cast<int64_t>(arng.below(span_seconds));
      for (int k = 0; k < len; ++k) {
        // Topic of this application.
        int topic;
        if (arng.unit() < cfg.p_topic_match) {
          topic = user_topic[u];
          if (cfg.topics_per_user == 2 && arng.unit() >= cfg.topic_mixture_weight)
            topic = user_topic2[u];
        } else {
          topic = static_cast<int>(arng.below(cfg.n_topics));
        }
        // Location of this application.
        int state, city = -1;
        if (arng.unit() < cfg.p_same_state || cfg.n_states == 1) {
          state = user_state[u];
          if (arng.unit() < cfg.p_same_city) city = user_city[u];
        } else {
          state = static_cast<int>(arng.below(cfg.n_states - 1));
          if (state >= user_state[u]) ++state;
        }
        const std::vector<int>* pool = nullptr;
        if (city >= 0) {
          const auto& cc =
              city_cell[(topic * cfg.n_states + state) * cfg.cities_per_state + city];
          if (!cc.empty()) pool = &cc;
        }
        if (!pool) pool = &cell[topic * cfg.n_states + state];
        int job = (*pool)[arng.below(pool->size())];
        out.events.push_back(
            {out.seekers[u].user_id, out.jobs[job].job_id, ts});
        ts += 60 + static_cast<int64_t>(arng.below(180));  // well inside the gap
      }
    }
  }
  return out;
}

}  // namespace panap
