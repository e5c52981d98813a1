#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panap/data.hpp"

namespace panap {

// Corpus with planted topic and location structure. Every job gets one topic
// and one (state, city); its tokens come from the topic vocabulary plus a
// shared noise pool. Every user gets a topic (stored as the `major` field), a
// home (state, city), and applies to jobs matching those with the configured
// probabilities, so the labels needed by the clustering diagnostic are the
// ordinary metadata columns.
struct SynthConfig {
  int n_topics = 8;
  int n_states = 4;
  int cities_per_state = 3;
  int n_jobs = 2000;
  int n_users = 3000;
  int sessions_per_user = 1;
  int session_len_min = 3;
  int session_len_max = 7;
  double p_same_state = 0.93;
  double p_same_city = 0.40;   // within the same-state branch
  double p_topic_match = 0.85;
  int topics_per_user = 1;     // 2 enables mixed-interest users
  double topic_mixture_weight = 0.8;  // weight of the primary topic
  int vocab_per_topic = 50;
  int noise_vocab = 50;
  double noise_fraction = 0.2;
  int tokens_per_job = 30;
  int span_days = 70;  // sessions start uniformly inside this window
};

struct SynthResult {
  std::vector<Job> jobs;
  std::vector<JobSeeker> seekers;
  std::vector<ApplicationEvent> events;
};

// Deterministic for a fixed (config, seed). Fails with a data error naming
// the first empty (topic, state) cell if the job catalog cannot cover every
// combination the user draw may request.
SynthResult generate_synthetic(const SynthConfig& config, uint64_t seed);

}  // namespace panap
