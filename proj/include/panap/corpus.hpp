#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "panap/data.hpp"
#include "panap/vocab.hpp"

namespace panap {

// Interned view of a Dataset: jobs and users get dense indices so the model,
// baselines, and samplers can work with ints. Job indices cover the jobs of
// the training sessions, sorted by id; user index 0 is the UNKNOWN
// (cold-start) row, followed by training users sorted by id.
struct CorpusIndex {
  std::vector<std::string> job_ids;                 // sorted
  std::unordered_map<std::string, int> job_of;
  std::vector<std::string> user_ids;                // [0] = UNKNOWN
  std::unordered_map<std::string, int> user_of;     // misses map to 0

  Vocab states;                                     // over job + seeker states
  std::vector<int> job_state;                       // per job index
  std::vector<int> user_state;                      // per user index, [0]=0

  // Sessions with events replaced by job indices.
  std::vector<std::vector<int>> train_jobs;
  std::vector<int> train_user;                      // user index per session
  std::vector<std::vector<int>> test_jobs;
  std::vector<int> test_user;

  // Training events ordered by timestamp (ties keep session order); feeds
  // the recent-jobs buffer.
  std::vector<int> train_stream;

  int n_jobs() const { return static_cast<int>(job_ids.size()); }
  int n_users() const { return static_cast<int>(user_ids.size()); }

  int job_index(const std::string& id) const {
    auto it = job_of.find(id);
    return it == job_of.end() ? -1 : it->second;
  }
  int user_index(const std::string& id) const {
    auto it = user_of.find(id);
    return it == user_of.end() ? 0 : it->second;
  }
};

// Builds the interned view. Test sessions must already be filtered to jobs
// seen in training (filter_unseen); an unseen test job is a data error.
CorpusIndex build_corpus_index(const Dataset& data);

// (session, prefix length) pairs: prefix [0, t) predicts the event at t.
struct PrefixInstance {
  int session = 0;
  int t = 0;  // prefix length >= 1; positive = session's t-th job
};

std::vector<PrefixInstance> expand_prefixes(
    const std::vector<std::vector<int>>& sessions);

}  // namespace panap
