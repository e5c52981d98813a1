#include "panap/corpus.hpp"

#include <algorithm>
#include <set>

#include "panap/common.hpp"

namespace panap {

CorpusIndex build_corpus_index(const Dataset& data) {
  CorpusIndex idx;

  std::set<std::string> jobs, users;
  for (const auto& s : data.train_sessions) {
    users.insert(s.user_id);
    for (const auto& e : s.events) jobs.insert(e.job_id);
  }
  idx.job_ids.assign(jobs.begin(), jobs.end());
  for (size_t i = 0; i < idx.job_ids.size(); ++i)
    idx.job_of.emplace(idx.job_ids[i], static_cast<int>(i));

  idx.user_ids.push_back(kUnknown);
  for (const auto& u : users)
    if (u != kUnknown) idx.user_ids.push_back(u);
  for (size_t i = 0; i < idx.user_ids.size(); ++i)
    idx.user_of.emplace(idx.user_ids[i], static_cast<int>(i));

  std::vector<std::string> state_values;
  for (const auto& id : idx.job_ids) {
    auto it = data.catalog.find(id);
    if (it == data.catalog.end())
      data_error("session references job absent from catalog: " + id);
    state_values.push_back(it->second.state);
  }
  for (const auto& [uid, seeker] : data.seekers)
    state_values.push_back(seeker.state);
  idx.states = Vocab::from_values(state_values);

  idx.job_state.resize(idx.job_ids.size());
  for (size_t i = 0; i < idx.job_ids.size(); ++i)
    idx.job_state[i] =
        idx.states.index_of(data.catalog.at(idx.job_ids[i]).state);

  idx.user_state.assign(idx.user_ids.size(), 0);
  for (size_t i = 1; i < idx.user_ids.size(); ++i) {
    auto it = data.seekers.find(idx.user_ids[i]);
    if (it != data.seekers.end())
      idx.user_state[i] = idx.states.index_of(it->second.state);
  }

  auto intern_sessions = [&](const std::vector<Session>& sessions,
                             std::vector<std::vector<int>>& out_jobs,
                             std::vector<int>& out_user, bool is_test) {
    for (const auto& s : sessions) {
      std::vector<int> row;
      row.reserve(s.events.size());
      for (const auto& e : s.events) {
        int j = idx.job_index(e.job_id);
        if (j < 0) {
          if (is_test)
            data_error("test session references unseen job " + e.job_id +
                       " (run the unseen filter first)");
          data_error("internal: training job not interned: " + e.job_id);
        }
        row.push_back(j);
      }
      out_jobs.push_back(std::move(row));
      out_user.push_back(idx.user_index(s.user_id));
    }
  };
  intern_sessions(data.train_sessions, idx.train_jobs, idx.train_user, false);
  intern_sessions(data.test_sessions, idx.test_jobs, idx.test_user, true);

  // Chronological training stream for the recent-jobs buffer.
  std::vector<std::pair<int64_t, int>> stamped;
  for (const auto& s : data.train_sessions)
    for (const auto& e : s.events)
      stamped.emplace_back(e.timestamp, idx.job_index(e.job_id));
  std::stable_sort(stamped.begin(), stamped.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  idx.train_stream.reserve(stamped.size());
  for (const auto& [ts, j] : stamped) idx.train_stream.push_back(j);

  return idx;
}

std::vector<PrefixInstance> expand_prefixes(
    const std::vector<std::vector<int>>& sessions) {
  std::vector<PrefixInstance> out;
  for (size_t s = 0; s < sessions.size(); ++s)
    for (size_t t = 1; t < sessions[s].size(); ++t)
      out.push_back({static_cast<int>(s), static_cast<int>(t)});
  return out;
}

}  // namespace panap
