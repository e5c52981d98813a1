#include "panap/sessions.hpp"

#include <algorithm>
#include <map>

namespace panap {

std::vector<Session> build_sessions(const std::vector<ApplicationEvent>& events,
                                    SessionMode mode, int gap_minutes) {
  std::map<std::string, std::vector<ApplicationEvent>> by_user;
  for (const ApplicationEvent& e : events) by_user[e.user_id].push_back(e);

  int64_t gap_seconds = static_cast<int64_t>(gap_minutes) * 60;
  std::vector<Session> out;
  for (auto& [user, evs] : by_user) {
    std::stable_sort(evs.begin(), evs.end(),
                     [](const ApplicationEvent& a, const ApplicationEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
    std::vector<Session> user_sessions;
    if (mode == SessionMode::per_user) {
      user_sessions.push_back(Session{user, evs});
    } else {
      Session cur{user, {}};
      for (const ApplicationEvent& e : evs) {
        if (!cur.events.empty() &&
            e.timestamp - cur.events.back().timestamp > gap_seconds) {
          user_sessions.push_back(std::move(cur));
          cur = Session{user, {}};
        }
        cur.events.push_back(e);
      }
      if (!cur.events.empty()) user_sessions.push_back(std::move(cur));
    }
    for (Session& s : user_sessions)
      if (s.size() >= 2) out.push_back(std::move(s));
  }
  return out;
}

SplitResult temporal_split(const std::vector<Session>& sessions, int test_days) {
  SplitResult r;
  if (sessions.empty()) return r;
  int64_t max_ts = 0;
  for (const Session& s : sessions)
    for (const ApplicationEvent& e : s.events) max_ts = std::max(max_ts, e.timestamp);
  r.boundary = max_ts - static_cast<int64_t>(test_days) * 86400;
  for (const Session& s : sessions) {
    if (s.events.front().timestamp > r.boundary)
      r.test.push_back(s);
    else
      r.train.push_back(s);
  }
  return r;
}

std::unordered_set<std::string> job_id_set(const std::vector<Session>& sessions) {
  std::unordered_set<std::string> ids;
  for (const Session& s : sessions)
    for (const ApplicationEvent& e : s.events) ids.insert(e.job_id);
  return ids;
}

FilterResult filter_unseen(const std::vector<Session>& test,
                           const std::unordered_set<std::string>& train_jobs) {
  FilterResult r;
  for (const Session& s : test) {
    Session kept{s.user_id, {}};
    for (const ApplicationEvent& e : s.events) {
      if (train_jobs.count(e.job_id))
        kept.events.push_back(e);
      else
        ++r.events_removed;
    }
    if (kept.size() >= 2)
      r.sessions.push_back(std::move(kept));
    else
      ++r.sessions_dropped;
  }
  return r;
}

}  // namespace panap
