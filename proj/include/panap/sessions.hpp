#pragma once

#include <unordered_set>
#include <vector>

#include "panap/data.hpp"

namespace panap {

// Cuts each user's time-ordered event stream into sessions. gap_split starts
// a new session when the gap to the previous event strictly exceeds
// gap_minutes; per_user keeps one session per user. Sessions shorter than 2
// events are discarded. Users are emitted in ascending user_id order.
std::vector<Session> build_sessions(const std::vector<ApplicationEvent>& events,
                                    SessionMode mode, int gap_minutes = 30);

struct SplitResult {
  std::vector<Session> train;
  std::vector<Session> test;
  int64_t boundary = 0;  // exclusive lower bound of the test window
};

// A session is test iff its first event falls strictly inside the final
// test_days window (max_ts - test_days*86400, max_ts].
SplitResult temporal_split(const std::vector<Session>& sessions, int test_days = 14);

// Set of job ids appearing in the given sessions.
std::unordered_set<std::string> job_id_set(const std::vector<Session>& sessions);

struct FilterResult {
  std::vector<Session> sessions;
  size_t events_removed = 0;
  size_t sessions_dropped = 0;
};

// Removes test events whose job never occurs in training, then drops
// sessions that fall below 2 events.
FilterResult filter_unseen(const std::vector<Session>& test,
                           const std::unordered_set<std::string>& train_jobs);

}  // namespace panap
