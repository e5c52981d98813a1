#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace panap {

inline const std::string kUnknown = "UNKNOWN";

struct Job {
  std::string job_id;
  std::vector<std::string> tokens;  // title + description + requirements
  std::string city = kUnknown;
  std::string state = kUnknown;
  std::string country = kUnknown;
};

struct JobSeeker {
  std::string user_id;
  std::string city = kUnknown;
  std::string state = kUnknown;
  std::string country = kUnknown;
  std::string degree = kUnknown;
  std::string major = kUnknown;
};

struct ApplicationEvent {
  std::string user_id;
  std::string job_id;
  int64_t timestamp = 0;  // seconds since epoch
};

struct Session {
  std::string user_id;
  std::vector<ApplicationEvent> events;  // non-decreasing timestamps
  size_t size() const { return events.size(); }
};

enum class SessionMode { gap_split, per_user };

inline const char* session_mode_name(SessionMode m) {
  return m == SessionMode::gap_split ? "gap_split" : "per_user";
}

struct Dataset {
  std::map<std::string, Job> catalog;
  std::map<std::string, JobSeeker> seekers;
  std::vector<Session> train_sessions;
  std::vector<Session> test_sessions;
  SessionMode mode = SessionMode::gap_split;
};

// Lowercase, split on non-alphanumerics, drop tokens shorter than 2.
std::vector<std::string> tokenize(const std::string& text);

// Trimmed and uppercased; empty collapses to UNKNOWN.
std::string normalize_state(const std::string& s);

}  // namespace panap
