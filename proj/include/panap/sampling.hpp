#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "panap/rng.hpp"

namespace panap {

enum class Strategy { S1, S2 };

inline const char* strategy_name(Strategy s) {
  return s == Strategy::S1 ? "S1" : "S2";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "S1" || s == "s1") return Strategy::S1;
  if (s == "S2" || s == "s2") return Strategy::S2;
  usage_error("unknown sampling strategy: " + s + " (expected S1 or S2)");
}

// Ring of the N most recently applied jobs, in stream order. Duplicates
// allowed; snapshot() returns oldest to newest.
class RecentBuffer {
 public:
  explicit RecentBuffer(size_t capacity) : cap_(capacity) {
    if (capacity == 0) usage_error("RecentBuffer: capacity must be positive");
  }

  void push(int job) {
    if (ring_.size() < cap_) {
      ring_.push_back(job);
    } else {
      ring_[head_] = job;
      head_ = (head_ + 1) % cap_;
    }
  }

  void push_stream(const std::vector<int>& stream) {
    for (int j : stream) push(j);
  }

  std::vector<int> snapshot() const {
    std::vector<int> out;
    out.reserve(ring_.size());
    for (size_t i = 0; i < ring_.size(); ++i)
      out.push_back(ring_[(head_ + i) % ring_.size()]);
    return out;
  }

  size_t size() const { return ring_.size(); }
  size_t capacity() const { return cap_; }

 private:
  std::vector<int> ring_;
  size_t cap_;
  size_t head_ = 0;  // oldest element once full
};

// Distinct positives of the other instances in the batch, in batch order,
// minus this instance's own positive and prefix jobs.
std::vector<int> minibatch_candidates(const std::vector<int>& batch_positives,
                                      size_t self_index,
                                      const std::unordered_set<int>& excluded);

struct NegSampleRequest {
  const std::vector<int>* batch_candidates = nullptr;  // from minibatch_candidates
  const std::vector<int>* buffer = nullptr;            // RecentBuffer snapshot
  const std::unordered_set<int>* excluded = nullptr;   // positive + prefix
  int k = 0;
  int user_state = 0;                        // vocab index, 0 = UNKNOWN
  const std::vector<int>* job_state = nullptr;  // per job index
};

// Exactly k negatives or a data error naming the shortfall. S1 exhausts the
// in-batch tier before the buffer; S2 walks same-state-batch, same-state-
// buffer, other-batch, other-buffer. Draws are uniform without replacement
// within each tier; UNKNOWN states never count as matching.
std::vector<int> sample_negatives(Strategy strategy,
                                  const NegSampleRequest& req, Rng& rng);

// Uniform negatives over the whole training catalog [0, n_jobs) minus the
// excluded set; the evaluation-time alternative to mirroring the training
// strategy.
std::vector<int> uniform_negatives(int n_jobs,
                                   const std::unordered_set<int>& excluded,
                                   int k, Rng& rng);

}  // namespace panap
