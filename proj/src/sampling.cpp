#include "panap/sampling.hpp"

#include <algorithm>

#include "panap/common.hpp"

namespace panap {

std::vector<int> minibatch_candidates(const std::vector<int>& batch_positives,
                                      size_t self_index,
                                      const std::unordered_set<int>& excluded) {
  std::vector<int> out;
  std::unordered_set<int> seen;
  out.reserve(batch_positives.size());
  for (size_t i = 0; i < batch_positives.size(); ++i) {
    if (i == self_index) continue;
    int j = batch_positives[i];
    if (excluded.count(j) || !seen.insert(j).second) continue;
    out.push_back(j);
  }
  return out;
}

namespace {

// Buffer entries not excluded and not already present in the batch tier,
// deduplicated, in first-appearance order.
std::vector<int> buffer_tier(const std::vector<int>& buffer,
                             const std::unordered_set<int>& excluded,
                             const std::vector<int>& batch_tier) {
  std::unordered_set<int> taken(batch_tier.begin(), batch_tier.end());
  std::vector<int> out;
  for (int j : buffer) {
    if (excluded.count(j) || !taken.insert(j).second) continue;
    out.push_back(j);
  }
  return out;
}

// Draws from tiers in priority order: a tier is consumed whole when it fits,
// otherwise sampled uniformly without replacement to fill the remainder.
std::vector<int> drain_tiers(const std::vector<std::vector<int>>& tiers, int k,
                             Rng& rng) {
  std::vector<int> out;
  out.reserve(k);
  for (const auto& tier : tiers) {
    int remaining = k - static_cast<int>(out.size());
    if (remaining <= 0) break;
    if (static_cast<int>(tier.size()) <= remaining) {
      out.insert(out.end(), tier.begin(), tier.end());
    } else {
      auto picked = rng.sample_without_replacement(tier, remaining);
      out.insert(out.end(), picked.begin(), picked.end());
    }
  }
  if (static_cast<int>(out.size()) < k) {
    size_t pool = 0;
    for (const auto& tier : tiers) pool += tier.size();
    data_error("negative sampling shortfall: need " + std::to_string(k) +
               ", pool has " + std::to_string(pool) +
               " (grow the buffer or batch, or lower k)");
  }
  return out;
}

}  // namespace

std::vector<int> sample_negatives(Strategy strategy,
                                  const NegSampleRequest& req, Rng& rng) {
  if (!req.batch_candidates || !req.buffer || !req.excluded)
    usage_error("sample_negatives: request is missing pools");
  if (req.k < 1) usage_error("sample_negatives: k must be positive");

  const std::vector<int>& batch = *req.batch_candidates;
  std::vector<int> buffered = buffer_tier(*req.buffer, *req.excluded, batch);

  if (strategy == Strategy::S1)
    return drain_tiers({batch, buffered}, req.k, rng);

  if (!req.job_state)
    usage_error("sample_negatives: S2 requires job states");
  const std::vector<int>& job_state = *req.job_state;
  auto same = [&](int j) {
    return req.user_state != 0 && job_state[j] == req.user_state;
  };

  std::vector<int> same_batch, other_batch, same_buf, other_buf;
  for (int j : batch) (same(j) ? same_batch : other_batch).push_back(j);
  for (int j : buffered) (same(j) ? same_buf : other_buf).push_back(j);
  return drain_tiers({same_batch, same_buf, other_batch, other_buf}, req.k,
                     rng);
}

std::vector<int> uniform_negatives(int n_jobs,
                                   const std::unordered_set<int>& excluded,
                                   int k, Rng& rng) {
  if (k < 1) usage_error("uniform_negatives: k must be positive");
  int available = n_jobs;
  for (int j : excluded)
    if (j >= 0 && j < n_jobs) --available;
  if (available < k)
    data_error("negative sampling shortfall: need " + std::to_string(k) +
               ", catalog offers " + std::to_string(available));

  std::vector<int> out;
  out.reserve(k);
  std::unordered_set<int> taken;
  // Rejection sampling; when the pool gets tight, fall back to an explicit
  // enumeration so the draw always terminates.
  if (available <= 2 * k) {
    std::vector<int> pool;
    pool.reserve(available);
    for (int j = 0; j < n_jobs; ++j)
      if (!excluded.count(j)) pool.push_back(j);
    return rng.sample_without_replacement(pool, k);
  }
  while (static_cast<int>(out.size()) < k) {
    int j = static_cast<int>(rng.below(n_jobs));
    if (excluded.count(j) || !taken.insert(j).second) continue;
    out.push_back(j);
  }
  return out;
}

}  // namespace panap
