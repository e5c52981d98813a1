#pragma once

#include <cmath>
#include <vector>

#include "panap/common.hpp"

namespace panap {

// Fraction of instances whose positive landed in the top K.
inline double metric_hr(const std::vector<int>& ranks, int K) {
  if (ranks.empty()) usage_error("metric_hr: no ranks");
  if (K < 1) usage_error("metric_hr: K must be positive");
  size_t hits = 0;
  for (int r : ranks)
    if (r <= K) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

// Mean of 1/rank for hits, 0 for misses.
inline double metric_mrr(const std::vector<int>& ranks, int K) {
  if (ranks.empty()) usage_error("metric_mrr: no ranks");
  if (K < 1) usage_error("metric_mrr: K must be positive");
  double s = 0.0;
  for (int r : ranks)
    if (r <= K) s += 1.0 / static_cast<double>(r);
  return s / static_cast<double>(ranks.size());
}

// Single relevant item, so the ideal DCG is 1 and the per-instance gain is
// 1/log2(rank+1) for hits.
inline double metric_ndcg(const std::vector<int>& ranks, int K) {
  if (ranks.empty()) usage_error("metric_ndcg: no ranks");
  if (K < 1) usage_error("metric_ndcg: K must be positive");
  double s = 0.0;
  for (int r : ranks)
    if (r <= K) s += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  return s / static_cast<double>(ranks.size());
}

}  // namespace panap
