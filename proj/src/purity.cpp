#include "panap/purity.hpp"

#include <algorithm>

namespace panap {

PurityReport knn_label_purity(const std::vector<Tensor>& points,
                              const std::vector<std::string>& labels,
                              const std::string& label_field, int k,
                              Exec exec, int workers) {
  if (k < 1) usage_error("knn_label_purity: k must be positive");
  if (points.size() != labels.size())
    data_error("knn_label_purity: " + std::to_string(points.size()) +
               " points vs " + std::to_string(labels.size()) + " labels");
  if (points.size() < static_cast<size_t>(k) + 1)
    usage_error("knn_label_purity: need at least k+1 = " +
                std::to_string(k + 1) + " points, have " +
                std::to_string(points.size()));
  size_t n = points.size();
  for (size_t i = 1; i < n; ++i)
    if (points[i].numel() != points[0].numel())
      data_error("knn_label_purity: point dimension mismatch at index " +
                 std::to_string(i));

  std::vector<double> agree(n, 0.0);
  parallel_for(exec, workers, static_cast<int64_t>(n), [&](int64_t i) {
    struct Cand {
      double dist;
      int64_t idx;
    };
    std::vector<Cand> cands;
    cands.reserve(n - 1);
    for (int64_t j = 0; j < static_cast<int64_t>(n); ++j) {
      if (j == i) continue;
      cands.push_back({1.0 - cosine_value(points[i], points[j]), j});
    }
    auto closer = [](const Cand& a, const Cand& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      return a.idx < b.idx;
    };
    std::nth_element(cands.begin(), cands.begin() + (k - 1), cands.end(),
                     closer);
    int matches = 0;
    for (int j = 0; j < k; ++j)
      if (labels[cands[j].idx] == labels[i]) ++matches;
    agree[i] = static_cast<double>(matches) / static_cast<double>(k);
  });

  PurityReport rep;
  rep.label_field = label_field;
  rep.k = k;
  rep.n_points = n;
  std::map<std::string, double> sums;
  for (size_t i = 0; i < n; ++i) {
    rep.agreement += agree[i];
    sums[labels[i]] += agree[i];
    rep.label_counts[labels[i]] += 1;
  }
  rep.agreement /= static_cast<double>(n);
  for (const auto& [label, sum] : sums)
    rep.per_label[label] = sum / static_cast<double>(rep.label_counts[label]);
  return rep;
}

}  // namespace panap
