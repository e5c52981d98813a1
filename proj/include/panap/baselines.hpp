#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "panap/corpus.hpp"
#include "panap/tensor.hpp"
#include "panap/text_encoder.hpp"

namespace panap {

// Classical session-based recommenders, all fit on the training sessions of
// a CorpusIndex and scored over (prefix, candidates) pairs of job indices.
// Scores only need to order candidates; they are not probabilities.

enum class BaselineKind { pop, ar, cs, iknn, sknn, vsknn };

const char* baseline_name(BaselineKind k);
BaselineKind parse_baseline(const std::string& s);

// Training application counts; the prefix is ignored.
class PopBaseline {
 public:
  static PopBaseline fit(const CorpusIndex& corpus);
  std::vector<double> score(const std::vector<int>& prefix,
                            const std::vector<int>& candidates) const;

 private:
  std::vector<double> counts_;
};

// Unordered co-occurrence with the last prefix job, counted once per
// training session.
class ArBaseline {
 public:
  static ArBaseline fit(const CorpusIndex& corpus);
  std::vector<double> score(const std::vector<int>& prefix,
                            const std::vector<int>& candidates) const;

 private:
  std::vector<std::unordered_map<int, double>> co_;
};

// Item-kNN: co-occurrence normalized by smoothed session supports,
// sim(a, b) = co(a, b) / (sqrt(sup(a) + lambda) * sqrt(sup(b) + lambda)).
class IknnBaseline {
 public:
  static IknnBaseline fit(const CorpusIndex& corpus, double lambda = 20.0);
  std::vector<double> score(const std::vector<int>& prefix,
                            const std::vector<int>& candidates) const;

 private:
  std::vector<std::unordered_map<int, double>> co_;
  std::vector<double> support_;
  double lambda_ = 20.0;
};

// Session-kNN: binary cosine between the prefix's distinct jobs and each
// training session, top `neighbors` sessions kept (ties broken by session
// index), candidate score = sum of the similarities of the neighbor
// sessions containing it.
class SknnBaseline {
 public:
  static SknnBaseline fit(const CorpusIndex& corpus, int neighbors = 500);
  std::vector<double> score(const std::vector<int>& prefix,
                            const std::vector<int>& candidates) const;

 private:
  std::vector<std::vector<int>> session_items_;  // distinct, sorted
  std::vector<std::vector<int>> sessions_with_;  // job -> session indices
  int neighbors_ = 500;
};

// Sequence-aware session-kNN: the i-th most recent distinct prefix job gets
// weight (n - i + 1) / n, similarity is the matched weight sum over
// (||w|| * sqrt(|S|)); neighbor selection and scoring as in SknnBaseline.
class VsknnBaseline {
 public:
  static VsknnBaseline fit(const CorpusIndex& corpus, int neighbors = 500);
  std::vector<double> score(const std::vector<int>& prefix,
                            const std::vector<int>& candidates) const;

 private:
  std::vector<std::vector<int>> session_items_;
  std::vector<std::vector<int>> sessions_with_;
  int neighbors_ = 500;
};

// Content similarity: cosine between a candidate's text vector and the mean
// of the prefix's text vectors. Its candidate pool is the recent-jobs
// buffer, so candidates outside the buffer score 0.
class ContentBaseline {
 public:
  static ContentBaseline fit(const CorpusIndex& corpus, const Dataset& data,
                             const TextEncoder& encoder,
                             const std::vector<int>& buffer_jobs);
  std::vector<double> score(const std::vector<int>& prefix,
                            const std::vector<int>& candidates) const;

 private:
  std::vector<Tensor> vecs_;
  std::unordered_set<int> buffer_;
};

}  // namespace panap
