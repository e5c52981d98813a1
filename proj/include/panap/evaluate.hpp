#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "panap/corpus.hpp"
#include "panap/model.hpp"
#include "panap/parallel.hpp"
#include "panap/sampling.hpp"

namespace panap {

// One test prediction: prefix [0, t) of a test session predicts its t-th
// job. candidates() returns the positive followed by the negatives; every
// method ranks the same list.
struct EvalInstance {
  int index = 0;    // position in the instance list
  int session = 0;  // test session index
  int t = 0;
  int user = 0;
  std::vector<int> prefix;
  int positive = 0;
  std::vector<int> negatives;

  std::vector<int> candidates() const {
    std::vector<int> c;
    c.reserve(1 + negatives.size());
    c.push_back(positive);
    c.insert(c.end(), negatives.begin(), negatives.end());
    return c;
  }
};

// mirror draws eval negatives with the training strategy (in-batch tier over
// the eval batch plus the frozen recent buffer); uniform draws them from the
// whole training catalog.
enum class EvalSampling { mirror, uniform };

const char* eval_sampling_name(EvalSampling s);
EvalSampling parse_eval_sampling(const std::string& s);

struct EvalOptions {
  int n_eval = 50;
  EvalSampling sampling = EvalSampling::mirror;
  Strategy strategy = Strategy::S2;
  int batch_size = 256;
  int buffer_size = 5000;
  uint64_t seed = 0;
};

// Deterministic instance list over every test-session prefix; per-instance
// negatives come from seed forks, so the list depends only on (corpus, opts).
std::vector<EvalInstance> build_eval_instances(const CorpusIndex& corpus,
                                               const EvalOptions& opts);

// candidates[0] is always the positive.
using ScoreFn = std::function<std::vector<double>(
    const EvalInstance&, const std::vector<int>& candidates)>;

// 1-based rank of candidates[0]: descending score, ties broken by ascending
// job id (the positive loses ties to lexicographically smaller ids).
int rank_of_positive(const std::vector<double>& scores,
                     const std::vector<int>& candidates,
                     const std::vector<std::string>& job_ids);

struct MetricRow {
  int K = 0;
  double hr = 0.0;
  double mrr = 0.0;
  double ndcg = 0.0;
};

struct MethodReport {
  std::string method;
  size_t n_instances = 0;
  std::vector<MetricRow> rows;  // one per cutoff, in cutoff order
  double mean_rank = 0.0;
  std::vector<int> ranks;  // 1-based, per instance
};

// Scores every instance (in parallel under openmp; ranks land in
// per-instance slots so the report is identical for any worker count) and
// aggregates HR/MRR/NDCG at each cutoff.
MethodReport evaluate_method(const std::string& name,
                             const std::vector<EvalInstance>& instances,
                             const std::vector<std::string>& job_ids,
                             const ScoreFn& score,
                             const std::vector<int>& cutoffs, Exec exec,
                             int workers);

// The returned closures borrow their arguments; keep model and cache alive
// while evaluating.
ScoreFn make_panap_scorer(const PanapModel& model, const JobVectorCache& cache);

// Sanity scorers: oracle pins the positive at rank 1; random scores are
// uniform noise from per-instance seed forks.
ScoreFn make_oracle_scorer();
ScoreFn make_random_scorer(uint64_t seed);

}  // namespace panap
