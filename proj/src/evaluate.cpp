#include "panap/evaluate.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_set>

#include "panap/metrics.hpp"

namespace panap {

const char* eval_sampling_name(EvalSampling s) {
  return s == EvalSampling::mirror ? "mirror" : "uniform";
}

EvalSampling parse_eval_sampling(const std::string& s) {
  if (s == "mirror") return EvalSampling::mirror;
  if (s == "uniform") return EvalSampling::uniform;
  usage_error("unknown eval sampling: " + s + " (expected mirror or uniform)");
}

std::vector<EvalInstance> build_eval_instances(const CorpusIndex& corpus,
                                               const EvalOptions& opts) {
  if (corpus.test_jobs.empty()) usage_error("evaluate: empty test set");
  if (opts.n_eval < 1) usage_error("evaluate: n_eval must be positive");
  if (opts.batch_size < 1) usage_error("evaluate: batch size must be positive");

  std::vector<PrefixInstance> prefixes = expand_prefixes(corpus.test_jobs);
  if (prefixes.empty())
    usage_error("evaluate: no test session has length >= 2");

  RecentBuffer buffer(static_cast<size_t>(opts.buffer_size));
  buffer.push_stream(corpus.train_stream);
  std::vector<int> buf = buffer.snapshot();

  Rng root(opts.seed);
  std::vector<EvalInstance> out;
  out.reserve(prefixes.size());

  size_t n = prefixes.size();
  size_t bs = static_cast<size_t>(opts.batch_size);
  for (size_t start = 0; start < n; start += bs) {
    size_t end = std::min(n, start + bs);
    std::vector<int> batch_positives;
    batch_positives.reserve(end - start);
    for (size_t i = start; i < end; ++i) {
      const PrefixInstance& p = prefixes[i];
      batch_positives.push_back(corpus.test_jobs[p.session][p.t]);
    }
    for (size_t i = start; i < end; ++i) {
      const PrefixInstance& p = prefixes[i];
      const std::vector<int>& jobs = corpus.test_jobs[p.session];
      EvalInstance ins;
      ins.index = static_cast<int>(i);
      ins.session = p.session;
      ins.t = p.t;
      ins.user = corpus.test_user[p.session];
      ins.prefix.assign(jobs.begin(), jobs.begin() + p.t);
      ins.positive = jobs[p.t];
      std::unordered_set<int> excluded(ins.prefix.begin(), ins.prefix.end());
      excluded.insert(ins.positive);
      Rng rng = root.fork("eval-neg", static_cast<uint64_t>(i));
      if (opts.sampling == EvalSampling::uniform) {
        ins.negatives =
            uniform_negatives(corpus.n_jobs(), excluded, opts.n_eval, rng);
      } else {
        std::vector<int> batch_cands =
            minibatch_candidates(batch_positives, i - start, excluded);
        NegSampleRequest req;
        req.batch_candidates = &batch_cands;
        req.buffer = &buf;
        req.excluded = &excluded;
        req.k = opts.n_eval;
        req.user_state = corpus.user_state[ins.user];
        req.job_state = &corpus.job_state;
        ins.negatives = sample_negatives(opts.strategy, req, rng);
      }
      out.push_back(std::move(ins));
    }
  }
  return out;
}

int rank_of_positive(const std::vector<double>& scores,
                     const std::vector<int>& candidates,
                     const std::vector<std::string>& job_ids) {
  if (candidates.empty()) usage_error("rank_of_positive: no candidates");
  if (scores.size() != candidates.size())
    data_error("rank_of_positive: " + std::to_string(scores.size()) +
               " scores for " + std::to_string(candidates.size()) +
               " candidates");
  for (int c : candidates)
    if (c < 0 || static_cast<size_t>(c) >= job_ids.size())
      data_error("rank_of_positive: job index out of range: " +
                 std::to_string(c));
  const std::string& pos_id = job_ids[candidates[0]];
  double s0 = scores[0];
  int rank = 1;
  for (size_t i = 1; i < candidates.size(); ++i) {
    if (scores[i] > s0 ||
        (scores[i] == s0 && job_ids[candidates[i]] < pos_id))
      ++rank;
  }
  return rank;
}

MethodReport evaluate_method(const std::string& name,
                             const std::vector<EvalInstance>& instances,
                             const std::vector<std::string>& job_ids,
                             const ScoreFn& score,
                             const std::vector<int>& cutoffs, Exec exec,
                             int workers) {
  if (instances.empty()) usage_error("evaluate: no instances");
  if (cutoffs.empty()) usage_error("evaluate: no cutoffs");
  for (int K : cutoffs)
    if (K < 1) usage_error("evaluate: cutoff must be positive");

  int64_t n = static_cast<int64_t>(instances.size());
  std::vector<int> ranks(instances.size(), 0);

  // Exceptions may not escape an OpenMP region; capture the first one and
  // rethrow after the loop.
  std::mutex err_mu;
  bool failed = false;
  ErrorKind err_kind = ErrorKind::data;
  std::string err_msg;

  parallel_for(exec, workers, n, [&](int64_t i) {
    try {
      const EvalInstance& ins = instances[i];
      std::vector<int> cands = ins.candidates();
      std::vector<double> s = score(ins, cands);
      ranks[i] = rank_of_positive(s, cands, job_ids);
    } catch (const Error& e) {
      std::lock_guard<std::mutex> g(err_mu);
      if (!failed) {
        failed = true;
        err_kind = e.kind();
        err_msg = e.what();
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> g(err_mu);
      if (!failed) {
        failed = true;
        err_kind = ErrorKind::numeric;
        err_msg = e.what();
      }
    }
  });
  if (failed) throw Error(err_kind, err_msg);

  MethodReport rep;
  rep.method = name;
  rep.n_instances = instances.size();
  rep.ranks = std::move(ranks);
  double rank_sum = 0.0;
  for (int r : rep.ranks) rank_sum += static_cast<double>(r);
  rep.mean_rank = rank_sum / static_cast<double>(rep.ranks.size());
  rep.rows.reserve(cutoffs.size());
  for (int K : cutoffs) {
    MetricRow row;
    row.K = K;
    row.hr = metric_hr(rep.ranks, K);
    row.mrr = metric_mrr(rep.ranks, K);
    row.ndcg = metric_ndcg(rep.ranks, K);
    rep.rows.push_back(row);
  }
  return rep;
}

ScoreFn make_panap_scorer(const PanapModel& model,
                          const JobVectorCache& cache) {
  return [&model, &cache](const EvalInstance& ins,
                          const std::vector<int>& cands) {
    std::vector<Tensor> prefix_vecs;
    prefix_vecs.reserve(ins.prefix.size());
    for (int j : ins.prefix) prefix_vecs.push_back(cache.at(j));
    Tensor v_u = model.seeker_vector_infer(ins.user, prefix_vecs);
    return score_candidates(model, v_u, cache, cands);
  };
}

ScoreFn make_oracle_scorer() {
  return [](const EvalInstance&, const std::vector<int>& cands) {
    std::vector<double> s(cands.size(), 0.0);
    if (!s.empty()) s[0] = 1.0;
    return s;
  };
}

ScoreFn make_random_scorer(uint64_t seed) {
  return [seed](const EvalInstance& ins, const std::vector<int>& cands) {
    Rng rng = Rng(seed).fork("random-score", static_cast<uint64_t>(ins.index));
    std::vector<double> s(cands.size());
    for (double& x : s) x = rng.unit();
    return s;
  };
}

}  // namespace panap
