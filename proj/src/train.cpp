#include "panap/train.hpp"

#include <algorithm>
#include <unordered_set>

#include "panap/common.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace panap {

TrainResult train_model(PanapModel& model, const CorpusIndex& corpus,
                        const TrainConfig& tc) {
  std::vector<PrefixInstance> instances = expand_prefixes(corpus.train_jobs);
  if (instances.empty()) usage_error("train: no training instances");
  if (tc.batch_size < 1) usage_error("train: batch_size must be positive");
  if (tc.k_train < 1) usage_error("train: k_train must be positive");
  if (tc.epochs < 1) usage_error("train: epochs must be positive");

  // The buffer holds the most recently applied jobs of the training window
  // and stays frozen during optimization, so sampling pools are independent
  // of batch order and worker count.
  RecentBuffer buffer(static_cast<size_t>(tc.buffer_size));
  buffer.push_stream(corpus.train_stream);
  const std::vector<int> buffer_snapshot = buffer.snapshot();

  AdamConfig adam;
  adam.lr = tc.lr;
  adam.l2 = model.config().l2;

  const Rng root(tc.seed);
  const int workers = clamp_workers(tc.workers);
  const bool use_dropout = model.config().dropout > 0.0;
  const int64_t n = static_cast<int64_t>(instances.size());

  TrainResult result;
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::vector<PrefixInstance> order = instances;
    {
      Rng shuffle_rng = root.fork("shuffle", static_cast<uint64_t>(epoch));
      shuffle_rng.shuffle(order);
    }

    double epoch_loss = 0.0;
    for (int64_t batch_begin = 0; batch_begin < n;
         batch_begin += tc.batch_size) {
      const int64_t batch_end = std::min(n, batch_begin + tc.batch_size);
      const int64_t batch_n = batch_end - batch_begin;

      std::vector<int> positives(batch_n);
      for (int64_t i = 0; i < batch_n; ++i) {
        const PrefixInstance& pi = order[batch_begin + i];
        positives[i] = corpus.train_jobs[pi.session][pi.t];
      }

      // Gradients accumulate into fixed-size instance blocks and the blocks
      // reduce in index order, so the summation tree (and every float that
      // falls out of it) is independent of the worker count; threads only
      // decide who computes which block.
      constexpr int64_t kGradBlock = 32;
      const int64_t n_blocks = (batch_n + kGradBlock - 1) / kGradBlock;
      std::vector<double> losses(batch_n, 0.0);
      std::vector<GradMap> block_grads(n_blocks);

      auto run_block = [&](int64_t b) {
        const int64_t lo = b * kGradBlock;
        const int64_t hi = std::min(batch_n, lo + kGradBlock);
        for (int64_t i = lo; i < hi; ++i) {
          const PrefixInstance& pi = order[batch_begin + i];
          const uint64_t gidx = static_cast<uint64_t>(batch_begin + i);
          const std::vector<int>& session = corpus.train_jobs[pi.session];
          std::vector<int> prefix(session.begin(), session.begin() + pi.t);
          const int positive = positives[i];
          const int user = corpus.train_user[pi.session];

          std::unordered_set<int> excluded(prefix.begin(), prefix.end());
          excluded.insert(positive);
          std::vector<int> batch_cands =
              minibatch_candidates(positives, static_cast<size_t>(i), excluded);

          NegSampleRequest req;
          req.batch_candidates = &batch_cands;
          req.buffer = &buffer_snapshot;
          req.excluded = &excluded;
          req.k = tc.k_train;
          req.user_state = corpus.user_state[user];
          req.job_state = &corpus.job_state;
          Rng neg_rng =
              root.fork("neg", static_cast<uint64_t>(epoch), gidx);
          std::vector<int> negatives =
              sample_negatives(tc.strategy, req, neg_rng);

          Rng drop_rng =
              root.fork("drop", static_cast<uint64_t>(epoch), gidx);
          ad::Tape tape;
          ad::Var loss =
              model.instance_loss(tape, user, prefix, positive, negatives,
                                  use_dropout ? &drop_rng : nullptr);
          losses[i] = tape.value(loss)[0];
          tape.backward(loss);
          tape.accumulate_param_grads(model.store(), block_grads[b],
                                      1.0 / static_cast<double>(batch_n));
        }
      };

      auto run_worker = [&](int w) {
        Range r = worker_range(n_blocks, workers, w);
        for (int64_t b = r.begin; b < r.end; ++b) run_block(b);
      };

      if (tc.exec == Exec::openmp && workers > 1) {
#ifdef _OPENMP
#pragma omp parallel num_threads(workers)
        { run_worker(omp_get_thread_num()); }
#else
        for (int w = 0; w < workers; ++w) run_worker(w);
#endif
      } else {
        for (int w = 0; w < workers; ++w) run_worker(w);
      }

      GradMap total = model.store().zero_grads();
      for (int64_t b = 0; b < n_blocks; ++b)
        for (const auto& [name, g] : block_grads[b]) {
          Tensor& acc = total.at(name);
          for (int64_t j = 0; j < g.numel(); ++j) acc.v[j] += g.v[j];
        }
      adam_step(model.store_mut(), total, adam);

      for (int64_t i = 0; i < batch_n; ++i) epoch_loss += losses[i];
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(n));
  }
  return result;
}

}  // namespace panap
