#pragma once

#include <cstdint>
#include <vector>

#include "panap/corpus.hpp"
#include "panap/model.hpp"
#include "panap/sampling.hpp"

namespace panap {

struct TrainConfig {
  int batch_size = 256;
  int k_train = 15;
  int n_eval = 50;
  int epochs = 5;
  double lr = 5e-4;
  uint64_t seed = 0;
  Strategy strategy = Strategy::S2;
  int buffer_size = 5000;
  Exec exec = Exec::serial;
  int workers = 1;
};

struct TrainResult {
  std::vector<double> loss_history;  // mean instance loss per epoch
};

// Mini-batch training over all session prefixes. Losses and gradients are
// reduced in fixed instance-block order, so the trained weights and the
// loss history are bitwise identical for any Exec mode or worker count.
TrainResult train_model(PanapModel& model, const CorpusIndex& corpus,
                        const TrainConfig& tc);

}  // namespace panap
