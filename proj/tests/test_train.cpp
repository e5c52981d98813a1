#include <cmath>

#include <doctest.h>

#include "panap/corpus.hpp"
#include "panap/model.hpp"
#include "panap/sessions.hpp"
#include "panap/synth.hpp"
#include "panap/train.hpp"

using namespace panap;

namespace {

Dataset easy_dataset() {
  SynthConfig sc;
  sc.n_topics = 4;
  sc.n_states = 3;
  sc.n_jobs = 80;
  sc.n_users = 50;
  sc.session_len_min = 3;
  sc.session_len_max = 5;
  sc.p_topic_match = 0.95;
  SynthResult r = generate_synthetic(sc, 11);

  Dataset data;
  for (Job& j : r.jobs) data.catalog.emplace(j.job_id, std::move(j));
  for (JobSeeker& s : r.seekers) data.seekers.emplace(s.user_id, std::move(s));
  std::vector<Session> sessions =
      build_sessions(r.events, SessionMode::gap_split, 30);
  SplitResult split = temporal_split(sessions, 14);
  FilterResult filtered = filter_unseen(split.test, job_id_set(split.train));
  data.train_sessions = std::move(split.train);
  data.test_sessions = std::move(filtered.sessions);
  return data;
}

ModelConfig tiny_model_config() {
  ModelConfig c;
  c.d = 16;
  c.d_J = 8;
  c.d_U = 8;
  c.d_s = 4;
  c.d_q = 4;
  c.dropout = 0.0;
  c.temperature = 5.0;
  return c;
}

EncoderSpec tiny_encoder() {
  EncoderSpec spec;
  spec.d = 16;
  return spec;
}

TrainConfig tiny_train_config() {
  TrainConfig tc;
  tc.batch_size = 32;
  tc.k_train = 5;
  tc.epochs = 3;
  tc.lr = 5e-3;
  tc.seed = 1;
  tc.buffer_size = 200;
  return tc;
}

}  // namespace

TEST_CASE("training reports one mean loss per epoch and it decreases") {
  Dataset data = easy_dataset();
  CorpusIndex corpus = build_corpus_index(data);
  PanapModel model(data, corpus, tiny_model_config(), tiny_encoder(), 2);
  TrainResult r = train_model(model, corpus, tiny_train_config());
  REQUIRE(r.loss_history.size() == 3);
  for (double l : r.loss_history) CHECK(std::isfinite(l));
  CHECK(r.loss_history.back() < r.loss_history.front());
}

TEST_CASE("same seed, same history and same weights") {
  Dataset data = easy_dataset();
  CorpusIndex corpus = build_corpus_index(data);
  TrainConfig tc = tiny_train_config();

  PanapModel m1(data, corpus, tiny_model_config(), tiny_encoder(), 2);
  PanapModel m2(data, corpus, tiny_model_config(), tiny_encoder(), 2);
  TrainResult r1 = train_model(m1, corpus, tc);
  TrainResult r2 = train_model(m2, corpus, tc);
  CHECK(r1.loss_history == r2.loss_history);
  CHECK(m1.store().value("job.fc1.w").v == m2.store().value("job.fc1.w").v);
  CHECK(m1.store().value("seeker.fc2.w").v == m2.store().value("seeker.fc2.w").v);

  TrainConfig other = tc;
  other.seed = 99;
  PanapModel m3(data, corpus, tiny_model_config(), tiny_encoder(), 2);
  TrainResult r3 = train_model(m3, corpus, other);
  CHECK(r1.loss_history != r3.loss_history);
}

TEST_CASE("loss history is bitwise identical across execution modes") {
  Dataset data = easy_dataset();
  CorpusIndex corpus = build_corpus_index(data);

  TrainConfig serial = tiny_train_config();
  serial.exec = Exec::serial;
  serial.workers = 1;
  PanapModel m1(data, corpus, tiny_model_config(), tiny_encoder(), 2);
  TrainResult r1 = train_model(m1, corpus, serial);

  TrainConfig par = tiny_train_config();
  par.exec = Exec::openmp;
  par.workers = 3;
  PanapModel m2(data, corpus, tiny_model_config(), tiny_encoder(), 2);
  TrainResult r2 = train_model(m2, corpus, par);

  CHECK(r1.loss_history == r2.loss_history);
}

TEST_CASE("dropout still trains deterministically for a fixed seed") {
  Dataset data = easy_dataset();
  CorpusIndex corpus = build_corpus_index(data);
  ModelConfig mc = tiny_model_config();
  mc.dropout = 0.3;
  TrainConfig tc = tiny_train_config();
  tc.epochs = 2;

  PanapModel m1(data, corpus, mc, tiny_encoder(), 4);
  PanapModel m2(data, corpus, mc, tiny_encoder(), 4);
  CHECK(train_model(m1, corpus, tc).loss_history ==
        train_model(m2, corpus, tc).loss_history);
}

TEST_CASE("training validates its configuration") {
  Dataset data = easy_dataset();
  CorpusIndex corpus = build_corpus_index(data);
  PanapModel model(data, corpus, tiny_model_config(), tiny_encoder(), 2);
  TrainConfig tc = tiny_train_config();
  tc.batch_size = 0;
  CHECK_THROWS_AS(train_model(model, corpus, tc), Error);
  tc = tiny_train_config();
  tc.k_train = 0;
  CHECK_THROWS_AS(train_model(model, corpus, tc), Error);
  tc = tiny_train_config();
  tc.epochs = 0;
  CHECK_THROWS_AS(train_model(model, corpus, tc), Error);
}
