// Times the serial reference path against the OpenMP path for the four hot
// loops (job vector cache build, evaluation scoring, purity, batch
// gradients) and cross-checks that both produce the same numbers.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "panap/corpus.hpp"
#include "panap/evaluate.hpp"
#include "panap/model.hpp"
#include "panap/purity.hpp"
#include "panap/sessions.hpp"
#include "panap/synth.hpp"
#include "panap/train.hpp"

using namespace panap;

namespace {

template <typename Fn>
double time_ms(const Fn& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const std::string& name, double serial_ms, double openmp_ms,
            bool same) {
  std::cout << std::left << std::setw(16) << name << std::right << std::fixed
            << std::setprecision(1) << std::setw(12) << serial_ms
            << std::setw(12) << openmp_ms << std::setprecision(2)
            << std::setw(10) << (serial_ms / openmp_ms) << "   "
            << (same ? "match" : "MISMATCH") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panap_bench: serial vs OpenMP timings"};
  int n_jobs = 500;
  int n_users = 800;
  int workers = hardware_workers();
  uint64_t seed = 7;
  app.add_option("--jobs", n_jobs, "Synthetic jobs")->capture_default_str();
  app.add_option("--users", n_users, "Synthetic users")->capture_default_str();
  app.add_option("--workers", workers, "OpenMP worker threads")
      ->capture_default_str();
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  SynthConfig sc;
  sc.n_jobs = n_jobs;
  sc.n_users = n_users;
  SynthResult r = generate_synthetic(sc, seed);

  Dataset data;
  for (Job& j : r.jobs) data.catalog.emplace(j.job_id, std::move(j));
  for (JobSeeker& s : r.seekers) data.seekers.emplace(s.user_id, std::move(s));
  std::vector<Session> sessions =
      build_sessions(r.events, SessionMode::gap_split, 30);
  SplitResult split = temporal_split(sessions, 14);
  FilterResult filtered = filter_unseen(split.test, job_id_set(split.train));
  data.train_sessions = std::move(split.train);
  data.test_sessions = std::move(filtered.sessions);
  CorpusIndex corpus = build_corpus_index(data);

  ModelConfig mc;
  mc.d = 32;
  mc.d_J = 16;
  mc.d_U = 16;
  mc.d_s = 16;
  mc.d_q = 16;
  mc.temperature = 10.0;
  EncoderSpec spec;
  spec.d = mc.d;
  PanapModel model(data, corpus, mc, spec, seed);

  std::cout << corpus.train_jobs.size() << " train sessions, "
            << corpus.test_jobs.size() << " test sessions, "
            << corpus.n_jobs() << " jobs; " << workers << " workers\n\n";
  std::cout << std::left << std::setw(16) << "loop" << std::right
            << std::setw(12) << "serial ms" << std::setw(12) << "openmp ms"
            << std::setw(10) << "speedup" << "   agreement\n";

  // Job vector cache.
  JobVectorCache cache_s, cache_p;
  double t_cache_s = time_ms([&] { cache_s.build(model, Exec::serial, 1); });
  double t_cache_p =
      time_ms([&] { cache_p.build(model, Exec::openmp, workers); });
  bool cache_same = cache_s.size() == cache_p.size();
  for (int i = 0; cache_same && i < cache_s.size(); ++i)
    for (int64_t j = 0; j < cache_s.at(i).numel(); ++j)
      if (cache_s.at(i)[j] != cache_p.at(i)[j]) cache_same = false;
  report("cache_build", t_cache_s, t_cache_p, cache_same);

  // Evaluation scoring.
  EvalOptions eo;
  eo.seed = seed;
  std::vector<EvalInstance> instances = build_eval_instances(corpus, eo);
  ScoreFn scorer = make_panap_scorer(model, cache_s);
  MethodReport rep_s, rep_p;
  double t_eval_s = time_ms([&] {
    rep_s = evaluate_method("panap", instances, corpus.job_ids, scorer, {5},
                            Exec::serial, 1);
  });
  double t_eval_p = time_ms([&] {
    rep_p = evaluate_method("panap", instances, corpus.job_ids, scorer, {5},
                            Exec::openmp, workers);
  });
  report("eval_score", t_eval_s, t_eval_p, rep_s.ranks == rep_p.ranks);

  // Purity over session representations.
  std::vector<Tensor> points;
  std::vector<std::string> labels;
  for (size_t s = 0; s < corpus.train_jobs.size(); ++s) {
    std::vector<Tensor> vecs;
    for (int j : corpus.train_jobs[s]) vecs.push_back(cache_s.at(j));
    points.push_back(
        model.seeker_vector_infer(corpus.train_user[s], vecs));
    labels.push_back(
        data.seekers.at(corpus.user_ids[corpus.train_user[s]]).major);
  }
  PurityReport pur_s, pur_p;
  double t_pur_s = time_ms(
      [&] { pur_s = knn_label_purity(points, labels, "major", 10, Exec::serial, 1); });
  double t_pur_p = time_ms([&] {
    pur_p = knn_label_purity(points, labels, "major", 10, Exec::openmp, workers);
  });
  report("purity", t_pur_s, t_pur_p, pur_s.agreement == pur_p.agreement);

  // One training epoch; the loss history must agree bitwise across worker
  // counts even though gradient summation order differs.
  TrainConfig tc;
  tc.epochs = 1;
  tc.seed = seed;
  PanapModel m1(data, corpus, mc, spec, seed);
  PanapModel m2(data, corpus, mc, spec, seed);
  TrainResult tr_s, tr_p;
  double t_train_s = time_ms([&] { tr_s = train_model(m1, corpus, tc); });
  tc.exec = Exec::openmp;
  tc.workers = workers;
  double t_train_p = time_ms([&] { tr_p = train_model(m2, corpus, tc); });
  report("batch_grad", t_train_s, t_train_p,
         tr_s.loss_history == tr_p.loss_history);

  return 0;
}
