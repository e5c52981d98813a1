#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panap/baselines.hpp"
#include "panap/checkpoint.hpp"
#include "panap/corpus.hpp"
#include "panap/evaluate.hpp"
#include "panap/model.hpp"
#include "panap/pipeline.hpp"
#include "panap/purity.hpp"
#include "panap/sampling.hpp"
#include "panap/synth.hpp"
#include "panap/table_io.hpp"
#include "panap/train.hpp"

namespace {

using namespace panap;

namespace fs = std::filesystem;

std::string path_join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

Exec parse_exec(const std::string& s) {
  if (s == "serial") return Exec::serial;
  if (s == "openmp") return Exec::openmp;
  usage_error("unknown execution mode: " + s + " (expected serial or openmp)");
}

char parse_delimiter(const std::string& s) {
  if (s == "tab" || s == "\\t" || s == "\t") return '\t';
  if (s.size() != 1)
    usage_error("delimiter must be one character (or 'tab'): " + s);
  return s[0];
}

// ---- shared flag bundles ----

struct ModelFlags {
  int dim = 300;
  int job_dim = 300;
  int id_dim = 100;
  int query_dim = 100;
  int meta_embed_dim = 32;
  int onehot_cap = 10;
  int fc_hidden = 0;
  std::string attention = "personalized";
  double dropout = 0.2;
  double l2 = 1e-4;
  double temperature = 1.0;
  bool no_content = false;
  bool no_job_meta = false;
  bool no_seeker_meta = false;
  bool job_id_embedding = false;
  std::string vectors_path;
  uint64_t hash_seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dim", dim, "Text vector dimension")
        ->capture_default_str();
    cmd->add_option("--job-dim", job_dim,
                    "Job/seeker vector dimension (they share it)")
        ->capture_default_str();
    cmd->add_option("--id-dim", id_dim, "Identifier embedding dimension")
        ->capture_default_str();
    cmd->add_option("--query-dim", query_dim, "Attention query dimension")
        ->capture_default_str();
    cmd->add_option("--meta-embed-dim", meta_embed_dim,
                    "Embedding dimension for high-cardinality metadata")
        ->capture_default_str();
    cmd->add_option("--onehot-cap", onehot_cap,
                    "Vocab size up to which metadata stays one-hot")
        ->capture_default_str();
    cmd->add_option("--fc-hidden", fc_hidden,
                    "Tower hidden width (0 = same as output)")
        ->capture_default_str();
    cmd->add_option("--attention", attention,
                    "personalized, vanilla, or average")
        ->capture_default_str();
    cmd->add_option("--dropout", dropout, "Dropout rate")
        ->capture_default_str();
    cmd->add_option("--l2", l2, "L2 penalty on weights and embeddings")
        ->capture_default_str();
    cmd->add_option("--temperature", temperature, "Cosine score multiplier")
        ->capture_default_str();
    cmd->add_flag("--no-content", no_content, "Drop the text input");
    cmd->add_flag("--no-job-meta", no_job_meta, "Drop job metadata");
    cmd->add_flag("--no-seeker-meta", no_seeker_meta, "Drop seeker metadata");
    cmd->add_flag("--job-id-embedding", job_id_embedding,
                  "Add a trainable per-job identifier embedding");
    cmd->add_option("--vectors", vectors_path,
                    "External job vector file (id + floats per line)");
    cmd->add_option("--hash-seed", hash_seed,
                    "Seed of the hashed bag-of-words encoder")
        ->capture_default_str();
  }

  ModelConfig model_config() const {
    ModelConfig c;
    c.d = dim;
    c.d_J = job_dim;
    c.d_U = job_dim;
    c.d_s = id_dim;
    c.d_q = query_dim;
    c.meta_embed_dim = meta_embed_dim;
    c.onehot_cardinality_cap = onehot_cap;
    c.fc_hidden = fc_hidden;
    c.attention = parse_attention(attention);
    c.dropout = dropout;
    c.l2 = l2;
    c.temperature = temperature;
    c.flags.use_content = !no_content;
    c.flags.use_job_meta = !no_job_meta;
    c.flags.use_seeker_meta = !no_seeker_meta;
    c.flags.use_job_id_embedding = job_id_embedding;
    return c;
  }

  EncoderSpec encoder_spec() const {
    EncoderSpec spec;
    spec.d = dim;
    spec.hash_seed = hash_seed;
    if (!vectors_path.empty()) {
      spec.kind = EncoderKind::external_file;
      spec.external_path = vectors_path;
    }
    return spec;
  }
};

struct ExecFlags {
  std::string parallel = "serial";
  int workers = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--parallel", parallel, "serial or openmp")
        ->capture_default_str();
    cmd->add_option("--workers", workers, "Worker threads under openmp")
        ->capture_default_str();
  }
  Exec exec() const { return parse_exec(parallel); }
};

// Loads a prepared directory, rebuilds the model a checkpoint was trained
// on, and restores its weights.
struct LoadedModel {
  Dataset data;
  CorpusIndex corpus;
  std::unique_ptr<PanapModel> model;
  Checkpoint ck;
};

LoadedModel load_model(const std::string& data_dir,
                       const std::string& ck_path) {
  LoadedModel lm;
  lm.data = load_prepared(data_dir);
  lm.corpus = build_corpus_index(lm.data);
  lm.ck = load_checkpoint(ck_path);
  ModelConfig mc = model_config_from_meta(lm.ck.meta);
  EncoderSpec spec = encoder_spec_from_meta(lm.ck.meta);
  uint64_t seed = seed_from_meta(lm.ck.meta);
  lm.model =
      std::make_unique<PanapModel>(lm.data, lm.corpus, mc, spec, seed);
  restore_into_model(*lm.model, lm.ck);
  return lm;
}

// ---- synth ----

struct SynthFlags {
  SynthConfig cfg;
  uint64_t seed = 0;
  std::string out_dir;
};

void run_synth(const SynthFlags& f) {
  SynthResult r = generate_synthetic(f.cfg, f.seed);
  std::error_code ec;
  fs::create_directories(f.out_dir, ec);
  if (ec) io_error("cannot create output directory: " + f.out_dir);
  write_jobs(path_join(f.out_dir, "jobs.tsv"), r.jobs);
  write_seekers(path_join(f.out_dir, "seekers.tsv"), r.seekers);
  write_applications(path_join(f.out_dir, "applications.tsv"), r.events);
  std::cout << "wrote " << r.jobs.size() << " jobs, " << r.seekers.size()
            << " seekers, " << r.events.size() << " applications to "
            << f.out_dir << "\n";
}

// ---- prepare ----

struct PrepareFlags {
  PrepareConfig cfg;
  std::string delimiter = "tab";
  std::string mode = "gap_split";
  std::string out_dir;
};

void run_prepare(const PrepareFlags& f) {
  PrepareConfig cfg = f.cfg;
  cfg.delimiter = parse_delimiter(f.delimiter);
  if (f.mode == "gap_split") {
    cfg.mode = SessionMode::gap_split;
  } else if (f.mode == "per_user") {
    cfg.mode = SessionMode::per_user;
  } else {
    usage_error("unknown session mode: " + f.mode +
                " (expected gap_split or per_user)");
  }
  nlohmann::json manifest = prepare_dataset(cfg, f.out_dir);
  const auto& st = manifest["stats"];
  std::cout << "mode            " << manifest["mode"].get<std::string>()
            << "\n"
            << "users           " << st["users"] << "\n"
            << "jobs (catalog)  " << st["jobs_catalog"] << "\n"
            << "jobs (sessions) " << st["jobs_in_sessions"] << "\n"
            << "sessions        " << st["sessions_total"] << " (train "
            << st["sessions_train"] << ", test " << st["sessions_test"]
            << ")\n"
            << "applications    " << st["events_train"] << " train, "
            << st["events_test"] << " test\n"
            << "avg session len " << st["avg_session_len"] << "\n"
            << "unseen filtered " << st["unseen_events_removed"]
            << " events, " << st["unseen_sessions_dropped"] << " sessions\n";
  std::cout << "cardinalities   ";
  for (const auto& [k, v] : st["cardinality"].items())
    std::cout << k << "=" << v << " ";
  std::cout << "\n";
}

// ---- train ----

struct TrainFlags {
  std::string data_dir;
  std::string out_path;
  std::string loss_log;
  ModelFlags model;
  ExecFlags ex;
  int batch = 256;
  int k_train = 15;
  int epochs = 5;
  double lr = 5e-4;
  std::string strategy = "S2";
  int buffer = 5000;
  uint64_t seed = 0;
};

void run_train(const TrainFlags& f) {
  Dataset data = load_prepared(f.data_dir);
  CorpusIndex corpus = build_corpus_index(data);
  PanapModel model(data, corpus, f.model.model_config(),
                   f.model.encoder_spec(), f.seed);

  TrainConfig tc;
  tc.batch_size = f.batch;
  tc.k_train = f.k_train;
  tc.epochs = f.epochs;
  tc.lr = f.lr;
  tc.seed = f.seed;
  tc.strategy = parse_strategy(f.strategy);
  tc.buffer_size = f.buffer;
  tc.exec = f.ex.exec();
  tc.workers = f.ex.workers;

  TrainResult result = train_model(model, corpus, tc);

  std::ostringstream log;
  for (size_t e = 0; e < result.loss_history.size(); ++e)
    log << "epoch " << (e + 1) << " loss " << std::setprecision(17)
        << result.loss_history[e] << "\n";
  std::cout << log.str();
  if (!f.loss_log.empty()) write_text_file(f.loss_log, log.str());

  nlohmann::json extra;
  extra["train"] = {{"batch_size", tc.batch_size},
                    {"k_train", tc.k_train},
                    {"epochs", tc.epochs},
                    {"lr", tc.lr},
                    {"strategy", strategy_name(tc.strategy)},
                    {"buffer_size", tc.buffer_size},
                    {"data_dir", f.data_dir}};
  extra["loss_history"] = result.loss_history;
  save_checkpoint(f.out_path, model, extra);
  std::cout << "checkpoint written to " << f.out_path << "\n";
}

// ---- evaluate ----

struct EvaluateFlags {
  std::string data_dir;
  std::string ck_path;
  std::vector<std::string> methods{"panap"};
  std::vector<int> cutoffs{5};
  int n_eval = 50;
  std::string sampling = "mirror";
  std::string strategy = "S2";
  int batch = 256;
  int buffer = 5000;
  uint64_t seed = 0;
  double iknn_lambda = 20.0;
  int knn_neighbors = 500;
  std::string out_path;
  std::string ranks_path;
  ModelFlags model;  // encoder fallback when no checkpoint is given
  ExecFlags ex;
};

bool wants(const std::vector<std::string>& methods, const std::string& m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

void run_evaluate(const EvaluateFlags& f) {
  bool need_model = wants(f.methods, "panap");
  if (need_model && f.ck_path.empty())
    usage_error("evaluating panap needs --checkpoint");
  if (f.methods.empty()) usage_error("no methods requested");

  Dataset data;
  CorpusIndex corpus;
  std::unique_ptr<PanapModel> model;
  Checkpoint ck;
  if (!f.ck_path.empty()) {
    LoadedModel lm = load_model(f.data_dir, f.ck_path);
    data = std::move(lm.data);
    corpus = std::move(lm.corpus);
    model = std::move(lm.model);
    ck = std::move(lm.ck);
  } else {
    data = load_prepared(f.data_dir);
    corpus = build_corpus_index(data);
  }

  EvalOptions opts;
  opts.n_eval = f.n_eval;
  opts.sampling = parse_eval_sampling(f.sampling);
  opts.strategy = parse_strategy(f.strategy);
  opts.batch_size = f.batch;
  opts.buffer_size = f.buffer;
  opts.seed = f.seed;
  std::vector<EvalInstance> instances = build_eval_instances(corpus, opts);

  JobVectorCache cache;
  if (model) cache.build(*model, f.ex.exec(), f.ex.workers);

  RecentBuffer buffer(static_cast<size_t>(f.buffer));
  buffer.push_stream(corpus.train_stream);
  std::vector<int> buffer_jobs = buffer.snapshot();

  // Keep fitted baselines alive inside the closures.
  auto scorer_for = [&](const std::string& name) -> ScoreFn {
    if (name == "panap") return make_panap_scorer(*model, cache);
    if (name == "oracle") return make_oracle_scorer();
    if (name == "random") return make_random_scorer(f.seed);
    BaselineKind kind = parse_baseline(name);
    switch (kind) {
      case BaselineKind::pop: {
        auto b = std::make_shared<PopBaseline>(PopBaseline::fit(corpus));
        return [b](const EvalInstance& i, const std::vector<int>& c) {
          return b->score(i.prefix, c);
        };
      }
      case BaselineKind::ar: {
        auto b = std::make_shared<ArBaseline>(ArBaseline::fit(corpus));
        return [b](const EvalInstance& i, const std::vector<int>& c) {
          return b->score(i.prefix, c);
        };
      }
      case BaselineKind::iknn: {
        auto b = std::make_shared<IknnBaseline>(
            IknnBaseline::fit(corpus, f.iknn_lambda));
        return [b](const EvalInstance& i, const std::vector<int>& c) {
          return b->score(i.prefix, c);
        };
      }
      case BaselineKind::sknn: {
        auto b = std::make_shared<SknnBaseline>(
            SknnBaseline::fit(corpus, f.knn_neighbors));
        return [b](const EvalInstance& i, const std::vector<int>& c) {
          return b->score(i.prefix, c);
        };
      }
      case BaselineKind::vsknn: {
        auto b = std::make_shared<VsknnBaseline>(
            VsknnBaseline::fit(corpus, f.knn_neighbors));
        return [b](const EvalInstance& i, const std::vector<int>& c) {
          return b->score(i.prefix, c);
        };
      }
      case BaselineKind::cs: {
        TextEncoder encoder(model ? model->encoder().spec()
                                  : f.model.encoder_spec());
        encoder.prepare();
        auto b = std::make_shared<ContentBaseline>(
            ContentBaseline::fit(corpus, data, encoder, buffer_jobs));
        return [b](const EvalInstance& i, const std::vector<int>& c) {
          return b->score(i.prefix, c);
        };
      }
    }
    usage_error("unknown method: " + name);
  };

  nlohmann::json report;
  report["fingerprint"] = {
      {"seed", f.seed},
      {"n_eval", f.n_eval},
      {"sampling", eval_sampling_name(opts.sampling)},
      {"strategy", strategy_name(opts.strategy)},
      {"batch_size", f.batch},
      {"buffer_size", f.buffer},
      {"candidate_exclusion", "positive+prefix"},
      {"tie_rule", "score desc, job id asc"},
      {"cutoffs", f.cutoffs},
      {"n_instances", instances.size()},
      {"data_dir", f.data_dir}};
  if (model)
    report["fingerprint"]["model"] = {
        {"attention", attention_name(model->config().attention)},
        {"temperature", model->config().temperature},
        {"checkpoint", f.ck_path}};

  std::cout << std::left << std::setw(10) << "method" << std::right
            << std::setw(4) << "K" << std::setw(10) << "HR" << std::setw(10)
            << "MRR" << std::setw(10) << "NDCG" << "\n";
  nlohmann::json methods_json = nlohmann::json::object();
  nlohmann::json ranks_json = nlohmann::json::object();
  for (const std::string& name : f.methods) {
    ScoreFn fn = scorer_for(name);
    MethodReport rep = evaluate_method(name, instances, corpus.job_ids, fn,
                                       f.cutoffs, f.ex.exec(), f.ex.workers);
    nlohmann::json rows = nlohmann::json::array();
    for (const MetricRow& row : rep.rows) {
      rows.push_back(
          {{"K", row.K}, {"hr", row.hr}, {"mrr", row.mrr}, {"ndcg", row.ndcg}});
      std::cout << std::left << std::setw(10) << name << std::right
                << std::setw(4) << row.K << std::fixed << std::setprecision(4)
                << std::setw(10) << row.hr << std::setw(10) << row.mrr
                << std::setw(10) << row.ndcg << std::defaultfloat << "\n";
    }
    methods_json[name] = {{"rows", rows},
                          {"mean_rank", rep.mean_rank},
                          {"n_instances", rep.n_instances}};
    if (!f.ranks_path.empty()) ranks_json[name] = rep.ranks;
  }
  report["methods"] = methods_json;

  if (!f.out_path.empty())
    write_text_file(f.out_path, report.dump(2) + "\n");
  if (!f.ranks_path.empty())
    write_text_file(f.ranks_path, ranks_json.dump() + "\n");
}

// ---- recommend ----

struct RecommendFlags {
  std::string data_dir;
  std::string ck_path;
  std::string user_id;
  std::vector<std::string> session;
  int k = 10;
  ExecFlags ex;
};

void run_recommend(const RecommendFlags& f) {
  LoadedModel lm = load_model(f.data_dir, f.ck_path);
  JobVectorCache cache;
  cache.build(*lm.model, f.ex.exec(), f.ex.workers);
  std::vector<ScoredJob> top =
      recommend_topk(*lm.model, cache, f.user_id, f.session, f.k);
  for (const ScoredJob& s : top)
    std::cout << s.job_id << "\t" << std::setprecision(17) << s.score << "\n";
}

// ---- analyze-purity ----

struct PurityFlags {
  std::string data_dir;
  std::string ck_path;
  std::string label = "major";
  int k = 10;
  std::string out_path;
  ExecFlags ex;
};

void run_purity(const PurityFlags& f) {
  LoadedModel lm = load_model(f.data_dir, f.ck_path);
  JobVectorCache cache;
  cache.build(*lm.model, f.ex.exec(), f.ex.workers);

  // One point per training session: the seeker representation computed from
  // the session's cached job vectors, labeled by the seeker's metadata.
  std::vector<Tensor> points;
  std::vector<std::string> labels;
  points.reserve(lm.corpus.train_jobs.size());
  for (size_t s = 0; s < lm.corpus.train_jobs.size(); ++s) {
    std::vector<Tensor> prefix_vecs;
    prefix_vecs.reserve(lm.corpus.train_jobs[s].size());
    for (int j : lm.corpus.train_jobs[s]) prefix_vecs.push_back(cache.at(j));
    int user = lm.corpus.train_user[s];
    points.push_back(lm.model->seeker_vector_infer(user, prefix_vecs));
    const std::string& uid = lm.corpus.user_ids[user];
    auto it = lm.data.seekers.find(uid);
    const JobSeeker seeker = it == lm.data.seekers.end() ? JobSeeker{} : it->second;
    std::string value;
    if (f.label == "major") value = seeker.major;
    else if (f.label == "state") value = seeker.state;
    else if (f.label == "city") value = seeker.city;
    else if (f.label == "country") value = seeker.country;
    else if (f.label == "degree") value = seeker.degree;
    else usage_error("unknown label field: " + f.label);
    labels.push_back(value);
  }

  PurityReport rep = knn_label_purity(points, labels, f.label, f.k,
                                      f.ex.exec(), f.ex.workers);
  std::cout << "label " << rep.label_field << ", k=" << rep.k << ", "
            << rep.n_points << " points\n"
            << "agreement " << std::setprecision(6) << rep.agreement << "\n";
  for (const auto& [label, agree] : rep.per_label)
    std::cout << "  " << label << " " << agree << " ("
              << rep.label_counts.at(label) << " points)\n";

  if (!f.out_path.empty()) {
    nlohmann::json j = {{"label_field", rep.label_field},
                        {"k", rep.k},
                        {"n_points", rep.n_points},
                        {"agreement", rep.agreement},
                        {"per_label", rep.per_label},
                        {"label_counts", rep.label_counts}};
    write_text_file(f.out_path, j.dump(2) + "\n");
  }
}

// ---- export-embeddings ----

struct ExportFlags {
  std::string data_dir;
  std::string ck_path;
  std::string what = "jobs";
  std::string out_path;
  ExecFlags ex;
};

void run_export(const ExportFlags& f) {
  LoadedModel lm = load_model(f.data_dir, f.ck_path);
  JobVectorCache cache;
  cache.build(*lm.model, f.ex.exec(), f.ex.workers);
  std::ostringstream out;
  out << std::setprecision(17);
  if (f.what == "jobs") {
    for (int i = 0; i < cache.size(); ++i) {
      out << cache.id(i);
      const Tensor& v = cache.at(i);
      for (int64_t j = 0; j < v.numel(); ++j) out << ' ' << v[j];
      out << '\n';
    }
  } else if (f.what == "sessions") {
    for (size_t s = 0; s < lm.corpus.train_jobs.size(); ++s) {
      std::vector<Tensor> prefix_vecs;
      for (int j : lm.corpus.train_jobs[s]) prefix_vecs.push_back(cache.at(j));
      int user = lm.corpus.train_user[s];
      Tensor v = lm.model->seeker_vector_infer(user, prefix_vecs);
      out << 's' << s << ' ' << lm.corpus.user_ids[user];
      for (int64_t j = 0; j < v.numel(); ++j) out << ' ' << v[j];
      out << '\n';
    }
  } else {
    usage_error("unknown export target: " + f.what +
                " (expected jobs or sessions)");
  }
  write_text_file(f.out_path, out.str());
  std::cout << "wrote " << f.what << " embeddings to " << f.out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"panap: session-based next-application prediction toolkit"};
  app.require_subcommand(1);

  SynthFlags sy;
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic corpus with planted structure");
  synth->add_option("--out", sy.out_dir, "Output directory")->required();
  synth->add_option("--seed", sy.seed, "Random seed")->capture_default_str();
  synth->add_option("--topics", sy.cfg.n_topics, "Job topics")
      ->capture_default_str();
  synth->add_option("--states", sy.cfg.n_states, "States")
      ->capture_default_str();
  synth->add_option("--cities-per-state", sy.cfg.cities_per_state, "Cities per state")
      ->capture_default_str();
  synth->add_option("--jobs", sy.cfg.n_jobs, "Jobs")->capture_default_str();
  synth->add_option("--users", sy.cfg.n_users, "Users")->capture_default_str();
  synth->add_option("--sessions-per-user", sy.cfg.sessions_per_user,
                    "Sessions per user")
      ->capture_default_str();
  synth->add_option("--len-min", sy.cfg.session_len_min, "Min session length")
      ->capture_default_str();
  synth->add_option("--len-max", sy.cfg.session_len_max, "Max session length")
      ->capture_default_str();
  synth->add_option("--p-same-state", sy.cfg.p_same_state,
                    "P(job in the user's state)")
      ->capture_default_str();
  synth->add_option("--p-same-city", sy.cfg.p_same_city,
                    "P(job in the user's city | same state)")
      ->capture_default_str();
  synth->add_option("--p-topic", sy.cfg.p_topic_match,
                    "P(job matches the user's topic)")
      ->capture_default_str();
  synth->add_option("--topics-per-user", sy.cfg.topics_per_user,
                    "1 or 2 interests per user")
      ->capture_default_str();
  synth->add_option("--mix-weight", sy.cfg.topic_mixture_weight,
                    "Weight of the primary interest")
      ->capture_default_str();
  synth->add_option("--vocab-per-topic", sy.cfg.vocab_per_topic,
                    "Tokens per topic vocabulary")
      ->capture_default_str();
  synth->add_option("--noise-vocab", sy.cfg.noise_vocab, "Shared noise tokens")
      ->capture_default_str();
  synth->add_option("--noise-frac", sy.cfg.noise_fraction,
                    "Fraction of noise tokens per job")
      ->capture_default_str();
  synth->add_option("--tokens-per-job", sy.cfg.tokens_per_job,
                    "Tokens per job posting")
      ->capture_default_str();
  synth->add_option("--span-days", sy.cfg.span_days,
                    "Days the event log spans")
      ->capture_default_str();
  synth->callback([&sy]() { run_synth(sy); });

  PrepareFlags pr;
  auto* prepare = app.add_subcommand(
      "prepare", "Sessionize raw tables and write a training directory");
  prepare->add_option("--jobs", pr.cfg.jobs_path, "Jobs table")->required();
  prepare->add_option("--seekers", pr.cfg.seekers_path, "Seekers table")
      ->required();
  prepare
      ->add_option("--applications", pr.cfg.applications_path,
                   "Applications table")
      ->required();
  prepare->add_option("--out", pr.out_dir, "Output directory")->required();
  prepare->add_option("--delimiter", pr.delimiter, "Column delimiter")
      ->capture_default_str();
  prepare->add_option("--mode", pr.mode, "gap_split or per_user")
      ->capture_default_str();
  prepare->add_option("--gap", pr.cfg.gap_minutes, "Inactivity gap, minutes")
      ->capture_default_str();
  prepare->add_option("--test-days", pr.cfg.test_days, "Test window, days")
      ->capture_default_str();
  prepare->callback([&pr]() { run_prepare(pr); });

  TrainFlags tr;
  auto* train = app.add_subcommand("train", "Train the model");
  train->add_option("--data", tr.data_dir, "Prepared data directory")
      ->required();
  train->add_option("--out", tr.out_path, "Checkpoint path")->required();
  train->add_option("--loss-log", tr.loss_log, "Per-epoch loss file");
  train->add_option("--batch", tr.batch, "Mini-batch size")
      ->capture_default_str();
  train->add_option("--k-train", tr.k_train, "Training negatives per instance")
      ->capture_default_str();
  train->add_option("--epochs", tr.epochs, "Training epochs")
      ->capture_default_str();
  train->add_option("--lr", tr.lr, "Adam learning rate")
      ->capture_default_str();
  train->add_option("--strategy", tr.strategy, "Negative sampling: S1 or S2")
      ->capture_default_str();
  train->add_option("--buffer", tr.buffer, "Recent-jobs buffer size")
      ->capture_default_str();
  train->add_option("--seed", tr.seed, "Random seed")->capture_default_str();
  tr.model.add_to(train);
  tr.ex.add_to(train);
  train->callback([&tr]() { run_train(tr); });

  EvaluateFlags ev;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Rank the positive among sampled negatives per test prefix");
  evaluate->add_option("--data", ev.data_dir, "Prepared data directory")
      ->required();
  evaluate->add_option("--checkpoint", ev.ck_path, "Model checkpoint");
  evaluate
      ->add_option("--methods", ev.methods,
                   "Comma list: panap, pop, ar, cs, iknn, sknn, vsknn, "
                   "oracle, random")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_option("--k", ev.cutoffs, "Metric cutoffs, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_option("--n-eval", ev.n_eval, "Negatives per instance")
      ->capture_default_str();
  evaluate
      ->add_option("--eval-sampling", ev.sampling,
                   "mirror (training strategy) or uniform")
      ->capture_default_str();
  evaluate->add_option("--strategy", ev.strategy, "S1 or S2 when mirroring")
      ->capture_default_str();
  evaluate->add_option("--batch", ev.batch, "Eval batch size (in-batch tier)")
      ->capture_default_str();
  evaluate->add_option("--buffer", ev.buffer, "Recent-jobs buffer size")
      ->capture_default_str();
  evaluate->add_option("--seed", ev.seed, "Random seed")
      ->capture_default_str();
  evaluate->add_option("--iknn-lambda", ev.iknn_lambda, "IkNN damping")
      ->capture_default_str();
  evaluate
      ->add_option("--knn-neighbors", ev.knn_neighbors,
                   "SkNN/V-SkNN neighborhood size")
      ->capture_default_str();
  evaluate->add_option("--out", ev.out_path, "Report JSON path");
  evaluate->add_option("--dump-ranks", ev.ranks_path,
                       "Per-instance rank dump path");
  ev.model.add_to(evaluate);
  ev.ex.add_to(evaluate);
  evaluate->callback([&ev]() { run_evaluate(ev); });

  RecommendFlags rc;
  auto* recommend =
      app.add_subcommand("recommend", "Rank jobs for a user and session");
  recommend->add_option("--data", rc.data_dir, "Prepared data directory")
      ->required();
  recommend->add_option("--checkpoint", rc.ck_path, "Model checkpoint")
      ->required();
  recommend->add_option("--user", rc.user_id, "User id (unknown ids cold-start)")
      ->required();
  recommend
      ->add_option("--session", rc.session,
                   "Comma list of applied job ids, oldest first")
      ->delimiter(',')
      ->required();
  recommend->add_option("--k", rc.k, "List length")->capture_default_str();
  rc.ex.add_to(recommend);
  recommend->callback([&rc]() { run_recommend(rc); });

  PurityFlags pu;
  auto* purity = app.add_subcommand(
      "analyze-purity",
      "k-NN label agreement of the session representations");
  purity->add_option("--data", pu.data_dir, "Prepared data directory")
      ->required();
  purity->add_option("--checkpoint", pu.ck_path, "Model checkpoint")
      ->required();
  purity->add_option("--label", pu.label,
                     "major, state, city, country, or degree")
      ->capture_default_str();
  purity->add_option("--knn", pu.k, "Neighborhood size")->capture_default_str();
  purity->add_option("--out", pu.out_path, "Report JSON path");
  pu.ex.add_to(purity);
  purity->callback([&pu]() { run_purity(pu); });

  ExportFlags ex;
  auto* exportc = app.add_subcommand("export-embeddings",
                                     "Dump job or session vectors as text");
  exportc->add_option("--data", ex.data_dir, "Prepared data directory")
      ->required();
  exportc->add_option("--checkpoint", ex.ck_path, "Model checkpoint")
      ->required();
  exportc->add_option("--what", ex.what, "jobs or sessions")
      ->capture_default_str();
  exportc->add_option("--out", ex.out_path, "Output path")->required();
  ex.ex.add_to(exportc);
  exportc->callback([&ex]() { run_export(ex); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[usage]: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
