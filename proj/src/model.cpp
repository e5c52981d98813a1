#include "panap/model.hpp"

#include <algorithm>
#include <unordered_set>

#include "panap/common.hpp"

namespace panap {

const char* attention_name(AttentionMode m) {
  switch (m) {
    case AttentionMode::personalized: return "personalized";
    case AttentionMode::vanilla: return "vanilla";
    case AttentionMode::average: return "average";
  }
  return "?";
}

AttentionMode parse_attention(const std::string& s) {
  if (s == "personalized") return AttentionMode::personalized;
  if (s == "vanilla") return AttentionMode::vanilla;
  if (s == "average") return AttentionMode::average;
  usage_error("unknown attention mode: " + s +
              " (expected personalized, vanilla, or average)");
}

void ModelConfig::validate() const {
  if (d < 1 || d_J < 1 || d_U < 1 || d_s < 1 || d_q < 1 || meta_embed_dim < 1)
    usage_error("model dimensions must be positive");
  if (d_U != d_J)
    usage_error("d_U must equal d_J (cosine compares seeker and job vectors)");
  if (dropout < 0.0 || dropout >= 1.0)
    usage_error("dropout must be in [0,1)");
  if (temperature <= 0.0) usage_error("temperature must be positive");
  if (!flags.use_content && !flags.use_job_meta && !flags.use_job_id_embedding)
    usage_error("job tower has no inputs: enable content, metadata, or the "
                "identifier embedding");
}

namespace {

MetaField make_field(const std::string& owner, const std::string& name,
                     std::vector<std::string> values, int cap, int embed_dim) {
  MetaField f;
  f.name = name;
  f.vocab = Vocab::from_values(values);
  f.one_hot = f.vocab.size() <= cap;
  f.dim = f.one_hot ? f.vocab.size() : embed_dim;
  if (!f.one_hot) f.slot = owner + ".meta." + name;
  return f;
}

}  // namespace

PanapModel::PanapModel(const Dataset& data, const CorpusIndex& corpus,
                       const ModelConfig& config,
                       const EncoderSpec& encoder_spec, uint64_t seed)
    : cfg_(config), seed_(seed), encoder_(encoder_spec) {
  cfg_.validate();
  if (encoder_spec.d != cfg_.d)
    usage_error("encoder dimension " + std::to_string(encoder_spec.d) +
                " != model text dimension " + std::to_string(cfg_.d));
  encoder_.prepare();

  job_ids_ = corpus.job_ids;
  user_ids_ = corpus.user_ids;
  for (size_t i = 0; i < user_ids_.size(); ++i)
    user_of_.emplace(user_ids_[i], static_cast<int>(i));

  // Vocabularies come from the training entities only; anything else lands
  // on the UNKNOWN row at lookup time.
  std::vector<std::string> cities, states, countries;
  for (const auto& id : job_ids_) {
    const Job& j = data.catalog.at(id);
    cities.push_back(j.city);
    states.push_back(j.state);
    countries.push_back(j.country);
  }
  job_fields_.push_back(make_field("job", "city", cities,
                                   cfg_.onehot_cardinality_cap,
                                   cfg_.meta_embed_dim));
  job_fields_.push_back(make_field("job", "state", states,
                                   cfg_.onehot_cardinality_cap,
                                   cfg_.meta_embed_dim));
  job_fields_.push_back(make_field("job", "country", countries,
                                   cfg_.onehot_cardinality_cap,
                                   cfg_.meta_embed_dim));

  std::vector<std::string> ucities, ustates, ucountries, udegrees, umajors;
  for (size_t i = 1; i < user_ids_.size(); ++i) {
    auto it = data.seekers.find(user_ids_[i]);
    const JobSeeker s = it == data.seekers.end() ? JobSeeker{} : it->second;
    ucities.push_back(s.city);
    ustates.push_back(s.state);
    ucountries.push_back(s.country);
    udegrees.push_back(s.degree);
    umajors.push_back(s.major);
  }
  seeker_fields_.push_back(make_field("seeker", "city", ucities,
                                      cfg_.onehot_cardinality_cap,
                                      cfg_.meta_embed_dim));
  seeker_fields_.push_back(make_field("seeker", "state", ustates,
                                      cfg_.onehot_cardinality_cap,
                                      cfg_.meta_embed_dim));
  seeker_fields_.push_back(make_field("seeker", "country", ucountries,
                                      cfg_.onehot_cardinality_cap,
                                      cfg_.meta_embed_dim));
  seeker_fields_.push_back(make_field("seeker", "degree", udegrees,
                                      cfg_.onehot_cardinality_cap,
                                      cfg_.meta_embed_dim));
  seeker_fields_.push_back(make_field("seeker", "major", umajors,
                                      cfg_.onehot_cardinality_cap,
                                      cfg_.meta_embed_dim));

  // Interned metadata rows and text vectors.
  job_meta_.resize(job_ids_.size());
  job_text_.resize(job_ids_.size());
  for (size_t i = 0; i < job_ids_.size(); ++i) {
    const Job& j = data.catalog.at(job_ids_[i]);
    job_meta_[i] = {job_fields_[0].vocab.index_of(j.city),
                    job_fields_[1].vocab.index_of(j.state),
                    job_fields_[2].vocab.index_of(j.country)};
    job_text_[i] = encoder_.encode(j.job_id, j.tokens);
  }
  user_meta_.resize(user_ids_.size());
  user_meta_[0] = {0, 0, 0, 0, 0};  // the UNKNOWN user
  for (size_t i = 1; i < user_ids_.size(); ++i) {
    auto it = data.seekers.find(user_ids_[i]);
    const JobSeeker s = it == data.seekers.end() ? JobSeeker{} : it->second;
    user_meta_[i] = {seeker_fields_[0].vocab.index_of(s.city),
                     seeker_fields_[1].vocab.index_of(s.state),
                     seeker_fields_[2].vocab.index_of(s.country),
                     seeker_fields_[3].vocab.index_of(s.degree),
                     seeker_fields_[4].vocab.index_of(s.major)};
  }

  // Parameters, in a fixed creation order.
  Rng init = Rng(seed).fork("init");
  int job_in = (cfg_.flags.use_content ? cfg_.d : 0) +
               (cfg_.flags.use_job_id_embedding ? cfg_.d_s : 0);
  if (cfg_.flags.use_job_meta)
    for (const auto& f : job_fields_) job_in += f.dim;
  int job_hidden = cfg_.fc_hidden > 0 ? cfg_.fc_hidden : cfg_.d_J;
  store_.add_dense("job.fc1.w", job_hidden, job_in, init);
  store_.add_bias("job.fc1.b", job_hidden);
  store_.add_dense("job.fc2.w", cfg_.d_J, job_hidden, init);
  store_.add_bias("job.fc2.b", cfg_.d_J);
  if (cfg_.flags.use_job_meta)
    for (const auto& f : job_fields_)
      if (!f.one_hot)
        store_.add_embedding(f.slot, f.vocab.size(), cfg_.meta_embed_dim, init);
  if (cfg_.flags.use_job_id_embedding)
    store_.add_embedding("job.id", n_jobs(), cfg_.d_s, init);

  int seeker_in = cfg_.d_J;
  if (cfg_.flags.use_seeker_meta)
    for (const auto& f : seeker_fields_) seeker_in += f.dim;
  int seeker_hidden = cfg_.fc_hidden > 0 ? cfg_.fc_hidden : cfg_.d_U;
  store_.add_dense("seeker.fc1.w", seeker_hidden, seeker_in, init);
  store_.add_bias("seeker.fc1.b", seeker_hidden);
  store_.add_dense("seeker.fc2.w", cfg_.d_U, seeker_hidden, init);
  store_.add_bias("seeker.fc2.b", cfg_.d_U);
  if (cfg_.flags.use_seeker_meta)
    for (const auto& f : seeker_fields_)
      if (!f.one_hot)
        store_.add_embedding(f.slot, f.vocab.size(), cfg_.meta_embed_dim, init);

  if (cfg_.attention == AttentionMode::personalized) {
    store_.add_embedding("seeker.id", n_users(), cfg_.d_s, init);
    store_.add_dense("attn.query.w", cfg_.d_q, cfg_.d_s, init);
    store_.add_bias("attn.query.b", cfg_.d_q);
    store_.add_dense("attn.proj.w", cfg_.d_J, cfg_.d_q, init);
    store_.add_bias("attn.proj.b", cfg_.d_J);
  } else if (cfg_.attention == AttentionMode::vanilla) {
    store_.add_vector("attn.global_query", cfg_.d_J, init);
  }
}

int PanapModel::user_index(const std::string& user_id) const {
  auto it = user_of_.find(user_id);
  return it == user_of_.end() ? 0 : it->second;
}

ad::Var PanapModel::maybe_dropout(ad::Tape& t, ad::Var x,
                                  Rng* dropout_rng) const {
  if (!dropout_rng || cfg_.dropout <= 0.0) return x;
  return t.apply_mask(
      x, ad::dropout_mask(t.value(x).numel(), cfg_.dropout, *dropout_rng));
}

ad::Var PanapModel::fused_tower(ad::Tape& t, ad::Var x,
                                const std::string& prefix,
                                Rng* dropout_rng) const {
  x = maybe_dropout(t, x, dropout_rng);
  ad::Var h = t.dense(x, t.param(store_, prefix + ".fc1.w"),
                      t.param(store_, prefix + ".fc1.b"),
                      ad::Activation::leaky_relu, cfg_.leaky_slope);
  h = maybe_dropout(t, h, dropout_rng);
  return t.dense(h, t.param(store_, prefix + ".fc2.w"),
                 t.param(store_, prefix + ".fc2.b"), ad::Activation::tanh);
}

ad::Var PanapModel::embed_metadata(ad::Tape& t,
                                   const std::vector<MetaField>& fields,
                                   const std::vector<int>& values) const {
  if (fields.size() != values.size())
    usage_error("embed_metadata: field/value count mismatch");
  std::vector<ad::Var> parts;
  parts.reserve(fields.size());
  for (size_t i = 0; i < fields.size(); ++i) {
    const MetaField& f = fields[i];
    int idx = values[i];
    if (idx < 0 || idx >= f.vocab.size())
      data_error("embed_metadata: index " + std::to_string(idx) +
                 " out of range for field " + f.name);
    if (f.one_hot) {
      Tensor onehot = Tensor::vector(f.dim);
      onehot[idx] = 1.0;
      parts.push_back(t.constant(std::move(onehot)));
    } else {
      parts.push_back(t.param_row(store_, f.slot, idx));
    }
  }
  return parts.size() == 1 ? parts[0] : t.concat(parts);
}

ad::Var PanapModel::job_tower_from_parts(ad::Tape& t, ad::Var text,
                                         ad::Var meta, ad::Var id_embed,
                                         Rng* dropout_rng) const {
  std::vector<ad::Var> parts;
  if (cfg_.flags.use_content) parts.push_back(text);
  if (cfg_.flags.use_job_meta) parts.push_back(meta);
  if (cfg_.flags.use_job_id_embedding) parts.push_back(id_embed);
  ad::Var x = parts.size() == 1 ? parts[0] : t.concat(parts);
  return fused_tower(t, x, "job", dropout_rng);
}

ad::Var PanapModel::job_content_vector(ad::Tape& t, int job,
                                       Rng* dropout_rng) const {
  if (job < 0 || job >= n_jobs())
    usage_error("job_content_vector: bad job index " + std::to_string(job));
  ad::Var text{-1}, meta{-1}, id_embed{-1};
  if (cfg_.flags.use_content) text = t.constant(job_text_[job]);
  if (cfg_.flags.use_job_meta)
    meta = embed_metadata(t, job_fields_, job_meta_[job]);
  if (cfg_.flags.use_job_id_embedding)
    id_embed = t.param_row(store_, "job.id", job);
  return job_tower_from_parts(t, text, meta, id_embed, dropout_rng);
}

ad::Var PanapModel::job_content_vector_cold(ad::Tape& t, const Job& job) const {
  ad::Var text{-1}, meta{-1}, id_embed{-1};
  if (cfg_.flags.use_content)
    text = t.constant(encoder_.encode(job.job_id, job.tokens));
  if (cfg_.flags.use_job_meta) {
    std::vector<int> values = {job_fields_[0].vocab.index_of(job.city),
                               job_fields_[1].vocab.index_of(job.state),
                               job_fields_[2].vocab.index_of(job.country)};
    meta = embed_metadata(t, job_fields_, values);
  }
  if (cfg_.flags.use_job_id_embedding)
    id_embed = t.constant(Tensor::vector(cfg_.d_s));  // no learned identifier
  return job_tower_from_parts(t, text, meta, id_embed, nullptr);
}

ad::Var PanapModel::preference_query(ad::Tape& t, int user) const {
  if (user < 0 || user >= n_users())
    usage_error("preference_query: bad user index " + std::to_string(user));
  ad::Var e = t.param_row(store_, "seeker.id", user);
  ad::Var q = t.dense(e, t.param(store_, "attn.query.w"),
                      t.param(store_, "attn.query.b"), ad::Activation::relu);
  return t.dense(q, t.param(store_, "attn.proj.w"),
                 t.param(store_, "attn.proj.b"), ad::Activation::tanh);
}

ad::Var PanapModel::attention_weights(ad::Tape& t,
                                      const std::vector<ad::Var>& session_vs,
                                      int user) const {
  if (session_vs.empty()) usage_error("attention_weights: empty session");
  if (cfg_.attention == AttentionMode::average) {
    Tensor alpha = Tensor::vector(static_cast<int64_t>(session_vs.size()));
    for (double& a : alpha.v) a = 1.0 / static_cast<double>(session_vs.size());
    return t.constant(std::move(alpha));
  }
  ad::Var p = cfg_.attention == AttentionMode::vanilla
                  ? t.param(store_, "attn.global_query")
                  : preference_query(t, user);
  std::vector<ad::Var> logits;
  logits.reserve(session_vs.size());
  for (ad::Var v : session_vs) logits.push_back(t.dot(v, p));
  return t.softmax(t.stack_scalars(logits));
}

ad::Var PanapModel::seeker_vector(ad::Tape& t, int user,
                                  const std::vector<ad::Var>& session_vs,
                                  Rng* dropout_rng) const {
  if (session_vs.empty()) usage_error("seeker_vector: empty session");
  ad::Var alpha = attention_weights(t, session_vs, user);
  ad::Var h_u = t.weighted_sum(alpha, session_vs);
  ad::Var x = h_u;
  if (cfg_.flags.use_seeker_meta) {
    ad::Var meta = embed_metadata(t, seeker_fields_, user_meta_[user]);
    x = t.concat({h_u, meta});
  }
  return fused_tower(t, x, "seeker", dropout_rng);
}

ad::Var PanapModel::instance_loss(ad::Tape& t, int user,
                                  const std::vector<int>& prefix, int positive,
                                  const std::vector<int>& negatives,
                                  Rng* dropout_rng) const {
  if (prefix.empty()) usage_error("instance_loss: empty prefix");
  if (negatives.empty()) usage_error("instance_loss: no negatives");
  for (int n : negatives)
    if (n == positive)
      data_error("instance_loss: positive " + job_ids_[positive] +
                 " appears among its negatives");

  std::vector<ad::Var> session_vs;
  session_vs.reserve(prefix.size());
  for (int j : prefix)
    session_vs.push_back(job_content_vector(t, j, dropout_rng));
  ad::Var v_u = seeker_vector(t, user, session_vs, dropout_rng);

  std::vector<ad::Var> sims;
  sims.reserve(1 + negatives.size());
  sims.push_back(t.cosine(v_u, job_content_vector(t, positive, dropout_rng)));
  for (int n : negatives)
    sims.push_back(t.cosine(v_u, job_content_vector(t, n, dropout_rng)));
  ad::Var scores = t.scale(t.stack_scalars(sims), cfg_.temperature);
  return t.neg_log_softmax_at(scores, 0);
}

Tensor PanapModel::seeker_vector_infer(
    int user, const std::vector<Tensor>& prefix_vecs) const {
  ad::Tape t;
  std::vector<ad::Var> vs;
  vs.reserve(prefix_vecs.size());
  for (const Tensor& v : prefix_vecs) vs.push_back(t.constant(v));
  return t.value(seeker_vector(t, user, vs, nullptr));
}

void JobVectorCache::build(const PanapModel& model, Exec exec, int workers) {
  int n = model.n_jobs();
  ids_.assign(model.job_ids().begin(), model.job_ids().end());
  vecs_.assign(n, Tensor());
  index_.clear();
  for (int i = 0; i < n; ++i) index_.emplace(ids_[i], i);
  parallel_for(exec, workers, n, [&](int64_t i) {
    ad::Tape t;
    vecs_[i] = t.value(model.job_content_vector(t, static_cast<int>(i), nullptr));
  });
}

int JobVectorCache::insert(const PanapModel& model, const Job& job) {
  ad::Tape t;
  Tensor v = t.value(model.job_content_vector_cold(t, job));
  auto it = index_.find(job.job_id);
  if (it != index_.end()) {
    vecs_[it->second] = std::move(v);
    return it->second;
  }
  int idx = static_cast<int>(vecs_.size());
  vecs_.push_back(std::move(v));
  ids_.push_back(job.job_id);
  index_.emplace(job.job_id, idx);
  return idx;
}

int JobVectorCache::index_of(const std::string& job_id) const {
  auto it = index_.find(job_id);
  return it == index_.end() ? -1 : it->second;
}

std::vector<double> score_candidates(const PanapModel& model, const Tensor& v_u,
                                     const JobVectorCache& cache,
                                     const std::vector<int>& candidates) {
  if (candidates.empty()) usage_error("score_candidates: empty candidate set");
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int c : candidates)
    out.push_back(cosine_value(v_u, cache.at(c)) * model.config().temperature);
  return out;
}

std::vector<ScoredJob> recommend_topk(
    const PanapModel& model, const JobVectorCache& cache,
    const std::string& user_id, const std::vector<std::string>& prefix_ids,
    int K, const std::vector<std::string>* candidates) {
  if (K < 1) usage_error("recommend_topk: K must be positive");
  if (prefix_ids.empty()) usage_error("recommend_topk: empty session prefix");

  std::vector<Tensor> prefix_vecs;
  std::unordered_set<std::string> prefix_set(prefix_ids.begin(),
                                             prefix_ids.end());
  for (const auto& id : prefix_ids) {
    int idx = cache.index_of(id);
    if (idx < 0) data_error("session job not in catalog: " + id);
    prefix_vecs.push_back(cache.at(idx));
  }
  Tensor v_u =
      model.seeker_vector_infer(model.user_index(user_id), prefix_vecs);

  std::vector<ScoredJob> scored;
  auto consider = [&](int idx) {
    const std::string& id = cache.id(idx);
    if (prefix_set.count(id)) return;
    scored.push_back(
        {id, cosine_value(v_u, cache.at(idx)) * model.config().temperature});
  };
  if (candidates) {
    for (const auto& id : *candidates) {
      int idx = cache.index_of(id);
      if (idx < 0) data_error("candidate job not in catalog: " + id);
      consider(idx);
    }
  } else {
    for (int i = 0; i < cache.size(); ++i) consider(i);
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredJob& a, const ScoredJob& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.job_id < b.job_id;
  });
  if (static_cast<int>(scored.size()) > K) scored.resize(K);
  return scored;
}

}  // namespace panap
