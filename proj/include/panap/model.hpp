#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "panap/corpus.hpp"
#include "panap/parallel.hpp"
#include "panap/params.hpp"
#include "panap/tape.hpp"
#include "panap/text_encoder.hpp"
#include "panap/vocab.hpp"

namespace panap {

enum class AttentionMode { personalized, vanilla, average };

const char* attention_name(AttentionMode m);
AttentionMode parse_attention(const std::string& s);

struct FeatureFlags {
  bool use_content = true;
  bool use_job_meta = true;
  bool use_seeker_meta = true;
  bool use_job_id_embedding = false;  // the Only_JobID-style ablation path
};

struct ModelConfig {
  int d = 300;    // text vector dim
  int d_J = 300;  // job vector dim
  int d_U = 300;  // seeker vector dim, must equal d_J
  int d_s = 100;  // identifier embedding dim
  int d_q = 100;  // attention query dim
  int meta_embed_dim = 32;
  int onehot_cardinality_cap = 10;  // vocab size incl. UNKNOWN
  int fc_hidden = 0;                // 0 means "same as the tower's output dim"
  AttentionMode attention = AttentionMode::personalized;
  FeatureFlags flags;
  double dropout = 0.2;
  double l2 = 1e-4;
  double temperature = 1.0;
  double leaky_slope = 0.01;

  void validate() const;
};

// One categorical metadata field. Small vocabularies become fixed one-hot
// rows; larger ones get a trainable embedding matrix.
struct MetaField {
  std::string name;
  Vocab vocab;
  bool one_hot = false;
  int dim = 0;
  std::string slot;  // parameter slot, empty for one-hot fields
};

class PanapModel {
 public:
  // Builds vocabularies from the training entities in `corpus`, initializes
  // parameters, and precomputes text vectors for every indexed job.
  PanapModel(const Dataset& data, const CorpusIndex& corpus,
             const ModelConfig& config, const EncoderSpec& encoder_spec,
             uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  uint64_t init_seed() const { return seed_; }
  const ParameterStore& store() const { return store_; }
  ParameterStore& store_mut() { return store_; }
  const std::vector<std::string>& job_ids() const { return job_ids_; }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<MetaField>& job_fields() const { return job_fields_; }
  const std::vector<MetaField>& seeker_fields() const { return seeker_fields_; }
  const TextEncoder& encoder() const { return encoder_; }
  int n_jobs() const { return static_cast<int>(job_ids_.size()); }
  int n_users() const { return static_cast<int>(user_ids_.size()); }

  // ---- forward passes (tape-recorded; pass dropout_rng=nullptr at
  // inference or when dropout is 0) ----

  // Concatenated metadata embedding in fixed field order; `values` holds one
  // vocab index per field.
  ad::Var embed_metadata(ad::Tape& t, const std::vector<MetaField>& fields,
                         const std::vector<int>& values) const;

  ad::Var job_content_vector(ad::Tape& t, int job, Rng* dropout_rng) const;

  // Cold path: a job absent from the index, scored from content and metadata
  // alone (the identifier contribution, when enabled, is zero).
  ad::Var job_content_vector_cold(ad::Tape& t, const Job& job) const;

  // p_u for the personalized mode. Unknown users ride on row 0.
  ad::Var preference_query(ad::Tape& t, int user) const;

  // Attention weights over the session's job vectors under the configured
  // mode; sums to 1.
  ad::Var attention_weights(ad::Tape& t, const std::vector<ad::Var>& session_vs,
                            int user) const;

  ad::Var seeker_vector(ad::Tape& t, int user,
                        const std::vector<ad::Var>& session_vs,
                        Rng* dropout_rng) const;

  // -log P(positive | user, prefix) with the softmax over positive plus
  // negatives at the configured temperature.
  ad::Var instance_loss(ad::Tape& t, int user, const std::vector<int>& prefix,
                        int positive, const std::vector<int>& negatives,
                        Rng* dropout_rng) const;

  // Inference-time v_u computed from cached job vectors.
  Tensor seeker_vector_infer(int user, const std::vector<Tensor>& prefix_vecs) const;

  int user_index(const std::string& user_id) const;
  int meta_index(const MetaField& field, const std::string& value) const {
    return field.vocab.index_of(value);
  }
  const std::vector<int>& job_meta(int job) const { return job_meta_[job]; }
  const std::vector<int>& user_meta(int user) const { return user_meta_[user]; }
  const Tensor& job_text(int job) const { return job_text_[job]; }

 private:
  ad::Var fused_tower(ad::Tape& t, ad::Var x, const std::string& prefix,
                      Rng* dropout_rng) const;
  ad::Var maybe_dropout(ad::Tape& t, ad::Var x, Rng* dropout_rng) const;
  ad::Var job_tower_from_parts(ad::Tape& t, ad::Var text, ad::Var meta,
                               ad::Var id_embed, Rng* dropout_rng) const;

  ModelConfig cfg_;
  uint64_t seed_ = 0;
  TextEncoder encoder_;
  ParameterStore store_;

  std::vector<std::string> job_ids_;
  std::vector<std::string> user_ids_;
  std::unordered_map<std::string, int> user_of_;

  std::vector<MetaField> job_fields_;    // city, state, country
  std::vector<MetaField> seeker_fields_; // city, state, country, degree, major
  std::vector<Tensor> job_text_;         // h_j per indexed job
  std::vector<std::vector<int>> job_meta_;
  std::vector<std::vector<int>> user_meta_;
};

// Job vectors for ranking, index-aligned with the model's job list; cold
// inserts append. Rebuild after any parameter update.
class JobVectorCache {
 public:
  void build(const PanapModel& model, Exec exec, int workers);

  // Adds (or refreshes) a job by content+metadata; returns its index.
  int insert(const PanapModel& model, const Job& job);

  const Tensor& at(int idx) const { return vecs_[idx]; }
  const std::string& id(int idx) const { return ids_[idx]; }
  int index_of(const std::string& job_id) const;
  int size() const { return static_cast<int>(vecs_.size()); }

 private:
  std::vector<Tensor> vecs_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, int> index_;
};

struct ScoredJob {
  std::string job_id;
  double score = 0.0;
};

// Cosine scores at the model temperature for each cached candidate index.
std::vector<double> score_candidates(const PanapModel& model, const Tensor& v_u,
                                     const JobVectorCache& cache,
                                     const std::vector<int>& candidates);

// Descending score, ties by ascending job id. Candidate default: every
// cached job except the prefix.
std::vector<ScoredJob> recommend_topk(
    const PanapModel& model, const JobVectorCache& cache,
    const std::string& user_id, const std::vector<std::string>& prefix_ids,
    int K, const std::vector<std::string>* candidates = nullptr);

}  // namespace panap
