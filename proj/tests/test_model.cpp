#include <cmath>
#include <set>

#include <doctest.h>

#include "panap/common.hpp"
#include "panap/corpus.hpp"
#include "panap/gradcheck.hpp"
#include "panap/model.hpp"

using namespace panap;

namespace {

Session make_session(const std::string& user,
                     const std::vector<std::string>& jobs,
                     int64_t start = 1000) {
  Session s;
  s.user_id = user;
  for (size_t i = 0; i < jobs.size(); ++i)
    s.events.push_back({user, jobs[i], start + static_cast<int64_t>(i) * 60});
  return s;
}

Dataset model_dataset() {
  Dataset d;
  const char* states[] = {"CA", "TX"};
  for (int i = 0; i < 6; ++i) {
    Job j;
    j.job_id = "j" + std::to_string(i);
    j.tokens = {"skill" + std::to_string(i), "common"};
    j.city = "city" + std::to_string(i % 3);
    j.state = states[i % 2];
    j.country = "US";
    d.catalog.emplace(j.job_id, j);
  }
  JobSeeker a;
  a.user_id = "uA";
  a.city = "city0";
  a.state = "CA";
  a.country = "US";
  a.degree = "BS";
  a.major = "nursing";
  JobSeeker b = a;
  b.user_id = "uB";
  b.state = "TX";
  b.major = "welding";
  d.seekers.emplace("uA", a);
  d.seekers.emplace("uB", b);
  d.train_sessions = {make_session("uA", {"j0", "j2", "j4"}, 1000),
                      make_session("uB", {"j1", "j3", "j5"}, 2000)};
  d.test_sessions = {make_session("uA", {"j2", "j1"}, 9000)};
  return d;
}

ModelConfig small_config(AttentionMode mode) {
  ModelConfig c;
  c.d = 8;
  c.d_J = 6;
  c.d_U = 6;
  c.d_s = 4;
  c.d_q = 3;
  c.attention = mode;
  c.dropout = 0.0;
  c.temperature = 2.0;
  return c;
}

EncoderSpec small_encoder() {
  EncoderSpec spec;
  spec.d = 8;
  return spec;
}

struct Fixture {
  Dataset data = model_dataset();
  CorpusIndex corpus = build_corpus_index(data);
};

}  // namespace

TEST_CASE("config validation rejects bad combinations") {
  ModelConfig c = small_config(AttentionMode::personalized);
  c.d_U = 5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config(AttentionMode::personalized);
  c.dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config(AttentionMode::personalized);
  c.temperature = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small_config(AttentionMode::personalized);
  c.flags.use_content = false;
  c.flags.use_job_meta = false;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("parameter slots depend on the attention mode") {
  Fixture f;
  PanapModel pers(f.data, f.corpus, small_config(AttentionMode::personalized),
                  small_encoder(), 1);
  CHECK(pers.store().has("seeker.id"));
  CHECK(pers.store().has("attn.query.w"));
  CHECK(pers.store().has("attn.proj.w"));
  CHECK_FALSE(pers.store().has("attn.global_query"));
  CHECK_FALSE(pers.store().has("job.id"));

  PanapModel van(f.data, f.corpus, small_config(AttentionMode::vanilla),
                 small_encoder(), 1);
  CHECK(van.store().has("attn.global_query"));
  CHECK_FALSE(van.store().has("seeker.id"));

  PanapModel avg(f.data, f.corpus, small_config(AttentionMode::average),
                 small_encoder(), 1);
  CHECK_FALSE(avg.store().has("attn.global_query"));
  CHECK_FALSE(avg.store().has("seeker.id"));

  ModelConfig with_id = small_config(AttentionMode::average);
  with_id.flags.use_job_id_embedding = true;
  PanapModel mid(f.data, f.corpus, with_id, small_encoder(), 1);
  CHECK(mid.store().has("job.id"));
  CHECK(mid.store().value("job.id").rows() == 6);
}

TEST_CASE("small metadata vocabularies stay one-hot; the cap forces rows") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::average),
               small_encoder(), 1);
  for (const MetaField& field : m.job_fields()) {
    CHECK(field.one_hot);
    CHECK(field.dim == field.vocab.size());
  }

  ModelConfig tight = small_config(AttentionMode::average);
  tight.onehot_cardinality_cap = 1;
  tight.meta_embed_dim = 5;
  PanapModel e(f.data, f.corpus, tight, small_encoder(), 1);
  for (const MetaField& field : e.job_fields()) {
    CHECK_FALSE(field.one_hot);
    CHECK(field.dim == 5);
    CHECK(e.store().has(field.slot));
    CHECK(e.store().value(field.slot).rows() == field.vocab.size());
  }
}

TEST_CASE("same seed reproduces the init; another seed does not") {
  Fixture f;
  ModelConfig c = small_config(AttentionMode::personalized);
  PanapModel m1(f.data, f.corpus, c, small_encoder(), 42);
  PanapModel m2(f.data, f.corpus, c, small_encoder(), 42);
  PanapModel m3(f.data, f.corpus, c, small_encoder(), 43);
  CHECK(m1.store().value("job.fc1.w").v == m2.store().value("job.fc1.w").v);
  CHECK(m1.store().value("job.fc1.w").v != m3.store().value("job.fc1.w").v);
}

TEST_CASE("attention weights sum to 1; average mode is uniform") {
  Fixture f;
  for (AttentionMode mode : {AttentionMode::personalized,
                             AttentionMode::vanilla, AttentionMode::average}) {
    PanapModel m(f.data, f.corpus, small_config(mode), small_encoder(), 3);
    ad::Tape t;
    std::vector<ad::Var> vs;
    for (int j : {0, 1, 2}) vs.push_back(m.job_content_vector(t, j, nullptr));
    ad::Var alpha = m.attention_weights(t, vs, 1);
    const Tensor& a = t.value(alpha);
    double sum = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) sum += a[i];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    if (mode == AttentionMode::average)
      for (int64_t i = 0; i < a.numel(); ++i)
        CHECK(a[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
}

TEST_CASE("personalized attention differs across users") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::personalized),
               small_encoder(), 3);
  ad::Tape t;
  std::vector<ad::Var> vs;
  for (int j : {0, 1, 2}) vs.push_back(m.job_content_vector(t, j, nullptr));
  Tensor a1 = t.value(m.attention_weights(t, vs, 1));
  Tensor a2 = t.value(m.attention_weights(t, vs, 2));
  CHECK(a1.v != a2.v);
}

TEST_CASE("instance_loss input validation") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::average),
               small_encoder(), 3);
  ad::Tape t;
  CHECK_THROWS_AS(m.instance_loss(t, 1, {}, 2, {3}, nullptr), Error);
  CHECK_THROWS_AS(m.instance_loss(t, 1, {0}, 2, {}, nullptr), Error);
  CHECK_THROWS_WITH_AS(m.instance_loss(t, 1, {0}, 2, {3, 2}, nullptr),
                       doctest::Contains("negatives"), Error);
}

TEST_CASE("gradient check on the full loss, every attention mode") {
  Fixture f;
  for (AttentionMode mode : {AttentionMode::personalized,
                             AttentionMode::vanilla, AttentionMode::average}) {
    CAPTURE(attention_name(mode));
    PanapModel m(f.data, f.corpus, small_config(mode), small_encoder(), 7);
    LossFn loss_fn = [&](ParameterStore& store, GradMap* grads) {
      ad::Tape t;
      ad::Var loss = m.instance_loss(t, 1, {0, 1}, 2, {3, 4}, nullptr);
      double value = t.value(loss)[0];
      if (grads) *grads = ad::reverse_accumulate(t, loss, store);
      return value;
    };
    double worst = finite_difference_check(loss_fn, m.store_mut());
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("gradient check with the job identifier embedding enabled") {
  Fixture f;
  ModelConfig c = small_config(AttentionMode::personalized);
  c.flags.use_job_id_embedding = true;
  PanapModel m(f.data, f.corpus, c, small_encoder(), 9);
  LossFn loss_fn = [&](ParameterStore& store, GradMap* grads) {
    ad::Tape t;
    ad::Var loss = m.instance_loss(t, 2, {1, 3}, 5, {0, 2}, nullptr);
    double value = t.value(loss)[0];
    if (grads) *grads = ad::reverse_accumulate(t, loss, store);
    return value;
  };
  CHECK(finite_difference_check(loss_fn, m.store_mut()) < 1e-4);
}

TEST_CASE("dropout draws change the loss; matched seeds agree") {
  Fixture f;
  ModelConfig c = small_config(AttentionMode::personalized);
  c.dropout = 0.5;
  PanapModel m(f.data, f.corpus, c, small_encoder(), 7);
  auto loss_with = [&](uint64_t seed) {
    Rng rng(seed);
    ad::Tape t;
    return t.value(m.instance_loss(t, 1, {0, 1}, 2, {3, 4}, &rng))[0];
  };
  CHECK(loss_with(1) == loss_with(1));
  CHECK(loss_with(1) != loss_with(2));
  // Null rng disables dropout entirely.
  ad::Tape t;
  double clean = t.value(m.instance_loss(t, 1, {0, 1}, 2, {3, 4}, nullptr))[0];
  ad::Tape t2;
  CHECK(clean ==
        t2.value(m.instance_loss(t2, 1, {0, 1}, 2, {3, 4}, nullptr))[0]);
}

TEST_CASE("seeker_vector_infer matches the tape path on cached vectors") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::personalized),
               small_encoder(), 11);
  JobVectorCache cache;
  cache.build(m, Exec::serial, 1);

  ad::Tape t;
  std::vector<ad::Var> vs;
  std::vector<Tensor> vecs;
  for (int j : {0, 2, 4}) {
    vs.push_back(m.job_content_vector(t, j, nullptr));
    vecs.push_back(cache.at(j));
  }
  Tensor tape_vu = t.value(m.seeker_vector(t, 1, vs, nullptr));
  Tensor infer_vu = m.seeker_vector_infer(1, vecs);
  REQUIRE(tape_vu.numel() == infer_vu.numel());
  for (int64_t i = 0; i < tape_vu.numel(); ++i)
    CHECK(tape_vu[i] == doctest::Approx(infer_vu[i]).epsilon(1e-12));
}

TEST_CASE("job vector cache: serial and openmp builds agree bitwise") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::average),
               small_encoder(), 5);
  JobVectorCache serial, parallel;
  serial.build(m, Exec::serial, 1);
  parallel.build(m, Exec::openmp, 4);
  REQUIRE(serial.size() == parallel.size());
  for (int i = 0; i < serial.size(); ++i) {
    CHECK(serial.id(i) == parallel.id(i));
    CHECK(serial.at(i).v == parallel.at(i).v);
  }
  CHECK(serial.index_of("j3") == 3);
  CHECK(serial.index_of("nope") == -1);
}

TEST_CASE("cold insert appends; matching content scores identically") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::personalized),
               small_encoder(), 13);
  JobVectorCache cache;
  cache.build(m, Exec::serial, 1);
  int before = cache.size();

  Job clone = f.data.catalog.at("j2");
  clone.job_id = "j_clone";
  int idx = cache.insert(m, clone);
  CHECK(idx == before);
  CHECK(cache.size() == before + 1);
  CHECK(cache.index_of("j_clone") == idx);

  // Same text and metadata, no identifier input: the cold vector must match
  // the warm one to numerical identity.
  const Tensor& warm = cache.at(2);
  const Tensor& cold = cache.at(idx);
  for (int64_t i = 0; i < warm.numel(); ++i)
    CHECK(std::fabs(warm[i] - cold[i]) < 1e-9);

  Tensor v_u = m.seeker_vector_infer(1, {cache.at(0), cache.at(4)});
  auto scores = score_candidates(m, v_u, cache, {2, idx});
  CHECK(std::fabs(scores[0] - scores[1]) < 1e-9);
}

TEST_CASE("cold insert on an existing id refreshes in place") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::average),
               small_encoder(), 13);
  JobVectorCache cache;
  cache.build(m, Exec::serial, 1);
  int before = cache.size();
  Job changed = f.data.catalog.at("j1");
  changed.tokens = {"totally", "different"};
  int idx = cache.insert(m, changed);
  CHECK(idx == 1);
  CHECK(cache.size() == before);
}

TEST_CASE("score_candidates applies the temperature") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::average),
               small_encoder(), 17);
  JobVectorCache cache;
  cache.build(m, Exec::serial, 1);
  Tensor v_u = m.seeker_vector_infer(1, {cache.at(0)});
  auto scores = score_candidates(m, v_u, cache, {3});
  CHECK(scores[0] ==
        doctest::Approx(cosine_value(v_u, cache.at(3)) * 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(score_candidates(m, v_u, cache, {}), Error);
}

TEST_CASE("recommend_topk ordering, prefix exclusion, and errors") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::personalized),
               small_encoder(), 19);
  JobVectorCache cache;
  cache.build(m, Exec::serial, 1);

  auto top = recommend_topk(m, cache, "uA", {"j0", "j2"}, 10);
  CHECK(top.size() == 4);  // 6 jobs minus the 2 prefix jobs
  for (size_t i = 1; i < top.size(); ++i) {
    bool ordered = top[i - 1].score > top[i].score ||
                   (top[i - 1].score == top[i].score &&
                    top[i - 1].job_id < top[i].job_id);
    CHECK(ordered);
  }
  for (const auto& s : top) {
    CHECK(s.job_id != "j0");
    CHECK(s.job_id != "j2");
  }

  auto top2 = recommend_topk(m, cache, "uA", {"j0"}, 2);
  CHECK(top2.size() == 2);

  // Unknown users ride the UNKNOWN embedding instead of failing.
  auto cold_user = recommend_topk(m, cache, "nobody", {"j0"}, 3);
  CHECK(cold_user.size() == 3);

  std::vector<std::string> cands{"j1", "j3"};
  auto subset = recommend_topk(m, cache, "uA", {"j0"}, 10, &cands);
  CHECK(subset.size() == 2);

  CHECK_THROWS_WITH_AS(recommend_topk(m, cache, "uA", {"ghost"}, 3),
                       doctest::Contains("ghost"), Error);
  std::vector<std::string> bad{"nope"};
  CHECK_THROWS_AS(recommend_topk(m, cache, "uA", {"j0"}, 3, &bad), Error);
  CHECK_THROWS_AS(recommend_topk(m, cache, "uA", {}, 3), Error);
  CHECK_THROWS_AS(recommend_topk(m, cache, "uA", {"j0"}, 0), Error);
}

TEST_CASE("tie rule prefers the lexicographically smaller id") {
  Fixture f;
  PanapModel m(f.data, f.corpus, small_config(AttentionMode::average),
               small_encoder(), 23);
  JobVectorCache cache;
  cache.build(m, Exec::serial, 1);
  // A clone of j3 under a larger id produces an exact score tie.
  Job clone = f.data.catalog.at("j3");
  clone.job_id = "j9";
  cache.insert(m, clone);
  auto top = recommend_topk(m, cache, "uA", {"j0"}, 7);
  int pos3 = -1, pos9 = -1;
  for (size_t i = 0; i < top.size(); ++i) {
    if (top[i].job_id == "j3") pos3 = static_cast<int>(i);
    if (top[i].job_id == "j9") pos9 = static_cast<int>(i);
  }
  REQUIRE(pos3 >= 0);
  REQUIRE(pos9 >= 0);
  CHECK(top[pos3].score == top[pos9].score);
  CHECK(pos3 < pos9);
}
