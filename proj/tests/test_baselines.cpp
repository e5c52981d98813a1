#include <cmath>
#include <set>

#include <doctest.h>

#include "panap/baselines.hpp"
#include "panap/common.hpp"
#include "panap/corpus.hpp"
#include "panap/tensor.hpp"

using namespace panap;

namespace {

Session make_session(const std::string& user,
                     const std::vector<std::string>& jobs, int64_t start) {
  Session s;
  s.user_id = user;
  for (size_t i = 0; i < jobs.size(); ++i)
    s.events.push_back({user, jobs[i], start + static_cast<int64_t>(i) * 60});
  return s;
}

Dataset dataset_from_sessions(
    const std::vector<std::vector<std::string>>& session_jobs,
    const std::vector<std::vector<std::string>>& tokens = {}) {
  Dataset d;
  std::set<std::string> ids;
  for (const auto& sj : session_jobs) ids.insert(sj.begin(), sj.end());
  size_t k = 0;
  for (const std::string& id : ids) {
    Job j;
    j.job_id = id;
    j.tokens = k < tokens.size() ? tokens[k] : std::vector<std::string>{id};
    j.state = "CA";
    j.country = "US";
    d.catalog.emplace(id, j);
    ++k;
  }
  for (size_t i = 0; i < session_jobs.size(); ++i) {
    std::string user = "u" + std::to_string(i);
    JobSeeker s;
    s.user_id = user;
    d.seekers.emplace(user, s);
    d.train_sessions.push_back(
        make_session(user, session_jobs[i], 1000 + 10000 * (int64_t)i));
  }
  return d;
}

}  // namespace

TEST_CASE("pop counts training applications and ignores the prefix") {
  // Sessions: [x y x], [y z], [x y]  ->  x:3 y:3 z:1
  Dataset d = dataset_from_sessions({{"x", "y", "x"}, {"y", "z"}, {"x", "y"}});
  CorpusIndex corpus = build_corpus_index(d);
  PopBaseline pop = PopBaseline::fit(corpus);
  auto s = pop.score({}, {0, 1, 2});
  CHECK(s == std::vector<double>{3.0, 3.0, 1.0});
  CHECK(pop.score({2}, {0}) == pop.score({}, {0}));
  CHECK_THROWS_AS(pop.score({}, {7}), Error);
}

TEST_CASE("ar counts a co-occurring pair once per session") {
  Dataset d = dataset_from_sessions({{"x", "y", "x"}, {"y", "z"}, {"x", "y"}});
  CorpusIndex corpus = build_corpus_index(d);
  ArBaseline ar = ArBaseline::fit(corpus);
  // Last prefix job x (index 0): pairs with y in two sessions, never with z.
  auto s = ar.score({1, 0}, {1, 2, 0});
  CHECK(s[0] == 2.0);
  CHECK(s[1] == 0.0);
  CHECK(s[2] == 0.0);  // no self pair
  auto sy = ar.score({1}, {0, 2});
  CHECK(sy[0] == 2.0);
  CHECK(sy[1] == 1.0);
  CHECK_THROWS_AS(ar.score({}, {0}), Error);
}

TEST_CASE("iknn normalizes co-occurrence by smoothed supports") {
  Dataset d = dataset_from_sessions({{"x", "y", "x"}, {"y", "z"}, {"x", "y"}});
  CorpusIndex corpus = build_corpus_index(d);
  // Supports: x in 2 sessions, y in 3, z in 1. co(x,y)=2.
  IknnBaseline flat = IknnBaseline::fit(corpus, 0.0);
  auto s0 = flat.score({0}, {1, 2});
  CHECK(s0[0] == doctest::Approx(2.0 / std::sqrt(2.0 * 3.0)).epsilon(1e-12));
  CHECK(s0[1] == 0.0);

  IknnBaseline smooth = IknnBaseline::fit(corpus, 20.0);
  auto s20 = smooth.score({0}, {1});
  CHECK(s20[0] == doctest::Approx(2.0 / std::sqrt(22.0 * 23.0)).epsilon(1e-12));

  CHECK_THROWS_AS(IknnBaseline::fit(corpus, -1.0), Error);
}

TEST_CASE("sknn matches the worked example") {
  // Sessions {a,b}, {a,c,d}, {b,e}; prefix {a}.
  Dataset d = dataset_from_sessions({{"a", "b"}, {"a", "c", "d"}, {"b", "e"}});
  CorpusIndex corpus = build_corpus_index(d);
  SknnBaseline sknn = SknnBaseline::fit(corpus);
  auto s = sknn.score({0}, {1, 2, 3, 4, 0});
  double s1 = 1.0 / std::sqrt(2.0);  // session {a,b}
  double s2 = 1.0 / std::sqrt(3.0);  // session {a,c,d}
  CHECK(s[0] == doctest::Approx(s1).epsilon(1e-12));       // b
  CHECK(s[1] == doctest::Approx(s2).epsilon(1e-12));       // c
  CHECK(s[2] == doctest::Approx(s2).epsilon(1e-12));       // d
  CHECK(s[3] == 0.0);                                      // e: no shared job
  CHECK(s[4] == doctest::Approx(s1 + s2).epsilon(1e-12));  // a in both
}

TEST_CASE("sknn keeps only the requested number of neighbors") {
  Dataset d = dataset_from_sessions({{"a", "b"}, {"a", "c", "d"}, {"b", "e"}});
  CorpusIndex corpus = build_corpus_index(d);
  SknnBaseline top1 = SknnBaseline::fit(corpus, 1);
  // Only {a,b} survives (higher similarity), so c loses its score.
  auto s = top1.score({0}, {1, 2});
  CHECK(s[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s[1] == 0.0);
  CHECK_THROWS_AS(SknnBaseline::fit(corpus, 0), Error);
}

TEST_CASE("vsknn weights recent prefix jobs more") {
  Dataset d = dataset_from_sessions({{"a", "b"}, {"a", "c", "d"}, {"b", "e"}});
  CorpusIndex corpus = build_corpus_index(d);
  VsknnBaseline v = VsknnBaseline::fit(corpus);
  // Prefix [a, b]: weight(b) = 1, weight(a) = 1/2, ||w|| = sqrt(1.25).
  double wn = std::sqrt(1.25);
  auto s = v.score({0, 1}, {4, 2});
  CHECK(s[0] == doctest::Approx(1.0 / (wn * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.5 / (wn * std::sqrt(3.0))).epsilon(1e-12));
  CHECK(s[0] > s[1]);  // the b-session beats the a-only session
}

TEST_CASE("vsknn with a single-item prefix reduces to sknn") {
  Dataset d = dataset_from_sessions({{"a", "b"}, {"a", "c", "d"}, {"b", "e"}});
  CorpusIndex corpus = build_corpus_index(d);
  SknnBaseline sk = SknnBaseline::fit(corpus);
  VsknnBaseline v = VsknnBaseline::fit(corpus);
  std::vector<int> cands{0, 1, 2, 3, 4};
  auto a = sk.score({3}, cands);
  auto b = v.score({3}, cands);
  for (size_t i = 0; i < cands.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("vsknn uses only the most recent occurrence of a repeated job") {
  // Prefix [b, a, b]: distinct-by-recency order is b (w=1), a (w=1/2).
  Dataset d = dataset_from_sessions({{"a", "b"}, {"a", "c", "d"}, {"b", "e"}});
  CorpusIndex corpus = build_corpus_index(d);
  VsknnBaseline v = VsknnBaseline::fit(corpus);
  auto dup = v.score({1, 0, 1}, {4, 2});
  auto plain = v.score({0, 1}, {4, 2});
  for (size_t i = 0; i < dup.size(); ++i)
    CHECK(dup[i] == doctest::Approx(plain[i]).epsilon(1e-12));
}

TEST_CASE("content baseline scores cosine to the mean prefix vector") {
  Dataset d = dataset_from_sessions(
      {{"p", "q"}, {"r", "p"}},
      {{"alpha", "beta"}, {"alpha", "beta"}, {"gamma", "delta"}});
  CorpusIndex corpus = build_corpus_index(d);
  EncoderSpec spec;
  spec.d = 64;
  TextEncoder enc(spec);
  // Buffer holds p and q only; r is outside and must score 0.
  ContentBaseline cs = ContentBaseline::fit(corpus, d, enc, {0, 1});
  auto s = cs.score({0}, {1, 2, 0});
  CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-9));  // q: same tokens as p
  CHECK(s[1] == 0.0);                                 // r: not in the buffer
  CHECK(s[2] == doctest::Approx(1.0).epsilon(1e-9));  // p itself

  Tensor vp = enc.encode("p", d.catalog.at("p").tokens);
  Tensor vr = enc.encode("r", d.catalog.at("r").tokens);
  ContentBaseline all = ContentBaseline::fit(corpus, d, enc, {0, 1, 2});
  auto s2 = all.score({0}, {2});
  CHECK(s2[0] == doctest::Approx(cosine_value(vp, vr)).epsilon(1e-12));
  CHECK_THROWS_AS(cs.score({}, {0}), Error);
}

TEST_CASE("fitting twice gives identical scores") {
  Dataset d = dataset_from_sessions({{"a", "b"}, {"a", "c", "d"}, {"b", "e"}});
  CorpusIndex corpus = build_corpus_index(d);
  std::vector<int> cands{0, 1, 2, 3, 4};
  CHECK(SknnBaseline::fit(corpus).score({0, 1}, cands) ==
        SknnBaseline::fit(corpus).score({0, 1}, cands));
  CHECK(VsknnBaseline::fit(corpus).score({0, 1}, cands) ==
        VsknnBaseline::fit(corpus).score({0, 1}, cands));
  CHECK(IknnBaseline::fit(corpus).score({0}, cands) ==
        IknnBaseline::fit(corpus).score({0}, cands));
}

TEST_CASE("baseline names round-trip") {
  for (BaselineKind k : {BaselineKind::pop, BaselineKind::ar, BaselineKind::cs,
                         BaselineKind::iknn, BaselineKind::sknn,
                         BaselineKind::vsknn})
    CHECK(parse_baseline(baseline_name(k)) == k);
  CHECK_THROWS_AS(parse_baseline("bogus"), Error);
}
