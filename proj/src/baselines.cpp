#include "panap/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace panap {
namespace {

std::vector<int> distinct_sorted(const std::vector<int>& items) {
  std::vector<int> out(items);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_job(int j, size_t n_jobs, const char* who) {
  if (j < 0 || static_cast<size_t>(j) >= n_jobs)
    data_error(std::string(who) + ": job index out of range: " +
               std::to_string(j));
}

void require_prefix(const std::vector<int>& prefix, const char* who) {
  if (prefix.empty()) usage_error(std::string(who) + ": empty prefix");
}

// Pairwise counts, one increment per session per unordered pair.
std::vector<std::unordered_map<int, double>> cooccurrence(
    const CorpusIndex& corpus) {
  std::vector<std::unordered_map<int, double>> co(corpus.n_jobs());
  for (const auto& s : corpus.train_jobs) {
    std::vector<int> items = distinct_sorted(s);
    for (size_t i = 0; i < items.size(); ++i)
      for (size_t j = i + 1; j < items.size(); ++j) {
        co[items[i]][items[j]] += 1.0;
        co[items[j]][items[i]] += 1.0;
      }
  }
  return co;
}

struct Neighbor {
  double sim;
  int session;
};

// Top `limit` by similarity, ties by session index.
void keep_top(std::vector<Neighbor>& sims, int limit) {
  std::sort(sims.begin(), sims.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.session < b.session;
  });
  if (static_cast<int>(sims.size()) > limit) sims.resize(limit);
}

std::vector<double> score_from_neighbors(
    const std::vector<Neighbor>& neighbors,
    const std::vector<std::vector<int>>& session_items,
    const std::vector<int>& candidates, size_t n_jobs, const char* who) {
  std::unordered_map<int, double> acc;
  for (const Neighbor& nb : neighbors)
    for (int item : session_items[nb.session]) acc[item] += nb.sim;
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int c : candidates) {
    check_job(c, n_jobs, who);
    auto it = acc.find(c);
    out.push_back(it == acc.end() ? 0.0 : it->second);
  }
  return out;
}

}  // namespace

const char* baseline_name(BaselineKind k) {
  switch (k) {
    case BaselineKind::pop: return "pop";
    case BaselineKind::ar: return "ar";
    case BaselineKind::cs: return "cs";
    case BaselineKind::iknn: return "iknn";
    case BaselineKind::sknn: return "sknn";
    case BaselineKind::vsknn: return "vsknn";
  }
  return "unknown";
}

BaselineKind parse_baseline(const std::string& s) {
  if (s == "pop") return BaselineKind::pop;
  if (s == "ar") return BaselineKind::ar;
  if (s == "cs") return BaselineKind::cs;
  if (s == "iknn") return BaselineKind::iknn;
  if (s == "sknn") return BaselineKind::sknn;
  if (s == "vsknn") return BaselineKind::vsknn;
  usage_error("unknown baseline: " + s +
              " (expected pop, ar, cs, iknn, sknn, or vsknn)");
}

PopBaseline PopBaseline::fit(const CorpusIndex& corpus) {
  PopBaseline b;
  b.counts_.assign(corpus.n_jobs(), 0.0);
  for (const auto& s : corpus.train_jobs)
    for (int j : s) b.counts_[j] += 1.0;
  return b;
}

std::vector<double> PopBaseline::score(
    const std::vector<int>& prefix, const std::vector<int>& candidates) const {
  (void)prefix;
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int c : candidates) {
    check_job(c, counts_.size(), "pop");
    out.push_back(counts_[c]);
  }
  return out;
}

ArBaseline ArBaseline::fit(const CorpusIndex& corpus) {
  ArBaseline b;
  b.co_ = cooccurrence(corpus);
  return b;
}

std::vector<double> ArBaseline::score(
    const std::vector<int>& prefix, const std::vector<int>& candidates) const {
  require_prefix(prefix, "ar");
  int last = prefix.back();
  check_job(last, co_.size(), "ar");
  const auto& row = co_[last];
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int c : candidates) {
    check_job(c, co_.size(), "ar");
    auto it = row.find(c);
    out.push_back(it == row.end() ? 0.0 : it->second);
  }
  return out;
}

IknnBaseline IknnBaseline::fit(const CorpusIndex& corpus, double lambda) {
  if (lambda < 0.0) usage_error("iknn: lambda must be non-negative");
  IknnBaseline b;
  b.lambda_ = lambda;
  b.co_ = cooccurrence(corpus);
  b.support_.assign(corpus.n_jobs(), 0.0);
  for (const auto& s : corpus.train_jobs)
    for (int j : distinct_sorted(s)) b.support_[j] += 1.0;
  return b;
}

std::vector<double> IknnBaseline::score(
    const std::vector<int>& prefix, const std::vector<int>& candidates) const {
  require_prefix(prefix, "iknn");
  int last = prefix.back();
  check_job(last, co_.size(), "iknn");
  const auto& row = co_[last];
  double denom_last = std::sqrt(support_[last] + lambda_);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int c : candidates) {
    check_job(c, co_.size(), "iknn");
    auto it = row.find(c);
    if (it == row.end()) {
      out.push_back(0.0);
    } else {
      out.push_back(it->second /
                    (denom_last * std::sqrt(support_[c] + lambda_)));
    }
  }
  return out;
}

SknnBaseline SknnBaseline::fit(const CorpusIndex& corpus, int neighbors) {
  if (neighbors < 1) usage_error("sknn: neighbors must be positive");
  SknnBaseline b;
  b.neighbors_ = neighbors;
  b.session_items_.reserve(corpus.train_jobs.size());
  b.sessions_with_.assign(corpus.n_jobs(), {});
  for (size_t s = 0; s < corpus.train_jobs.size(); ++s) {
    b.session_items_.push_back(distinct_sorted(corpus.train_jobs[s]));
    for (int item : b.session_items_.back())
      b.sessions_with_[item].push_back(static_cast<int>(s));
  }
  return b;
}

std::vector<double> SknnBaseline::score(
    const std::vector<int>& prefix, const std::vector<int>& candidates) const {
  require_prefix(prefix, "sknn");
  std::vector<int> p = distinct_sorted(prefix);
  std::unordered_map<int, int> overlap;
  for (int x : p) {
    check_job(x, sessions_with_.size(), "sknn");
    for (int s : sessions_with_[x]) ++overlap[s];
  }
  double denom_p = std::sqrt(static_cast<double>(p.size()));
  std::vector<Neighbor> sims;
  sims.reserve(overlap.size());
  for (const auto& [s, ov] : overlap) {
    double denom_s = std::sqrt(static_cast<double>(session_items_[s].size()));
    sims.push_back({ov / (denom_p * denom_s), s});
  }
  keep_top(sims, neighbors_);
  return score_from_neighbors(sims, session_items_, candidates,
                              sessions_with_.size(), "sknn");
}

VsknnBaseline VsknnBaseline::fit(const CorpusIndex& corpus, int neighbors) {
  if (neighbors < 1) usage_error("vsknn: neighbors must be positive");
  VsknnBaseline b;
  b.neighbors_ = neighbors;
  b.session_items_.reserve(corpus.train_jobs.size());
  b.sessions_with_.assign(corpus.n_jobs(), {});
  for (size_t s = 0; s < corpus.train_jobs.size(); ++s) {
    b.session_items_.push_back(distinct_sorted(corpus.train_jobs[s]));
    for (int item : b.session_items_.back())
      b.sessions_with_[item].push_back(static_cast<int>(s));
  }
  return b;
}

std::vector<double> VsknnBaseline::score(
    const std::vector<int>& prefix, const std::vector<int>& candidates) const {
  require_prefix(prefix, "vsknn");
  // Distinct prefix jobs ordered most recent first; the i-th most recent
  // (1-based) weighs (n - i + 1) / n.
  std::vector<int> recent;
  std::unordered_set<int> seen;
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    if (seen.insert(*it).second) recent.push_back(*it);
  double n = static_cast<double>(recent.size());
  std::unordered_map<int, double> wsum;
  double wnorm_sq = 0.0;
  for (size_t i = 0; i < recent.size(); ++i) {
    int x = recent[i];
    check_job(x, sessions_with_.size(), "vsknn");
    double w = (n - static_cast<double>(i)) / n;
    wnorm_sq += w * w;
    for (int s : sessions_with_[x]) wsum[s] += w;
  }
  double wnorm = std::sqrt(wnorm_sq);
  std::vector<Neighbor> sims;
  sims.reserve(wsum.size());
  for (const auto& [s, w] : wsum) {
    double denom_s = std::sqrt(static_cast<double>(session_items_[s].size()));
    sims.push_back({w / (wnorm * denom_s), s});
  }
  keep_top(sims, neighbors_);
  return score_from_neighbors(sims, session_items_, candidates,
                              sessions_with_.size(), "vsknn");
}

ContentBaseline ContentBaseline::fit(const CorpusIndex& corpus,
                                     const Dataset& data,
                                     const TextEncoder& encoder,
                                     const std::vector<int>& buffer_jobs) {
  ContentBaseline b;
  b.vecs_.reserve(corpus.n_jobs());
  for (int j = 0; j < corpus.n_jobs(); ++j) {
    auto it = data.catalog.find(corpus.job_ids[j]);
    if (it == data.catalog.end())
      data_error("cs: job missing from catalog: " + corpus.job_ids[j]);
    b.vecs_.push_back(encoder.encode(it->first, it->second.tokens));
  }
  for (int j : buffer_jobs) {
    check_job(j, b.vecs_.size(), "cs");
    b.buffer_.insert(j);
  }
  return b;
}

std::vector<double> ContentBaseline::score(
    const std::vector<int>& prefix, const std::vector<int>& candidates) const {
  require_prefix(prefix, "cs");
  int64_t d = vecs_.empty() ? 0 : vecs_[0].numel();
  Tensor mean = Tensor::vector(d);
  for (int p : prefix) {
    check_job(p, vecs_.size(), "cs");
    for (int64_t i = 0; i < d; ++i) mean[i] += vecs_[p][i];
  }
  double inv = 1.0 / static_cast<double>(prefix.size());
  for (int64_t i = 0; i < d; ++i) mean[i] *= inv;
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int c : candidates) {
    check_job(c, vecs_.size(), "cs");
    out.push_back(buffer_.count(c) ? cosine_value(mean, vecs_[c]) : 0.0);
  }
  return out;
}

}  // namespace panap
