#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "panap/tensor.hpp"

namespace panap {

enum class EncoderKind { hashed_bow, external_file };

struct EncoderSpec {
  EncoderKind kind = EncoderKind::hashed_bow;
  int d = 300;
  uint64_t hash_seed = 0;
  std::map<std::string, double> idf;  // optional token weights
  std::string external_path;          // kind == external_file
};

// Signed feature hashing of a token multiset, then L2 normalization.
// Token -> bucket/sign mapping: h = splitmix64(fnv1a64(token) ^
// splitmix64(hash_seed)), bucket = h mod d, sign = +1 if the top bit of h is
// 0 else -1. Both hash functions use their standard published constants, so
// any implementation can reproduce the vectors exactly.
Tensor encode_hashed_bow(const std::vector<std::string>& tokens,
                         const EncoderSpec& spec);

// One record per line: job_id followed by d floats, space-separated.
std::unordered_map<std::string, Tensor> load_external_vectors(
    const std::string& path, int d);

// Per-job vectors with external-file lookup and hashed fallback.
class TextEncoder {
 public:
  explicit TextEncoder(EncoderSpec spec);

  // Loads the external table when the spec asks for one.
  void prepare();

  Tensor encode(const std::string& job_id,
                const std::vector<std::string>& tokens) const;

  size_t fallback_count() const { return fallbacks_; }
  const EncoderSpec& spec() const { return spec_; }

 private:
  EncoderSpec spec_;
  std::unordered_map<std::string, Tensor> external_;
  mutable size_t fallbacks_ = 0;
};

}  // namespace panap
