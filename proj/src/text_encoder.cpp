#include "panap/text_encoder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "panap/common.hpp"
#include "panap/rng.hpp"

namespace panap {

Tensor encode_hashed_bow(const std::vector<std::string>& tokens,
                         const EncoderSpec& spec) {
  if (spec.d <= 0) usage_error("encoder dimension must be positive");
  Tensor out = Tensor::zeros({spec.d});
  const uint64_t salt = splitmix64(spec.hash_seed);
  for (const auto& tok : tokens) {
    double w = 1.0;
    if (!spec.idf.empty()) {
      auto it = spec.idf.find(tok);
      if (it == spec.idf.end()) continue;
      w = it->second;
    }
    const uint64_t h = splitmix64(fnv1a64(tok) ^ salt);
    const int64_t bucket = static_cast<int64_t>(h % static_cast<uint64_t>(spec.d));
    const double sign = (h >> 63) ? -1.0 : 1.0;
    out.v[bucket] += sign * w;
  }
  const double n = l2_norm(out);
  if (n > 1e-12) {
    for (double& x : out.v) x /= n;
  } else {
    for (double& x : out.v) x = 0.0;
  }
  return out;
}

std::unordered_map<std::string, Tensor> load_external_vectors(
    const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) io_error("cannot open vector file: " + path);
  std::unordered_map<std::string, Tensor> table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id;
    if (!(ss >> id))
      data_error(path + ":" + std::to_string(line_no) + ": missing id");
    Tensor vec = Tensor::zeros({d});
    for (int i = 0; i < d; ++i) {
      if (!(ss >> vec.v[i]))
        data_error(path + ":" + std::to_string(line_no) + ": expected " +
                   std::to_string(d) + " floats for id " + id);
    }
    double extra;
    if (ss >> extra)
      data_error(path + ":" + std::to_string(line_no) + ": more than " +
                 std::to_string(d) + " floats for id " + id);
    if (!vec.all_finite())
      data_error(path + ":" + std::to_string(line_no) + ": non-finite value");
    table[id] = std::move(vec);
  }
  return table;
}

TextEncoder::TextEncoder(EncoderSpec spec) : spec_(std::move(spec)) {}

void TextEncoder::prepare() {
  if (spec_.kind == EncoderKind::external_file)
    external_ = load_external_vectors(spec_.external_path, spec_.d);
}

Tensor TextEncoder::encode(const std::string& job_id,
                           const std::vector<std::string>& tokens) const {
  if (spec_.kind == EncoderKind::external_file) {
    auto it = external_.find(job_id);
    if (it != external_.end()) return it->second;
    ++fallbacks_;
  }
  return encode_hashed_bow(tokens, spec_);
}

}  // namespace panap
