#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "panap/model.hpp"
#include "panap/tensor.hpp"

namespace panap {

// Checkpoint file layout (all integers little-endian):
//   8 bytes   magic "PANAPCK1"
//   u64       metadata length
//   ...       metadata, compact JSON
//   u64       tensor count
//   per tensor: u32 name length, name, u32 ndim, ndim x u64 dims,
//               numel x f64 values
// Tensors are the parameter values in slot-name order; optimizer moments are
// not stored, so training always starts fresh. Loading rebuilds the model
// from the prepared data directory plus the stored config, verifies that the
// vocabularies still match, and then overwrites the parameter tensors.

struct Checkpoint {
  nlohmann::json meta;
  std::map<std::string, Tensor> tensors;
};

// Model/encoder config, vocabularies, and adam_step; the caller merges in
// run-specific blocks (train flags, loss history) before saving.
nlohmann::json checkpoint_meta(const PanapModel& model);

void save_checkpoint(const std::string& path, const PanapModel& model,
                     const nlohmann::json& extra_meta);

Checkpoint load_checkpoint(const std::string& path);

ModelConfig model_config_from_meta(const nlohmann::json& meta);
EncoderSpec encoder_spec_from_meta(const nlohmann::json& meta);
uint64_t seed_from_meta(const nlohmann::json& meta);

// Copies the stored tensors into a freshly constructed model after checking
// that its vocabularies match the checkpoint's.
void restore_into_model(PanapModel& model, const Checkpoint& ck);

}  // namespace panap
