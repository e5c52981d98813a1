#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "panap/rng.hpp"
#include "panap/tensor.hpp"

namespace panap {

// name -> gradient, same shape as the slot. Embedding slots carry dense
// buffers whose untouched rows stay zero.
using GradMap = std::map<std::string, Tensor>;

// All trainable tensors plus Adam moments, keyed by slot name. std::map keeps
// iteration order sorted, which fixes the update and serialization order.
class ParameterStore {
 public:
  struct Slot {
    Tensor value;
    Tensor m;  // first moment
    Tensor v;  // second moment
    bool regularized = false;
  };

  // Glorot-uniform weight matrix; counts toward the L2 penalty.
  Tensor& add_dense(const std::string& name, int64_t out_dim, int64_t in_dim,
                    Rng& rng) {
    double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
    Tensor t = Tensor::matrix(out_dim, in_dim);
    for (double& x : t.v) x = (rng.unit() * 2.0 - 1.0) * limit;
    return add(name, std::move(t), /*regularized=*/true);
  }

  Tensor& add_bias(const std::string& name, int64_t n) {
    return add(name, Tensor::vector(n), /*regularized=*/false);
  }

  // Embedding matrix, uniform in +-0.05; regularized.
  Tensor& add_embedding(const std::string& name, int64_t rows, int64_t dim,
                        Rng& rng) {
    Tensor t = Tensor::matrix(rows, dim);
    for (double& x : t.v) x = (rng.unit() * 2.0 - 1.0) * 0.05;
    return add(name, std::move(t), /*regularized=*/true);
  }

  // Free-standing trainable vector (the shared query of vanilla attention).
  Tensor& add_vector(const std::string& name, int64_t n, Rng& rng) {
    Tensor t = Tensor::vector(n);
    for (double& x : t.v) x = (rng.unit() * 2.0 - 1.0) * 0.05;
    return add(name, std::move(t), /*regularized=*/true);
  }

  Tensor& add(const std::string& name, Tensor t, bool regularized) {
    if (slots_.count(name)) usage_error("duplicate parameter slot: " + name);
    Slot s;
    s.m = Tensor::zeros(t.shape);
    s.v = Tensor::zeros(t.shape);
    s.value = std::move(t);
    s.regularized = regularized;
    auto [it, ok] = slots_.emplace(name, std::move(s));
    (void)ok;
    return it->second.value;
  }

  bool has(const std::string& name) const { return slots_.count(name) != 0; }

  const Tensor& value(const std::string& name) const {
    return slot(name).value;
  }
  Tensor& value(const std::string& name) { return slot_mut(name).value; }

  const Slot& slot(const std::string& name) const {
    auto it = slots_.find(name);
    if (it == slots_.end()) usage_error("unknown parameter slot: " + name);
    return it->second;
  }
  Slot& slot_mut(const std::string& name) {
    auto it = slots_.find(name);
    if (it == slots_.end()) usage_error("unknown parameter slot: " + name);
    return it->second;
  }

  const std::map<std::string, Slot>& slots() const { return slots_; }
  std::map<std::string, Slot>& slots_mut() { return slots_; }

  int64_t step() const { return step_; }
  void set_step(int64_t s) { step_ = s; }

  GradMap zero_grads() const {
    GradMap g;
    for (const auto& [name, slot] : slots_) g[name] = Tensor::zeros(slot.value.shape);
    return g;
  }

 private:
  std::map<std::string, Slot> slots_;
  int64_t step_ = 0;
};

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double l2 = 1e-4;  // added to gradients of regularized slots, not biases
};

// One bias-corrected Adam update over every slot. grads must cover every
// slot in the store.
inline void adam_step(ParameterStore& store, const GradMap& grads,
                      const AdamConfig& cfg) {
  store.set_step(store.step() + 1);
  double t = static_cast<double>(store.step());
  double bc1 = 1.0 - std::pow(cfg.beta1, t);
  double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& [name, slot] : store.slots_mut()) {
    auto it = grads.find(name);
    if (it == grads.end()) usage_error("adam_step: missing gradient for slot " + name);
    const Tensor& g0 = it->second;
    if (!g0.same_shape(slot.value))
      data_error("adam_step: gradient shape " + g0.shape_str() + " != slot " +
                 slot.value.shape_str() + " for " + name);
    for (int64_t i = 0; i < slot.value.numel(); ++i) {
      double g = g0.v[i];
      if (slot.regularized) g += cfg.l2 * slot.value.v[i];
      slot.m.v[i] = cfg.beta1 * slot.m.v[i] + (1.0 - cfg.beta1) * g;
      slot.v.v[i] = cfg.beta2 * slot.v.v[i] + (1.0 - cfg.beta2) * g * g;
      double mhat = slot.m.v[i] / bc1;
      double vhat = slot.v.v[i] / bc2;
      slot.value.v[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace panap
