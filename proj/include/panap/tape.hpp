#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "panap/params.hpp"
#include "panap/rng.hpp"
#include "panap/tensor.hpp"

namespace panap::ad {

enum class Activation { identity, relu, leaky_relu, tanh };

struct Var {
  int32_t id = -1;
  bool valid() const { return id >= 0; }
};

// Record of one forward pass. Operations append nodes; backward() replays
// them once in reverse. A tape is confined to one worker; parameters are
// referenced read-only so many tapes can share a frozen ParameterStore.
class Tape {
 public:
  Tape() { entries_.reserve(64); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // ---- leaves ----

  Var constant(Tensor t) { return push_own(std::move(t), nullptr); }

  // Whole-tensor parameter leaf. Deduplicated per tape so repeated use of a
  // weight accumulates into a single gradient buffer.
  Var param(const ParameterStore& store, const std::string& name) {
    auto it = param_cache_.find(name);
    if (it != param_cache_.end()) return it->second;
    Var v = push_ref(&store.value(name), nullptr);
    leaves_.push_back({v.id, name, -1});
    param_cache_.emplace(name, v);
    return v;
  }

  // Single embedding row; its gradient lands in that row only.
  Var param_row(const ParameterStore& store, const std::string& name,
                int64_t row) {
    auto key = std::make_pair(name, row);
    auto it = row_cache_.find(key);
    if (it != row_cache_.end()) return it->second;
    const Tensor& m = store.value(name);
    if (!m.is_matrix() || row < 0 || row >= m.rows())
      usage_error("param_row: bad row " + std::to_string(row) + " for slot " +
                  name + " " + m.shape_str());
    Tensor r = Tensor::vector(m.cols());
    for (int64_t c = 0; c < m.cols(); ++c) r[c] = m.at(row, c);
    Var v = push_own(std::move(r), nullptr);
    leaves_.push_back({v.id, name, row});
    row_cache_.emplace(key, v);
    return v;
  }

  // ---- primitives ----

  Var matvec(Var W, Var x) {
    const Tensor& w = value(W);
    const Tensor& xv = value(x);
    if (!w.is_matrix() || w.cols() != xv.numel())
      data_error("matvec: shape mismatch " + w.shape_str() + " vs " +
                 xv.shape_str());
    Tensor y = Tensor::vector(w.rows());
    for (int64_t r = 0; r < w.rows(); ++r) {
      double s = 0.0;
      for (int64_t c = 0; c < w.cols(); ++c) s += w.at(r, c) * xv[c];
      y[r] = s;
    }
    return push_own(std::move(y), [W, x](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      const Tensor& w = t.value(W);
      const Tensor& xv = t.value(x);
      Tensor& dw = t.grad_rw(W);
      Tensor& dx = t.grad_rw(x);
      for (int64_t r = 0; r < w.rows(); ++r) {
        double g = dy[r];
        if (g == 0.0) continue;
        for (int64_t c = 0; c < w.cols(); ++c) {
          dw.at(r, c) += g * xv[c];
          dx[c] += g * w.at(r, c);
        }
      }
    });
  }

  Var add(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.numel() != bv.numel())
      data_error("add: shape mismatch " + av.shape_str() + " vs " +
                 bv.shape_str());
    Tensor y = av;
    for (int64_t i = 0; i < y.numel(); ++i) y[i] += bv[i];
    return push_own(std::move(y), [a, b](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      Tensor& da = t.grad_rw(a);
      Tensor& db = t.grad_rw(b);
      for (int64_t i = 0; i < dy.numel(); ++i) {
        da[i] += dy[i];
        db[i] += dy[i];
      }
    });
  }

  Var activate(Var x, Activation act, double leaky_slope = 0.01) {
    const Tensor& xv = value(x);
    Tensor y = xv;
    switch (act) {
      case Activation::identity:
        break;
      case Activation::relu:
        for (double& e : y.v) e = e > 0.0 ? e : 0.0;
        break;
      case Activation::leaky_relu:
        for (double& e : y.v) e = e > 0.0 ? e : leaky_slope * e;
        break;
      case Activation::tanh:
        for (double& e : y.v) e = std::tanh(e);
        break;
    }
    return push_own(std::move(y), [x, act, leaky_slope](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      const Tensor& xv = t.value(x);
      const Tensor& yv = t.value(out);
      Tensor& dx = t.grad_rw(x);
      for (int64_t i = 0; i < dy.numel(); ++i) {
        double d = 1.0;
        switch (act) {
          case Activation::identity: d = 1.0; break;
          case Activation::relu: d = xv[i] > 0.0 ? 1.0 : 0.0; break;
          case Activation::leaky_relu: d = xv[i] > 0.0 ? 1.0 : leaky_slope; break;
          case Activation::tanh: d = 1.0 - yv[i] * yv[i]; break;
        }
        dx[i] += d * dy[i];
      }
    });
  }

  // activation(W x + b)
  Var dense(Var x, Var W, Var b, Activation act, double leaky_slope = 0.01) {
    return activate(add(matvec(W, x), b), act, leaky_slope);
  }

  Var concat(const std::vector<Var>& parts) {
    if (parts.empty()) usage_error("concat: no parts");
    int64_t n = 0;
    for (Var p : parts) n += value(p).numel();
    Tensor y = Tensor::vector(n);
    int64_t off = 0;
    for (Var p : parts) {
      const Tensor& pv = value(p);
      std::copy(pv.v.begin(), pv.v.end(), y.v.begin() + off);
      off += pv.numel();
    }
    return push_own(std::move(y), [parts](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      int64_t off = 0;
      for (Var p : parts) {
        Tensor& dp = t.grad_rw(p);
        for (int64_t i = 0; i < dp.numel(); ++i) dp[i] += dy[off + i];
        off += dp.numel();
      }
    });
  }

  Var dot(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.numel() != bv.numel())
      data_error("dot: shape mismatch " + av.shape_str() + " vs " +
                 bv.shape_str());
    double s = 0.0;
    for (int64_t i = 0; i < av.numel(); ++i) s += av[i] * bv[i];
    return push_own(Tensor::scalar(s), [a, b](Tape& t, Var out) {
      double g = t.grad_ro(out)[0];
      const Tensor& av = t.value(a);
      const Tensor& bv = t.value(b);
      Tensor& da = t.grad_rw(a);
      Tensor& db = t.grad_rw(b);
      for (int64_t i = 0; i < av.numel(); ++i) {
        da[i] += g * bv[i];
        db[i] += g * av[i];
      }
    });
  }

  // y = sum_i alpha[i] * vs[i]; alpha is a length-n vector variable.
  Var weighted_sum(Var alpha, const std::vector<Var>& vs) {
    const Tensor& av = value(alpha);
    if (vs.empty() || av.numel() != static_cast<int64_t>(vs.size()))
      usage_error("weighted_sum: weight count " + std::to_string(av.numel()) +
                  " != vector count " + std::to_string(vs.size()));
    Tensor y = Tensor::vector(value(vs[0]).numel());
    for (size_t i = 0; i < vs.size(); ++i) {
      const Tensor& vi = value(vs[i]);
      if (vi.numel() != y.numel())
        data_error("weighted_sum: shape mismatch " + vi.shape_str());
      for (int64_t j = 0; j < y.numel(); ++j) y[j] += av[i] * vi[j];
    }
    return push_own(std::move(y), [alpha, vs](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      const Tensor& av = t.value(alpha);
      Tensor& da = t.grad_rw(alpha);
      for (size_t i = 0; i < vs.size(); ++i) {
        const Tensor& vi = t.value(vs[i]);
        Tensor& dvi = t.grad_rw(vs[i]);
        double s = 0.0;
        for (int64_t j = 0; j < dy.numel(); ++j) {
          s += vi[j] * dy[j];
          dvi[j] += av[i] * dy[j];
        }
        da[i] += s;
      }
    });
  }

  // Max-shifted softmax; preserves argmax, output sums to 1.
  Var softmax(Var scores) {
    const Tensor& s = value(scores);
    if (s.numel() < 1) usage_error("softmax: empty input");
    double mx = *std::max_element(s.v.begin(), s.v.end());
    Tensor y = Tensor::vector(s.numel());
    double z = 0.0;
    for (int64_t i = 0; i < s.numel(); ++i) {
      y[i] = std::exp(s[i] - mx);
      z += y[i];
    }
    for (int64_t i = 0; i < s.numel(); ++i) y[i] /= z;
    return push_own(std::move(y), [scores](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      const Tensor& y = t.value(out);
      Tensor& ds = t.grad_rw(scores);
      double inner = 0.0;
      for (int64_t i = 0; i < y.numel(); ++i) inner += y[i] * dy[i];
      for (int64_t i = 0; i < y.numel(); ++i) ds[i] += y[i] * (dy[i] - inner);
    });
  }

  // Zero-norm convention: either norm < 1e-12 gives value 0 and zero gradient.
  Var cosine(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.numel() != bv.numel())
      data_error("cosine: length mismatch " + av.shape_str() + " vs " +
                 bv.shape_str());
    double na = l2_norm(av), nb = l2_norm(bv);
    bool degenerate = (na < 1e-12 || nb < 1e-12);
    double c = degenerate ? 0.0 : panap::dot(av, bv) / (na * nb);
    return push_own(Tensor::scalar(c),
                    [a, b, na, nb, c, degenerate](Tape& t, Var out) {
                      if (degenerate) return;
                      double g = t.grad_ro(out)[0];
                      const Tensor& av = t.value(a);
                      const Tensor& bv = t.value(b);
                      Tensor& da = t.grad_rw(a);
                      Tensor& db = t.grad_rw(b);
                      for (int64_t i = 0; i < av.numel(); ++i) {
                        da[i] += g * (bv[i] / (na * nb) - c * av[i] / (na * na));
                        db[i] += g * (av[i] / (na * nb) - c * bv[i] / (nb * nb));
                      }
                    });
  }

  // -log softmax(scores)[index], fused for stability.
  Var neg_log_softmax_at(Var scores, int64_t index) {
    const Tensor& s = value(scores);
    if (s.numel() < 1) usage_error("neg_log_softmax_at: empty scores");
    if (index < 0 || index >= s.numel())
      usage_error("neg_log_softmax_at: index out of range");
    double mx = *std::max_element(s.v.begin(), s.v.end());
    double z = 0.0;
    for (double e : s.v) z += std::exp(e - mx);
    double loss = mx + std::log(z) - s[index];
    return push_own(Tensor::scalar(loss), [scores, index, mx, z](Tape& t, Var out) {
      double g = t.grad_ro(out)[0];
      const Tensor& s = t.value(scores);
      Tensor& ds = t.grad_rw(scores);
      for (int64_t i = 0; i < s.numel(); ++i) {
        double p = std::exp(s[i] - mx) / z;
        ds[i] += g * (p - (i == index ? 1.0 : 0.0));
      }
    });
  }

  // Elementwise product with a fixed mask (inverted-dropout application).
  Var apply_mask(Var x, Tensor mask) {
    const Tensor& xv = value(x);
    if (xv.numel() != mask.numel())
      data_error("apply_mask: shape mismatch " + xv.shape_str() + " vs " +
                 mask.shape_str());
    Tensor y = xv;
    for (int64_t i = 0; i < y.numel(); ++i) y[i] *= mask[i];
    return push_own(std::move(y), [x, mask = std::move(mask)](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      Tensor& dx = t.grad_rw(x);
      for (int64_t i = 0; i < dy.numel(); ++i) dx[i] += mask[i] * dy[i];
    });
  }

  Var sum(Var x) {
    const Tensor& xv = value(x);
    double s = 0.0;
    for (double e : xv.v) s += e;
    return push_own(Tensor::scalar(s), [x](Tape& t, Var out) {
      double g = t.grad_ro(out)[0];
      Tensor& dx = t.grad_rw(x);
      for (int64_t i = 0; i < dx.numel(); ++i) dx[i] += g;
    });
  }

  Var scale(Var x, double c) {
    Tensor y = value(x);
    for (double& e : y.v) e *= c;
    return push_own(std::move(y), [x, c](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      Tensor& dx = t.grad_rw(x);
      for (int64_t i = 0; i < dy.numel(); ++i) dx[i] += c * dy[i];
    });
  }

  // Gather scalar variables into one vector variable.
  Var stack_scalars(const std::vector<Var>& scalars) {
    if (scalars.empty()) usage_error("stack_scalars: empty input");
    Tensor y = Tensor::vector(static_cast<int64_t>(scalars.size()));
    for (size_t i = 0; i < scalars.size(); ++i) {
      const Tensor& sv = value(scalars[i]);
      if (!sv.is_scalar()) usage_error("stack_scalars: non-scalar part");
      y[i] = sv[0];
    }
    return push_own(std::move(y), [scalars](Tape& t, Var out) {
      const Tensor& dy = t.grad_ro(out);
      for (size_t i = 0; i < scalars.size(); ++i)
        t.grad_rw(scalars[i])[0] += dy[i];
    });
  }

  // ---- access / backward ----

  const Tensor& value(Var v) const {
    check(v);
    const Entry& e = entries_[v.id];
    return e.ref ? *e.ref : e.own;
  }

  const Tensor& grad(Var v) const {
    check(v);
    if (!grads_ready_) usage_error("grad: backward() has not run");
    return grad_[v.id];
  }

  void backward(Var loss) {
    check(loss);
    if (!value(loss).is_scalar())
      usage_error("backward: loss must be scalar, got " +
                  value(loss).shape_str());
    grad_.clear();
    grad_.reserve(entries_.size());
    for (const Entry& e : entries_)
      grad_.push_back(Tensor::zeros(e.ref ? e.ref->shape : e.own.shape));
    grad_[loss.id][0] = 1.0;
    grads_ready_ = true;
    for (int32_t i = loss.id; i >= 0; --i)
      if (entries_[i].back) entries_[i].back(*this, Var{i});
  }

  // Add parameter-leaf gradients into an accumulator keyed by slot name.
  // Buffers are created on demand with the full slot shape.
  void accumulate_param_grads(const ParameterStore& store, GradMap& into,
                              double scale = 1.0) const {
    if (!grads_ready_) usage_error("accumulate_param_grads: run backward first");
    for (const LeafRef& leaf : leaves_) {
      const Tensor& g = grad_[leaf.var];
      auto it = into.find(leaf.slot);
      if (it == into.end())
        it = into.emplace(leaf.slot, Tensor::zeros(store.value(leaf.slot).shape))
                 .first;
      Tensor& acc = it->second;
      if (leaf.row < 0) {
        for (int64_t i = 0; i < g.numel(); ++i) acc.v[i] += scale * g.v[i];
      } else {
        int64_t off = leaf.row * acc.cols();
        for (int64_t i = 0; i < g.numel(); ++i) acc.v[off + i] += scale * g.v[i];
      }
    }
  }

  size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    const Tensor* ref = nullptr;  // parameter leaves alias the store
    Tensor own;
    std::function<void(Tape&, Var)> back;  // null for leaves
  };
  struct LeafRef {
    int32_t var;
    std::string slot;
    int64_t row;  // -1 for whole tensor
  };

  void check(Var v) const {
    if (!v.valid() || v.id >= static_cast<int32_t>(entries_.size()))
      usage_error("variable is not on this tape");
  }

  Tensor& grad_rw(Var v) { return grad_[v.id]; }
  const Tensor& grad_ro(Var v) const { return grad_[v.id]; }

  Var push_own(Tensor t, std::function<void(Tape&, Var)> back) {
    Entry e;
    e.own = std::move(t);
    e.back = std::move(back);
    entries_.push_back(std::move(e));
    return Var{static_cast<int32_t>(entries_.size() - 1)};
  }
  Var push_ref(const Tensor* t, std::function<void(Tape&, Var)> back) {
    Entry e;
    e.ref = t;
    e.back = std::move(back);
    entries_.push_back(std::move(e));
    return Var{static_cast<int32_t>(entries_.size() - 1)};
  }

  std::vector<Entry> entries_;
  std::vector<Tensor> grad_;
  std::vector<LeafRef> leaves_;
  std::map<std::string, Var> param_cache_;
  std::map<std::pair<std::string, int64_t>, Var> row_cache_;
  bool grads_ready_ = false;
};

// Gradients for every slot in the store; slots untouched by the forward pass
// come back zero. loss must live on this tape.
inline GradMap reverse_accumulate(Tape& tape, Var loss,
                                  const ParameterStore& store) {
  tape.backward(loss);
  GradMap grads = store.zero_grads();
  tape.accumulate_param_grads(store, grads);
  return grads;
}

// Inverted dropout: entries are 0 with probability rate, else 1/(1-rate).
inline Tensor dropout_mask(int64_t len, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0)
    usage_error("dropout_mask: rate must be in [0,1), got " +
                std::to_string(rate));
  Tensor m = Tensor::vector(len);
  double keep = 1.0 / (1.0 - rate);
  for (int64_t i = 0; i < len; ++i) m[i] = rng.unit() < rate ? 0.0 : keep;
  return m;
}

}  // namespace panap::ad
