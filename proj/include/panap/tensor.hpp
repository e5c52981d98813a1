#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "panap/common.hpp"

namespace panap {

// Dense 64-bit float tensor. Only vectors ({n}) and row-major matrices
// ({rows, cols}) ever occur; scalars are {1}.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::initializer_list<double> vals) : shape{(int64_t)vals.size()}, v(vals) {}

  static Tensor zeros(std::vector<int64_t> s) {
    Tensor t;
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    t.shape = std::move(s);
    t.v.assign(static_cast<size_t>(n), 0.0);
    return t;
  }
  static Tensor vector(int64_t n) { return zeros({n}); }
  static Tensor matrix(int64_t r, int64_t c) { return zeros({r, c}); }
  static Tensor scalar(double x) {
    Tensor t = zeros({1});
    t.v[0] = x;
    return t;
  }

  int64_t numel() const { return static_cast<int64_t>(v.size()); }
  int64_t rows() const { return shape.empty() ? 0 : shape[0]; }
  int64_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  bool is_vector() const { return shape.size() == 1; }
  bool is_matrix() const { return shape.size() == 2; }
  bool is_scalar() const { return numel() == 1; }

  double& at(int64_t r, int64_t c) { return v[static_cast<size_t>(r * cols() + c)]; }
  double at(int64_t r, int64_t c) const { return v[static_cast<size_t>(r * cols() + c)]; }
  double& operator[](int64_t i) { return v[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return v[static_cast<size_t>(i)]; }

  bool all_finite() const {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

inline double l2_norm(const Tensor& t) {
  double s = 0.0;
  for (double x : t.v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const Tensor& a, const Tensor& b) {
  if (a.numel() != b.numel())
    data_error("dot: length mismatch " + a.shape_str() + " vs " + b.shape_str());
  double s = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) s += a.v[i] * b.v[i];
  return s;
}

// cosine with the zero-norm convention: either norm below 1e-12 gives 0.
inline double cosine_value(const Tensor& a, const Tensor& b) {
  if (a.numel() != b.numel())
    data_error("cosine: length mismatch " + a.shape_str() + " vs " + b.shape_str());
  double na = l2_norm(a), nb = l2_norm(b);
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace panap
