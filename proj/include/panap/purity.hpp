#pragma once

#include <map>
#include <string>
#include <vector>

#include "panap/parallel.hpp"
#include "panap/tensor.hpp"

namespace panap {

struct PurityReport {
  std::string label_field;
  int k = 10;
  size_t n_points = 0;
  double agreement = 0.0;                 // mean over points
  std::map<std::string, double> per_label;  // mean agreement per label
  std::map<std::string, int> label_counts;
};

// Mean fraction of each point's k nearest neighbors (cosine distance, the
// point itself excluded, ties by ascending index) that share its label.
// High agreement means the embedding clusters by that label.
PurityReport knn_label_purity(const std::vector<Tensor>& points,
                              const std::vector<std::string>& labels,
                              const std::string& label_field, int k,
                              Exec exec, int workers);

}  // namespace panap
