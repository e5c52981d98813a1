#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "panap/common.hpp"
#include "panap/purity.hpp"
#include "panap/rng.hpp"

using namespace panap;

namespace {

Tensor vec(std::initializer_list<double> vals) { return Tensor(vals); }

}  // namespace

TEST_CASE("two tight clusters give perfect agreement") {
  std::vector<Tensor> pts;
  std::vector<std::string> labels;
  // Clusters along orthogonal axes; cosine distance within a cluster is 0.
  for (int i = 0; i < 5; ++i) {
    pts.push_back(vec({1.0 + 0.001 * i, 0.0}));
    labels.push_back("left");
  }
  for (int i = 0; i < 5; ++i) {
    pts.push_back(vec({0.0, 2.0 + 0.001 * i}));
    labels.push_back("right");
  }
  PurityReport r = knn_label_purity(pts, labels, "side", 3, Exec::serial, 1);
  CHECK(r.agreement == 1.0);
  CHECK(r.n_points == 10);
  CHECK(r.label_field == "side");
  CHECK(r.per_label.at("left") == 1.0);
  CHECK(r.per_label.at("right") == 1.0);
  CHECK(r.label_counts.at("left") == 5);
  CHECK(r.label_counts.at("right") == 5);
}

TEST_CASE("a single label is trivially pure") {
  std::vector<Tensor> pts;
  std::vector<std::string> labels;
  Rng rng(3);
  for (int i = 0; i < 12; ++i) {
    pts.push_back(vec({rng.unit(), rng.unit(), rng.unit()}));
    labels.push_back("only");
  }
  PurityReport r = knn_label_purity(pts, labels, "f", 4, Exec::serial, 1);
  CHECK(r.agreement == 1.0);
}

TEST_CASE("random labels land near chance level") {
  Rng rng(11);
  std::vector<Tensor> pts;
  std::vector<std::string> labels;
  const int n = 400;
  const int n_labels = 4;
  for (int i = 0; i < n; ++i) {
    pts.push_back(vec({rng.unit() - 0.5, rng.unit() - 0.5, rng.unit() - 0.5,
                       rng.unit() - 0.5}));
    labels.push_back("L" + std::to_string(rng.below(n_labels)));
  }
  PurityReport r = knn_label_purity(pts, labels, "f", 10, Exec::serial, 1);
  CHECK(r.agreement > 0.15);
  CHECK(r.agreement < 0.35);
}

TEST_CASE("mixed composition is reflected in per-label means") {
  // One isolated singleton among an opposing cluster scores 0 for its label.
  std::vector<Tensor> pts{vec({1.0, 0.0}), vec({0.99, 0.01}),
                          vec({0.98, 0.02}), vec({0.0, 1.0})};
  std::vector<std::string> labels{"a", "a", "a", "b"};
  PurityReport r = knn_label_purity(pts, labels, "f", 2, Exec::serial, 1);
  CHECK(r.per_label.at("b") == 0.0);
  CHECK(r.per_label.at("a") == 1.0);
  CHECK(r.agreement == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("input validation") {
  std::vector<Tensor> pts{vec({1.0, 0.0}), vec({0.0, 1.0})};
  std::vector<std::string> labels{"a", "b"};
  CHECK_THROWS_AS(knn_label_purity(pts, labels, "f", 0, Exec::serial, 1),
                  Error);
  CHECK_THROWS_WITH_AS(knn_label_purity(pts, labels, "f", 2, Exec::serial, 1),
                       doctest::Contains("k+1"), Error);
  std::vector<std::string> short_labels{"a"};
  CHECK_THROWS_AS(knn_label_purity(pts, short_labels, "f", 1, Exec::serial, 1),
                  Error);
  std::vector<Tensor> ragged{vec({1.0, 0.0}), vec({0.0, 1.0, 0.5}),
                             vec({1.0, 1.0})};
  std::vector<std::string> three{"a", "b", "c"};
  CHECK_THROWS_AS(knn_label_purity(ragged, three, "f", 1, Exec::serial, 1),
                  Error);
}

TEST_CASE("serial and openmp agree exactly") {
  Rng rng(21);
  std::vector<Tensor> pts;
  std::vector<std::string> labels;
  for (int i = 0; i < 60; ++i) {
    pts.push_back(vec({rng.unit(), rng.unit(), rng.unit()}));
    labels.push_back("L" + std::to_string(rng.below(3)));
  }
  PurityReport a = knn_label_purity(pts, labels, "f", 7, Exec::serial, 1);
  PurityReport b = knn_label_purity(pts, labels, "f", 7, Exec::openmp, 4);
  CHECK(a.agreement == b.agreement);
  CHECK(a.per_label == b.per_label);
  CHECK(a.label_counts == b.label_counts);
}
