#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "panap/data.hpp"

namespace panap {

// Categorical vocabulary with UNKNOWN pinned to index 0 and the remaining
// values sorted, so index assignment is independent of insertion order.
class Vocab {
 public:
  Vocab() { add_unknown(); }

  template <typename Iter>
  static Vocab build(Iter begin, Iter end) {
    std::set<std::string> uniq(begin, end);
    uniq.erase(kUnknown);
    Vocab v;
    for (const auto& s : uniq) {
      v.index_.emplace(s, static_cast<int>(v.values_.size()));
      v.values_.push_back(s);
    }
    return v;
  }

  static Vocab from_values(const std::vector<std::string>& values) {
    return build(values.begin(), values.end());
  }

  // 0 (the UNKNOWN row) when the value was never seen.
  int index_of(const std::string& value) const {
    auto it = index_.find(value);
    return it == index_.end() ? 0 : it->second;
  }

  const std::string& value(int i) const { return values_[i]; }
  const std::vector<std::string>& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  void add_unknown() {
    index_.emplace(kUnknown, 0);
    values_.push_back(kUnknown);
  }

  std::vector<std::string> values_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace panap
