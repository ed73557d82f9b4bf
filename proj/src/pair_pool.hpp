#pragma once

#include <cstddef>
#include <vector>

namespace safe_explore::detail {

/// Set of pair indices with O(1) uniform draw and removal. Order is deterministic.
class PairPool {
 public:
  explicit PairPool(std::size_t n) : items_(n), slot_(n) {
    for (std::size_t i = 0; i < n; ++i) items_[i] = slot_[i] = i;
  }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t operator[](std::size_t k) const { return items_[k]; }
  void remove(std::size_t pair) {
    const std::size_t k = slot_[pair];
    items_[k] = items_.back();
    slot_[items_[k]] = k;
    items_.pop_back();
  }

 private:
  std::vector<std::size_t> items_;
  std::vector<std::size_t> slot_;
};

}  // namespace safe_explore::detail
