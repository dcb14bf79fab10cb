#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace bslab {

/// Disjoint sets with union by size and path halving. Each set also carries
/// a count of marked elements (boundary sites in the percolation sweep).
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), marked_(n, 0), sets_(n) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns the representative of the merged set; a no-op if already joined.
  std::uint32_t unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    marked_[a] += marked_[b];
    --sets_;
    return a;
  }

  void reset(std::uint32_t x, bool marked) {
    parent_[x] = x;
    size_[x] = 1;
    marked_[x] = marked ? 1 : 0;
  }

  std::uint32_t size_of(std::uint32_t x) { return size_[find(x)]; }
  std::uint32_t marked_in(std::uint32_t x) { return marked_[find(x)]; }
  bool connected(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }
  /// Number of disjoint sets among all n elements.
  std::size_t set_count() const { return sets_; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint32_t> marked_;
  std::size_t sets_;
};

}  // namespace bslab
