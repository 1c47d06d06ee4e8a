#pragma once

#include "pruneclust/core.hpp"

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pruneclust {

/// Condensed upper-triangular distance matrix over n points.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(Index n, Eigen::VectorXd entries);

  Index size() const { return n_; }
  const Eigen::VectorXd& entries() const { return entries_; }

  /// 0-based; entry(i, i) == 0.
  double operator()(Index i, Index j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return entries_[condensed_index(i, j)];
  }

  Index condensed_index(Index i, Index j) const { return n_ * i - i * (i + 1) / 2 + (j - i - 1); }

 private:
  Index n_ = 0;
  Eigen::VectorXd entries_;
};

namespace detail {
template <typename Derived, typename Transform>
DistanceMatrix pairwise(const Eigen::MatrixBase<Derived>& data, Transform transform) {
  validate_data(data);
  const Index n = data.rows();
  Eigen::VectorXd entries(n * (n - 1) / 2);
  Index at = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      entries[at++] = transform((data.row(i) - data.row(j)).template cast<double>().squaredNorm());
    }
  }
  return DistanceMatrix(n, std::move(entries));
}
}  // namespace detail

/// Squared Euclidean distances; the dispersion loss is built on these.
template <typename Derived>
DistanceMatrix pairwise_sq_distances(const Eigen::MatrixBase<Derived>& data) {
  return detail::pairwise(data, [](double d2) { return d2; });
}

/// Raw Euclidean distances; what the linkage heights are measured in.
template <typename Derived>
DistanceMatrix pairwise_distances(const Eigen::MatrixBase<Derived>& data) {
  return detail::pairwise(data, [](double d2) { return std::sqrt(d2); });
}

enum class LinkageKind { average, single, complete };

std::string_view to_string(LinkageKind kind);
LinkageKind parse_linkage(std::string_view name);

/// Reference to a dendrogram node using the merge-list convention:
/// -i is leaf i (1-based), +m is the cluster formed at merge step m.
struct NodeRef {
  int id = 0;

  static constexpr NodeRef leaf(Index row) { return NodeRef{-static_cast<int>(row) - 1}; }
  static constexpr NodeRef step(Index m) { return NodeRef{static_cast<int>(m)}; }

  constexpr bool is_leaf() const { return id < 0; }
  /// 0-based observation index; only valid for leaves.
  constexpr Index row() const { return -static_cast<Index>(id) - 1; }

  friend constexpr auto operator<=>(NodeRef, NodeRef) = default;
};

struct Merge {
  NodeRef first;
  NodeRef second;
  friend bool operator==(const Merge&, const Merge&) = default;
};

/// Binary merge tree over n leaves. Immutable once constructed; the
/// constructor validates the merge-list convention.
class Dendrogram {
 public:
  Dendrogram(Index n_leaves, std::vector<Merge> merges, std::vector<double> heights,
             LinkageKind linkage);

  Index n_leaves() const { return n_leaves_; }
  Index n_merges() const { return static_cast<Index>(merges_.size()); }
  Index n_nodes() const { return 2 * n_leaves_ - 1; }
  const std::vector<Merge>& merges() const { return merges_; }
  const std::vector<double>& heights() const { return heights_; }
  LinkageKind linkage() const { return linkage_; }

  NodeRef root() const { return n_leaves_ == 1 ? NodeRef::leaf(0) : NodeRef::step(n_merges()); }
  const Merge& children(NodeRef internal) const { return merges_[internal.id - 1]; }

  /// Dense index in [0, 2n-1): leaves first by row, then merge steps in order.
  Index slot(NodeRef node) const {
    return node.is_leaf() ? node.row() : n_leaves_ - 1 + node.id;
  }
  NodeRef node_at(Index slot) const {
    return slot < n_leaves_ ? NodeRef::leaf(slot) : NodeRef::step(slot - n_leaves_ + 1);
  }
  bool contains(NodeRef node) const {
    return node.id != 0 && (node.is_leaf() ? node.row() < n_leaves_ : node.id <= n_merges());
  }

  /// Number of leaves under every node, indexed by slot.
  std::vector<Index> subtree_sizes() const;

  /// True when heights never decrease along the merge order.
  bool is_monotone() const;

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;

 private:
  Index n_leaves_;
  std::vector<Merge> merges_;
  std::vector<double> heights_;
  LinkageKind linkage_;
};

/// Agglomerative clustering by repeated closest-pair merging with
/// Lance-Williams updates. Heights are in the units of `dist`.
Dendrogram agglomerate(const DistanceMatrix& dist, LinkageKind linkage);

/// Leaf rows (0-based, ascending) under every node of a tree.
class LeafSets {
 public:
  explicit LeafSets(const Dendrogram& tree);
  const std::vector<Index>& operator[](NodeRef node) const {
    return sets_[node.is_leaf() ? node.row() : n_leaves_ - 1 + node.id];
  }

 private:
  Index n_leaves_;
  std::vector<std::vector<Index>> sets_;
};

inline LeafSets leaf_sets(const Dendrogram& tree) { return LeafSets(tree); }

}  // namespace pruneclust
