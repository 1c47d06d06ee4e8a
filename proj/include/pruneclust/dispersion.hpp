#pragma once

#include "pruneclust/core.hpp"
#include "pruneclust/dendrogram.hpp"

#include <span>
#include <vector>

namespace pruneclust {

/// Per-node summary. `loss_r` is the sum over unordered member pairs of
/// squared Euclidean distance, which equals size * (centroid WSS).
struct NodeStats {
  NodeRef node;
  Index size = 0;
  double loss_r = 0.0;
  Eigen::VectorXd sum_x;  // coordinates are centered on the dataset mean
  double sum_sq = 0.0;
};

/// Sum of squared distances over all cross pairs of two member sets.
double cross_loss(const NodeStats& a, const NodeStats& b);

/// NodeStats for every leaf and merge of a tree, plus enough of the tree
/// structure to validate pruning frontiers against it.
class LossTable {
 public:
  LossTable(const Dendrogram& tree, std::vector<NodeStats> stats);

  Index n_leaves() const { return n_leaves_; }
  const NodeStats& operator[](NodeRef node) const { return stats_[slot(node)]; }
  double loss(NodeRef node) const { return stats_[slot(node)].loss_r; }
  Index size(NodeRef node) const { return stats_[slot(node)].size; }
  double root_loss() const { return stats_.back().loss_r; }
  const std::vector<NodeStats>& stats() const { return stats_; }

  /// Throws StructuralError unless `frontier` covers every leaf exactly once.
  void check_frontier(std::span<const NodeRef> frontier) const;

 private:
  Index slot(NodeRef node) const { return node.is_leaf() ? node.row() : n_leaves_ - 1 + node.id; }

  Index n_leaves_;
  std::vector<Merge> merges_;
  std::vector<NodeStats> stats_;
};

/// Bottom-up NodeStats via the merge identity; O(n p) beyond the tree walk.
LossTable node_losses(const DataMatrix& data, const Dendrogram& tree);

/// R(T): total pairwise loss over the terminal nodes of a pruned tree.
double tree_loss(const LossTable& table, std::span<const NodeRef> frontier);

/// Sum of loss_r / size over a frontier, i.e. the classical centroid WSS.
double tree_wss(const LossTable& table, std::span<const NodeRef> frontier);

/// R_alpha(T) = R(T) + alpha |T~|.
double cost_complexity(double loss_r, Index n_leaves, double alpha);

}  // namespace pruneclust
