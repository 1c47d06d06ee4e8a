#pragma once

#include "pruneclust/dendrogram.hpp"
#include "pruneclust/dispersion.hpp"
#include "pruneclust/partition.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pruneclust {

/// How to answer a request for a size missing from a pruning sequence.
enum class SizePolicy { nearest_up, skip };

std::string_view to_string(SizePolicy policy);
SizePolicy parse_size_policy(std::string_view name);

/// One subtree of the weakest-link sequence. `alpha` is the complexity
/// parameter at which it becomes the smallest minimizing subtree; the
/// subtree stays optimal until the next step's alpha.
struct PruneStep {
  Index n_leaves = 0;
  double loss_r = 0.0;
  double alpha = 0.0;
  std::vector<NodeRef> frontier;  // sorted by NodeRef
};

/// Nested subtrees from the full tree (n leaves) down to the root alone.
struct PruneSequence {
  std::vector<PruneStep> steps;

  Index n_observations() const { return steps.empty() ? 0 : steps.front().n_leaves; }
  bool contains_size(Index k) const;
};

/// Labels each observation by the frontier node above it.
Partition partition_of(const Dendrogram& tree, std::span<const NodeRef> frontier);

/// Terminal nodes after the first n-k merges (cutree by k).
std::vector<NodeRef> horizontal_frontier_by_k(const Dendrogram& tree, Index k);
/// Terminal nodes after every merge with height <= h. Requires monotone heights.
std::vector<NodeRef> horizontal_frontier_by_height(const Dendrogram& tree, double h);

inline Partition horizontal_cut_by_k(const Dendrogram& tree, Index k) {
  return partition_of(tree, horizontal_frontier_by_k(tree, k));
}
inline Partition horizontal_cut_by_height(const Dendrogram& tree, double h) {
  return partition_of(tree, horizontal_frontier_by_height(tree, h));
}

/// Weakest-link cost-complexity pruning. Each step collapses every internal
/// node of the current subtree attaining the minimal per-node rise
///   g(t) = (R(t) - R(T_t)) / (|leaves(T_t)| - 1).
PruneSequence weakest_link_sequence(const Dendrogram& tree, const LossTable& table);

struct FrontierLoss {
  std::vector<NodeRef> frontier;
  double loss_r = 0.0;
};

/// Minimum-loss pruning for every size 1..n, by dynamic programming over
/// the split of k between the two branches of each node. Optimal per size,
/// not nested across sizes.
class OptimalPruner {
 public:
  OptimalPruner(const Dendrogram& tree, const LossTable& table);

  Index n_leaves() const { return n_leaves_; }
  double loss(Index k) const;
  FrontierLoss solve(Index k) const;

 private:
  void check_k(Index k) const;

  Index n_leaves_;
  std::vector<Merge> merges_;
  // Indexed by slot, then by size j (entry 0 unused).
  std::vector<std::vector<double>> best_;
  std::vector<std::vector<Index>> left_share_;
};

FrontierLoss dp_optimal(const Dendrogram& tree, const LossTable& table, Index k);

/// The sequence step answering a request for k clusters, or nullopt under
/// SizePolicy::skip when k was skipped.
std::optional<PruneStep> select_for_k(const PruneSequence& seq, Index k, SizePolicy policy);

/// The smallest minimizing subtree for a given alpha >= 0.
const PruneStep& step_for_alpha(const PruneSequence& seq, double alpha);

}  // namespace pruneclust
