#include "pruneclust/dispersion.hpp"

#include "pruneclust/partition.hpp"

#include <algorithm>

namespace pruneclust {

Partition::Partition(std::vector<int> assignment, int k) : assignment_(std::move(assignment)), k_(k) {
  if (assignment_.empty()) throw EmptyInputError("partition over zero observations");
  int next = 1;
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    const int id = assignment_[i];
    if (id < 1 || id > k_) {
      throw ValidationError("cluster id " + std::to_string(id) + " at row " + std::to_string(i) +
                            " outside 1.." + std::to_string(k_));
    }
    if (id > next) {
      throw ValidationError("cluster id " + std::to_string(id) + " at row " + std::to_string(i) +
                            " appears before id " + std::to_string(next));
    }
    if (id == next) ++next;
  }
  if (next != k_ + 1) {
    throw ValidationError("cluster id " + std::to_string(next) + " of " + std::to_string(k_) +
                          " is empty");
  }
}

Partition Partition::singletons(Index n) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ids[i] = static_cast<int>(i) + 1;
  return Partition(std::move(ids), static_cast<int>(n));
}

std::vector<std::vector<Index>> Partition::members() const {
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(k_));
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    groups[assignment_[i] - 1].push_back(static_cast<Index>(i));
  }
  return groups;
}

double cross_loss(const NodeStats& a, const NodeStats& b) {
  return static_cast<double>(b.size) * a.sum_sq + static_cast<double>(a.size) * b.sum_sq -
         2.0 * a.sum_x.dot(b.sum_x);
}

LossTable::LossTable(const Dendrogram& tree, std::vector<NodeStats> stats)
    : n_leaves_(tree.n_leaves()), merges_(tree.merges()), stats_(std::move(stats)) {
  if (static_cast<Index>(stats_.size()) != tree.n_nodes()) {
    throw ValidationError("loss table needs one entry per node");
  }
}

void LossTable::check_frontier(std::span<const NodeRef> frontier) const {
  std::vector<int> hits(static_cast<std::size_t>(n_leaves_), 0);
  std::vector<NodeRef> stack;
  for (NodeRef top : frontier) {
    const bool known = top.id != 0 && (top.is_leaf() ? top.row() < n_leaves_
                                                     : top.id <= static_cast<int>(merges_.size()));
    if (!known) throw StructuralError("frontier node " + std::to_string(top.id) + " is not in the tree");
    stack.push_back(top);
    while (!stack.empty()) {
      NodeRef node = stack.back();
      stack.pop_back();
      if (node.is_leaf()) {
        if (++hits[node.row()] > 1) {
          throw StructuralError("frontier overlaps at leaf " + std::to_string(-node.id));
        }
      } else {
        stack.push_back(merges_[node.id - 1].first);
        stack.push_back(merges_[node.id - 1].second);
      }
    }
  }
  for (Index i = 0; i < n_leaves_; ++i) {
    if (hits[i] == 0) throw StructuralError("frontier leaves leaf " + std::to_string(i + 1) + " uncovered");
  }
}

LossTable node_losses(const DataMatrix& data, const Dendrogram& tree) {
  validate_data(data);
  if (data.rows() != tree.n_leaves()) {
    throw ValidationError("data has " + std::to_string(data.rows()) + " rows but tree has " +
                          std::to_string(tree.n_leaves()) + " leaves");
  }
  // Centering leaves pairwise distances unchanged and keeps the merge
  // identity away from catastrophic cancellation.
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Index n = tree.n_leaves();
  std::vector<NodeStats> stats(static_cast<std::size_t>(tree.n_nodes()));
  for (Index i = 0; i < n; ++i) {
    auto& s = stats[i];
    s.node = NodeRef::leaf(i);
    s.size = 1;
    s.sum_x = (data.row(i) - mean).transpose();
    s.sum_sq = s.sum_x.squaredNorm();
  }
  for (Index m = 0; m < tree.n_merges(); ++m) {
    const auto& left = stats[tree.slot(tree.merges()[m].first)];
    const auto& right = stats[tree.slot(tree.merges()[m].second)];
    auto& s = stats[n + m];
    s.node = NodeRef::step(m + 1);
    s.size = left.size + right.size;
    s.sum_x = left.sum_x + right.sum_x;
    s.sum_sq = left.sum_sq + right.sum_sq;
    s.loss_r = std::max(0.0, left.loss_r + right.loss_r + cross_loss(left, right));
  }
  return LossTable(tree, std::move(stats));
}

double tree_loss(const LossTable& table, std::span<const NodeRef> frontier) {
  table.check_frontier(frontier);
  double total = 0.0;
  for (NodeRef node : frontier) total += table.loss(node);
  return total;
}

double tree_wss(const LossTable& table, std::span<const NodeRef> frontier) {
  table.check_frontier(frontier);
  double total = 0.0;
  for (NodeRef node : frontier) total += table.loss(node) / static_cast<double>(table.size(node));
  return total;
}

double cost_complexity(double loss_r, Index n_leaves, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("complexity parameter alpha must be >= 0");
  if (n_leaves < 1) throw DomainError("a pruned tree has at least one terminal node");
  return loss_r + alpha * static_cast<double>(n_leaves);
}

}  // namespace pruneclust
