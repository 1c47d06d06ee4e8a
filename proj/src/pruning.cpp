#include "pruneclust/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pruneclust {

std::string_view to_string(SizePolicy policy) {
  return policy == SizePolicy::nearest_up ? "nearest_up" : "skip";
}

SizePolicy parse_size_policy(std::string_view name) {
  if (name == "nearest_up") return SizePolicy::nearest_up;
  if (name == "skip") return SizePolicy::skip;
  throw ValidationError("unknown size policy '" + std::string(name) + "'");
}

bool PruneSequence::contains_size(Index k) const {
  return std::any_of(steps.begin(), steps.end(), [k](const PruneStep& s) { return s.n_leaves == k; });
}

Partition partition_of(const Dendrogram& tree, std::span<const NodeRef> frontier) {
  const Index n = tree.n_leaves();
  std::vector<Index> owner(static_cast<std::size_t>(n), -1);
  std::vector<NodeRef> stack;
  for (std::size_t f = 0; f < frontier.size(); ++f) {
    if (!tree.contains(frontier[f])) {
      throw StructuralError("frontier node " + std::to_string(frontier[f].id) + " is not in the tree");
    }
    stack.push_back(frontier[f]);
    while (!stack.empty()) {
      NodeRef node = stack.back();
      stack.pop_back();
      if (node.is_leaf()) {
        if (owner[node.row()] != -1) {
          throw StructuralError("frontier overlaps at leaf " + std::to_string(-node.id));
        }
        owner[node.row()] = static_cast<Index>(f);
      } else {
        stack.push_back(tree.children(node).first);
        stack.push_back(tree.children(node).second);
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (owner[i] == -1) throw StructuralError("frontier leaves leaf " + std::to_string(i + 1) + " uncovered");
  }
  return Partition::from_labels(std::span<const Index>(owner));
}

std::vector<NodeRef> horizontal_frontier_by_k(const Dendrogram& tree, Index k) {
  const Index n = tree.n_leaves();
  if (k < 1 || k > n) {
    throw DomainError("k=" + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  const Index performed = n - k;
  // parent merge step of every slot; 0 for the root
  std::vector<Index> parent(static_cast<std::size_t>(tree.n_nodes()), 0);
  for (Index m = 0; m < tree.n_merges(); ++m) {
    parent[tree.slot(tree.merges()[m].first)] = m + 1;
    parent[tree.slot(tree.merges()[m].second)] = m + 1;
  }
  std::vector<NodeRef> frontier;
  frontier.reserve(static_cast<std::size_t>(k));
  for (Index s = 0; s < tree.n_nodes(); ++s) {
    const NodeRef node = tree.node_at(s);
    const bool formed = node.is_leaf() || node.id <= performed;
    const bool open = parent[s] == 0 || parent[s] > performed;
    if (formed && open) frontier.push_back(node);
  }
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

std::vector<NodeRef> horizontal_frontier_by_height(const Dendrogram& tree, double h) {
  if (!(h >= 0.0)) throw DomainError("cut height must be >= 0");
  if (!tree.is_monotone()) {
    throw ValidationError("dendrogram heights are not monotone; cutting by height is ill-defined");
  }
  const auto& heights = tree.heights();
  const auto performed = std::upper_bound(heights.begin(), heights.end(), h) - heights.begin();
  return horizontal_frontier_by_k(tree, tree.n_leaves() - static_cast<Index>(performed));
}

PruneSequence weakest_link_sequence(const Dendrogram& tree, const LossTable& table) {
  if (table.n_leaves() != tree.n_leaves()) {
    throw ValidationError("loss table does not belong to this tree");
  }
  const Index n = tree.n_leaves();
  const Index merges = tree.n_merges();
  const auto& merge = tree.merges();

  PruneSequence seq;
  {
    PruneStep full;
    full.n_leaves = n;
    for (Index i = 0; i < n; ++i) full.frontier.push_back(NodeRef::leaf(i));
    std::sort(full.frontier.begin(), full.frontier.end());
    full.loss_r = tree_loss(table, full.frontier);
    seq.steps.push_back(std::move(full));
  }
  if (n == 1) return seq;

  // Two values of g closer than this are treated as a tie.
  const double tie_scale = 1e-13 * table.root_loss() / static_cast<double>(n);

  std::vector<bool> collapsed(static_cast<std::size_t>(merges + 1), false);  // by step
  std::vector<bool> live(static_cast<std::size_t>(merges + 1), false);
  std::vector<Index> leaves(static_cast<std::size_t>(merges + 1), 0);
  std::vector<double> branch_loss(static_cast<std::size_t>(merges + 1), 0.0);
  std::vector<double> rise(static_cast<std::size_t>(merges + 1), 0.0);

  auto terminal_stats = [&](NodeRef child) -> std::pair<Index, double> {
    if (child.is_leaf() || collapsed[child.id]) return {1, table.loss(child)};
    return {leaves[child.id], branch_loss[child.id]};
  };

  double alpha = 0.0;
  while (!collapsed[merges]) {
    for (Index m = 1; m <= merges; ++m) {
      const auto [ll, lr] = terminal_stats(merge[m - 1].first);
      const auto [rl, rr] = terminal_stats(merge[m - 1].second);
      leaves[m] = ll + rl;
      branch_loss[m] = lr + rr;
    }
    live[merges] = true;
    for (Index m = merges; m >= 1; --m) {
      for (NodeRef child : {merge[m - 1].first, merge[m - 1].second}) {
        if (!child.is_leaf()) live[child.id] = live[m] && !collapsed[m];
      }
    }
    double min_rise = std::numeric_limits<double>::infinity();
    for (Index m = 1; m <= merges; ++m) {
      if (!live[m] || collapsed[m]) continue;
      rise[m] = (table.loss(NodeRef::step(m)) - branch_loss[m]) / static_cast<double>(leaves[m] - 1);
      min_rise = std::min(min_rise, rise[m]);
    }
    const double tol = 1e-10 * std::abs(min_rise) + tie_scale;
    for (Index m = 1; m <= merges; ++m) {
      if (live[m] && !collapsed[m] && rise[m] <= min_rise + tol) collapsed[m] = true;
    }
    // g_min is nondecreasing in exact arithmetic; hold it there under rounding.
    alpha = std::max(alpha, min_rise);

    PruneStep step;
    std::vector<NodeRef> stack{tree.root()};
    while (!stack.empty()) {
      NodeRef node = stack.back();
      stack.pop_back();
      if (node.is_leaf() || collapsed[node.id]) {
        step.frontier.push_back(node);
      } else {
        stack.push_back(tree.children(node).first);
        stack.push_back(tree.children(node).second);
      }
    }
    std::sort(step.frontier.begin(), step.frontier.end());
    step.n_leaves = static_cast<Index>(step.frontier.size());
    step.loss_r = tree_loss(table, step.frontier);
    step.alpha = alpha;
    seq.steps.push_back(std::move(step));
  }
  return seq;
}

OptimalPruner::OptimalPruner(const Dendrogram& tree, const LossTable& table)
    : n_leaves_(tree.n_leaves()),
      merges_(tree.merges()),
      best_(static_cast<std::size_t>(tree.n_nodes())),
      left_share_(static_cast<std::size_t>(tree.n_nodes())) {
  if (table.n_leaves() != tree.n_leaves()) {
    throw ValidationError("loss table does not belong to this tree");
  }
  const auto sizes = tree.subtree_sizes();
  for (Index i = 0; i < n_leaves_; ++i) best_[i] = {0.0, table.loss(NodeRef::leaf(i))};
  for (Index m = 0; m < tree.n_merges(); ++m) {
    const Index s = n_leaves_ + m;
    const Index ls = tree.slot(merges_[m].first), rs = tree.slot(merges_[m].second);
    const Index a = sizes[ls], b = sizes[rs];
    auto& best = best_[s];
    auto& share = left_share_[s];
    best.assign(static_cast<std::size_t>(a + b + 1), std::numeric_limits<double>::infinity());
    share.assign(static_cast<std::size_t>(a + b + 1), 0);
    best[1] = table.loss(NodeRef::step(m + 1));
    for (Index j = 2; j <= a + b; ++j) {
      for (Index jl = std::max<Index>(1, j - b); jl <= std::min(a, j - 1); ++jl) {
        const double v = best_[ls][jl] + best_[rs][j - jl];
        if (v < best[j]) {
          best[j] = v;
          share[j] = jl;
        }
      }
    }
  }
}

void OptimalPruner::check_k(Index k) const {
  if (k < 1 || k > n_leaves_) {
    throw DomainError("k=" + std::to_string(k) + " outside 1.." + std::to_string(n_leaves_));
  }
}

double OptimalPruner::loss(Index k) const {
  check_k(k);
  return best_.back()[k];
}

FrontierLoss OptimalPruner::solve(Index k) const {
  check_k(k);
  FrontierLoss out;
  out.loss_r = best_.back()[k];
  auto slot = [this](NodeRef r) { return r.is_leaf() ? r.row() : n_leaves_ - 1 + r.id; };
  const NodeRef root = n_leaves_ == 1 ? NodeRef::leaf(0) : NodeRef::step(n_leaves_ - 1);
  std::vector<std::pair<NodeRef, Index>> stack{{root, k}};
  while (!stack.empty()) {
    auto [node, j] = stack.back();
    stack.pop_back();
    if (j == 1) {
      out.frontier.push_back(node);
      continue;
    }
    const Index jl = left_share_[slot(node)][j];
    stack.emplace_back(merges_[node.id - 1].first, jl);
    stack.emplace_back(merges_[node.id - 1].second, j - jl);
  }
  std::sort(out.frontier.begin(), out.frontier.end());
  return out;
}

FrontierLoss dp_optimal(const Dendrogram& tree, const LossTable& table, Index k) {
  return OptimalPruner(tree, table).solve(k);
}

std::optional<PruneStep> select_for_k(const PruneSequence& seq, Index k, SizePolicy policy) {
  const Index n = seq.n_observations();
  if (k < 1 || k > n) throw DomainError("k=" + std::to_string(k) + " outside 1.." + std::to_string(n));
  // steps are ordered by strictly decreasing size; find the last one with size >= k
  const PruneStep* hit = nullptr;
  for (const auto& step : seq.steps) {
    if (step.n_leaves >= k) hit = &step;
  }
  if (hit->n_leaves == k || policy == SizePolicy::nearest_up) return *hit;
  return std::nullopt;
}

const PruneStep& step_for_alpha(const PruneSequence& seq, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("complexity parameter alpha must be >= 0");
  if (seq.steps.empty()) throw EmptyInputError("empty pruning sequence");
  const PruneStep* hit = &seq.steps.front();
  for (const auto& step : seq.steps) {
    if (step.alpha <= alpha) hit = &step;
  }
  return *hit;
}

}  // namespace pruneclust
