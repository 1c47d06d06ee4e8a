#include "pruneclust/dendrogram.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace pruneclust {

DistanceMatrix::DistanceMatrix(Index n, Eigen::VectorXd entries) : n_(n), entries_(std::move(entries)) {
  if (n_ < 0 || entries_.size() != n_ * (n_ - 1) / 2) {
    throw ValidationError("condensed distance matrix for n=" + std::to_string(n_) + " needs " +
                          std::to_string(n_ * (n_ - 1) / 2) + " entries, got " +
                          std::to_string(entries_.size()));
  }
  for (Index i = 0; i < entries_.size(); ++i) {
    if (!std::isfinite(entries_[i]) || entries_[i] < 0.0) {
      throw ValidationError("distance entry " + std::to_string(i) + " is negative or non-finite");
    }
  }
}

std::string_view to_string(LinkageKind kind) {
  switch (kind) {
    case LinkageKind::average:
      return "average";
    case LinkageKind::single:
      return "single";
    case LinkageKind::complete:
      return "complete";
  }
  return "unknown";
}

LinkageKind parse_linkage(std::string_view name) {
  if (name == "average") return LinkageKind::average;
  if (name == "single") return LinkageKind::single;
  if (name == "complete") return LinkageKind::complete;
  throw ValidationError("unknown linkage '" + std::string(name) + "'");
}

Dendrogram::Dendrogram(Index n_leaves, std::vector<Merge> merges, std::vector<double> heights,
                       LinkageKind linkage)
    : n_leaves_(n_leaves), merges_(std::move(merges)), heights_(std::move(heights)), linkage_(linkage) {
  if (n_leaves_ < 1) throw EmptyInputError("dendrogram needs at least one leaf");
  if (n_merges() != n_leaves_ - 1) {
    throw ValidationError("dendrogram over " + std::to_string(n_leaves_) + " leaves needs " +
                          std::to_string(n_leaves_ - 1) + " merges, got " +
                          std::to_string(merges_.size()));
  }
  if (heights_.size() != merges_.size()) {
    throw ValidationError("heights and merges differ in length");
  }
  std::vector<bool> used(static_cast<std::size_t>(n_nodes()), false);
  for (Index m = 0; m < n_merges(); ++m) {
    const auto step = m + 1;
    for (NodeRef child : {merges_[m].first, merges_[m].second}) {
      const std::string where = "merge step " + std::to_string(step);
      if (child.id == 0) throw ValidationError(where + " references node 0 (ids are 1-based)");
      if (child.is_leaf() && child.row() >= n_leaves_) {
        throw ValidationError(where + " references leaf " + std::to_string(-child.id) +
                              " beyond n=" + std::to_string(n_leaves_));
      }
      if (!child.is_leaf() && child.id >= step) {
        throw ValidationError(where + " references step " + std::to_string(child.id) +
                              " which is not earlier");
      }
      auto s = static_cast<std::size_t>(slot(child));
      if (used[s]) throw ValidationError(where + " reuses node " + std::to_string(child.id));
      used[s] = true;
    }
    if (!std::isfinite(heights_[m]) || heights_[m] < 0.0) {
      throw ValidationError("height of " + std::string("merge step ") + std::to_string(step) +
                            " is negative or non-finite");
    }
  }
}

std::vector<Index> Dendrogram::subtree_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(n_nodes()), 1);
  for (Index m = 0; m < n_merges(); ++m) {
    sizes[n_leaves_ + m] = sizes[slot(merges_[m].first)] + sizes[slot(merges_[m].second)];
  }
  return sizes;
}

bool Dendrogram::is_monotone() const {
  return std::is_sorted(heights_.begin(), heights_.end());
}

namespace {

// Internal merge steps first, then leaves; ascending within each kind.
Merge canonical_merge(NodeRef a, NodeRef b) {
  auto key = [](NodeRef r) { return std::pair{r.is_leaf(), std::abs(r.id)}; };
  return key(a) <= key(b) ? Merge{a, b} : Merge{b, a};
}

}  // namespace

Dendrogram agglomerate(const DistanceMatrix& dist, LinkageKind linkage) {
  const Index n = dist.size();
  if (n == 0) throw EmptyInputError("cannot cluster zero observations");

  // Working matrix indexed by slot; a merged cluster reuses one of its
  // children's slots. `active` lists live slots from oldest to youngest
  // cluster (leaves by row, then merges in order), so a strict-less scan
  // over i < j picks the lexicographically smallest (older, younger) pair
  // among equal distances.
  Eigen::MatrixXd d(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = dist(i, j);
  }
  std::vector<Index> active(static_cast<std::size_t>(n));
  std::vector<Index> size(static_cast<std::size_t>(n), 1);
  std::vector<NodeRef> node(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    active[i] = i;
    node[i] = NodeRef::leaf(i);
  }

  std::vector<Merge> merges;
  std::vector<double> heights;
  merges.reserve(static_cast<std::size_t>(n - 1));
  heights.reserve(static_cast<std::size_t>(n - 1));

  for (Index step = 1; step < n; ++step) {
    const auto m = static_cast<Index>(active.size());
    double best = std::numeric_limits<double>::infinity();
    Index bi = 0, bj = 1;
    for (Index i = 0; i < m; ++i) {
      const Index si = active[i];
      for (Index j = i + 1; j < m; ++j) {
        const double v = d(si, active[j]);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    const Index a = active[bi], b = active[bj];
    merges.push_back(canonical_merge(node[a], node[b]));
    heights.push_back(best);

    const double na = static_cast<double>(size[a]), nb = static_cast<double>(size[b]);
    for (Index k : active) {
      if (k == a || k == b) continue;
      double updated = 0.0;
      switch (linkage) {
        case LinkageKind::average:
          updated = (na * d(k, a) + nb * d(k, b)) / (na + nb);
          break;
        case LinkageKind::single:
          updated = std::min(d(k, a), d(k, b));
          break;
        case LinkageKind::complete:
          updated = std::max(d(k, a), d(k, b));
          break;
      }
      d(k, a) = d(a, k) = updated;
    }
    size[a] += size[b];
    node[a] = NodeRef::step(step);
    active.erase(active.begin() + bj);
    active.erase(active.begin() + bi);
    active.push_back(a);
  }
  return Dendrogram(n, std::move(merges), std::move(heights), linkage);
}

LeafSets::LeafSets(const Dendrogram& tree)
    : n_leaves_(tree.n_leaves()), sets_(static_cast<std::size_t>(tree.n_nodes())) {
  for (Index i = 0; i < n_leaves_; ++i) sets_[i] = {i};
  for (Index m = 0; m < tree.n_merges(); ++m) {
    const auto& left = sets_[tree.slot(tree.merges()[m].first)];
    const auto& right = sets_[tree.slot(tree.merges()[m].second)];
    auto& merged = sets_[n_leaves_ + m];
    merged.reserve(left.size() + right.size());
    std::merge(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(merged));
  }
}

}  // namespace pruneclust
