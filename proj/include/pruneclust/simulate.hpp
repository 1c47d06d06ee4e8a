#pragma once

#include "pruneclust/core.hpp"
#include "pruneclust/partition.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pruneclust {

struct IndexRange {
  Index lo = 1;
  Index hi = 1;
};

struct SimSpec {
  IndexRange n_range{30, 100};
  IndexRange p_range{1, 50};
  std::optional<IndexRange> c_range;  // absent = no cluster structure
  Index replicates = 200;
  std::uint64_t seed = 1;

  void validate() const;
};

struct LabelledData {
  DataMatrix data;
  std::vector<int> labels;  // 1..c
};

/// n x p iid standard normal draws.
DataMatrix gen_null(Index n, Index p, std::uint64_t seed);

/// Standard normal noise with cluster j shifted by mu_j * 1_p, where the
/// mu_j are a random permutation of 1..c. Clusters 1..c-1 have floor(n/c)
/// rows each and the last takes the remainder.
LabelledData gen_clustered(Index n, Index p, Index c, std::uint64_t seed);

/// Dataset drawn for one replicate of a SimSpec: sizes first, then data.
struct Replicate {
  Index n = 0;
  Index p = 0;
  Index c = 0;  // 0 for null data
  LabelledData sample;
};
Replicate draw_replicate(const SimSpec& spec, Index replicate);

struct CompareRow {
  Index dataset_id = 0;
  Index k = 0;
  double loss_horizontal = 0.0;
  double loss_weakest = 0.0;  // nearest_up policy
  std::optional<double> loss_weakest_skip;
  std::optional<double> loss_dp;
  std::optional<double> rel_reduction;  // present iff loss_weakest_skip is
};

/// Horizontal vs weakest-link (vs DP) losses for every k in [k_min, k_max]
/// (capped at n) on every replicate, ordered by replicate then k.
/// Output does not depend on `threads`.
std::vector<CompareRow> compare_experiment(const SimSpec& spec, Index k_min, Index k_max, bool with_dp,
                                           unsigned threads = 0);

/// Same comparison on one dataset with an average-linkage tree.
std::vector<CompareRow> compare_dataset(const DataMatrix& data, Index dataset_id, Index k_min, Index k_max,
                                        bool with_dp);

struct ConfusionMatrix {
  std::vector<std::string> labels;          // sorted distinct true labels
  std::vector<std::vector<Index>> counts;   // [true][predicted]
  double error_rate = 0.0;

  Index total() const;
  Index correct() const;
};

/// Each cluster predicts its most frequent true label; ties go to the
/// lexicographically smallest label.
ConfusionMatrix majority_vote_eval(const Partition& partition, const std::vector<std::string>& true_labels);

/// Adjusted Rand index between two partitions of the same rows.
double adjusted_rand_index(const Partition& a, const Partition& b);

}  // namespace pruneclust
