#include "pruneclust/simulate.hpp"

#include "pruneclust/dendrogram.hpp"
#include "pruneclust/dispersion.hpp"
#include "pruneclust/parallel.hpp"
#include "pruneclust/pruning.hpp"
#include "pruneclust/rng.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace pruneclust {

void SimSpec::validate() const {
  auto check = [](const IndexRange& r, const char* name) {
    if (r.lo < 1 || r.hi < r.lo) {
      throw DomainError(std::string(name) + " range [" + std::to_string(r.lo) + ", " +
                        std::to_string(r.hi) + "] is empty or non-positive");
    }
  };
  check(n_range, "n");
  check(p_range, "p");
  if (c_range) check(*c_range, "c");
  if (replicates < 1) throw DomainError("need at least one replicate");
}

DataMatrix gen_null(Index n, Index p, std::uint64_t seed) {
  if (n < 1 || p < 1) throw DomainError("gen_null needs n, p >= 1");
  Rng rng(seed);
  DataMatrix data(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) data(i, j) = rng.normal();
  }
  return data;
}

LabelledData gen_clustered(Index n, Index p, Index c, std::uint64_t seed) {
  if (n < 1 || p < 1) throw DomainError("gen_clustered needs n, p >= 1");
  if (c < 1 || c > n) {
    throw DomainError("cluster count c=" + std::to_string(c) + " outside 1.." + std::to_string(n));
  }
  Rng rng(seed);
  LabelledData out;
  out.data.resize(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) out.data(i, j) = rng.normal();
  }
  std::vector<int> shift(static_cast<std::size_t>(c));
  std::iota(shift.begin(), shift.end(), 1);
  for (Index i = c - 1; i > 0; --i) {
    std::swap(shift[i], shift[rng.uniform_int(0, i)]);
  }
  const Index block = n / c;
  out.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index cluster = std::min(i / block, c - 1);
    out.labels[i] = static_cast<int>(cluster) + 1;
    out.data.row(i).array() += static_cast<double>(shift[cluster]);
  }
  return out;
}

Replicate draw_replicate(const SimSpec& spec, Index replicate) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(replicate)));
  Replicate r;
  r.n = rng.uniform_int(spec.n_range.lo, spec.n_range.hi);
  r.p = rng.uniform_int(spec.p_range.lo, spec.p_range.hi);
  if (spec.c_range) r.c = rng.uniform_int(spec.c_range->lo, std::min(spec.c_range->hi, r.n));
  const std::uint64_t data_seed = rng.next_u64();
  if (spec.c_range) {
    r.sample = gen_clustered(r.n, r.p, r.c, data_seed);
  } else {
    r.sample.data = gen_null(r.n, r.p, data_seed);
  }
  return r;
}

std::vector<CompareRow> compare_dataset(const DataMatrix& data, Index dataset_id, Index k_min, Index k_max,
                                        bool with_dp) {
  if (k_min < 1 || k_max < k_min) throw DomainError("k range is empty");
  const auto tree = agglomerate(pairwise_distances(data), LinkageKind::average);
  const auto table = node_losses(data, tree);
  const auto seq = weakest_link_sequence(tree, table);
  std::optional<OptimalPruner> dp;
  if (with_dp) dp.emplace(tree, table);

  std::vector<CompareRow> rows;
  for (Index k = k_min; k <= std::min(k_max, data.rows()); ++k) {
    CompareRow row;
    row.dataset_id = dataset_id;
    row.k = k;
    row.loss_horizontal = tree_loss(table, horizontal_frontier_by_k(tree, k));
    row.loss_weakest = select_for_k(seq, k, SizePolicy::nearest_up)->loss_r;
    if (auto exact = select_for_k(seq, k, SizePolicy::skip)) {
      row.loss_weakest_skip = exact->loss_r;
      row.rel_reduction = row.loss_horizontal > 0.0
                              ? (row.loss_horizontal - exact->loss_r) / row.loss_horizontal
                              : 0.0;
    }
    if (dp) row.loss_dp = dp->loss(k);
    rows.push_back(row);
  }
  return rows;
}

std::vector<CompareRow> compare_experiment(const SimSpec& spec, Index k_min, Index k_max, bool with_dp,
                                           unsigned threads) {
  spec.validate();
  if (k_min < 2 || k_max < k_min) {
    throw DomainError("compare needs 2 <= k_min <= k_max, got " + std::to_string(k_min) + ".." +
                      std::to_string(k_max));
  }
  std::vector<std::vector<CompareRow>> per_replicate(static_cast<std::size_t>(spec.replicates));
  parallel_for(spec.replicates, threads, [&](Index r) {
    const auto rep = draw_replicate(spec, r);
    per_replicate[r] = compare_dataset(rep.sample.data, r, k_min, k_max, with_dp);
  });
  std::vector<CompareRow> rows;
  for (auto& chunk : per_replicate) rows.insert(rows.end(), chunk.begin(), chunk.end());
  return rows;
}

Index ConfusionMatrix::total() const {
  Index sum = 0;
  for (const auto& row : counts) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

Index ConfusionMatrix::correct() const {
  Index sum = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
  return sum;
}

ConfusionMatrix majority_vote_eval(const Partition& partition, const std::vector<std::string>& true_labels) {
  if (static_cast<Index>(true_labels.size()) != partition.n()) {
    throw ValidationError("partition covers " + std::to_string(partition.n()) + " observations but " +
                          std::to_string(true_labels.size()) + " labels were given");
  }
  ConfusionMatrix cm;
  cm.labels = true_labels;
  std::sort(cm.labels.begin(), cm.labels.end());
  cm.labels.erase(std::unique(cm.labels.begin(), cm.labels.end()), cm.labels.end());
  auto label_index = [&](const std::string& label) {
    return static_cast<std::size_t>(std::lower_bound(cm.labels.begin(), cm.labels.end(), label) -
                                    cm.labels.begin());
  };

  const auto L = cm.labels.size();
  std::vector<std::vector<Index>> tally(static_cast<std::size_t>(partition.k()), std::vector<Index>(L, 0));
  for (Index i = 0; i < partition.n(); ++i) ++tally[partition[i] - 1][label_index(true_labels[i])];
  std::vector<std::size_t> predicted(tally.size());
  for (std::size_t c = 0; c < tally.size(); ++c) {
    // max_element returns the first maximum, i.e. the smallest label
    predicted[c] = static_cast<std::size_t>(std::max_element(tally[c].begin(), tally[c].end()) - tally[c].begin());
  }

  cm.counts.assign(L, std::vector<Index>(L, 0));
  for (Index i = 0; i < partition.n(); ++i) {
    ++cm.counts[label_index(true_labels[i])][predicted[partition[i] - 1]];
  }
  cm.error_rate = 1.0 - static_cast<double>(cm.correct()) / static_cast<double>(partition.n());
  return cm;
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.n() != b.n()) throw ValidationError("partitions cover different numbers of observations");
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  std::map<std::pair<int, int>, Index> joint;
  std::vector<Index> row_sums(static_cast<std::size_t>(a.k()), 0), col_sums(static_cast<std::size_t>(b.k()), 0);
  for (Index i = 0; i < a.n(); ++i) {
    ++joint[{a[i], b[i]}];
    ++row_sums[a[i] - 1];
    ++col_sums[b[i] - 1];
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [cell, count] : joint) index += choose2(static_cast<double>(count));
  for (Index v : row_sums) sum_a += choose2(static_cast<double>(v));
  for (Index v : col_sums) sum_b += choose2(static_cast<double>(v));
  const double expected = sum_a * sum_b / choose2(static_cast<double>(a.n()));
  const double maximum = 0.5 * (sum_a + sum_b);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

}  // namespace pruneclust
