#pragma once

#include "pruneclust/core.hpp"

#include <span>
#include <vector>

namespace pruneclust {

/// Cluster assignment per observation. Ids run 1..k and are numbered in
/// order of first appearance by observation index.
class Partition {
 public:
  /// Validates canonical form: every id in 1..k used, first-appearance order.
  Partition(std::vector<int> assignment, int k);

  /// Renumbers arbitrary integer labels into canonical form.
  template <typename Label>
  static Partition from_labels(std::span<const Label> labels);

  static Partition singletons(Index n);

  Index n() const { return static_cast<Index>(assignment_.size()); }
  int k() const { return k_; }
  const std::vector<int>& assignment() const { return assignment_; }
  int operator[](Index row) const { return assignment_[static_cast<std::size_t>(row)]; }

  /// Member rows of each cluster; entry c-1 holds cluster c.
  std::vector<std::vector<Index>> members() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  Partition() = default;
  std::vector<int> assignment_;
  int k_ = 0;
};

template <typename Label>
Partition Partition::from_labels(std::span<const Label> labels) {
  std::vector<Label> seen;
  Partition p;
  p.assignment_.reserve(labels.size());
  for (const Label& label : labels) {
    std::size_t at = 0;
    while (at < seen.size() && !(seen[at] == label)) ++at;
    if (at == seen.size()) seen.push_back(label);
    p.assignment_.push_back(static_cast<int>(at) + 1);
  }
  p.k_ = static_cast<int>(seen.size());
  if (p.k_ == 0) throw EmptyInputError("partition over zero observations");
  return p;
}

namespace detail {
inline void check_partition_rows(Index data_rows, const Partition& partition) {
  if (data_rows != partition.n()) {
    throw ValidationError("partition covers " + std::to_string(partition.n()) +
                          " observations but data has " + std::to_string(data_rows));
  }
}
}  // namespace detail

/// Classical within-cluster sum of squares around each cluster centroid.
template <typename Derived>
double wss_centroid(const Eigen::MatrixBase<Derived>& data, const Partition& partition) {
  detail::check_partition_rows(data.rows(), partition);
  double total = 0.0;
  for (const auto& rows : partition.members()) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(data.cols());
    for (Index r : rows) mean += data.row(r).template cast<double>();
    mean /= static_cast<double>(rows.size());
    for (Index r : rows) total += (data.row(r).template cast<double>() - mean).squaredNorm();
  }
  return total;
}

/// Pairwise dispersion R(T) of an arbitrary partition: sum over clusters of
/// size * centroid WSS.
template <typename Derived>
double partition_loss(const Eigen::MatrixBase<Derived>& data, const Partition& partition) {
  detail::check_partition_rows(data.rows(), partition);
  double total = 0.0;
  for (const auto& rows : partition.members()) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(data.cols());
    for (Index r : rows) mean += data.row(r).template cast<double>();
    mean /= static_cast<double>(rows.size());
    double wss = 0.0;
    for (Index r : rows) wss += (data.row(r).template cast<double>() - mean).squaredNorm();
    total += static_cast<double>(rows.size()) * wss;
  }
  return total;
}

}  // namespace pruneclust
