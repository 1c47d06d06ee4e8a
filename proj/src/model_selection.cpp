#include "pruneclust/model_selection.hpp"

#include "pruneclust/dispersion.hpp"
#include "pruneclust/parallel.hpp"
#include "pruneclust/rng.hpp"

#include <cmath>
#include <limits>

namespace pruneclust {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string_view to_string(SelectionRule rule) {
  return rule == SelectionRule::argmax_gap ? "argmax" : "first-se";
}

SelectionRule parse_selection_rule(std::string_view name) {
  if (name == "argmax" || name == "argmax_gap") return SelectionRule::argmax_gap;
  if (name == "first-se" || name == "first_se") return SelectionRule::first_se;
  throw ValidationError("unknown selection rule '" + std::string(name) + "'");
}

DataMatrix reference_sample(const DataMatrix& data, std::uint64_t seed) {
  validate_data(data);
  const Eigen::RowVectorXd lo = data.colwise().minCoeff();
  const Eigen::RowVectorXd hi = data.colwise().maxCoeff();
  Rng rng(seed);
  DataMatrix sample(data.rows(), data.cols());
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) sample(i, j) = rng.uniform(lo[j], hi[j]);
  }
  return sample;
}

std::vector<double> log_dispersion_curve(const DataMatrix& data, Index k_max, const GapOptions& options) {
  const auto tree = agglomerate(pairwise_distances(data), options.linkage);
  const auto table = node_losses(data, tree);
  const auto seq = weakest_link_sequence(tree, table);
  std::vector<double> curve(static_cast<std::size_t>(k_max), kNaN);
  for (Index k = 1; k <= k_max; ++k) {
    const auto step = select_for_k(seq, k, options.size_policy);
    if (!step) continue;
    const double w = options.normalized ? tree_wss(table, step->frontier) : step->loss_r;
    if (!(w > 0.0)) {
      throw DegenerateDispersionError("within-cluster dispersion is zero at k=" + std::to_string(k) +
                                      "; log is undefined");
    }
    curve[k - 1] = std::log(w);
  }
  return curve;
}

GapCurve gap_curve(const DataMatrix& data, Index k_max, Index b, std::uint64_t seed,
                   const GapOptions& options) {
  validate_data(data);
  if (k_max < 2 || k_max > data.rows()) {
    throw DomainError("k_max=" + std::to_string(k_max) + " outside 2.." + std::to_string(data.rows()));
  }
  if (b < 1) throw DomainError("need at least one reference replicate");

  GapCurve curve;
  curve.b = b;
  curve.seed = seed;
  curve.log_w = log_dispersion_curve(data, k_max, options);

  std::vector<std::vector<double>> reference(static_cast<std::size_t>(b));
  parallel_for(b, options.threads, [&](Index r) {
    reference[r] = log_dispersion_curve(reference_sample(data, derive_seed(seed, static_cast<std::uint64_t>(r))),
                                        k_max, options);
  });

  for (Index k = 1; k <= k_max; ++k) {
    curve.k_values.push_back(k);
    double sum = 0.0;
    Index count = 0;
    for (const auto& ref : reference) {
      if (!std::isnan(ref[k - 1])) {
        sum += ref[k - 1];
        ++count;
      }
    }
    if (count == 0) {
      curve.elog_w_ref.push_back(kNaN);
      curve.se.push_back(kNaN);
      curve.gap.push_back(kNaN);
      continue;
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& ref : reference) {
      if (!std::isnan(ref[k - 1])) ss += (ref[k - 1] - mean) * (ref[k - 1] - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(count));
    curve.elog_w_ref.push_back(mean);
    curve.se.push_back(sd * std::sqrt(1.0 + 1.0 / static_cast<double>(count)));
    curve.gap.push_back(mean - curve.log_w[k - 1]);
  }
  return curve;
}

Index choose_k(const GapCurve& curve, SelectionRule rule) {
  if (curve.gap.empty()) throw EmptyInputError("gap curve is empty");
  const auto size = curve.gap.size();
  std::size_t best = size;
  for (std::size_t i = 0; i < size; ++i) {
    if (std::isnan(curve.gap[i])) continue;
    if (best == size || curve.gap[i] > curve.gap[best]) best = i;
  }
  if (best == size) throw DegenerateDispersionError("gap curve has no defined entries");
  if (rule == SelectionRule::first_se) {
    for (std::size_t i = 0; i + 1 < size; ++i) {
      const double next = curve.gap[i + 1] - curve.se[i + 1];
      if (!std::isnan(curve.gap[i]) && !std::isnan(next) && curve.gap[i] >= next) {
        return curve.k_values.empty() ? static_cast<Index>(i) + 1 : curve.k_values[i];
      }
    }
  }
  return curve.k_values.empty() ? static_cast<Index>(best) + 1 : curve.k_values[best];
}

}  // namespace pruneclust
