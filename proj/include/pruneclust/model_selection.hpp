#pragma once

#include "pruneclust/core.hpp"
#include "pruneclust/dendrogram.hpp"
#include "pruneclust/pruning.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace pruneclust {

/// Observed vs reference log-dispersion curve over k = 1..k_max.
/// Entries are NaN where a size was skipped under SizePolicy::skip.
struct GapCurve {
  std::vector<Index> k_values;
  std::vector<double> log_w;
  std::vector<double> elog_w_ref;
  std::vector<double> gap;
  std::vector<double> se;  // includes the sqrt(1 + 1/B) factor
  Index b = 0;
  std::uint64_t seed = 0;
};

enum class SelectionRule { argmax_gap, first_se };

std::string_view to_string(SelectionRule rule);
SelectionRule parse_selection_rule(std::string_view name);

struct GapOptions {
  SizePolicy size_policy = SizePolicy::nearest_up;
  LinkageKind linkage = LinkageKind::average;
  /// Use sum over clusters of loss_r / n_r (centroid WSS) instead of R(T).
  bool normalized = false;
  /// 0 = PRUNECLUST_THREADS / all cores.
  unsigned threads = 0;
};

/// Uniform sample over the per-feature bounding box of `data`.
DataMatrix reference_sample(const DataMatrix& data, std::uint64_t seed);

/// log W_k for k = 1..k_max along the weakest-link sequence of `data`.
std::vector<double> log_dispersion_curve(const DataMatrix& data, Index k_max, const GapOptions& options);

GapCurve gap_curve(const DataMatrix& data, Index k_max, Index b, std::uint64_t seed,
                   const GapOptions& options = {});

Index choose_k(const GapCurve& curve, SelectionRule rule);

}  // namespace pruneclust
