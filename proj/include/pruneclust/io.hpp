#pragma once

#include "pruneclust/core.hpp"
#include "pruneclust/dendrogram.hpp"
#include "pruneclust/model_selection.hpp"
#include "pruneclust/pruning.hpp"
#include "pruneclust/simulate.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pruneclust::io {

struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

/// RFC-4180-style records. Quoted fields may contain commas, doubled quotes
/// and line breaks. `line_numbers[i]` is the 1-based line record i starts on.
struct CsvRecords {
  std::vector<std::vector<std::string>> rows;
  std::vector<Index> line_numbers;
};
CsvRecords parse_csv(std::istream& in);

struct DatasetFile {
  std::filesystem::path path;
  bool has_header = true;
  /// Column name (matched against the header) or 0-based column index.
  std::optional<std::string> label_column;
};

struct Dataset {
  DataMatrix data;
  std::vector<std::string> feature_names;
  std::optional<std::vector<std::string>> labels;
};

Dataset read_dataset(const DatasetFile& file);
Dataset read_dataset(std::istream& in, const DatasetFile& options);

/// Fixed, locale-independent rendering used in every CSV this tool writes
/// (shortest form that round-trips).
std::string format_double(double value);

void write_dataset_csv(std::ostream& out, const DataMatrix& data, const std::vector<int>* labels = nullptr);

/// {"n_leaves", "linkage", "merges": [[a, b], ...], "heights": [...]}
nlohmann::json dendrogram_to_json(const Dendrogram& tree);
Dendrogram dendrogram_from_json(const nlohmann::json& doc);
void write_dendrogram(const Dendrogram& tree, const std::filesystem::path& path);
Dendrogram read_dendrogram(const std::filesystem::path& path);

nlohmann::json sequence_to_json(const PruneSequence& seq);

/// "row_index,cluster_id" with 0-based rows.
void write_partition_csv(std::ostream& out, const Partition& partition);

void write_gap_csv(std::ostream& out, const GapCurve& curve);

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

struct MeanSe {
  Index count = 0;
  double mean = 0.0;
  double se = 0.0;
};

struct CompareSummary {
  struct PerK {
    Index k = 0;
    MeanSe log_horizontal, log_weakest, log_weakest_skip, log_dp;
  };
  std::vector<PerK> per_k;
  Index rel_reduction_count = 0;
  std::optional<double> median_rel_reduction;
};

/// Per-k mean and standard error of log losses, and the median relative
/// reduction over rows where the requested size was in the sequence.
CompareSummary summarize_compare(const std::vector<CompareRow>& rows);
nlohmann::json summary_to_json(const CompareSummary& summary);

nlohmann::json confusion_to_json(const ConfusionMatrix& cm);

}  // namespace pruneclust::io
