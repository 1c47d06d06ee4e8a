#include "pruneclust/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace pruneclust::io {

using nlohmann::json;

CsvRecords parse_csv(std::istream& in) {
  CsvRecords out;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  Index line = 1, row_start = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (row_has_content || row.size() > 1 || !row.front().empty()) {
      out.rows.push_back(std::move(row));
      out.line_numbers.push_back(row_start);
    }
    row.clear();
    row_has_content = false;
  };

  char ch;
  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        row_start = ++line;
        break;
      default:
        field += ch;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field starting on line " + std::to_string(row_start));
  if (!field.empty() || !row.empty() || row_has_content) end_row();
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

Dataset read_dataset(std::istream& in, const DatasetFile& options) {
  const auto records = parse_csv(in);
  if (records.rows.empty()) throw EmptyInputError("dataset file is empty");

  std::size_t first_data = 0;
  std::vector<std::string> header;
  if (options.has_header) {
    header = records.rows.front();
    for (auto& h : header) h = trim(h);
    first_data = 1;
  }
  if (records.rows.size() <= first_data) throw EmptyInputError("dataset has a header but no data rows");
  const std::size_t width = records.rows[first_data].size();
  if (options.has_header && header.size() != width) {
    throw ParseError("line " + std::to_string(records.line_numbers[first_data]) + ": expected " +
                     std::to_string(header.size()) + " fields to match the header, got " +
                     std::to_string(width));
  }

  std::optional<std::size_t> label_col;
  if (options.label_column) {
    const auto& name = *options.label_column;
    if (auto it = std::find(header.begin(), header.end(), name); it != header.end()) {
      label_col = static_cast<std::size_t>(it - header.begin());
    } else {
      std::size_t index = 0;
      const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), index);
      if (ec != std::errc() || ptr != name.data() + name.size() || index >= width) {
        throw ValidationError("label column '" + name + "' not found");
      }
      label_col = index;
    }
  }

  const std::size_t n = records.rows.size() - first_data;
  const std::size_t p = width - (label_col ? 1 : 0);
  if (p == 0) throw EmptyInputError("dataset has no feature columns");

  Dataset ds;
  ds.data.resize(static_cast<Index>(n), static_cast<Index>(p));
  if (label_col) ds.labels.emplace();
  for (std::size_t c = 0; c < width; ++c) {
    if (label_col && c == *label_col) continue;
    ds.feature_names.push_back(options.has_header ? header[c] : "x" + std::to_string(ds.feature_names.size() + 1));
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = records.rows[first_data + r];
    const auto line = records.line_numbers[first_data + r];
    if (row.size() != width) {
      throw ParseError("line " + std::to_string(line) + ": expected " + std::to_string(width) +
                       " fields, got " + std::to_string(row.size()));
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (label_col && c == *label_col) {
        ds.labels->push_back(trim(row[c]));
        continue;
      }
      const auto value = parse_double(row[c]);
      if (!value) {
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(c + 1) +
                         ": cannot parse '" + row[c] + "' as a finite number");
      }
      ds.data(static_cast<Index>(r), static_cast<Index>(j++)) = *value;
    }
  }
  return ds;
}

Dataset read_dataset(const DatasetFile& file) {
  std::ifstream in(file.path, std::ios::binary);
  if (!in) throw ValidationError("cannot open dataset file " + file.path.string());
  return read_dataset(in, file);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "NA";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_dataset_csv(std::ostream& out, const DataMatrix& data, const std::vector<int>* labels) {
  for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << 'x' << j + 1;
  if (labels) out << ",label";
  out << '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << format_double(data(i, j));
    if (labels) out << ',' << (*labels)[i];
    out << '\n';
  }
}

json dendrogram_to_json(const Dendrogram& tree) {
  json merges = json::array();
  for (const auto& m : tree.merges()) merges.push_back({m.first.id, m.second.id});
  return {{"n_leaves", tree.n_leaves()},
          {"linkage", std::string(to_string(tree.linkage()))},
          {"merges", std::move(merges)},
          {"heights", tree.heights()}};
}

Dendrogram dendrogram_from_json(const json& doc) {
  try {
    const auto n = doc.at("n_leaves").get<Index>();
    const auto linkage = parse_linkage(doc.at("linkage").get<std::string>());
    std::vector<Merge> merges;
    for (const auto& pair : doc.at("merges")) {
      if (!pair.is_array() || pair.size() != 2) throw ValidationError("each merge must be a pair [a, b]");
      merges.push_back({NodeRef{pair[0].get<int>()}, NodeRef{pair[1].get<int>()}});
    }
    auto heights = doc.at("heights").get<std::vector<double>>();
    return Dendrogram(n, std::move(merges), std::move(heights), linkage);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed dendrogram JSON: ") + e.what());
  }
}

void write_dendrogram(const Dendrogram& tree, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << dendrogram_to_json(tree).dump(2) << '\n';
}

Dendrogram read_dendrogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dendrogram file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return dendrogram_from_json(doc);
}

json sequence_to_json(const PruneSequence& seq) {
  json steps = json::array();
  for (const auto& s : seq.steps) {
    json frontier = json::array();
    for (NodeRef r : s.frontier) frontier.push_back(r.id);
    steps.push_back({{"n_leaves", s.n_leaves}, {"loss_r", s.loss_r}, {"alpha", s.alpha}, {"frontier", frontier}});
  }
  return {{"n_observations", seq.n_observations()}, {"steps", std::move(steps)}};
}

void write_partition_csv(std::ostream& out, const Partition& partition) {
  out << "row_index,cluster_id\n";
  for (Index i = 0; i < partition.n(); ++i) out << i << ',' << partition[i] << '\n';
}

void write_gap_csv(std::ostream& out, const GapCurve& curve) {
  out << "k,log_w,elog_w_ref,gap,se\n";
  for (std::size_t i = 0; i < curve.k_values.size(); ++i) {
    out << curve.k_values[i] << ',' << format_double(curve.log_w[i]) << ',' << format_double(curve.elog_w_ref[i])
        << ',' << format_double(curve.gap[i]) << ',' << format_double(curve.se[i]) << '\n';
  }
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  out << "dataset_id,k,loss_horizontal,loss_weakest,loss_weakest_skip,loss_dp,rel_reduction\n";
  for (const auto& r : rows) {
    out << r.dataset_id << ',' << r.k << ',' << format_double(r.loss_horizontal) << ','
        << format_double(r.loss_weakest) << ',' << opt(r.loss_weakest_skip) << ',' << opt(r.loss_dp) << ','
        << opt(r.rel_reduction) << '\n';
  }
}

namespace {

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe m;
  m.count = static_cast<Index>(values.size());
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(values.size() - 1)) / std::sqrt(static_cast<double>(values.size()));
  }
  return m;
}

json mean_se_json(const MeanSe& m) {
  return {{"count", m.count}, {"mean", m.mean}, {"se", m.se}};
}

}  // namespace

CompareSummary summarize_compare(const std::vector<CompareRow>& rows) {
  CompareSummary summary;
  std::vector<Index> ks;
  for (const auto& r : rows) ks.push_back(r.k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  auto push_log = [](std::vector<double>& into, std::optional<double> v) {
    if (v && *v > 0.0) into.push_back(std::log(*v));
  };
  for (Index k : ks) {
    std::vector<double> h, w, s, d;
    for (const auto& r : rows) {
      if (r.k != k) continue;
      push_log(h, r.loss_horizontal);
      push_log(w, r.loss_weakest);
      push_log(s, r.loss_weakest_skip);
      push_log(d, r.loss_dp);
    }
    summary.per_k.push_back({k, mean_se(h), mean_se(w), mean_se(s), mean_se(d)});
  }

  std::vector<double> rel;
  for (const auto& r : rows) {
    if (r.rel_reduction) rel.push_back(*r.rel_reduction);
  }
  summary.rel_reduction_count = static_cast<Index>(rel.size());
  if (!rel.empty()) {
    std::sort(rel.begin(), rel.end());
    const auto mid = rel.size() / 2;
    summary.median_rel_reduction = rel.size() % 2 ? rel[mid] : 0.5 * (rel[mid - 1] + rel[mid]);
  }
  return summary;
}

json summary_to_json(const CompareSummary& summary) {
  json per_k = json::array();
  for (const auto& pk : summary.per_k) {
    per_k.push_back({{"k", pk.k},
                     {"log_loss_horizontal", mean_se_json(pk.log_horizontal)},
                     {"log_loss_weakest", mean_se_json(pk.log_weakest)},
                     {"log_loss_weakest_skip", mean_se_json(pk.log_weakest_skip)},
                     {"log_loss_dp", mean_se_json(pk.log_dp)}});
  }
  json out = {{"per_k", std::move(per_k)}, {"rel_reduction_count", summary.rel_reduction_count}};
  out["median_rel_reduction"] = summary.median_rel_reduction ? json(*summary.median_rel_reduction) : json(nullptr);
  return out;
}

json confusion_to_json(const ConfusionMatrix& cm) {
  return {{"labels", cm.labels},
          {"counts", cm.counts},
          {"correct", cm.correct()},
          {"total", cm.total()},
          {"error_rate", cm.error_rate}};
}

}  // namespace pruneclust::io
