#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catlda/common.hpp"
#include "catlda/rng.hpp"

namespace catlda {

// n samples by d features with class labels in 1..K. Labels are remapped
// from the original strings in lexicographic order; the mapping is kept in
// label_names so predictions can be translated back.
struct LabeledMatrix {
  Eigen::MatrixXd X;                        // n x d
  std::vector<int> y;                       // 1..K
  std::vector<std::string> feature_names;   // size d (may be synthetic)
  std::vector<std::string> label_names;     // size K, label_names[k-1] = original label
  std::vector<int> class_counts;            // size K

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
  int num_classes() const { return static_cast<int>(class_counts.size()); }

  void validate() const {
    if (X.cols() < 1) throw validation_error("dataset has no features");
    if (X.rows() < 1) throw validation_error("dataset has no samples");
    if (static_cast<Eigen::Index>(y.size()) != X.rows())
      throw validation_error("label count does not match sample count");
    const int k = num_classes();
    if (k < 1) throw validation_error("dataset has no classes");
    std::vector<int> counts(k, 0);
    for (int label : y) {
      if (label < 1 || label > k)
        throw validation_error("label " + std::to_string(label) +
                               " outside 1.." + std::to_string(k));
      ++counts[label - 1];
    }
    long total = 0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] != class_counts[c])
        throw validation_error("class_counts inconsistent with labels");
      if (counts[c] < 2)
        throw validation_error("class " + std::to_string(c + 1) + " has " +
                               std::to_string(counts[c]) +
                               " samples; at least 2 required");
      total += counts[c];
    }
    if (total != X.rows())
      throw validation_error("class counts do not sum to sample count");
    if (!X.allFinite())
      throw validation_error("dataset contains non-finite entries");
  }
};

namespace detail {

inline bool parse_double(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc()) return false;
  while (ptr != last && (*ptr == ' ' || *ptr == '\r')) ++ptr;
  return ptr == last;
}

inline std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, delim)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    cells.push_back(cur);
  }
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

}  // namespace detail

struct LoadOptions {
  std::optional<char> delimiter;  // default: by extension (.csv -> ',', else tab)
  bool transpose = false;         // file is features x samples
};

// Reads a delimited table with a header row and builds a LabeledMatrix.
// `label_column` is matched against column names first; if no name matches
// and it parses as an integer it is taken as a 0-based column index.
// With transpose=true the file holds features as rows (first column =
// feature names, header = sample ids) and `label_column` names one of those
// rows.
inline LabeledMatrix load_table(const std::string& path,
                                const std::string& label_column,
                                const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open input file: " + path);

  char delim = '\t';
  if (opts.delimiter) {
    delim = *opts.delimiter;
  } else if (std::filesystem::path(path).extension() == ".csv") {
    delim = ',';
  }

  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    rows.push_back(detail::split_line(line, delim));
    if (rows.back().size() != rows.front().size())
      throw validation_error(path + ": row " + std::to_string(lineno) +
                             " has " + std::to_string(rows.back().size()) +
                             " cells, expected " +
                             std::to_string(rows.front().size()));
  }
  if (rows.size() < 2) throw validation_error(path + ": no data rows");

  // Normalize to rows = samples, columns = named variables.
  std::vector<std::string> col_names;
  std::vector<std::vector<std::string>> data;  // per sample
  if (!opts.transpose) {
    col_names = rows.front();
    data.assign(rows.begin() + 1, rows.end());
  } else {
    const std::size_t n_samples = rows.front().size() - 1;
    const std::size_t n_vars = rows.size() - 1;
    if (n_samples < 1) throw validation_error(path + ": no sample columns");
    col_names.resize(n_vars);
    data.assign(n_samples, std::vector<std::string>(n_vars));
    for (std::size_t v = 0; v < n_vars; ++v) {
      col_names[v] = rows[v + 1][0];
      for (std::size_t s = 0; s < n_samples; ++s) data[s][v] = rows[v + 1][s + 1];
    }
  }

  // Resolve the label column.
  std::size_t label_idx = col_names.size();
  for (std::size_t c = 0; c < col_names.size(); ++c)
    if (col_names[c] == label_column) {
      label_idx = c;
      break;
    }
  if (label_idx == col_names.size()) {
    int idx = -1;
    auto [p, ec] = std::from_chars(label_column.data(),
                                   label_column.data() + label_column.size(), idx);
    if (ec == std::errc() && p == label_column.data() + label_column.size() &&
        idx >= 0 && static_cast<std::size_t>(idx) < col_names.size())
      label_idx = static_cast<std::size_t>(idx);
  }
  if (label_idx == col_names.size())
    throw validation_error(path + ": label column '" + label_column +
                           "' not found");

  const std::size_t n = data.size();
  const std::size_t d = col_names.size() - 1;
  if (d < 1) throw validation_error(path + ": no feature columns");

  // Lexicographic remapping of the original label strings to 1..K.
  std::map<std::string, int> label_map;
  for (const auto& row : data) label_map[row[label_idx]] = 0;
  int next = 1;
  for (auto& [name, id] : label_map) id = next++;

  LabeledMatrix out;
  out.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  out.y.resize(n);
  out.feature_names.reserve(d);
  for (std::size_t c = 0; c < col_names.size(); ++c)
    if (c != label_idx) out.feature_names.push_back(col_names[c]);
  out.label_names.resize(label_map.size());
  for (const auto& [name, id] : label_map) out.label_names[id - 1] = name;
  out.class_counts.assign(label_map.size(), 0);

  for (std::size_t r = 0; r < n; ++r) {
    out.y[r] = label_map[data[r][label_idx]];
    ++out.class_counts[out.y[r] - 1];
    std::size_t fc = 0;
    for (std::size_t c = 0; c < col_names.size(); ++c) {
      if (c == label_idx) continue;
      double v = 0.0;
      if (!detail::parse_double(data[r][c], v))
        throw validation_error(path + ": cannot parse cell at sample " +
                               std::to_string(r + 1) + ", column '" +
                               col_names[c] + "'");
      if (!std::isfinite(v))
        throw validation_error(path + ": non-finite value at sample " +
                               std::to_string(r + 1) + ", column '" +
                               col_names[c] + "'");
      out.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(fc++)) = v;
    }
  }

  out.validate();
  return out;
}

struct FoldPartition {
  int repetition = 0;
  int fold = 0;
  std::vector<int> train;  // row indices
  std::vector<int> test;
};

// Class-stratified K-fold partitions, repeated. Within every repetition the
// folds partition 0..n-1 and per-class fold sizes differ by at most one.
inline std::vector<FoldPartition> stratified_folds(const LabeledMatrix& data,
                                                   int folds, int repetitions,
                                                   std::uint64_t seed) {
  if (folds < 2) throw validation_error("need at least 2 folds");
  if (repetitions < 1) throw validation_error("need at least 1 repetition");
  for (int c = 0; c < data.num_classes(); ++c)
    if (data.class_counts[c] < folds)
      throw validation_error("class " + std::to_string(c + 1) + " has " +
                             std::to_string(data.class_counts[c]) +
                             " samples, fewer than " + std::to_string(folds) +
                             " folds");

  std::vector<std::vector<int>> by_class(data.num_classes());
  for (int i = 0; i < static_cast<int>(data.y.size()); ++i)
    by_class[data.y[i] - 1].push_back(i);

  std::vector<FoldPartition> out;
  out.reserve(static_cast<std::size_t>(folds) * repetitions);
  for (int rep = 0; rep < repetitions; ++rep) {
    Rng rng(task_seed(seed, static_cast<std::uint64_t>(rep)));
    std::vector<std::vector<int>> fold_members(folds);
    for (auto cls : by_class) {
      rng.shuffle(cls);
      for (std::size_t j = 0; j < cls.size(); ++j)
        fold_members[j % folds].push_back(cls[j]);
    }
    for (int f = 0; f < folds; ++f) {
      FoldPartition part;
      part.repetition = rep;
      part.fold = f;
      part.test = fold_members[f];
      std::sort(part.test.begin(), part.test.end());
      for (int g = 0; g < folds; ++g)
        if (g != f)
          part.train.insert(part.train.end(), fold_members[g].begin(),
                            fold_members[g].end());
      std::sort(part.train.begin(), part.train.end());
      out.push_back(std::move(part));
    }
  }
  return out;
}

// Row-subset copy keeping labels; class counts are recomputed. Classes that
// drop below two samples surface through validate() at fit time.
inline LabeledMatrix subset_rows(const LabeledMatrix& data,
                                 const std::vector<int>& rows) {
  LabeledMatrix out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), data.d());
  out.y.resize(rows.size());
  out.feature_names = data.feature_names;
  out.label_names = data.label_names;
  out.class_counts.assign(data.num_classes(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(rows[i]);
    out.y[i] = data.y[rows[i]];
    ++out.class_counts[out.y[i] - 1];
  }
  return out;
}

}  // namespace catlda
