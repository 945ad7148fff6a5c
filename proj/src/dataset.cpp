#include "qpdlab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qpdlab/rng.hpp"

#include <json.hpp>

namespace qpdlab {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

Schema Schema::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Schema s;
  for (const auto& col : j.at("columns")) {
    ColumnSpec spec;
    spec.name = col.at("name").get<std::string>();
    const std::string kind = col.at("kind").get<std::string>();
    if (kind == "numeric")
      spec.kind = ColumnKind::numeric;
    else if (kind == "categorical")
      spec.kind = ColumnKind::categorical;
    else
      throw std::runtime_error("schema: unknown column kind '" + kind + "'");
    s.columns.push_back(std::move(spec));
  }
  s.label_column = j.at("label").get<std::string>();
  s.label_index();  // validates the label names a column
  return s;
}

Schema Schema::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("schema: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::size_t Schema::label_index() const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == label_column) return i;
  throw std::runtime_error("schema: label column '" + label_column + "' not in columns");
}

std::size_t RawDataset::missing_count() const {
  std::size_t k = 0;
  for (const auto& row : rows)
    for (const auto& cell : row)
      if (cell.missing) ++k;
  return k;
}

RawDataset parse_csv_text(const std::string& text, const Schema& schema) {
  RawDataset raw;
  raw.schema = schema;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!saw_header) {
      const auto header = split_line(line);
      if (header.size() != schema.columns.size())
        throw std::runtime_error("csv: header has " + std::to_string(header.size()) +
                                 " columns, schema expects " +
                                 std::to_string(schema.columns.size()));
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] != schema.columns[i].name)
          throw std::runtime_error("csv: header column '" + header[i] +
                                   "' does not match schema '" + schema.columns[i].name +
                                   "' (line 1)");
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != schema.columns.size())
      throw std::runtime_error("csv: wrong number of cells at line " +
                               std::to_string(line_no));
    std::vector<RawCell> row;
    row.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      RawCell cell;
      cell.text = cells[i];
      cell.missing = cells[i].empty();
      if (!cell.missing && schema.columns[i].kind == ColumnKind::numeric) {
        double v;
        if (!parse_double(cell.text, v))
          throw std::runtime_error("csv: non-numeric value '" + cell.text +
                                   "' in numeric column '" + schema.columns[i].name +
                                   "' at line " + std::to_string(line_no));
      }
      row.push_back(std::move(cell));
    }
    raw.rows.push_back(std::move(row));
  }
  if (!saw_header) throw std::runtime_error("csv: empty file, header row required");
  return raw;
}

RawDataset load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv_text(ss.str(), schema);
}

int Dataset::bin_count(std::size_t j) const {
  return static_cast<int>(feature_bins[j].size()) - 1;
}

int Dataset::discretize(std::size_t j, double v) const {
  const auto& edges = feature_bins[j];
  const int bins = static_cast<int>(edges.size()) - 1;
  if (bins <= 1) return 0;
  if (v <= edges.front()) return 0;
  if (v >= edges.back()) return bins - 1;
  const double lo = edges.front(), hi = edges.back();
  int idx = static_cast<int>((v - lo) / (hi - lo) * bins);
  return std::clamp(idx, 0, bins - 1);
}

void Dataset::refresh_stats() {
  const std::size_t m = x.rows;
  std::size_t ones = 0;
  for (int label : y) ones += static_cast<std::size_t>(label);
  class_probs[1] = m == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(m);
  class_probs[0] = m == 0 ? 0.0 : 1.0 - class_probs[1];

  feature_bins.assign(x.cols, {});
  if (m == 0) {
    for (auto& edges : feature_bins) edges = {0.0, 1.0};
    return;
  }
  for (std::size_t j = 0; j < x.cols; ++j) {
    double lo = x(0, j), hi = x(0, j);
    bool binary = true;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = x(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (v != 0.0 && v != 1.0) binary = false;
    }
    auto& edges = feature_bins[j];
    if (binary) {
      edges = {-0.5, 0.5, 1.5};
    } else if (hi <= lo) {
      edges = {lo - 0.5, lo + 0.5};  // constant column, single bin
    } else {
      edges.resize(kNumericBins + 1);
      for (int k = 0; k <= kNumericBins; ++k)
        edges[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / kNumericBins;
    }
  }
}

Dataset Dataset::from_matrix(Matrix x, std::vector<int> y) {
  if (x.rows != y.size()) throw std::invalid_argument("dataset: rows/labels mismatch");
  Dataset d;
  d.x = std::move(x);
  d.y = std::move(y);
  d.feature_names.resize(d.x.cols);
  for (std::size_t j = 0; j < d.x.cols; ++j) d.feature_names[j] = "f" + std::to_string(j);
  d.refresh_stats();
  return d;
}

Dataset preprocess(const RawDataset& raw) {
  const auto& schema = raw.schema;
  const std::size_t label_idx = schema.label_index();
  const std::size_t m = raw.rows.size();

  // label encoding: lexicographically smaller class name -> 0
  std::vector<std::string> label_values;
  for (const auto& row : raw.rows) {
    if (row[label_idx].missing)
      throw std::runtime_error("preprocess: missing label value");
    const std::string& v = row[label_idx].text;
    if (std::find(label_values.begin(), label_values.end(), v) == label_values.end())
      label_values.push_back(v);
  }
  if (m > 0 && (label_values.empty() || label_values.size() > 2))
    throw std::runtime_error("preprocess: label column is not binary (" +
                             std::to_string(label_values.size()) + " distinct values)");
  std::sort(label_values.begin(), label_values.end());

  std::vector<int> y(m);
  for (std::size_t i = 0; i < m; ++i)
    y[i] = raw.rows[i][label_idx].text == label_values.front() ? 0 : 1;

  std::vector<std::vector<double>> columns;
  std::vector<std::string> names;
  Dataset d;

  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (c == label_idx) continue;
    const auto& spec = schema.columns[c];
    if (spec.kind == ColumnKind::numeric) {
      double sum = 0.0;
      std::size_t present = 0;
      for (const auto& row : raw.rows) {
        if (row[c].missing) continue;
        double v;
        parse_double(row[c].text, v);
        sum += v;
        ++present;
      }
      if (m > 0 && present == 0)
        throw std::runtime_error("preprocess: column '" + spec.name + "' is all missing");
      const double mean = present ? sum / static_cast<double>(present) : 0.0;
      std::vector<double> col(m);
      for (std::size_t i = 0; i < m; ++i) {
        if (raw.rows[i][c].missing) {
          col[i] = mean;
        } else {
          parse_double(raw.rows[i][c].text, col[i]);
        }
      }
      columns.push_back(std::move(col));
      names.push_back(spec.name);
    } else {
      // mode imputation for categoricals, then one-hot in sorted value order
      std::map<std::string, std::size_t> counts;
      for (const auto& row : raw.rows)
        if (!row[c].missing) ++counts[row[c].text];
      if (m > 0 && counts.empty())
        throw std::runtime_error("preprocess: column '" + spec.name + "' is all missing");
      std::string mode;
      std::size_t best = 0;
      for (const auto& [value, count] : counts)
        if (count > best) { best = count; mode = value; }  // ties: first in sorted order
      const std::size_t group_first = columns.size();
      for (const auto& [value, count] : counts) {
        (void)count;
        std::vector<double> col(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
          const std::string& v = raw.rows[i][c].missing ? mode : raw.rows[i][c].text;
          col[i] = v == value ? 1.0 : 0.0;
        }
        columns.push_back(std::move(col));
        names.push_back(spec.name + "=" + value);
      }
      d.onehot_groups.emplace_back(group_first, counts.size());
    }
  }

  Matrix x(m, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < m; ++i) x(i, j) = columns[j][i];

  d.x = std::move(x);
  d.y = std::move(y);
  d.feature_names = std::move(names);
  d.refresh_stats();
  return d;
}

SplitDataset split(const Dataset& d, std::uint64_t seed) {
  const std::size_t m = d.size();
  if (m < 10) throw std::invalid_argument("split: need at least 10 rows, got " +
                                          std::to_string(m));
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);

  const std::size_t n_train = static_cast<std::size_t>(0.7 * static_cast<double>(m));
  auto take = [&](std::size_t lo, std::size_t hi) {
    Matrix x(hi - lo, d.dim());
    std::vector<int> y(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t src = idx[k];
      for (std::size_t j = 0; j < d.dim(); ++j) x(k - lo, j) = d.x(src, j);
      y[k - lo] = d.y[src];
    }
    Dataset part = Dataset::from_matrix(std::move(x), std::move(y));
    part.feature_names = d.feature_names;
    part.onehot_groups = d.onehot_groups;
    part.truth = d.truth;
    return part;
  };

  SplitDataset out;
  out.train = take(0, n_train);
  out.test = take(n_train, m);
  out.seed = seed;
  return out;
}

Dataset synthesize(std::size_t n_dims, std::size_t m, std::span<const double> a,
                   double b, std::uint64_t seed) {
  if (n_dims < 1) throw std::invalid_argument("synthesize: n_dims must be >= 1");
  if (a.size() != n_dims) throw std::invalid_argument("synthesize: coefficient length mismatch");
  if (m < n_dims + 2)
    throw std::invalid_argument("synthesize: need m >= n_dims + 2, got " + std::to_string(m));

  Rng rng(seed);
  Matrix x(m, n_dims);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n_dims; ++j) x(i, j) = rng.uniform(-1.0, 1.0);

  Rng label_rng = rng.derive(1);
  std::vector<int> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    double t = b;
    for (std::size_t j = 0; j < n_dims; ++j) t += a[j] * x(i, j);
    const double p = 1.0 / (1.0 + std::exp(-t));
    y[i] = label_rng.bernoulli(p) ? 1 : 0;
  }

  Dataset d = Dataset::from_matrix(std::move(x), std::move(y));
  d.truth = GroundTruth{std::vector<double>(a.begin(), a.end()), b};
  return d;
}

}  // namespace qpdlab
