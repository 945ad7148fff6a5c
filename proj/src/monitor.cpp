#include "qpdlab/monitor.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "qpdlab/kernels.hpp"
#include "qpdlab/tree.hpp"

#include <json.hpp>

namespace qpdlab {

double joint_entropy(const std::vector<std::vector<int>>& discrete_rows) {
  if (discrete_rows.empty()) throw std::invalid_argument("joint_entropy: empty matrix");
  std::map<std::vector<int>, std::size_t> counts;
  for (const auto& row : discrete_rows) ++counts[row];
  const double m = static_cast<double>(discrete_rows.size());
  double h = 0.0;
  for (const auto& [pattern, count] : counts) {
    (void)pattern;
    const double p = static_cast<double>(count) / m;
    h -= p * std::log2(p);
  }
  return h;
}

InfoVector per_tuple_info(const std::vector<std::vector<int>>& discrete_rows) {
  if (discrete_rows.empty()) throw std::invalid_argument("per_tuple_info: empty matrix");
  const std::size_t m = discrete_rows.size();
  const std::size_t n = discrete_rows.front().size();

  // per-feature marginal counts
  std::vector<std::map<int, std::size_t>> marginals(n);
  for (const auto& row : discrete_rows) {
    if (row.size() != n) throw std::invalid_argument("per_tuple_info: ragged matrix");
    for (std::size_t j = 0; j < n; ++j) ++marginals[j][row[j]];
  }

  InfoVector out;
  out.per_tuple.resize(m);
  double surprisal_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = static_cast<double>(marginals[j][discrete_rows[i][j]]) /
                       static_cast<double>(m);
      s -= std::log2(p);
    }
    out.per_tuple[i] = s;
    surprisal_sum += s;
  }

  // rescale so the vector totals the chain-rule joint entropy
  const double h = joint_entropy(discrete_rows);
  if (surprisal_sum > 0.0) {
    const double lambda = h / surprisal_sum;
    for (auto& v : out.per_tuple) v *= lambda;
    out.total = h;
  } else {
    // constant matrix: zero information everywhere
    for (auto& v : out.per_tuple) v = 0.0;
    out.total = 0.0;
  }
  return out;
}

double pcc(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("pcc: length mismatch");
  if (u.size() < 2) throw std::invalid_argument("pcc: need at least 2 coordinates");
  const double n = static_cast<double>(u.size());
  double su = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    su += u[i];
    sv += v[i];
  }
  const double mu = su / n, mv = sv / n;
  double cuv = 0.0, cu = 0.0, cv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double du = u[i] - mu, dv = v[i] - mv;
    cuv += du * dv;
    cu += du * du;
    cv += dv * dv;
  }
  const double denom = cu * cv;
  if (denom <= 1e-24) return 0.0;  // zero-variance convention
  return cuv / std::sqrt(denom);
}

namespace {

std::vector<std::vector<int>> discretize_with_label(const Dataset& d) {
  std::vector<std::vector<int>> rows(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto& row = rows[i];
    row.resize(d.dim() + 1);
    for (std::size_t j = 0; j < d.dim(); ++j) row[j] = d.discretize(j, d.x(i, j));
    row[d.dim()] = d.y[i];
  }
  return rows;
}

}  // namespace

Monitor::Monitor(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("Monitor: empty dataset");
  d_rows_ = Matrix(d.size(), d.dim() + 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.dim(); ++j) d_rows_(i, j) = d.x(i, j);
    d_rows_(i, d.dim()) = static_cast<double>(d.y[i]);
  }
  d_info_ = per_tuple_info(discretize_with_label(d));
  for (std::size_t i = 0; i < d.size(); ++i)
    class_info_[static_cast<std::size_t>(d.y[i])] += d_info_.per_tuple[i];
  class_probs_ = d.class_probs;
  log_.rows.cols = d.dim() + 1;
}

double Monitor::query_info(std::span<const double> u) const {
  if (u.size() != width())
    throw std::invalid_argument("Monitor: query row has width " + std::to_string(u.size()) +
                                ", expected " + std::to_string(width()));
  const double gained = kernels::correlation_weighted_sum(d_rows_, u, d_info_.per_tuple);
  double redundant = 0.0;
  if (log_.rows.rows > 0)
    redundant = kernels::correlation_weighted_sum(log_.rows, u, log_.info);
  return gained - redundant;
}

double Monitor::observe(std::span<const double> query, double response) {
  std::vector<double> u(query.begin(), query.end());
  u.push_back(response);
  const double info = query_info(u);
  const double floored = info > 0.0 ? info : 0.0;
  log_.rows.append_row(u);
  log_.info.push_back(floored);
  leakage_ += floored;
  return info;
}

ExtractionStatus Monitor::extraction_status() const {
  ExtractionStatus st;
  std::array<double, 2> leaked{0.0, 0.0};
  const std::size_t label_col = width() - 1;
  for (std::size_t i = 0; i < log_.rows.rows; ++i) {
    const int cls = log_.rows(i, label_col) >= 0.5 ? 1 : 0;
    leaked[static_cast<std::size_t>(cls)] += log_.info[i];
  }
  for (std::size_t k = 0; k < 2; ++k) {
    if (class_info_[k] > 0.0) {
      st.per_class[k] = leaked[k] / class_info_[k];
    } else {
      st.per_class[k] = 0.0;
      st.class_flagged[k] = true;
    }
    st.overall_raw += class_probs_[k] * st.per_class[k];
  }
  st.overall = std::min(1.0, std::max(0.0, st.overall_raw));
  st.clipped = st.overall != st.overall_raw;
  return st;
}

double Monitor::warning_baseline(PredictFn target, const Dataset& validation) const {
  if (log_.rows.rows < 5)
    throw std::invalid_argument("warning_baseline: need at least 5 logged queries");
  const std::size_t n = width() - 1;
  Matrix x(log_.rows.rows, n);
  std::vector<int> y(log_.rows.rows);
  for (std::size_t i = 0; i < log_.rows.rows; ++i) {
    for (std::size_t j = 0; j < n; ++j) x(i, j) = log_.rows(i, j);
    y[i] = log_.rows(i, n) >= 0.5 ? 1 : 0;
  }
  const DecisionTree surrogate = DecisionTree::fit(x, y, 6);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const auto row = validation.x.row_span(i);
    const int t = target(row) >= 0.5 ? 1 : 0;
    agree += surrogate.predict(row) == t ? 1 : 0;
  }
  return validation.size() == 0
             ? 0.0
             : static_cast<double>(agree) / static_cast<double>(validation.size());
}

std::string Monitor::checkpoint_json() const {
  nlohmann::json j;
  j["width"] = width();
  j["leakage"] = leakage_;
  std::vector<std::vector<double>> rows(log_.rows.rows);
  for (std::size_t i = 0; i < log_.rows.rows; ++i) {
    const auto span = log_.rows.row_span(i);
    rows[i].assign(span.begin(), span.end());
  }
  j["log_rows"] = rows;
  j["log_info"] = log_.info;
  return j.dump();
}

Monitor Monitor::restore(const Dataset& d, const std::string& json_text) {
  Monitor m(d);
  nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.at("width").get<std::size_t>() != m.width())
    throw std::runtime_error("Monitor::restore: checkpoint width mismatch");
  const auto rows = j.at("log_rows").get<std::vector<std::vector<double>>>();
  const auto info = j.at("log_info").get<std::vector<double>>();
  if (rows.size() != info.size())
    throw std::runtime_error("Monitor::restore: rows/info length mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.log_.rows.append_row(rows[i]);
    m.log_.info.push_back(info[i]);
  }
  m.leakage_ = j.at("leakage").get<double>();
  return m;
}

}  // namespace qpdlab
