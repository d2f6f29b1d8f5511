#include "catglm/io.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace catglm {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, *out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return {};
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i]))
      out.push_back(nullptr);
    else
      out.push_back(v[i]);
  }
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[i] = j[i].is_null() ? std::numeric_limits<double>::quiet_NaN()
                          : j[i].get<double>();
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response,
                 const std::vector<std::string>& covariates,
                 const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return load_csv(in, response, covariates, options, path);
}

Dataset load_csv(std::istream& in, const std::string& response,
                 const std::vector<std::string>& covariates,
                 const LoadOptions& options, const std::string& name) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line, options.delimiter));
  }
  if (rows.empty()) throw DomainError(name + ": no data rows");

  std::vector<std::string> columns;
  std::size_t first_data = 0;
  if (options.header) {
    columns = rows[0];
    first_data = 1;
  } else {
    for (std::size_t c = 0; c < rows[0].size(); ++c)
      columns.push_back("c" + std::to_string(c + 1));
  }
  const std::size_t ncol = columns.size();
  for (std::size_t r = first_data; r < rows.size(); ++r)
    if (rows[r].size() != ncol)
      throw DomainError(name + ": ragged row " + std::to_string(r + 1));
  if (rows.size() == first_data) throw DomainError(name + ": no data rows");

  auto column_index = [&](const std::string& col) {
    const auto it = std::find(columns.begin(), columns.end(), col);
    if (it == columns.end())
      throw DomainError(name + ": no column named '" + col + "'");
    return static_cast<std::size_t>(it - columns.begin());
  };

  const std::size_t resp_col = column_index(response);
  std::string weight_name = options.weight_column;
  if (weight_name.empty() &&
      std::find(columns.begin(), columns.end(), "count") != columns.end())
    weight_name = "count";
  std::optional<std::size_t> weight_col;
  if (!weight_name.empty()) weight_col = column_index(weight_name);
  std::optional<std::size_t> fold_col;
  if (!options.fold_column.empty()) fold_col = column_index(options.fold_column);

  std::vector<std::size_t> cov_cols;
  if (covariates.empty()) {
    for (std::size_t c = 0; c < ncol; ++c) {
      if (c == resp_col) continue;
      if (weight_col && c == *weight_col) continue;
      if (fold_col && c == *fold_col) continue;
      cov_cols.push_back(c);
    }
  } else {
    for (const auto& col : covariates) cov_cols.push_back(column_index(col));
  }

  // Response dictionary.
  std::vector<std::string> labels;
  std::map<std::string, int> label_index;
  auto observed = [&](const std::string& lbl) {
    if (!label_index.count(lbl)) {
      label_index[lbl] = static_cast<int>(labels.size());
      labels.push_back(lbl);
    }
  };
  for (std::size_t r = first_data; r < rows.size(); ++r)
    observed(rows[r][resp_col]);
  if (!options.category_order.empty()) {
    if (options.category_order.size() != labels.size())
      throw DomainError(name + ": category order must list every observed label");
    std::set<std::string> given(options.category_order.begin(),
                                options.category_order.end());
    for (const auto& lbl : labels)
      if (!given.count(lbl))
        throw DomainError(name + ": category order misses label '" + lbl + "'");
    for (const auto& lbl : options.category_order)
      if (!label_index.count(lbl))
        throw DomainError(name + ": unknown label in category order: '" + lbl + "'");
    labels = options.category_order;
  }
  if (!options.reference_label.empty()) {
    const auto it = std::find(labels.begin(), labels.end(), options.reference_label);
    if (it == labels.end())
      throw DomainError(name + ": unknown reference label '" +
                        options.reference_label + "'");
    labels.erase(it);
    labels.push_back(options.reference_label);
  }
  label_index.clear();
  for (std::size_t i = 0; i < labels.size(); ++i)
    label_index[labels[i]] = static_cast<int>(i);
  if (labels.size() < 2) throw DomainError(name + ": response needs >= 2 labels");

  // Covariate typing: a column is numeric when every cell parses, categorical
  // when no cell parses, and an error otherwise.
  struct ColPlan {
    std::size_t col;
    bool numeric;
    std::vector<std::string> levels;  // categorical: first-appearance order
  };
  std::vector<ColPlan> plans;
  for (std::size_t c : cov_cols) {
    ColPlan plan{c, true, {}};
    int numeric_cells = 0, total = 0;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
      double v;
      ++total;
      if (parse_double(rows[r][c], &v)) ++numeric_cells;
    }
    if (numeric_cells == total) {
      plan.numeric = true;
    } else if (numeric_cells == 0) {
      plan.numeric = false;
      std::set<std::string> seen;
      for (std::size_t r = first_data; r < rows.size(); ++r) {
        const std::string& cell = rows[r][c];
        if (seen.insert(cell).second) plan.levels.push_back(cell);
      }
      if (plan.levels.size() < 2)
        throw DomainError(name + ": categorical column '" + columns[c] +
                          "' has a single level");
    } else {
      throw DomainError(name + ": column '" + columns[c] +
                        "' mixes numeric and non-numeric cells");
    }
    plans.push_back(std::move(plan));
  }

  Dataset data;
  data.category_labels = labels;
  for (const auto& plan : plans) {
    if (plan.numeric) {
      data.covariate_names.push_back(columns[plan.col]);
    } else {
      // last level is the baseline
      for (std::size_t l = 0; l + 1 < plan.levels.size(); ++l)
        data.covariate_names.push_back(columns[plan.col] + "=" + plan.levels[l]);
    }
  }
  const int p = data.p();

  for (std::size_t r = first_data; r < rows.size(); ++r) {
    Observation ob;
    ob.category = label_index.at(rows[r][resp_col]);
    ob.x = Eigen::VectorXd::Zero(p);
    int k = 0;
    for (const auto& plan : plans) {
      if (plan.numeric) {
        double v;
        parse_double(rows[r][plan.col], &v);
        ob.x[k++] = v;
      } else {
        const std::string& cell = rows[r][plan.col];
        for (std::size_t l = 0; l + 1 < plan.levels.size(); ++l)
          ob.x[k++] = cell == plan.levels[l] ? 1.0 : 0.0;
      }
    }
    if (weight_col) {
      double w;
      if (!parse_double(rows[r][*weight_col], &w) || !(w > 0.0))
        throw DomainError(name + ": bad weight in row " + std::to_string(r + 1));
      ob.weight = w;
    }
    if (fold_col) {
      double f;
      if (!parse_double(rows[r][*fold_col], &f))
        throw DomainError(name + ": bad fold id in row " + std::to_string(r + 1));
      data.fold_ids.push_back(static_cast<int>(f));
    }
    data.observations.push_back(std::move(ob));
  }

  std::string note;
  if (options.standardize) {
    // z-score the original numeric columns (indicators untouched)
    int k = 0;
    for (const auto& plan : plans) {
      if (!plan.numeric) {
        k += static_cast<int>(plan.levels.size()) - 1;
        continue;
      }
      double mean = 0.0;
      for (const auto& ob : data.observations) mean += ob.x[k];
      mean /= data.n();
      double var = 0.0;
      for (const auto& ob : data.observations) {
        const double d = ob.x[k] - mean;
        var += d * d;
      }
      var /= std::max(1, data.n() - 1);
      const double sd = std::sqrt(var);
      if (sd > 0.0)
        for (auto& ob : data.observations) ob.x[k] = (ob.x[k] - mean) / sd;
      ++k;
    }
    note = "; standardized";
  }
  data.provenance = name + note;
  validate(data);
  return data;
}

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  throw DomainError("unknown output format: " + name);
}

std::string describe(const ModelSpec& spec) {
  std::ostringstream os;
  os << "(" << to_string(spec.ratio) << ", " << to_string(spec.cdf) << ", "
     << to_string(spec.design) << ")";
  if (!spec.category_order.empty() &&
      spec.category_order != identity_permutation(spec.J)) {
    os << " order=" << permutation_string(spec.category_order, spec.category_labels);
  }
  return os.str();
}

std::string permutation_string(const std::vector<int>& sigma,
                               const std::vector<std::string>& labels) {
  std::ostringstream os;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    if (j) os << "|";
    os << labels[sigma[j]];
  }
  return os.str();
}

nlohmann::json to_json(const ModelSpec& spec) {
  json j;
  j["ratio"] = to_string(spec.ratio);
  j["cdf"] = to_string(spec.cdf);
  j["design"] = to_string(spec.design);
  if (spec.design.has_pre()) j["design_pre"] = matrix_to_json(spec.design.pre);
  j["J"] = spec.J;
  j["p"] = spec.p;
  j["category_labels"] = spec.category_labels;
  j["category_order"] = spec.category_order;
  return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  spec.ratio = parse_ratio(j.at("ratio").get<std::string>());
  spec.cdf = parse_cdf(j.at("cdf").get<std::string>());
  spec.design = parse_design(j.at("design").get<std::string>());
  if (j.contains("design_pre")) spec.design.pre = matrix_from_json(j["design_pre"]);
  spec.J = j.at("J").get<int>();
  spec.p = j.at("p").get<int>();
  spec.category_labels = j.at("category_labels").get<std::vector<std::string>>();
  spec.category_order = j.at("category_order").get<std::vector<int>>();
  return normalized(spec);
}

nlohmann::json to_json(const FittedModel& fitted) {
  json j;
  j["schema_version"] = 1;
  j["type"] = "fitted_model";
  j["spec"] = to_json(fitted.spec);
  j["beta"] = vector_to_json(fitted.beta);
  j["log_lik"] = fitted.log_lik;
  j["iterations"] = fitted.iterations;
  j["converged"] = fitted.converged;
  j["aic"] = fitted.aic;
  j["bic"] = fitted.bic;
  j["n_effective"] = fitted.n_effective;
  j["fisher_information"] = matrix_to_json(fitted.fisher_information);
  j["std_errors"] = vector_to_json(fitted.std_errors);
  j["loglik_trace"] = fitted.loglik_trace;
  j["diagnostic"] = fitted.diagnostic;
  return j;
}

FittedModel fitted_model_from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "fitted_model")
    throw DomainError("not a fitted_model record");
  FittedModel out;
  out.spec = model_spec_from_json(j.at("spec"));
  out.beta = vector_from_json(j.at("beta"));
  out.log_lik = j.at("log_lik").get<double>();
  out.iterations = j.at("iterations").get<int>();
  out.converged = j.at("converged").get<bool>();
  out.aic = j.at("aic").get<double>();
  out.bic = j.at("bic").get<double>();
  out.n_effective = j.at("n_effective").get<double>();
  out.fisher_information = matrix_from_json(j.at("fisher_information"));
  out.std_errors = vector_from_json(j.at("std_errors"));
  out.loglik_trace = j.at("loglik_trace").get<std::vector<double>>();
  out.diagnostic = j.at("diagnostic").get<std::string>();
  return out;
}

namespace {

// Row order for the emitted tables: descending log-likelihood, failed fits
// last. The result struct itself keeps enumeration order.
std::vector<int> sorted_scan_rows(const PermScanResult& scan) {
  std::vector<int> order(scan.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ea = scan.entries[a];
    const auto& eb = scan.entries[b];
    const bool bad_a = ea.diverged || !ea.converged;
    const bool bad_b = eb.diverged || !eb.converged;
    if (bad_a != bad_b) return !bad_a;
    if (bad_a) return false;
    return ea.log_lik > eb.log_lik;
  });
  return order;
}

}  // namespace

nlohmann::json to_json(const PermScanResult& scan,
                       const std::vector<std::string>& labels) {
  json j;
  j["schema_version"] = 1;
  j["type"] = "perm_scan";
  j["plateau_tol"] = scan.plateau_tol;
  j["n_plateaus"] = scan.n_plateaus;
  json entries = json::array();
  for (int i : sorted_scan_rows(scan)) {
    const auto& e = scan.entries[i];
    json row;
    row["permutation"] = permutation_string(e.sigma, labels);
    row["sigma"] = e.sigma;
    row["log_lik"] = e.diverged ? json(nullptr) : json(e.log_lik);
    row["converged"] = e.converged;
    row["diverged"] = e.diverged;
    row["orbit_id"] = scan.orbit_id[i];
    row["plateau_id"] = scan.plateau_id[i];
    if (!e.note.empty()) row["note"] = e.note;
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  json plateaus = json::array();
  for (std::size_t id = 0; id < scan.plateaus.size(); ++id) {
    json row;
    row["plateau_id"] = id;
    row["log_lik"] = scan.plateaus[id].log_lik;
    row["size"] = scan.plateaus[id].entry_indices.size();
    plateaus.push_back(std::move(row));
  }
  j["plateaus"] = std::move(plateaus);
  return j;
}

nlohmann::json to_json(const EqualityReport& report) {
  json j;
  j["type"] = "equality_report";
  j["max_deviation"] = report.max_deviation;
  j["points_checked"] = report.points_checked;
  json errors = json::array();
  for (const auto& [point, what] : report.point_errors)
    errors.push_back({{"point", point}, {"error", what}});
  j["point_errors"] = std::move(errors);
  return j;
}

nlohmann::json to_json(const CvResult& cv) {
  json j;
  j["schema_version"] = 1;
  j["type"] = "cv_result";
  j["k"] = cv.k;
  j["seed"] = cv.seed;
  j["best_index"] = cv.best_index;
  json entries = json::array();
  for (const auto& e : cv.entries) {
    json row;
    row["classifier"] = describe(e.spec);
    row["spec"] = to_json(e.spec);
    row["mean_error"] = std::isnan(e.mean_error) ? json(nullptr) : json(e.mean_error);
    json folds = json::array();
    for (double f : e.fold_errors)
      folds.push_back(std::isnan(f) ? json(nullptr) : json(f));
    row["fold_errors"] = std::move(folds);
    row["failed_folds"] = e.failed_folds;
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  return j;
}

nlohmann::json to_json(const OrderingSearchResult& search,
                       const std::vector<std::string>& labels) {
  json j;
  j["schema_version"] = 1;
  j["type"] = "ordering_search";
  j["tie_tol"] = search.tie_tol;
  json per_cdf = json::array();
  for (std::size_t c = 0; c < search.cdfs.size(); ++c) {
    json block;
    block["cdf"] = to_string(search.cdfs[c]);
    json rows = json::array();
    for (const auto& r : search.ranked[c]) {
      json row;
      row["permutation"] = permutation_string(r.sigma, labels);
      row["sigma"] = r.sigma;
      row["log_lik"] = r.diverged ? json(nullptr) : json(r.log_lik);
      row["converged"] = r.converged;
      row["diverged"] = r.diverged;
      rows.push_back(std::move(row));
    }
    block["ranked"] = std::move(rows);
    json ties = json::array();
    for (const auto& [a, b] : search.tied_pairs[c]) ties.push_back({a, b});
    block["tied_pairs"] = std::move(ties);
    per_cdf.push_back(std::move(block));
  }
  j["results"] = std::move(per_cdf);
  return j;
}

std::string emit_result(const FittedModel& fitted, OutputFormat format) {
  if (format == OutputFormat::json) return to_json(fitted).dump(2) + "\n";
  std::ostringstream os;
  os << "name,estimate,std_error\n";
  for (Eigen::Index i = 0; i < fitted.beta.size(); ++i) {
    os << "beta" << i + 1 << "," << fmt17(fitted.beta[i]) << ",";
    if (!std::isnan(fitted.std_errors[i])) os << fmt17(fitted.std_errors[i]);
    os << "\n";
  }
  os << "log_lik," << fmt17(fitted.log_lik) << ",\n";
  os << "aic," << fmt17(fitted.aic) << ",\n";
  os << "bic," << fmt17(fitted.bic) << ",\n";
  os << "iterations," << fitted.iterations << ",\n";
  os << "converged," << (fitted.converged ? 1 : 0) << ",\n";
  return os.str();
}

std::string emit_result(const PermScanResult& scan,
                        const std::vector<std::string>& labels,
                        OutputFormat format) {
  if (format == OutputFormat::json) return to_json(scan, labels).dump(2) + "\n";
  std::ostringstream os;
  os << "permutation,log_lik,plateau_id,diverged\n";
  for (int i : sorted_scan_rows(scan)) {
    const auto& e = scan.entries[i];
    os << permutation_string(e.sigma, labels) << ",";
    if (!e.diverged) os << fmt17(e.log_lik);
    os << "," << scan.plateau_id[i] << "," << (e.diverged ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string emit_result(const std::vector<EqualityReport>& trials,
                        OutputFormat format) {
  if (format == OutputFormat::json) {
    json j;
    j["schema_version"] = 1;
    j["type"] = "equality_trials";
    json rows = json::array();
    for (const auto& report : trials) rows.push_back(to_json(report));
    j["trials"] = std::move(rows);
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "trial,max_deviation,points_checked,undefined_points\n";
  for (std::size_t t = 0; t < trials.size(); ++t) {
    os << t + 1 << "," << fmt17(trials[t].max_deviation) << ","
       << trials[t].points_checked << "," << trials[t].point_errors.size()
       << "\n";
  }
  return os.str();
}

std::string emit_result(const CvResult& cv, OutputFormat format) {
  if (format == OutputFormat::json) return to_json(cv).dump(2) + "\n";
  std::ostringstream os;
  os << "classifier,mean_error,failed_folds";
  for (int f = 0; f < cv.k; ++f) os << ",fold" << f + 1;
  os << "\n";
  for (const auto& e : cv.entries) {
    os << '"' << describe(e.spec) << '"' << ",";
    if (!std::isnan(e.mean_error)) os << fmt17(e.mean_error);
    os << "," << e.failed_folds;
    for (double fe : e.fold_errors) {
      os << ",";
      if (!std::isnan(fe)) os << fmt17(fe);
    }
    os << "\n";
  }
  return os.str();
}

std::string emit_result(const OrderingSearchResult& search,
                        const std::vector<std::string>& labels,
                        OutputFormat format) {
  if (format == OutputFormat::json) return to_json(search, labels).dump(2) + "\n";
  std::ostringstream os;
  os << "cdf,rank,permutation,log_lik,converged,diverged\n";
  for (std::size_t c = 0; c < search.cdfs.size(); ++c) {
    for (std::size_t r = 0; r < search.ranked[c].size(); ++r) {
      const auto& row = search.ranked[c][r];
      os << to_string(search.cdfs[c]) << "," << r + 1 << ","
         << permutation_string(row.sigma, labels) << ",";
      if (!row.diverged) os << fmt17(row.log_lik);
      os << "," << (row.converged ? 1 : 0) << "," << (row.diverged ? 1 : 0)
         << "\n";
    }
  }
  return os.str();
}

}  // namespace catglm
