#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "catglm/experiments.hpp"
#include "catglm/fit.hpp"

namespace catglm {

struct LoadOptions {
  char delimiter = ',';
  bool header = true;  // without a header, columns are named c1, c2, ...
  // Explicit category dictionary order; must list every observed label.
  std::vector<std::string> category_order;
  // Moves this label to the last (reference) position.
  std::string reference_label;
  bool standardize = false;  // z-score numeric covariates
  // Weight column; a column literally named "count" is picked up
  // automatically.
  std::string weight_column;
  std::string fold_column;  // pre-assigned CV folds
};

// Loads a delimited text file. The response column is categorical; covariate
// columns that parse as numbers stay numeric, fully non-numeric columns are
// expanded to indicator vectors (last level as baseline), mixed columns are
// an error. An empty covariate list means every remaining column.
Dataset load_csv(const std::string& path, const std::string& response,
                 const std::vector<std::string>& covariates,
                 const LoadOptions& options = {});
Dataset load_csv(std::istream& in, const std::string& response,
                 const std::vector<std::string>& covariates,
                 const LoadOptions& options = {}, const std::string& name = "<stream>");

enum class OutputFormat { json, csv };
OutputFormat parse_format(const std::string& name);

// Compact one-line descriptor, e.g. "(reference, student:3, complete)".
std::string describe(const ModelSpec& spec);
std::string permutation_string(const std::vector<int>& sigma,
                               const std::vector<std::string>& labels);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FittedModel& fitted);
FittedModel fitted_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PermScanResult& scan,
                       const std::vector<std::string>& labels);
nlohmann::json to_json(const CvResult& cv);
nlohmann::json to_json(const OrderingSearchResult& search,
                       const std::vector<std::string>& labels);
nlohmann::json to_json(const EqualityReport& report);

std::string emit_result(const FittedModel& fitted, OutputFormat format);
std::string emit_result(const PermScanResult& scan,
                        const std::vector<std::string>& labels,
                        OutputFormat format);
std::string emit_result(const CvResult& cv, OutputFormat format);
std::string emit_result(const OrderingSearchResult& search,
                        const std::vector<std::string>& labels,
                        OutputFormat format);
// One row per verification trial of an equality plan.
std::string emit_result(const std::vector<EqualityReport>& trials,
                        OutputFormat format);

}  // namespace catglm
