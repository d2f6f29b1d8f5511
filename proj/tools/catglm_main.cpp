#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "catglm/diagnostics.hpp"
#include "catglm/io.hpp"

namespace {

using namespace catglm;

std::vector<std::string> split_list(const std::string& s, char delim = ',') {
  std::vector<std::string> out;
  std::string piece;
  std::istringstream is(s);
  while (std::getline(is, piece, delim))
    if (!piece.empty()) out.push_back(piece);
  return out;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

struct DataArgs {
  std::string path;
  std::string response;
  std::string covariates;
  std::string order;
  std::string reference;
  std::string weight_column;
  std::string fold_column;
  bool standardize = false;
  bool no_header = false;
  char delimiter = ',';

  void attach(CLI::App* cmd, bool response_required = true) {
    cmd->add_option("--data", path, "input delimited file")->required();
    auto* r = cmd->add_option("--response", response, "response column name");
    if (response_required) r->required();
    cmd->add_option("--covariates", covariates,
                    "comma-separated covariate columns (default: all others)");
    cmd->add_option("--order", order, "comma-separated category order");
    cmd->add_option("--reference", reference,
                    "label to use as the reference (last) category");
    cmd->add_option("--weight-column", weight_column,
                    "weight column (a 'count' column is auto-detected)");
    cmd->add_option("--fold-column", fold_column, "pre-assigned CV fold column");
    cmd->add_flag("--standardize", standardize, "z-score numeric covariates");
    cmd->add_flag("--no-header", no_header, "file has no header row");
    cmd->add_option("--delimiter", delimiter, "field delimiter");
  }

  Dataset load() const {
    LoadOptions options;
    options.delimiter = delimiter;
    options.header = !no_header;
    options.category_order = split_list(order);
    options.reference_label = reference;
    options.standardize = standardize;
    options.weight_column = weight_column;
    options.fold_column = fold_column;
    return load_csv(path, response, split_list(covariates), options);
  }
};

ModelSpec spec_for(const Dataset& data, const std::string& ratio,
                   const std::string& cdf, const std::string& design) {
  ModelSpec spec;
  spec.ratio = parse_ratio(ratio);
  spec.cdf = parse_cdf(cdf);
  spec.design = parse_design(design);
  spec.J = data.J();
  spec.p = data.p();
  spec.category_labels = data.category_labels;
  return normalized(spec);
}

std::vector<std::vector<int>> parse_perms(const std::string& arg,
                                          const Dataset& data) {
  if (arg.empty() || arg == "all") return all_permutations(data.J());
  std::vector<std::vector<int>> perms;
  for (const std::string& one : split_list(arg, ';')) {
    std::vector<int> sigma;
    for (const std::string& lbl : split_list(one, '|')) {
      const auto it = std::find(data.category_labels.begin(),
                                data.category_labels.end(), lbl);
      if (it == data.category_labels.end())
        throw DomainError("unknown label in permutation: " + lbl);
      sigma.push_back(static_cast<int>(it - data.category_labels.begin()));
    }
    perms.push_back(std::move(sigma));
  }
  return perms;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"categorical GLMs specified by (ratio, cdf, design) triplets"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  double tol = 1e-8;
  int max_iter = 100;
  std::string format = "json";
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--tol", tol, "score tolerance (scaled by n)")
      ->capture_default_str();
  app.add_option("--max-iter", max_iter, "max Fisher scoring iterations")
      ->capture_default_str();
  app.add_option("--format", format, "output format: json or csv")
      ->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit one model by Fisher scoring");
  DataArgs fit_data;
  fit_data.attach(fit_cmd);
  std::string ratio = "reference", cdf = "logistic", design = "complete";
  std::string out_path;
  fit_cmd->add_option("--ratio", ratio, "reference|adjacent|cumulative|sequential")
      ->capture_default_str();
  fit_cmd->add_option("--cdf", cdf, "cdf name, e.g. logistic, student:3")
      ->capture_default_str();
  fit_cmd->add_option("--design", design,
                      "complete|proportional|z0|minimal|custom:<spec>")
      ->capture_default_str();
  fit_cmd->add_option("--out", out_path, "write the result here instead of stdout");

  // predict
  auto* predict_cmd =
      app.add_subcommand("predict", "predict probabilities from a fitted model");
  std::string model_path, x_arg;
  predict_cmd->add_option("--model", model_path, "fitted model JSON file")
      ->required();
  predict_cmd->add_option("--x", x_arg, "comma-separated covariate values")
      ->required();
  predict_cmd->add_option("--out", out_path, "output path");

  // jac-check
  auto* jac_cmd = app.add_subcommand(
      "jac-check", "finite-difference checks of the ratio Jacobians and score");
  int jac_jmin = 2, jac_jmax = 8, jac_trials = 200, score_rows = 200;
  jac_cmd->add_option("--j-min", jac_jmin)->capture_default_str();
  jac_cmd->add_option("--j-max", jac_jmax)->capture_default_str();
  jac_cmd->add_option("--trials", jac_trials)->capture_default_str();
  jac_cmd->add_option("--score-rows", score_rows)->capture_default_str();

  // equiv-check
  auto* equiv_cmd = app.add_subcommand(
      "equiv-check", "verify a model-equality plan pointwise on random draws");
  std::string plan_name;
  int equiv_j = 4, equiv_trials = 20;
  equiv_cmd->add_option("--plan", plan_name, "plan name")->required();
  equiv_cmd->add_option("--j", equiv_j, "number of categories")
      ->capture_default_str();
  equiv_cmd->add_option("--trials", equiv_trials)->capture_default_str();
  equiv_cmd->add_option("--out", out_path, "output path");

  // perm-scan
  auto* scan_cmd = app.add_subcommand(
      "perm-scan", "log-likelihood of the permuted models with plateau grouping");
  DataArgs scan_data;
  scan_data.attach(scan_cmd);
  std::string scan_ratio = "reference", scan_cdf = "logistic",
              scan_design = "complete", perms_arg = "all";
  scan_cmd->add_option("--ratio", scan_ratio)->capture_default_str();
  scan_cmd->add_option("--cdf", scan_cdf)->capture_default_str();
  scan_cmd->add_option("--design", scan_design)->capture_default_str();
  scan_cmd->add_option(
      "--perms", perms_arg,
      "'all' or permutations like 'a|b|c;b|a|c' over category labels");
  scan_cmd->add_option("--out", out_path, "output path");

  // order-search
  auto* order_cmd = app.add_subcommand(
      "order-search",
      "rank Hasse-consistent category orders by sequential-model fit");
  DataArgs order_data;
  order_data.attach(order_cmd);
  std::string constraints_arg, cdfs_arg = "logistic,gumbelmax",
              order_design = "complete";
  order_cmd->add_option("--constraints", constraints_arg,
                        "partial order, e.g. 'l<u,u<U,l<s,s<S'");
  order_cmd->add_option("--cdfs", cdfs_arg, "comma-separated cdf names")
      ->capture_default_str();
  order_cmd->add_option("--design", order_design)->capture_default_str();
  order_cmd->add_option("--out", out_path, "output path");

  // cv
  auto* cv_cmd = app.add_subcommand(
      "cv", "k-fold cross-validated error of a classifier grid");
  DataArgs cv_data;
  cv_data.attach(cv_cmd);
  int cv_k = 10;
  std::string grid = "cstar";
  cv_cmd->add_option("--k", cv_k, "number of folds")->capture_default_str();
  cv_cmd->add_option("--grid", grid,
                     "cstar (10 cdfs), c (10*J with reference choices), or "
                     "logistic (baseline only)")
      ->capture_default_str();
  cv_cmd->add_option("--out", out_path, "output path");

  CLI11_PARSE(app, argc, argv);

  FitControls controls;
  controls.tol = tol;
  controls.max_iter = max_iter;
  const OutputFormat out_format = parse_format(format);

  try {
    if (*fit_cmd) {
      const Dataset data = fit_data.load();
      const ModelSpec spec = spec_for(data, ratio, cdf, design);
      const FittedModel fitted = fisher_scoring(spec, data, controls);
      write_output(emit_result(fitted, out_format), out_path);
      if (!fitted.converged)
        std::cerr << "warning: " << fitted.diagnostic << "\n";
    } else if (*predict_cmd) {
      std::ifstream in(model_path);
      if (!in) throw DomainError("cannot open " + model_path);
      nlohmann::json j;
      in >> j;
      const FittedModel fitted = fitted_model_from_json(j);
      Eigen::VectorXd x(fitted.spec.p);
      const auto values = split_list(x_arg);
      if (static_cast<int>(values.size()) != fitted.spec.p)
        throw DomainError("--x needs exactly p values");
      for (int c = 0; c < fitted.spec.p; ++c) x[c] = std::stod(values[c]);
      const Eigen::VectorXd pi = predict_full(fitted, x);
      nlohmann::json out;
      out["type"] = "prediction";
      out["labels"] = fitted.spec.category_labels;
      out["probabilities"] = std::vector<double>(pi.data(), pi.data() + pi.size());
      out["classified"] = classify(fitted, x);
      write_output(out.dump(2) + "\n", out_path);
    } else if (*jac_cmd) {
      double worst = 0.0;
      for (int J = jac_jmin; J <= jac_jmax; ++J) {
        for (RatioKind kind :
             {RatioKind::reference, RatioKind::adjacent, RatioKind::cumulative,
              RatioKind::sequential}) {
          const auto res = jacobian_fd_check(kind, J, jac_trials, seed);
          std::cout << "jacobian " << to_string(kind) << " J=" << J
                    << " max_abs_error=" << res.max_abs_error << "\n";
          worst = std::max(worst, res.max_abs_error);
        }
      }
      std::mt19937_64 rng(seed);
      Eigen::MatrixXd X(score_rows, 2);
      for (int i = 0; i < score_rows; ++i) {
        X(i, 0) = std::uniform_real_distribution<double>(-1, 1)(rng);
        X(i, 1) = std::uniform_real_distribution<double>(-1, 1)(rng);
      }
      double worst_score = 0.0;
      for (const char* cname : {"logistic", "normal", "gumbelmin", "student:3"}) {
        for (RatioKind kind :
             {RatioKind::reference, RatioKind::adjacent, RatioKind::cumulative,
              RatioKind::sequential}) {
          ModelSpec spec;
          spec.ratio = kind;
          spec.cdf = parse_cdf(cname);
          spec.design.kind = DesignKind::complete;
          spec.J = 4;
          spec.p = 2;
          spec = normalized(spec);
          Eigen::VectorXd beta(spec.beta_dim());
          beta << -0.8, 0.0, 0.8, 0.25, -0.15, 0.1, 0.2, -0.1, 0.05;
          const Dataset data = simulate_dataset(spec, beta, X, seed + 7);
          const double err = score_fd_relative_error(
              spec, beta, std::span<const Observation>(data.observations));
          std::cout << "score " << to_string(kind) << " " << cname
                    << " rel_error=" << err << "\n";
          worst_score = std::max(worst_score, err);
        }
      }
      std::cout << "max jacobian error " << worst << ", max score rel error "
                << worst_score << "\n";
      if (worst > 1e-6 || worst_score > 1e-5) return 1;
    } else if (*equiv_cmd) {
      std::mt19937_64 rng(seed);
      const PlanName plan = parse_plan(plan_name);
      std::vector<EqualityReport> trials;
      double worst = 0.0;
      for (int t = 0; t < equiv_trials; ++t) {
        const PlanCase pc = sample_plan_case(plan, equiv_j, rng);
        const TransformPlan tp = make_plan(plan, pc.base, pc.aux);
        trials.push_back(verify_pointwise_equality(tp, pc.beta, pc.x_grid));
        worst = std::max(worst, trials.back().max_deviation);
      }
      write_output(emit_result(trials, out_format), out_path);
      std::cerr << "max deviation over " << equiv_trials
                << " trials: " << worst << "\n";
      if (worst > 1e-10) return 1;
    } else if (*scan_cmd) {
      const Dataset data = scan_data.load();
      const ModelSpec spec = spec_for(data, scan_ratio, scan_cdf, scan_design);
      const PermScanResult result =
          permutation_scan(spec, data, parse_perms(perms_arg, data), controls);
      write_output(emit_result(result, data.category_labels, out_format),
                   out_path);
    } else if (*order_cmd) {
      const Dataset data = order_data.load();
      std::vector<std::pair<std::string, std::string>> constraints;
      for (const std::string& one : split_list(constraints_arg)) {
        const auto lt = one.find('<');
        if (lt == std::string::npos)
          throw DomainError("constraint must look like a<b: " + one);
        constraints.emplace_back(one.substr(0, lt), one.substr(lt + 1));
      }
      std::vector<CdfSpec> cdfs;
      for (const std::string& name : split_list(cdfs_arg))
        cdfs.push_back(parse_cdf(name));
      const OrderingSearchResult result = ordering_search(
          data, constraints, cdfs, parse_design(order_design), controls);
      write_output(emit_result(result, data.category_labels, out_format),
                   out_path);
    } else if (*cv_cmd) {
      const Dataset data = cv_data.load();
      std::vector<ModelSpec> classifiers;
      if (grid == "cstar") {
        classifiers = classifier_grid_cstar(data.J(), data.p());
      } else if (grid == "c") {
        classifiers = classifier_grid_c(data.J(), data.p());
      } else if (grid == "logistic") {
        ModelSpec spec = spec_for(data, "reference", "logistic", "complete");
        classifiers.push_back(spec);
      } else {
        throw DomainError("unknown grid: " + grid);
      }
      for (auto& c : classifiers) c.category_labels = data.category_labels;
      const CvResult result = kfold_cv(classifiers, data, cv_k, seed, controls);
      write_output(emit_result(result, out_format), out_path);
    }
  } catch (const ModelUndefined& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConstraintViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
