#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "termclass/eval.hpp"
#include "termclass/features.hpp"

namespace termclass {

struct TrainConfig {
  std::vector<double> c_grid{0.001, 0.01, 0.1, 1.0, 10.0, 100.0};
  std::size_t max_iter = 1000;
  double grad_tol = 1e-6;
  std::size_t folds = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Multinomial logistic regression: p = softmax(W x + b).
struct LogRegModel {
  LabelSet labels;
  double c = 1.0;
  Eigen::MatrixXd weights;  // K x D
  Eigen::VectorXd bias;     // K

  std::size_t num_classes() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(weights.cols()); }
};

struct ObjectiveGradient {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

/// (1/(2C))·‖W‖²_F + Σ_i −log softmax(W x_i + b)[y_i]. The bias is not
/// penalized. Fills `grad` when non-null.
double objective(const Matrix& x, std::span<const std::size_t> y, const Eigen::MatrixXd& weights,
                 const Eigen::VectorXd& bias, double c, ObjectiveGradient* grad = nullptr);

struct TrainTrace {
  std::vector<double> losses;  // objective after each accepted step, starting at the initial point
  std::size_t iterations = 0;
  std::size_t evaluations = 0;  // objective/gradient evaluations, line search included
  bool converged = false;
  double final_grad_norm = 0.0;
};

/// Full-batch gradient descent from W = 0, b = 0 with alternating
/// Barzilai-Borwein trial steps and Armijo backtracking (halving, c1 = 1e-4).
/// Stops once ‖∇‖_∞ <= grad_tol, after max_iter iterations, or when the line
/// search can no longer find a decrease above rounding noise.
LogRegModel train(const Matrix& x, std::span<const std::size_t> y, const LabelSet& labels, double c,
                  const TrainConfig& cfg, TrainTrace* trace = nullptr);

/// Max-shifted softmax of W x + b.
Eigen::VectorXd predict_proba(const LogRegModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);

/// Class indices by descending probability, truncated to min(K, 3). Ties keep label order.
RankedList rank_labels(std::span<const double> probs);

struct GridRow {
  double c = 0.0;
  EvalReport cv;                  // averaged over folds
  std::vector<EvalReport> folds;  // per fold, in fold order
};

struct GridSearchResult {
  double best_c = 0.0;
  std::vector<GridRow> rows;  // in grid order
  LogRegModel model;          // refit on all rows with best_c
  MinMaxScaler scaler;        // fitted on all rows
};

/// Stratified k-fold CV of one C. The scaler is refitted on each training split.
GridRow cross_validate(const Matrix& raw_x, std::span<const std::size_t> y, const LabelSet& labels, double c,
                       std::span<const std::vector<std::size_t>> folds, const TrainConfig& cfg);

/// Selects the C with the lowest CV mean rank, then highest accuracy, then smallest C.
GridSearchResult grid_search(const Matrix& raw_x, std::span<const std::size_t> y, const LabelSet& labels,
                             const TrainConfig& cfg);

/// Everything needed to score new terms with a trained model.
struct ModelBundle {
  LogRegModel model;
  MinMaxScaler scaler;
  FeatureLayout layout;
  std::size_t embedding_dim = 0;
};

std::string format_model(const ModelBundle& bundle);
ModelBundle parse_model(std::string_view content);
void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace termclass
