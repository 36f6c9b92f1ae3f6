#include "termclass/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "termclass/io.hpp"

namespace termclass {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 40;
constexpr double kMaxStep = 1e12;
constexpr std::string_view kModelMagic = "termclass-logreg 1";

void check_training_data(const Matrix& x, std::span<const std::size_t> y, std::size_t k) {
  if (x.rows() == 0) throw std::invalid_argument("cannot train on an empty dataset");
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw std::invalid_argument("feature and label counts differ");
  if (!x.allFinite()) throw std::invalid_argument("feature matrix contains non-finite values");
  for (auto label : y) {
    if (label >= k) throw std::out_of_range("label index " + std::to_string(label) + " out of range");
  }
}

double inf_norm(const ObjectiveGradient& g) {
  double m = g.weights.size() ? g.weights.cwiseAbs().maxCoeff() : 0.0;
  if (g.bias.size()) m = std::max(m, g.bias.cwiseAbs().maxCoeff());
  return m;
}

double squared_norm(const ObjectiveGradient& g) { return g.weights.squaredNorm() + g.bias.squaredNorm(); }

Matrix select_rows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (c_grid.empty()) throw std::invalid_argument("C grid must not be empty");
  for (double c : c_grid) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("C values must be positive and finite");
  }
  if (folds < 2) throw std::invalid_argument("need at least two folds");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
}

namespace {

// Accumulated in extended precision so that the line search can still
// resolve decreases near convergence, where they fall below one ulp of a
// double-precision sum.
long double objective_ext(const Matrix& x, std::span<const std::size_t> y, const Eigen::MatrixXd& weights,
                          const Eigen::VectorXd& bias, double c, ObjectiveGradient* grad) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = weights.rows();
  Eigen::MatrixXd logits = x * weights.transpose();
  logits.rowwise() += bias.transpose();

  long double loss = 0.0L;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double shift = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) sum += std::exp(logits(i, j) - shift);
    const double lse = shift + std::log(sum);
    const auto yi = static_cast<Eigen::Index>(y[static_cast<std::size_t>(i)]);
    loss += static_cast<long double>(lse - logits(i, yi));
    if (grad) {
      for (Eigen::Index j = 0; j < k; ++j) logits(i, j) = std::exp(logits(i, j) - lse);
      logits(i, yi) -= 1.0;
    }
  }
  long double penalty = 0.0L;
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    const long double w = weights.data()[j];
    penalty += w * w;
  }
  loss += penalty / (2.0L * static_cast<long double>(c));

  if (grad) {
    // logits now holds P - Y.
    grad->weights = logits.transpose() * x;
    grad->weights += weights / c;
    grad->bias = logits.colwise().sum().transpose();
  }
  return loss;
}

}  // namespace

double objective(const Matrix& x, std::span<const std::size_t> y, const Eigen::MatrixXd& weights,
                 const Eigen::VectorXd& bias, double c, ObjectiveGradient* grad) {
  return static_cast<double>(objective_ext(x, y, weights, bias, c, grad));
}

LogRegModel train(const Matrix& x, std::span<const std::size_t> y, const LabelSet& labels, double c,
                  const TrainConfig& cfg, TrainTrace* trace) {
  const std::size_t k = labels.size();
  check_training_data(x, y, k);
  if (!(c > 0.0)) throw std::invalid_argument("C must be positive");

  LogRegModel model;
  model.labels = labels;
  model.c = c;
  model.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), x.cols());
  model.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));

  ObjectiveGradient g;
  long double f = objective_ext(x, y, model.weights, model.bias, c, &g);
  if (trace) trace->losses.assign(1, static_cast<double>(f));

  // Conservative first step: 1 / L with L bounding the Hessian's spectral norm.
  const double lipschitz = 0.5 * (x.squaredNorm() + static_cast<double>(x.rows())) + 1.0 / c;
  double step = 1.0 / lipschitz;

  ObjectiveGradient g_new;
  std::size_t iter = 0;
  std::size_t evaluations = 1;
  bool converged = inf_norm(g) <= cfg.grad_tol;
  while (!converged && iter < cfg.max_iter) {
    const double g_sq = squared_norm(g);
    double t = step;
    Eigen::MatrixXd w_new;
    Eigen::VectorXd b_new;
    long double f_new = f;
    bool accepted = false;
    for (int halvings = 0; halvings <= kMaxHalvings; ++halvings, t *= 0.5) {
      w_new = model.weights - t * g.weights;
      b_new = model.bias - t * g.bias;
      f_new = objective_ext(x, y, w_new, b_new, c, &g_new);
      ++evaluations;
      if (std::isfinite(f_new) && f_new <= f - static_cast<long double>(kArmijo * t * g_sq)) {
        accepted = true;
        break;
      }
    }
    // The decrease the line search asks for has dropped below rounding noise.
    if (!accepted) break;
    ++iter;

    // Barzilai-Borwein trial step for the next iteration, alternating the
    // long (<s,s>/<s,y>) and short (<s,y>/<y,y>) variants.
    const Eigen::MatrixXd dw = g_new.weights - g.weights;
    const Eigen::VectorXd db = g_new.bias - g.bias;
    const double s_dot_s = t * t * g_sq;
    const double s_dot_y = -t * (dw.cwiseProduct(g.weights).sum() + db.cwiseProduct(g.bias).sum());
    const double y_dot_y = dw.squaredNorm() + db.squaredNorm();
    if (s_dot_y > 0.0) {
      step = (iter % 2 == 1) ? s_dot_s / s_dot_y : s_dot_y / y_dot_y;
    } else {
      step = 2.0 * t;
    }
    step = std::min(step, kMaxStep);

    model.weights = std::move(w_new);
    model.bias = std::move(b_new);
    f = f_new;
    std::swap(g, g_new);
    if (trace) trace->losses.push_back(static_cast<double>(f));
    converged = inf_norm(g) <= cfg.grad_tol;
  }
  if (trace) {
    trace->iterations = iter;
    trace->evaluations = evaluations;
    trace->converged = converged;
    trace->final_grad_norm = inf_norm(g);
  }
  return model;
}

Eigen::VectorXd predict_proba(const LogRegModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != model.dim()) {
    throw std::invalid_argument("feature length " + std::to_string(x.size()) + " != model dim " +
                                std::to_string(model.dim()));
  }
  Eigen::VectorXd z = model.weights * x.transpose() + model.bias;
  z.array() -= z.maxCoeff();
  z = z.array().exp();
  return z / z.sum();
}

RankedList rank_labels(std::span<const double> probs) {
  RankedList order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  order.resize(std::min<std::size_t>(probs.size(), 3));
  return order;
}

GridRow cross_validate(const Matrix& raw_x, std::span<const std::size_t> y, const LabelSet& labels, double c,
                       std::span<const std::vector<std::size_t>> folds, const TrainConfig& cfg) {
  GridRow row;
  row.c = c;
  const auto n = static_cast<std::size_t>(raw_x.rows());
  for (const auto& test_idx : folds) {
    std::vector<bool> is_test(n, false);
    for (auto i : test_idx) is_test[i] = true;
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_test[i]) train_idx.push_back(i);
    }
    const Matrix train_raw = select_rows(raw_x, train_idx);
    const auto scaler = MinMaxScaler::fit(train_raw);
    const Matrix train_x = scaler.transform(train_raw);
    const Matrix test_x = scaler.transform(select_rows(raw_x, test_idx));
    std::vector<std::size_t> train_y;
    std::vector<std::size_t> test_y;
    for (auto i : train_idx) train_y.push_back(y[i]);
    for (auto i : test_idx) test_y.push_back(y[i]);

    const auto model = train(train_x, train_y, labels, c, cfg);
    std::vector<RankedList> ranked;
    ranked.reserve(test_idx.size());
    for (Eigen::Index r = 0; r < test_x.rows(); ++r) {
      const Eigen::VectorXd p = predict_proba(model, test_x.row(r));
      ranked.push_back(rank_labels(std::span<const double>(p.data(), static_cast<std::size_t>(p.size()))));
    }
    row.folds.push_back(evaluate(ranked, test_y, labels.size()));
  }
  row.cv = average_folds(row.folds);
  return row;
}

GridSearchResult grid_search(const Matrix& raw_x, std::span<const std::size_t> y, const LabelSet& labels,
                             const TrainConfig& cfg) {
  cfg.validate();
  check_training_data(raw_x, y, labels.size());
  const auto folds = stratified_kfold(y, cfg.folds, cfg.seed);

  GridSearchResult result;
  for (double c : cfg.c_grid) result.rows.push_back(cross_validate(raw_x, y, labels, c, folds, cfg));

  const GridRow* best = &result.rows.front();
  for (const auto& row : result.rows) {
    const auto& a = row.cv;
    const auto& b = best->cv;
    if (a.mean_rank < b.mean_rank || (a.mean_rank == b.mean_rank && a.accuracy > b.accuracy) ||
        (a.mean_rank == b.mean_rank && a.accuracy == b.accuracy && row.c < best->c)) {
      best = &row;
    }
  }
  result.best_c = best->c;
  result.scaler = MinMaxScaler::fit(raw_x);
  result.model = train(result.scaler.transform(raw_x), y, labels, result.best_c, cfg);
  return result;
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view content) : content_(content) {}

  std::string_view next() {
    if (pos_ >= content_.size()) throw std::runtime_error("model file truncated at line " + std::to_string(line_ + 1));
    auto nl = content_.find('\n', pos_);
    if (nl == std::string_view::npos) nl = content_.size();
    auto line = content_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_;
    return line;
  }

  std::string_view expect_key(std::string_view key) {
    auto line = next();
    if (line.substr(0, key.size()) != key) fail("expected '" + std::string(key) + "'");
    line.remove_prefix(key.size());
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("model file line " + std::to_string(line_) + ": " + what);
  }

  std::vector<double> doubles(std::string_view line, std::size_t count) const {
    std::vector<double> out;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ') ++j;
      if (j > i) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
        if (ec != std::errc() || ptr != line.data() + j) fail("bad number");
        out.push_back(v);
      }
      i = j;
    }
    if (out.size() != count) fail("expected " + std::to_string(count) + " values, got " + std::to_string(out.size()));
    return out;
  }

  std::size_t integer(std::string_view s) const {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("bad integer");
    return v;
  }

 private:
  std::string_view content_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

template <typename Range>
void append_row(std::string& out, const Range& values) {
  bool first = true;
  for (double v : values) {
    if (!first) out.push_back(' ');
    out += io::format_double(v);
    first = false;
  }
  out.push_back('\n');
}

}  // namespace

std::string format_model(const ModelBundle& bundle) {
  const auto& m = bundle.model;
  std::string out(kModelMagic);
  out += "\nlabels " + std::to_string(m.labels.size()) + "\n";
  for (const auto& l : m.labels.labels()) out += l + "\n";
  out += "C " + io::format_double(m.c) + "\n";
  out += "embedding_dim " + std::to_string(bundle.embedding_dim) + "\n";
  out += "layout handcrafted=" + std::to_string(bundle.layout.handcrafted ? 1 : 0) +
         " cosine=" + std::to_string(bundle.layout.cosine ? 1 : 0) +
         " edit=" + std::to_string(bundle.layout.edit ? 1 : 0) + "\n";
  out += "dim " + std::to_string(m.dim()) + "\n";
  out += "weights\n";
  for (Eigen::Index r = 0; r < m.weights.rows(); ++r) {
    std::vector<double> row(m.weights.row(r).begin(), m.weights.row(r).end());
    append_row(out, row);
  }
  out += "bias\n";
  append_row(out, std::vector<double>(m.bias.begin(), m.bias.end()));
  out += "scaler_min\n";
  append_row(out, bundle.scaler.mins());
  out += "scaler_max\n";
  append_row(out, bundle.scaler.maxs());
  return out;
}

ModelBundle parse_model(std::string_view content) {
  LineReader in(content);
  if (in.next() != kModelMagic) in.fail("not a model file (bad header)");
  const std::size_t k = in.integer(in.expect_key("labels"));
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.emplace_back(in.next());

  ModelBundle bundle;
  bundle.model.labels = LabelSet(std::move(labels));
  bundle.model.c = in.doubles(in.expect_key("C"), 1)[0];
  bundle.embedding_dim = in.integer(in.expect_key("embedding_dim"));
  {
    const std::string layout(in.expect_key("layout"));
    int hf = 0;
    int cos = 0;
    int edit = 0;
    if (std::sscanf(layout.c_str(), "handcrafted=%d cosine=%d edit=%d", &hf, &cos, &edit) != 3) in.fail("bad layout");
    bundle.layout = FeatureLayout{hf != 0, cos != 0, edit != 0};
  }
  const std::size_t d = in.integer(in.expect_key("dim"));
  if (d != bundle.layout.width(bundle.embedding_dim, k)) in.fail("dim disagrees with layout");

  in.expect_key("weights");
  bundle.model.weights.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < k; ++r) {
    auto row = in.doubles(in.next(), d);
    for (std::size_t c = 0; c < d; ++c) {
      bundle.model.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  in.expect_key("bias");
  auto bias = in.doubles(in.next(), k);
  bundle.model.bias = Eigen::Map<Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(k));
  in.expect_key("scaler_min");
  auto mins = in.doubles(in.next(), d);
  in.expect_key("scaler_max");
  auto maxs = in.doubles(in.next(), d);
  bundle.scaler = MinMaxScaler(std::move(mins), std::move(maxs));
  return bundle;
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_model(bundle));
}

ModelBundle load_model(const std::filesystem::path& path) { return parse_model(io::read_file(path)); }

}  // namespace termclass
