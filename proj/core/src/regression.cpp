#include "priordis/regression.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "priordis/error.hpp"
#include "priordis/hash.hpp"
#include "priordis/space.hpp"

namespace priordis {

namespace {

double parse_double(const std::string& text, std::size_t lineno) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) throw FormatError("bad number '" + text + "'", lineno);
  return v;
}

}  // namespace

void TrainingSet::validate() const {
  if (x.rows() != y.rows())
    throw ShapeError(fmt::format("training set has {} inputs but {} targets", x.rows(), y.rows()));
  if (x.rows() == 0) throw ShapeError("training set is empty");
  if (!objects.empty() && static_cast<Eigen::Index>(objects.size()) != x.rows())
    throw ShapeError("training set labels do not match the row count");
}

void RegressionConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("regression.lambda must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("regression.learning_rate must be > 0");
  if (max_iters < 1) throw ConfigError("regression.max_iters must be >= 1");
  if (!(tol >= 0.0)) throw ConfigError("regression.tol must be >= 0");
  if (!(init_sigma >= 0.0)) throw ConfigError("regression.init_sigma must be >= 0");
}

std::string RegressionConfig::canonical() const {
  return fmt::format("lambda={};lr={};max_iters={};tol={};init={};sigma={};seed={};mode={}",
                     format_double(lambda), auto_step ? std::string("auto") : format_double(learning_rate), max_iters,
                     format_double(tol), init == InitScheme::Zero ? "zero" : "gaussian",
                     format_double(init_sigma), seed,
                     mode == TrainMode::FullBatch ? "full_batch" : "stochastic");
}

std::string RegressionConfig::hash() const { return hex_hash(canonical()); }

namespace {

void check_shape(const Eigen::MatrixXd& w, const TrainingSet& ts) {
  ts.validate();
  if (w.rows() != ts.y.cols() || w.cols() != ts.x.cols())
    throw ShapeError(fmt::format("verb matrix is {}x{} but the training set maps {} -> {} dims",
                                 w.rows(), w.cols(), ts.x.cols(), ts.y.cols()));
}

double objective(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& w, double lambda, double m) {
  return (residual.squaredNorm() + lambda * w.squaredNorm()) / (2.0 * m);
}

// Rows sorted lexicographically by (x row, y row) values.
TrainingSet canonical_order(const TrainingSet& ts) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ts.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < ts.x.cols(); ++j)
      if (ts.x(a, j) != ts.x(b, j)) return ts.x(a, j) < ts.x(b, j);
    for (Eigen::Index j = 0; j < ts.y.cols(); ++j)
      if (ts.y(a, j) != ts.y(b, j)) return ts.y(a, j) < ts.y(b, j);
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);
  TrainingSet out;
  out.x.resize(ts.x.rows(), ts.x.cols());
  out.y.resize(ts.y.rows(), ts.y.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.x.row(r) = ts.x.row(order[i]);
    out.y.row(r) = ts.y.row(order[i]);
  }
  return out;
}

Eigen::MatrixXd initial_matrix(Eigen::Index rows, Eigen::Index cols, const RegressionConfig& cfg) {
  if (cfg.init == InitScheme::Zero) return Eigen::MatrixXd::Zero(rows, cols);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, cfg.init_sigma);
  Eigen::MatrixXd w(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) w(i, j) = normal(rng);
  return w;
}

bool small_change(double prev, double cur, double tol) {
  const double scale = std::max(std::abs(prev), std::numeric_limits<double>::min());
  return std::abs(prev - cur) <= tol * scale;
}

}  // namespace

double loss(const Eigen::MatrixXd& w, const TrainingSet& ts, double lambda) {
  check_shape(w, ts);
  const Eigen::MatrixXd residual = w * ts.x.transpose() - ts.y.transpose();
  return objective(residual, w, lambda, static_cast<double>(ts.size()));
}

Eigen::MatrixXd gradient(const Eigen::MatrixXd& w, const TrainingSet& ts, double lambda) {
  check_shape(w, ts);
  const Eigen::MatrixXd residual = w * ts.x.transpose() - ts.y.transpose();
  return (residual * ts.x + lambda * w) / static_cast<double>(ts.size());
}

double lipschitz_step(const TrainingSet& ts, double lambda) {
  ts.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ts.x.transpose() * ts.x, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().size() ? eig.eigenvalues().maxCoeff() : 0.0;
  const double l = (top + lambda) / static_cast<double>(ts.size());
  if (!(l > 0.0)) throw SingularSystemError("objective has zero curvature; no finite step size");
  return 1.0 / l;
}

VerbMatrix train_gd(const TrainingSet& input, const RegressionConfig& cfg, std::string verb,
                    std::optional<int> sense) {
  cfg.validate();
  input.validate();
  const TrainingSet ts = canonical_order(input);
  const double m = static_cast<double>(ts.size());
  const Eigen::Index dp = ts.y.cols();
  const Eigen::Index dn = ts.x.cols();
  double lr = cfg.learning_rate;
  if (cfg.auto_step) {
    if (cfg.mode == TrainMode::FullBatch) {
      lr = lipschitz_step(ts, cfg.lambda);
    } else {
      const double top = ts.x.rowwise().squaredNorm().maxCoeff() + cfg.lambda / m;
      if (!(top > 0.0)) throw SingularSystemError("objective has zero curvature; no finite step size");
      lr = 1.0 / top;
    }
  }

  VerbMatrix vm;
  vm.verb = std::move(verb);
  vm.sense = sense;
  vm.config_hash = cfg.hash();
  vm.w = initial_matrix(dp, dn, cfg);

  Eigen::MatrixXd residual = vm.w * ts.x.transpose() - ts.y.transpose();
  double prev = objective(residual, vm.w, cfg.lambda, m);
  vm.initial_loss = prev;
  if (!std::isfinite(prev)) throw DivergenceError("initial loss is not finite", 0);

  if (cfg.mode == TrainMode::FullBatch) {
    for (int it = 1; it <= cfg.max_iters; ++it) {
      const Eigen::MatrixXd grad = (residual * ts.x + cfg.lambda * vm.w) / m;
      vm.w -= lr * grad;
      residual.noalias() = vm.w * ts.x.transpose() - ts.y.transpose();
      const double cur = objective(residual, vm.w, cfg.lambda, m);
      vm.iterations = it;
      if (!std::isfinite(cur))
        throw DivergenceError(fmt::format("gradient descent diverged at iteration {} (learning rate {})",
                                          it, lr), static_cast<std::size_t>(it));
      if (small_change(prev, cur, cfg.tol)) {
        prev = cur;
        vm.converged = true;
        break;
      }
      prev = cur;
    }
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(ts.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const double shrink = cfg.lambda / m;
    for (int epoch = 1; epoch <= cfg.max_iters; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (auto i : order) {
        const Eigen::VectorXd r = vm.w * ts.x.row(i).transpose() - ts.y.row(i).transpose();
        vm.w -= lr * (r * ts.x.row(i) + shrink * vm.w);
      }
      residual.noalias() = vm.w * ts.x.transpose() - ts.y.transpose();
      const double cur = objective(residual, vm.w, cfg.lambda, m);
      vm.iterations = epoch;
      if (!std::isfinite(cur))
        throw DivergenceError(fmt::format("stochastic gradient descent diverged in epoch {}", epoch),
                              static_cast<std::size_t>(epoch));
      if (small_change(prev, cur, cfg.tol)) {
        prev = cur;
        vm.converged = true;
        break;
      }
      prev = cur;
    }
  }
  vm.final_loss = prev;
  return vm;
}

VerbMatrix closed_form(const TrainingSet& ts, double lambda, std::string verb, std::optional<int> sense) {
  ts.validate();
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  const Eigen::Index dn = ts.x.cols();
  Eigen::MatrixXd a = ts.x.transpose() * ts.x;
  a.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = ts.x.transpose() * ts.y;  // (Y^T X)^T

  VerbMatrix vm;
  vm.verb = std::move(verb);
  vm.sense = sense;
  vm.config_hash = hex_hash(fmt::format("closed_form;lambda={}", format_double(lambda)));
  if (lambda == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < dn)
      throw SingularSystemError("X^T X is singular at lambda = 0; use lambda > 0");
    vm.w = lu.solve(rhs).transpose();
  } else {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw SingularSystemError("ridge system could not be factorized");
    vm.w = ldlt.solve(rhs).transpose();
  }
  vm.final_loss = vm.initial_loss = loss(vm.w, ts, lambda);
  vm.converged = true;
  return vm;
}

Eigen::VectorXd apply_verb(const VerbMatrix& vm, const Eigen::Ref<const Eigen::VectorXd>& noun) {
  if (noun.size() != vm.cols())
    throw ShapeError(fmt::format("noun vector has {} dims but the verb matrix expects {}", noun.size(), vm.cols()));
  return vm.w * noun;
}

void write_matrix(std::ostream& out, const VerbMatrix& vm, const std::string& pipeline_hash) {
  out << "#verb " << vm.verb << " #sense " << (vm.sense ? std::to_string(*vm.sense) : "-")
      << " #rows " << vm.rows() << " #cols " << vm.cols() << '\n';
  if (!pipeline_hash.empty()) out << "#config " << pipeline_hash << '\n';
  out << "#fit iterations " << vm.iterations << " converged " << (vm.converged ? 1 : 0) << " initial_loss "
      << format_double(vm.initial_loss) << " final_loss " << format_double(vm.final_loss) << " regression "
      << (vm.config_hash.empty() ? "-" : vm.config_hash) << '\n';
  for (Eigen::Index i = 0; i < vm.rows(); ++i) {
    for (Eigen::Index j = 0; j < vm.cols(); ++j) {
      if (j) out << '\t';
      out << format_double(vm.w(i, j));
    }
    out << '\n';
  }
}

void save_matrix(const std::filesystem::path& path, const VerbMatrix& vm, const std::string& pipeline_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_matrix(out, vm, pipeline_hash);
}

VerbMatrix read_matrix(std::istream& in, std::string* pipeline_hash) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty matrix file", 1);
  std::istringstream header(line);
  std::string tag_verb, verb, tag_sense, sense, tag_rows, tag_cols;
  long rows = -1, cols = -1;
  if (!(header >> tag_verb >> verb >> tag_sense >> sense >> tag_rows >> rows >> tag_cols >> cols) ||
      tag_verb != "#verb" || tag_sense != "#sense" || tag_rows != "#rows" || tag_cols != "#cols" ||
      rows <= 0 || cols <= 0)
    throw FormatError("bad matrix header", 1);
  VerbMatrix vm;
  vm.verb = verb;
  if (sense != "-") vm.sense = std::stoi(sense);
  vm.w.resize(rows, cols);
  std::size_t lineno = 1;
  Eigen::Index r = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("#config ", 0) == 0) {
      if (pipeline_hash) *pipeline_hash = line.substr(8);
      continue;
    }
    if (line.rfind("#fit ", 0) == 0) {
      std::istringstream fit(line.substr(5));
      std::string key, value;
      while (fit >> key >> value) {
        if (key == "iterations") vm.iterations = std::stoi(value);
        else if (key == "converged") vm.converged = value == "1";
        else if (key == "initial_loss") vm.initial_loss = parse_double(value, lineno);
        else if (key == "final_loss") vm.final_loss = parse_double(value, lineno);
        else if (key == "regression" && value != "-") vm.config_hash = value;
      }
      continue;
    }
    if (r >= rows) throw FormatError("too many matrix rows", lineno);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (Eigen::Index j = 0; j < cols; ++j) {
      while (p < end && (*p == '\t' || *p == ' ')) ++p;
      const auto res = std::from_chars(p, end, vm.w(r, j));
      if (res.ec != std::errc()) throw FormatError("short or malformed matrix row", lineno);
      p = res.ptr;
    }
    while (p < end && (*p == '\t' || *p == ' ')) ++p;
    if (p != end) throw FormatError("matrix row has more columns than the header", lineno);
    ++r;
  }
  if (r != rows) throw FormatError(fmt::format("matrix has {} rows, header says {}", r, rows));
  return vm;
}

VerbMatrix load_matrix(const std::filesystem::path& path, std::string* pipeline_hash) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("cannot open matrix file " + path.string());
  return read_matrix(in, pipeline_hash);
}

}  // namespace priordis
