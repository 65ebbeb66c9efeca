#pragma once

// Verb matrices by L2-regularized least squares:
//   W* = argmin_W (1/2m) (||W X^T - Y^T||_F^2 + lambda ||W||_F^2)
// trained by gradient descent, with the closed-form minimizer as an oracle.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace priordis {

// Row i of X is an object vector, row i of Y the holistic vector of (verb, object_i).
struct TrainingSet {
  Eigen::MatrixXd x;  // m x d_n
  Eigen::MatrixXd y;  // m x d_p
  std::vector<std::string> objects;  // optional row labels

  Eigen::Index size() const noexcept { return x.rows(); }
  // Throws ShapeError on row-count mismatch or m == 0.
  void validate() const;
};

enum class InitScheme { Zero, Gaussian };
enum class TrainMode { FullBatch, Stochastic };

struct RegressionConfig {
  double lambda = 1.0;
  double learning_rate = 0.1;
  bool auto_step = false;  // ignore learning_rate and step by 1/L of each training set
  int max_iters = 5000;
  double tol = 1e-7;  // relative loss change
  InitScheme init = InitScheme::Zero;
  double init_sigma = 0.01;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::FullBatch;

  void validate() const;
  // Stable textual form, hashed into matrix metadata.
  std::string canonical() const;
  std::string hash() const;
};

struct VerbMatrix {
  std::string verb;
  std::optional<int> sense;
  Eigen::MatrixXd w;  // d_p x d_n
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string config_hash;

  Eigen::Index rows() const noexcept { return w.rows(); }
  Eigen::Index cols() const noexcept { return w.cols(); }
};

double loss(const Eigen::MatrixXd& w, const TrainingSet& ts, double lambda);
Eigen::MatrixXd gradient(const Eigen::MatrixXd& w, const TrainingSet& ts, double lambda);

// 1 / L for the full-batch objective, L = (||X||_2^2 + lambda) / m.
double lipschitz_step(const TrainingSet& ts, double lambda);

// Plain gradient descent W <- W - lr * grad until the relative loss change
// drops below tol or max_iters is reached. Full-batch mode sorts the rows
// into a canonical order first, so the result is bit-identical under any
// permutation of the training examples. Stochastic mode takes one step per
// example, shuffling each epoch with `seed`. Throws DivergenceError.
VerbMatrix train_gd(const TrainingSet& ts, const RegressionConfig& cfg, std::string verb = {},
                    std::optional<int> sense = std::nullopt);

// W = Y^T X (X^T X + lambda I)^{-1}. Throws SingularSystemError when the
// system cannot be solved (lambda = 0 with rank-deficient X).
VerbMatrix closed_form(const TrainingSet& ts, double lambda, std::string verb = {},
                       std::optional<int> sense = std::nullopt);

Eigen::VectorXd apply_verb(const VerbMatrix& vm, const Eigen::Ref<const Eigen::VectorXd>& noun);

// TSV: `#verb <lemma> #sense <id|-> #rows <d_p> #cols <d_n>`, optional
// `#config <hash>`, a `#fit` line with the training trace, then one row per
// line at 17 significant digits.
void write_matrix(std::ostream& out, const VerbMatrix& vm, const std::string& pipeline_hash = {});
void save_matrix(const std::filesystem::path& path, const VerbMatrix& vm, const std::string& pipeline_hash = {});
VerbMatrix read_matrix(std::istream& in, std::string* pipeline_hash = nullptr);
VerbMatrix load_matrix(const std::filesystem::path& path, std::string* pipeline_hash = nullptr);

}  // namespace priordis
