#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trimsvm/dataset.hpp"
#include "trimsvm/kernel.hpp"
#include "trimsvm/objective.hpp"
#include "trimsvm/qp.hpp"
#include "trimsvm/types.hpp"

namespace trimsvm {

struct TrainConfig {
    double nu = 0.5;
    double mu = 0.0;
    KernelSpec kernel = KernelSpec::gaussian(1.0);
    double tol_objective = 1e-9;        // relative objective change
    double tol_qp = 1e-10;              // KKT tolerance of the subproblem solver
    int max_outer_iter = 200;
    int restarts = 1;
    std::uint64_t seed = 0;
    LevelPolicy integrality = LevelPolicy::Snap;
};

enum class TrainStatus { Converged, IterLimit };

/// Trained decision function g(x) = sum_j alpha_j k(x, x_j) + b together with
/// the outlier indicator eta and the optimization trace.
struct Model {
    Vector alpha;                    // m dual coefficients
    double b = 0;
    double rho = 0;
    std::vector<int> eta;            // 0 marks a trimmed sample
    std::vector<Eigen::Index> support_idx;  // indices with alpha_i != 0
    KernelSpec kernel;
    Matrix train_features;           // rows referenced by nonzero alpha only
    std::vector<Eigen::Index> train_rows;   // original indices of retained rows
    double nu = 0, mu = 0;           // effective (post-snap) levels
    double objective = 0;
    std::vector<double> trace;       // per-iteration objectives, non-increasing
    TrainStatus status = TrainStatus::Converged;
    bool rho_b_fallback = false;     // one class had no free coordinate
    std::optional<ScalerStats> scaler;  // applied to raw inputs before the kernel
};

/// Algorithm step: eta zeroes the mu*m largest negative margins; ties drop
/// the lower index first.
std::vector<int> update_eta(const Vector& margins, Eigen::Index mu_count);

/// DC subproblem: Q = (y y') o K, c = -Q (1 - eta) / m, d = y'(1 - eta)/m,
/// box 1/m, sum nu.
qp::QpProblem build_subproblem(const Matrix& K, const Vector& y, const std::vector<int>& eta,
                               double nu);

/// alpha = y o (beta - (1 - eta)/m).
Vector recover_alpha(const Vector& beta, const std::vector<int>& eta, const Vector& y);

struct RhoB {
    double rho = 0;
    double b = 0;
    bool fallback = false;
};

/// Threshold and bias from the free coordinates (0 < beta_i < box with
/// margin 1e-8 * box); falls back to KKT interval midpoints when one class
/// has no free coordinate.
RhoB recover_rho_b(const Vector& beta, const Vector& alpha, const Matrix& K, const Vector& y,
                   double box);

Model train(const Dataset& d, const TrainConfig& cfg);

/// As train(), with a caller-supplied Gram matrix (precomputed kernels).
Model train_with_gram(const Dataset& d, const GramMatrix& gm, const TrainConfig& cfg);

struct Prediction {
    Vector scores;
    std::vector<int> labels;  // sign of score, 0 -> +1
};

Prediction predict(const Model& model, const Matrix& X_new);

std::string to_json(const Model& model);
Model model_from_json(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace trimsvm
