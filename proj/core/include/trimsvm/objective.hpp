#pragma once

#include <utility>
#include <vector>

#include "trimsvm/types.hpp"

namespace trimsvm {

/// Policy for levels nu, mu whose products with m must be integers.
/// Strict errors out; Snap rounds the level down to a multiple of 1/m.
enum class LevelPolicy { Strict, Snap };

/// Number of tail samples nu*m, validated or snapped per policy.
Eigen::Index level_count(double level, Eigen::Index m, LevelPolicy policy);

/// r_i = -y_i (sum_j K_ij alpha_j + b). K may be a rectangular cross-kernel
/// block, in which case y must match its row count.
Vector negative_margins(const Vector& alpha, double b, const Matrix& K, const Vector& y);

/// Stable descending order of values; ties keep the lower original index
/// first. Returned indices sigma satisfy v[sigma[0]] >= v[sigma[1]] >= ...
std::vector<Eigen::Index> descending_order(const Vector& values);

/// Mean of the nu*m largest values.
double cvar(const Vector& values, double nu, LevelPolicy policy = LevelPolicy::Strict);

/// Mean of the values ranked mu*m+1 .. nu*m in descending order (the T_m
/// statistic). Reduces to cvar when mu = 0.
double trimmed_cvar_diff(const Vector& values, double nu, double mu,
                         LevelPolicy policy = LevelPolicy::Strict);

/// 1/2 ||f||^2 + (nu - mu) * trimmed mean of the negative margins.
double primal_objective(double norm_sq, double nu, double mu, const Vector& values,
                        LevelPolicy policy = LevelPolicy::Strict);

/// Empirical quantiles over the sample atoms:
/// first  = largest sample value r with Fhat(r) <= 1 - nu,
/// second = smallest sample value r with Fhat(r) >= 1 - mu.
std::pair<double, double> empirical_quantiles(const Vector& values, double nu, double mu);

/// Asymptotic mean of the trimmed-mean fluctuation when the 1-mu quantile
/// sits on a density gap of length B_mu:  B * sqrt(mu(1-mu)) / (sqrt(2 pi) (nu-mu)).
double gap_bias(double B_mu, double mu, double nu);

}  // namespace trimsvm
