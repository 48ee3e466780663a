#include "trimsvm/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trimsvm/errors.hpp"

namespace trimsvm {

Eigen::Index level_count(double level, Eigen::Index m, LevelPolicy policy) {
    if (level < 0 || level > 1) throw error("level must lie in [0, 1]");
    const double scaled = level * static_cast<double>(m);
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) <= 1e-9 * std::max(1.0, scaled))
        return static_cast<Eigen::Index>(nearest);
    if (policy == LevelPolicy::Strict)
        throw non_integer_level_error("level * m = " + std::to_string(scaled) +
                                      " is not an integer");
    return static_cast<Eigen::Index>(std::floor(scaled));
}

Vector negative_margins(const Vector& alpha, double b, const Matrix& K, const Vector& y) {
    if (K.cols() != alpha.size()) throw dimension_error("alpha length != kernel columns");
    if (K.rows() != y.size()) throw dimension_error("label length != kernel rows");
    Vector g = K * alpha;
    g.array() += b;
    return -(y.array() * g.array());
}

std::vector<Eigen::Index> descending_order(const Vector& values) {
    std::vector<Eigen::Index> sigma(static_cast<std::size_t>(values.size()));
    std::iota(sigma.begin(), sigma.end(), Eigen::Index{0});
    std::stable_sort(sigma.begin(), sigma.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
    return sigma;
}

double cvar(const Vector& values, double nu, LevelPolicy policy) {
    return trimmed_cvar_diff(values, nu, 0.0, policy);
}

double trimmed_cvar_diff(const Vector& values, double nu, double mu, LevelPolicy policy) {
    const Eigen::Index m = values.size();
    if (m == 0) throw error("empty value vector");
    const Eigen::Index k_nu = level_count(nu, m, policy);
    const Eigen::Index k_mu = level_count(mu, m, policy);
    if (!(k_mu >= 0 && k_mu < k_nu && k_nu <= m))
        throw degenerate_levels_error("levels must satisfy 0 <= mu < nu <= 1 after snapping");
    const auto sigma = descending_order(values);
    double sum = 0;
    for (Eigen::Index i = k_mu; i < k_nu; ++i) sum += values(sigma[static_cast<std::size_t>(i)]);
    return sum / static_cast<double>(k_nu - k_mu);
}

double primal_objective(double norm_sq, double nu, double mu, const Vector& values,
                        LevelPolicy policy) {
    return 0.5 * norm_sq + (nu - mu) * trimmed_cvar_diff(values, nu, mu, policy);
}

std::pair<double, double> empirical_quantiles(const Vector& values, double nu, double mu) {
    const Eigen::Index m = values.size();
    if (m == 0) throw error("empty value vector");
    if (!(0 < mu && mu < nu && nu < 1)) throw error("quantiles require 0 < mu < nu < 1");
    std::vector<double> sorted(values.data(), values.data() + m);
    std::sort(sorted.begin(), sorted.end());
    const double md = static_cast<double>(m);

    // Fhat(sorted[i]) = (i+1)/m. Quantiles are evaluated on the sample atoms.
    double q_bar = sorted.front();
    for (Eigen::Index i = 0; i < m; ++i) {
        // count of samples <= sorted[i] is the upper bound of the tied block
        Eigen::Index hi = i;
        while (hi + 1 < m && sorted[static_cast<std::size_t>(hi + 1)] == sorted[static_cast<std::size_t>(i)]) ++hi;
        if (static_cast<double>(hi + 1) / md <= 1 - nu) q_bar = sorted[static_cast<std::size_t>(i)];
        i = hi;
    }
    double q_under = sorted.back();
    for (Eigen::Index i = m - 1; i >= 0; --i) {
        Eigen::Index hi = i;
        while (hi + 1 < m && sorted[static_cast<std::size_t>(hi + 1)] == sorted[static_cast<std::size_t>(i)]) ++hi;
        if (static_cast<double>(hi + 1) / md >= 1 - mu) q_under = sorted[static_cast<std::size_t>(i)];
    }
    return {q_bar, q_under};
}

double gap_bias(double B_mu, double mu, double nu) {
    if (B_mu < 0) throw error("gap length must be nonnegative");
    if (!(0 < mu && mu < nu && nu < 1)) throw error("gap_bias requires 0 < mu < nu < 1");
    return B_mu * std::sqrt(mu * (1 - mu)) / (std::sqrt(2 * M_PI) * (nu - mu));
}

}  // namespace trimsvm
