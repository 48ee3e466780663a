#include "trimsvm/dual_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "trimsvm/errors.hpp"
#include "trimsvm/objective.hpp"
#include "trimsvm/qp.hpp"

namespace trimsvm {

namespace {

Eigen::Index tail_count(double nu, double mu, Eigen::Index m) {
    const Eigen::Index k_nu = level_count(nu, m, LevelPolicy::Snap);
    const Eigen::Index k_mu = level_count(mu, m, LevelPolicy::Snap);
    if (k_nu <= k_mu) throw error("nu must exceed mu");
    return k_nu - k_mu;
}

}  // namespace

HullStatus hull_nonempty(const std::vector<int>& eta, const Vector& y, double nu, double mu) {
    const Eigen::Index m = y.size();
    if (static_cast<Eigen::Index>(eta.size()) != m) throw dimension_error("eta length != labels");
    const Eigen::Index k = tail_count(nu, mu, m);
    Eigen::Index plus = 0, minus = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!eta[static_cast<std::size_t>(i)]) continue;
        (y(i) > 0 ? plus : minus) += 1;
    }
    // count >= (nu-mu)m/2 compared as 2*count >= k, exactly
    return HullStatus{2 * plus >= k, 2 * minus >= k};
}

MinNormResult min_norm_between_hulls(const Matrix& K, const Vector& y, const std::vector<int>& eta,
                                     double nu, double mu, double tol) {
    const Eigen::Index m = y.size();
    if (K.rows() != m || K.cols() != m) throw dimension_error("Gram size != labels");
    if (!hull_nonempty(eta, y, nu, mu).both()) return {false, 0};

    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < m; ++i)
        if (eta[static_cast<std::size_t>(i)]) idx.push_back(i);
    const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
    const Eigen::Index k = tail_count(nu, mu, m);
    const double cap = 2.0 / static_cast<double>(k);  // 2/((nu-mu)m)

    // ||u_+ - u_-||^2 = gamma' Kt gamma with Kt = (yy') o K, per-class sums 1
    // <=> gamma'1 = 2, gamma'y = 0.
    qp::QpProblem p;
    p.Q.resize(n, n);
    p.y.resize(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        p.y(a) = y(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < n; ++b)
            p.Q(a, b) = 2.0 * y(idx[static_cast<std::size_t>(a)]) * y(idx[static_cast<std::size_t>(b)]) *
                        K(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    p.c = Vector::Zero(n);
    p.upper = Vector::Constant(n, cap);
    p.d = 0;
    p.s = 2;
    qp::QpSolution sol = qp::solve(p, tol);
    if (sol.status == qp::QpStatus::Infeasible) return {false, 0};
    // objective = 1/2 gamma' (2 Kt) gamma = gamma' Kt gamma
    return {true, std::max(sol.objective, 0.0)};
}

MinNormResult opt_value(const Matrix& K, const Vector& y, double nu, double mu) {
    const Eigen::Index m = y.size();
    const Eigen::Index k_mu = level_count(mu, m, LevelPolicy::Snap);

    double combos = 1;
    for (Eigen::Index i = 0; i < k_mu; ++i)
        combos *= static_cast<double>(m - i) / static_cast<double>(i + 1);
    if (combos > 1e6) throw too_large_error("C(m, mu*m) exceeds the enumeration guard");

    MinNormResult best{true, -std::numeric_limits<double>::infinity()};
    bool any = false;

    std::vector<Eigen::Index> zeros(static_cast<std::size_t>(k_mu));
    for (Eigen::Index i = 0; i < k_mu; ++i) zeros[static_cast<std::size_t>(i)] = i;
    std::vector<int> eta(static_cast<std::size_t>(m));
    while (true) {
        std::fill(eta.begin(), eta.end(), 1);
        for (Eigen::Index z : zeros) eta[static_cast<std::size_t>(z)] = 0;
        MinNormResult r = min_norm_between_hulls(K, y, eta, nu, mu);
        if (!r.finite) return {false, 0};  // max over eta is unbounded
        any = true;
        best.value = std::max(best.value, r.value);

        // next k_mu-combination of [0, m)
        Eigen::Index pos = k_mu - 1;
        while (pos >= 0 && zeros[static_cast<std::size_t>(pos)] == m - k_mu + pos) --pos;
        if (pos < 0) break;
        ++zeros[static_cast<std::size_t>(pos)];
        for (Eigen::Index q = pos + 1; q < k_mu; ++q)
            zeros[static_cast<std::size_t>(q)] = zeros[static_cast<std::size_t>(q - 1)] + 1;
        if (k_mu == 0) break;
    }
    if (!any) return {false, 0};
    return best;
}

double primal_dual_check(const Matrix& K, const Vector& y, double nu, double mu,
                         const std::vector<int>& eta) {
    const Eigen::Index m = y.size();
    const Eigen::Index k = tail_count(nu, mu, m);

    MinNormResult mn = min_norm_between_hulls(K, y, eta, nu, mu);

    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < m; ++i)
        if (eta[static_cast<std::size_t>(i)]) idx.push_back(i);
    const Eigen::Index mp = static_cast<Eigen::Index>(idx.size());
    if (mp == 0) throw infeasible_error("all samples trimmed");

    // Standard nu-SVM dual on the eta=1 rows at level (nu-mu)m/m'.
    const double nu_tilde = static_cast<double>(k) / static_cast<double>(mp);
    qp::QpProblem p;
    p.Q.resize(mp, mp);
    p.y.resize(mp);
    for (Eigen::Index a = 0; a < mp; ++a) {
        p.y(a) = y(idx[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < mp; ++b)
            p.Q(a, b) = y(idx[static_cast<std::size_t>(a)]) * y(idx[static_cast<std::size_t>(b)]) *
                        K(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    p.c = Vector::Zero(mp);
    p.upper = Vector::Constant(mp, 1.0 / static_cast<double>(mp));
    p.d = 0;
    p.s = nu_tilde;

    if (!mn.finite) {
        if (qp::feasible(p))
            throw error("hull emptiness and primal feasibility disagree");
        throw infeasible_error("fixed-eta problem unbounded: a reduced hull is empty");
    }
    qp::QpSolution sol = qp::solve(p, 1e-12);
    const double t = static_cast<double>(mp) / static_cast<double>(m);
    const double primal_opt = -t * t * sol.objective;  // strong duality + rescaling
    const double nm = static_cast<double>(k) / static_cast<double>(m);
    return std::abs(primal_opt - (-(nm * nm) / 8.0 * mn.value));
}

double primal_dual_check(const Dataset& d, const KernelSpec& kernel, double nu, double mu,
                         const std::vector<int>& eta) {
    GramMatrix gm = gram(kernel, d.features);
    Vector y(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) y(i) = d.labels[static_cast<std::size_t>(i)];
    return primal_dual_check(gm.entries, y, nu, mu, eta);
}

}  // namespace trimsvm
