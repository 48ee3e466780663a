#include "trimsvm/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/QR>

#include "trimsvm/errors.hpp"

namespace trimsvm {
namespace qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const QpProblem& p) {
    const Eigen::Index m = p.Q.rows();
    if (p.Q.cols() != m || p.c.size() != m || p.upper.size() != m || p.y.size() != m)
        throw dimension_error("inconsistent QP dimensions");
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(p.upper(i) > 0)) throw error("QP upper bounds must be positive");
        if (p.y(i) != 1.0 && p.y(i) != -1.0) throw error("QP labels must be +/-1");
    }
}

struct ClassMass {
    double plus_cap = 0, minus_cap = 0;  // sum of upper bounds per class
    double plus_mass = 0, minus_mass = 0;  // required mass p, n
};

ClassMass masses(const QpProblem& p) {
    ClassMass cm;
    for (Eigen::Index i = 0; i < p.y.size(); ++i)
        (p.y(i) > 0 ? cm.plus_cap : cm.minus_cap) += p.upper(i);
    cm.plus_mass = 0.5 * (p.s + p.d);
    cm.minus_mass = 0.5 * (p.s - p.d);
    return cm;
}

// Multiplier for one class: mean of the gradient over free coordinates, or
// the midpoint of the KKT-consistent interval from bound coordinates.
double class_multiplier(const QpProblem& p, const Vector& beta, const Vector& grad,
                        double label, bool* found) {
    double sum = 0;
    int nfree = 0;
    double lo = -kInf, hi = kInf;
    *found = false;
    for (Eigen::Index i = 0; i < p.y.size(); ++i) {
        if (p.y(i) != label) continue;
        *found = true;
        if (beta(i) > 0 && beta(i) < p.upper(i)) {
            sum += grad(i);
            ++nfree;
        } else if (beta(i) >= p.upper(i)) {
            lo = std::max(lo, grad(i));
        } else {
            hi = std::min(hi, grad(i));
        }
    }
    if (nfree > 0) return sum / nfree;
    if (lo == -kInf && hi == kInf) return 0;
    if (lo == -kInf) return hi;
    if (hi == kInf) return lo;
    return 0.5 * (lo + hi);
}

double kkt_residual(const QpProblem& p, const Vector& beta, const Vector& grad,
                    double a_plus, double a_minus) {
    double res = 0;
    for (Eigen::Index i = 0; i < p.y.size(); ++i) {
        const double a = p.y(i) > 0 ? a_plus : a_minus;
        const double g = grad(i) - a;
        if (beta(i) <= 0)
            res = std::max(res, -g);
        else if (beta(i) >= p.upper(i))
            res = std::max(res, g);
        else
            res = std::max(res, std::abs(g));
    }
    return res;
}

}  // namespace

bool feasible(const QpProblem& p) {
    validate(p);
    const ClassMass cm = masses(p);
    const double eps = 1e-12 * std::max({1.0, std::abs(p.s), std::abs(p.d)});
    return cm.plus_mass >= -eps && cm.plus_mass <= cm.plus_cap + eps &&
           cm.minus_mass >= -eps && cm.minus_mass <= cm.minus_cap + eps;
}

QpSolution solve(const QpProblem& p, double tol, std::int64_t max_iter) {
    validate(p);
    const Eigen::Index m = p.Q.rows();
    QpSolution sol;
    if (!feasible(p)) {
        sol.status = QpStatus::Infeasible;
        sol.beta = Vector::Zero(m);
        sol.objective = kInf;
        return sol;
    }
    // Initial point: distribute the class masses proportionally to the upper
    // bounds, then clip rounding overshoot onto the box.
    const ClassMass cm = masses(p);
    Vector beta0(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const bool plus = p.y(i) > 0;
        const double cap = plus ? cm.plus_cap : cm.minus_cap;
        const double mass = plus ? cm.plus_mass : cm.minus_mass;
        beta0(i) = cap > 0 ? std::clamp(mass * p.upper(i) / cap, 0.0, p.upper(i)) : 0.0;
    }
    return solve_from(p, beta0, tol, max_iter);
}

namespace {

// Active-set refinement from a feasible point: alternately solve the
// equality-constrained KKT system on the free coordinates and exchange bound
// coordinates, moving along feasible segments only. Converges to machine
// precision in a few steps once SMO has roughed in the active set.
bool polish(const QpProblem& p, Vector& beta, Vector& grad, double tol, std::int64_t& steps) {
    const Eigen::Index m = p.Q.rows();
    const double scale = std::max({1.0, p.upper.maxCoeff(), std::abs(p.s)});
    const double snap = 1e-14 * scale;

    std::vector<char> is_free(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        if (beta(i) <= snap) beta(i) = 0.0;
        if (beta(i) >= p.upper(i) - snap) beta(i) = p.upper(i);
        is_free[static_cast<std::size_t>(i)] = beta(i) > 0.0 && beta(i) < p.upper(i);
    }

    const std::int64_t limit = 3 * static_cast<std::int64_t>(m) + 50;
    for (std::int64_t step = 0; step < limit; ++step, ++steps) {
        std::vector<Eigen::Index> F;
        for (Eigen::Index i = 0; i < m; ++i)
            if (is_free[static_cast<std::size_t>(i)]) F.push_back(i);
        const Eigen::Index nf = static_cast<Eigen::Index>(F.size());

        // stationarity on F with the two equality constraints (y and 1 rows)
        Matrix kkt = Matrix::Zero(nf + 2, nf + 2);
        Vector rhs(nf + 2);
        Vector residual_d(2);  // equality slack carried by the bound coords
        residual_d(0) = p.d;
        residual_d(1) = p.s;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (is_free[static_cast<std::size_t>(i)]) continue;
            residual_d(0) -= p.y(i) * beta(i);
            residual_d(1) -= beta(i);
        }
        for (Eigen::Index a = 0; a < nf; ++a) {
            for (Eigen::Index b = 0; b < nf; ++b) kkt(a, b) = p.Q(F[a], F[b]);
            kkt(a, nf) = kkt(nf, a) = p.y(F[a]);
            kkt(a, nf + 1) = kkt(nf + 1, a) = 1.0;
            double ci = p.c(F[a]);
            for (Eigen::Index i = 0; i < m; ++i)
                if (!is_free[static_cast<std::size_t>(i)]) ci += p.Q(F[a], i) * beta(i);
            rhs(a) = -ci;
        }
        rhs(nf) = residual_d(0);
        rhs(nf + 1) = residual_d(1);
        const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);

        // walk toward the stationary point, stopping at the first bound hit
        double t = 1.0;
        Eigen::Index hit = -1;
        bool hit_upper = false;
        for (Eigen::Index a = 0; a < nf; ++a) {
            const double delta = sol(a) - beta(F[a]);
            if (delta > 0 && beta(F[a]) + delta > p.upper(F[a])) {
                const double ta = (p.upper(F[a]) - beta(F[a])) / delta;
                if (ta < t) { t = ta; hit = F[a]; hit_upper = true; }
            } else if (delta < 0 && beta(F[a]) + delta < 0) {
                const double ta = -beta(F[a]) / delta;
                if (ta < t) { t = ta; hit = F[a]; hit_upper = false; }
            }
        }
        for (Eigen::Index a = 0; a < nf; ++a) beta(F[a]) += t * (sol(a) - beta(F[a]));
        if (hit >= 0) {
            beta(hit) = hit_upper ? p.upper(hit) : 0.0;
            is_free[static_cast<std::size_t>(hit)] = false;
            continue;
        }

        // full step taken: release the worst violated bound coordinate, or stop
        grad = p.Q * beta + p.c;
        bool has_plus = false, has_minus = false;
        const double a_plus = class_multiplier(p, beta, grad, +1.0, &has_plus);
        const double a_minus = class_multiplier(p, beta, grad, -1.0, &has_minus);
        Eigen::Index worst = -1;
        double worst_violation = tol;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (is_free[static_cast<std::size_t>(i)]) continue;
            const double reduced = grad(i) - (p.y(i) > 0 ? a_plus : a_minus);
            const double v = beta(i) <= 0.0 ? -reduced : reduced;
            if (v > worst_violation) {
                worst_violation = v;
                worst = i;
            }
        }
        if (worst < 0) return true;
        is_free[static_cast<std::size_t>(worst)] = true;
    }
    return false;
}

}  // namespace

QpSolution solve_from(const QpProblem& p, const Vector& beta0, double tol,
                      std::int64_t max_iter) {
    validate(p);
    const Eigen::Index m = p.Q.rows();
    if (beta0.size() != m) throw dimension_error("initial point size mismatch");
    if (max_iter < 0) max_iter = 100 * static_cast<std::int64_t>(m) * m;

    const double max_diag = std::max(p.Q.diagonal().maxCoeff(), 0.0);
    double jitter = 0;

    Vector beta = beta0;
    Vector grad = p.Q * beta + p.c;

    QpSolution sol;
    std::int64_t it = 0;
    bool converged = false;
    const double tiny_curv = 1e-12 * std::max(max_diag, 1.0);
    const double smo_tol = std::max(tol, 1e-6);  // coarse pass; polish finishes
    auto run_smo = [&](double stop_tol) {
    while (it < max_iter) {
        // Working set: per label, take the steepest ascent coordinate i and
        // pair it with the j of largest second-order gain (g_j - g_i)^2/curv.
        // First-order most-violating pairs zigzag badly on these problems.
        Eigen::Index best_up = -1, best_dn = -1;
        double best_gain = -1, best_violation = 0, max_violation = 0;
        for (double label : {+1.0, -1.0}) {
            Eigen::Index i_up = -1;
            double g_up = kInf;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (p.y(i) != label) continue;
                if (beta(i) < p.upper(i) && grad(i) < g_up) {
                    g_up = grad(i);
                    i_up = i;
                }
            }
            if (i_up < 0) continue;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (p.y(j) != label || j == i_up || beta(j) <= 0) continue;
                const double v = grad(j) - g_up;
                if (v <= 0) continue;
                max_violation = std::max(max_violation, v);
                const double curv =
                    std::max(p.Q(i_up, i_up) + p.Q(j, j) - 2 * p.Q(i_up, j) + 2 * jitter, tiny_curv);
                const double gain = v * v / curv;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_violation = v;
                    best_up = i_up;
                    best_dn = j;
                }
            }
        }
        if (max_violation <= stop_tol) {
            converged = true;
            break;
        }
        const Eigen::Index i = best_up, j = best_dn;
        double curv = p.Q(i, i) + p.Q(j, j) - 2 * p.Q(i, j) + 2 * jitter;
        if (curv < -1e-12 * std::max(max_diag, 1.0) && jitter == 0) {
            // Gram rounding produced a slightly indefinite Q.
            jitter = 1e-10 * std::max(max_diag, 1.0);
            grad += jitter * beta;
            curv += 2 * jitter;
        }
        const double dmax_i = p.upper(i) - beta(i);
        const double dmax_j = beta(j);
        double delta = curv > 0 ? best_violation / curv : kInf;
        delta = std::min({delta, dmax_i, dmax_j});
        beta(i) = (delta == dmax_i) ? p.upper(i) : beta(i) + delta;
        beta(j) = (delta == dmax_j) ? 0.0 : beta(j) - delta;
        grad += delta * (p.Q.col(i) - p.Q.col(j));
        if (jitter > 0) {
            grad(i) += jitter * delta;
            grad(j) -= jitter * delta;
        }
        ++it;
    }
    };

    run_smo(smo_tol);
    if (jitter > 0) {
        grad -= jitter * beta;  // polish and reporting use the original problem
        jitter = 0;
    }
    std::int64_t polish_steps = 0;
    converged = polish(p, beta, grad, tol, polish_steps);
    it += polish_steps;
    if (!converged) {
        // rare: the exchange loop stalled; fall back to SMO at the full tolerance
        grad = p.Q * beta + p.c;
        run_smo(tol);
        if (jitter > 0) grad -= jitter * beta;
    }

    bool has_plus = false, has_minus = false;
    const double a_plus = class_multiplier(p, beta, grad, +1.0, &has_plus);
    const double a_minus = class_multiplier(p, beta, grad, -1.0, &has_minus);

    sol.beta = std::move(beta);
    sol.objective = 0.5 * sol.beta.dot(p.Q * sol.beta) + p.c.dot(sol.beta);
    sol.status = converged ? QpStatus::Optimal : QpStatus::IterLimit;
    sol.kkt_residual = kkt_residual(p, sol.beta, grad, a_plus, a_minus);
    sol.iterations = it;
    sol.lambda1 = 0.5 * (a_plus - a_minus);
    sol.lambda2 = 0.5 * (a_plus + a_minus);
    return sol;
}

}  // namespace qp
}  // namespace trimsvm
