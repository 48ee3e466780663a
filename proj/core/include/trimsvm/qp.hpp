#pragma once

#include <cstdint>

#include "trimsvm/types.hpp"

namespace trimsvm {
namespace qp {

/// Box-constrained convex QP with two linear equality constraints:
///
///   minimize   1/2 beta' Q beta + c' beta
///   subject to 0 <= beta <= upper,  beta' y = d,  beta' 1 = s
///
/// with y in {+1,-1}^m. This is exactly the structure of the nu-SVM dual and
/// of the DC subproblem: within one label class, moving mass between two
/// coordinates preserves both equalities, so the solver performs same-label
/// pairwise descent with most-violating-pair selection.
struct QpProblem {
    Matrix Q;       // symmetric PSD m x m
    Vector c;       // m
    Vector upper;   // m, all > 0
    Vector y;       // m, entries +/-1
    double d = 0;   // required beta' y
    double s = 0;   // required beta' 1
};

enum class QpStatus { Optimal, Infeasible, IterLimit };

struct QpSolution {
    Vector beta;
    double objective = 0;
    QpStatus status = QpStatus::Optimal;
    double kkt_residual = 0;
    std::int64_t iterations = 0;
    // Equality multipliers recovered from the free coordinates
    // (lambda1 for beta'y = d, lambda2 for beta'1 = s).
    double lambda1 = 0;
    double lambda2 = 0;
};

/// Closed-form feasibility of the polytope. With p = (s+d)/2 the mass the +1
/// class must carry and n = (s-d)/2 the -1 class mass, the polytope is
/// nonempty iff 0 <= p <= sum of +1 upper bounds and 0 <= n <= sum of -1
/// upper bounds.
bool feasible(const QpProblem& p);

QpSolution solve(const QpProblem& p, double tol = 1e-8, std::int64_t max_iter = -1);

/// As solve(), starting from a caller-supplied feasible point.
QpSolution solve_from(const QpProblem& p, const Vector& beta0, double tol = 1e-8,
                      std::int64_t max_iter = -1);

}  // namespace qp
}  // namespace trimsvm
