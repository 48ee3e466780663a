#pragma once

#include <vector>

#include "trimsvm/dataset.hpp"
#include "trimsvm/kernel.hpp"
#include "trimsvm/types.hpp"

namespace trimsvm {

/// Nonemptiness of the two reduced convex hulls with caps 2*eta_i/((nu-mu)m):
/// side is nonempty iff |{i : y_i = side, eta_i = 1}| >= (nu-mu)*m/2.
/// Counting is done on integer level counts, so the comparison is exact.
struct HullStatus {
    bool plus = false;
    bool minus = false;
    bool both() const { return plus && minus; }
};

HullStatus hull_nonempty(const std::vector<int>& eta, const Vector& y, double nu, double mu);

/// min ||u_+ - u_-||^2 over the reduced hulls, or unbounded when a hull is
/// empty. Never encodes emptiness as a floating value.
struct MinNormResult {
    bool finite = false;
    double value = 0;  // meaningful only when finite
};

MinNormResult min_norm_between_hulls(const Matrix& K, const Vector& y, const std::vector<int>& eta,
                                     double nu, double mu, double tol = 1e-10);

/// max over eta with exactly mu*m zeros of min_norm_between_hulls. The max
/// over "at least m(1-mu) ones" is attained on this boundary because zeroing
/// a coordinate shrinks a hull and so never decreases the min distance.
/// Throws TooLarge when C(m, mu*m) > 1e6.
MinNormResult opt_value(const Matrix& K, const Vector& y, double nu, double mu);

/// |fixed-eta primal optimum - (-(nu-mu)^2/8 * min_norm)|. The primal side is
/// solved through the scaling reduction: restricting to the eta=1 rows (m' of
/// them) and rescaling (f, b, rho) by m'/m turns the fixed-eta problem into a
/// standard nu-SVM at level (nu-mu)m/m', whose optimum is -1/2 min beta'Kt
/// beta over the nu-SVM dual polytope. Throws when a hull is empty.
double primal_dual_check(const Dataset& d, const KernelSpec& kernel, double nu, double mu,
                         const std::vector<int>& eta);
double primal_dual_check(const Matrix& K, const Vector& y, double nu, double mu,
                         const std::vector<int>& eta);

}  // namespace trimsvm
