#pragma once

#include <cstdint>

#include "trimsvm/types.hpp"

namespace trimsvm {

enum class KernelKind { Linear, Gaussian, Precomputed };

/// Kernel choice plus the boundedness metadata used by the breakdown
/// classification (sup_x k(x,x) < infinity).
struct KernelSpec {
    KernelKind kind = KernelKind::Gaussian;
    double gamma = 1.0;              // gaussian only, > 0
    bool declared_bounded = false;   // precomputed only

    bool bounded() const {
        switch (kind) {
            case KernelKind::Gaussian: return true;       // k(x,x) = 1
            case KernelKind::Linear: return false;
            case KernelKind::Precomputed: return declared_bounded;
        }
        return false;
    }

    static KernelSpec linear() { return {KernelKind::Linear, 0.0, false}; }
    static KernelSpec gaussian(double gamma) { return {KernelKind::Gaussian, gamma, false}; }
};

struct GramMatrix {
    Matrix entries;  // symmetric m x m
    KernelSpec kernel;
};

GramMatrix gram(const KernelSpec& spec, const Matrix& X);

/// Rectangular kernel evaluations, one row per new point.
Matrix eval_cross(const KernelSpec& spec, const Matrix& X_train, const Matrix& X_new);

/// alpha' K alpha, clamped at zero when within -1e-10 of it.
double rkhs_norm_sq(const Vector& alpha, const GramMatrix& K);
double rkhs_norm_sq(const Vector& alpha, const Matrix& K);

/// Median heuristic: gamma = 1 / (2 * median^2) of pairwise distances on a
/// subsample of at most 256 points. Deterministic given the seed.
double median_heuristic_gamma(const Matrix& X, std::uint64_t seed = 0);

}  // namespace trimsvm
