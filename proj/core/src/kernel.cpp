#include "trimsvm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "trimsvm/errors.hpp"

namespace trimsvm {

namespace {

void check_finite(const Matrix& X, const char* what) {
    if (!X.allFinite()) throw non_finite_error(std::string(what) + " contains NaN/Inf");
}

}  // namespace

Matrix eval_cross(const KernelSpec& spec, const Matrix& X_train, const Matrix& X_new) {
    check_finite(X_train, "training features");
    check_finite(X_new, "query features");
    if (X_train.cols() != X_new.cols())
        throw dimension_error("feature dimension mismatch between train and query");

    switch (spec.kind) {
        case KernelKind::Linear:
            return X_new * X_train.transpose();
        case KernelKind::Gaussian: {
            if (!(spec.gamma > 0)) throw error("gaussian kernel requires gamma > 0");
            Vector tn = X_train.rowwise().squaredNorm();
            Vector nn = X_new.rowwise().squaredNorm();
            Matrix D = (-2.0 * (X_new * X_train.transpose())).rowwise() + tn.transpose();
            D.colwise() += nn;
            return (-spec.gamma * D.array()).exp().matrix();
        }
        case KernelKind::Precomputed:
            throw error("eval_cross is undefined for precomputed kernels");
    }
    throw error("unknown kernel kind");
}

GramMatrix gram(const KernelSpec& spec, const Matrix& X) {
    Matrix K = eval_cross(spec, X, X);
    K = 0.5 * (K + K.transpose()).eval();  // symmetry hygiene for the QP
    if (spec.kind == KernelKind::Gaussian) K.diagonal().setOnes();
    return {std::move(K), spec};
}

double rkhs_norm_sq(const Vector& alpha, const Matrix& K) {
    if (alpha.size() != K.rows()) throw dimension_error("alpha length != Gram size");
    double v = alpha.dot(K * alpha);
    if (v < 0) {
        if (v < -1e-10) throw error("Gram matrix is not PSD: alpha'K alpha = " + std::to_string(v));
        v = 0.0;
    }
    return v;
}

double rkhs_norm_sq(const Vector& alpha, const GramMatrix& K) {
    return rkhs_norm_sq(alpha, K.entries);
}

double median_heuristic_gamma(const Matrix& X, std::uint64_t seed) {
    const Eigen::Index m = X.rows();
    if (m < 2) return 1.0;

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    if (m > 256) {
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(256);
    }
    std::vector<double> dists;
    dists.reserve(idx.size() * (idx.size() - 1) / 2);
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            double d2 = (X.row(idx[a]) - X.row(idx[b])).squaredNorm();
            if (d2 > 0) dists.push_back(std::sqrt(d2));
        }
    if (dists.empty()) return 1.0;
    auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    double med = *mid;
    return 1.0 / (2.0 * med * med);
}

}  // namespace trimsvm
