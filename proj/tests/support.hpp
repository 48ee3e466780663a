#pragma once

// Shared helpers for the test binaries: temp files, random instances, and
// independent brute-force oracles the solvers are checked against.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimsvm/dataset.hpp"
#include "trimsvm/qp.hpp"
#include "trimsvm/types.hpp"

namespace testsup {

using trimsvm::Matrix;
using trimsvm::Vector;

inline std::filesystem::path temp_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("trimsvm_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::filesystem::path write_file(const std::string& name, const std::string& content) {
    const auto path = temp_dir() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

inline trimsvm::Dataset random_dataset(Eigen::Index m, Eigen::Index d, std::uint64_t seed,
                                       double label_shift = 0.5) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    trimsvm::Dataset out;
    out.features.resize(m, d);
    out.labels.resize(static_cast<std::size_t>(m));
    out.ids.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const int label = i % 2 == 0 ? +1 : -1;  // guaranteed both classes
        for (Eigen::Index c = 0; c < d; ++c)
            out.features(i, c) = gauss(rng) + label * label_shift;
        out.labels[static_cast<std::size_t>(i)] = label;
        out.ids[static_cast<std::size_t>(i)] = i;
    }
    return out;
}

// two tight gaussian blobs at (+2, 0) and (-2, 0): cleanly separable,
// first m/2 rows positive
inline trimsvm::Dataset blobs(Eigen::Index m, std::uint64_t seed, double sd = 0.3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sd);
    trimsvm::Dataset out;
    out.features.resize(m, 2);
    out.labels.resize(static_cast<std::size_t>(m));
    out.ids.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const int label = i < m / 2 ? +1 : -1;
        out.features(i, 0) = 2.0 * label + gauss(rng);
        out.features(i, 1) = gauss(rng);
        out.labels[static_cast<std::size_t>(i)] = label;
        out.ids[static_cast<std::size_t>(i)] = i;
    }
    return out;
}

inline Matrix random_psd(Eigen::Index m, std::uint64_t seed, double ridge = 1e-6) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix A(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) A(i, j) = gauss(rng);
    Matrix Q = A * A.transpose();
    Q.diagonal().array() += ridge;
    return Q;
}

struct OracleResult {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    Vector beta;
};

// Exhaustive active-set enumeration for the two-equality box QP: every
// coordinate is pinned to 0, pinned to its upper bound, or left free; free
// coordinates solve the equality-constrained KKT system. The feasible
// minimum over all 3^m faces is the global optimum (Q is PSD).
inline OracleResult qp_oracle(const trimsvm::qp::QpProblem& p, double tol = 1e-9) {
    const Eigen::Index m = p.Q.rows();
    OracleResult best;
    std::vector<int> face(static_cast<std::size_t>(m), 0);  // 0 low, 1 up, 2 free
    const double ctol = tol * std::max({1.0, std::abs(p.d), std::abs(p.s)});

    while (true) {
        std::vector<Eigen::Index> free_idx;
        Vector beta = Vector::Zero(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            if (face[static_cast<std::size_t>(i)] == 1) beta(i) = p.upper(i);
            if (face[static_cast<std::size_t>(i)] == 2) free_idx.push_back(i);
        }
        const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());
        bool ok = true;
        if (nf == 0) {
            ok = std::abs(beta.dot(p.y) - p.d) <= ctol && std::abs(beta.sum() - p.s) <= ctol;
        } else {
            // KKT: [Q_FF  A_F'; A_F  0] [x; lam] = [-(c_F + Q_FB beta_B); rhs]
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + 2, nf + 2);
            Eigen::VectorXd rhs(nf + 2);
            for (Eigen::Index a = 0; a < nf; ++a) {
                for (Eigen::Index b = 0; b < nf; ++b)
                    kkt(a, b) = p.Q(free_idx[static_cast<std::size_t>(a)],
                                    free_idx[static_cast<std::size_t>(b)]);
                kkt(a, nf) = p.y(free_idx[static_cast<std::size_t>(a)]);
                kkt(a, nf + 1) = 1.0;
                kkt(nf, a) = p.y(free_idx[static_cast<std::size_t>(a)]);
                kkt(nf + 1, a) = 1.0;
                rhs(a) = -(p.c(free_idx[static_cast<std::size_t>(a)]) +
                           p.Q.row(free_idx[static_cast<std::size_t>(a)]).dot(beta));
            }
            rhs(nf) = p.d - beta.dot(p.y);
            rhs(nf + 1) = p.s - beta.sum();
            Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
            for (Eigen::Index a = 0; a < nf; ++a)
                beta(free_idx[static_cast<std::size_t>(a)]) = sol(a);
            for (Eigen::Index a = 0; a < nf && ok; ++a) {
                const Eigen::Index i = free_idx[static_cast<std::size_t>(a)];
                if (beta(i) < -tol || beta(i) > p.upper(i) + tol) ok = false;
            }
            if (ok)
                ok = std::abs(beta.dot(p.y) - p.d) <= 1e-7 && std::abs(beta.sum() - p.s) <= 1e-7;
        }
        if (ok) {
            for (Eigen::Index i = 0; i < m; ++i)
                beta(i) = std::clamp(beta(i), 0.0, p.upper(i));
            const double obj = 0.5 * beta.dot(p.Q * beta) + p.c.dot(beta);
            if (!best.feasible || obj < best.objective) {
                best.feasible = true;
                best.objective = obj;
                best.beta = beta;
            }
        }
        // next face assignment
        Eigen::Index pos = 0;
        while (pos < m && face[static_cast<std::size_t>(pos)] == 2) {
            face[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == m) break;
        ++face[static_cast<std::size_t>(pos)];
    }
    return best;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

inline double normal_quantile(double p) {
    double lo = -10, hi = 10;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace testsup
