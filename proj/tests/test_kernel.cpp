#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "trimsvm/errors.hpp"
#include "trimsvm/kernel.hpp"
#include "support.hpp"

using namespace trimsvm;

TEST_CASE("gaussian gram has unit diagonal and the right off-diagonal") {
    Matrix X(2, 1);
    X << 0, 1;
    GramMatrix g = gram(KernelSpec::gaussian(1.0), X);
    CHECK(g.entries(0, 0) == 1.0);
    CHECK(g.entries(1, 1) == 1.0);
    CHECK(g.entries(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(g.entries(0, 1) == g.entries(1, 0));
}

TEST_CASE("linear gram is the matrix of dot products") {
    Matrix X(2, 2);
    X << 1, 0, 0, 1;
    GramMatrix g = gram(KernelSpec::linear(), X);
    CHECK(g.entries(0, 0) == 1.0);
    CHECK(g.entries(0, 1) == 0.0);
    CHECK(g.entries(1, 1) == 1.0);
}

TEST_CASE("gram rejects non-finite input") {
    Matrix X(1, 1);
    X << std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(gram(KernelSpec::linear(), X), non_finite_error);
}

TEST_CASE("eval_cross on the training points equals gram") {
    Dataset d = testsup::random_dataset(8, 3, 3);
    for (auto spec : {KernelSpec::linear(), KernelSpec::gaussian(0.7)}) {
        GramMatrix g = gram(spec, d.features);
        Matrix cross = eval_cross(spec, d.features, d.features);
        CHECK((cross - g.entries).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("gaussian cross-row at a training point peaks at 1") {
    Dataset d = testsup::random_dataset(5, 2, 4);
    Matrix one = d.features.row(2);
    Matrix cross = eval_cross(KernelSpec::gaussian(1.3), d.features, one);
    CHECK(cross.rows() == 1);
    CHECK(cross(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear kernel of an orthogonal point is a zero row") {
    Matrix X(2, 2);
    X << 1, 0, 2, 0;
    Matrix q(1, 2);
    q << 0, 3;
    Matrix cross = eval_cross(KernelSpec::linear(), X, q);
    CHECK(cross.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rkhs_norm_sq basics") {
    Matrix K = Matrix::Identity(2, 2);
    Vector a(2);
    a << 3, 4;
    CHECK(rkhs_norm_sq(a, K) == 25.0);
    CHECK(rkhs_norm_sq(Vector::Zero(2), K) == 0.0);
    Vector bad(3);
    CHECK_THROWS_AS(rkhs_norm_sq(bad, K), dimension_error);
}

TEST_CASE("rkhs_norm_sq matches an eigendecomposition oracle and stays nonnegative") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Matrix Q = testsup::random_psd(6, seed);
        std::mt19937_64 rng(seed + 99);
        std::normal_distribution<double> gauss;
        Vector a(6);
        for (int i = 0; i < 6; ++i) a(i) = gauss(rng);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(Q);
        const Vector proj = eig.eigenvectors().transpose() * a;
        const double expected = (eig.eigenvalues().array() * proj.array().square()).sum();
        const double got = rkhs_norm_sq(a, Q);
        CHECK(got == doctest::Approx(expected).epsilon(1e-9));
        CHECK(got >= 0.0);
    }
}

TEST_CASE("gaussian gram entries lie in (0, 1]") {
    Dataset d = testsup::random_dataset(30, 2, 8);
    GramMatrix g = gram(KernelSpec::gaussian(2.0), d.features);
    CHECK(g.entries.minCoeff() > 0.0);
    CHECK(g.entries.maxCoeff() <= 1.0);
    // PSD up to tolerance
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g.entries);
    CHECK(eig.eigenvalues().minCoeff() > -1e-8 * g.entries.diagonal().maxCoeff());
}

TEST_CASE("median heuristic gamma is positive and deterministic") {
    Dataset d = testsup::random_dataset(40, 3, 5);
    const double g1 = median_heuristic_gamma(d.features, 13);
    const double g2 = median_heuristic_gamma(d.features, 13);
    CHECK(g1 > 0.0);
    CHECK(g1 == g2);
}

TEST_CASE("kernel boundedness metadata") {
    CHECK(KernelSpec::gaussian(1.0).bounded());
    CHECK(!KernelSpec::linear().bounded());
    KernelSpec pre{KernelKind::Precomputed, 0.0, true};
    CHECK(pre.bounded());
}
