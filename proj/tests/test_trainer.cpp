#include <doctest.h>

#include <fstream>

#include "trimsvm/dual_geometry.hpp"
#include "trimsvm/errors.hpp"
#include "trimsvm/robustness_lab.hpp"
#include "trimsvm/trainer.hpp"
#include "support.hpp"

using namespace trimsvm;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("update_eta zeroes the largest negative margins") {
    CHECK(update_eta(vec({3, 1, 2}), 1) == std::vector<int>{0, 1, 1});
    CHECK(update_eta(vec({2, 2, 1}), 1) == std::vector<int>{0, 1, 1});  // tie: lower index first
    CHECK(update_eta(vec({3, 1, 2}), 0) == std::vector<int>{1, 1, 1});
}

TEST_CASE("build_subproblem formulas") {
    Dataset d = testsup::random_dataset(6, 2, 9);
    GramMatrix g = gram(KernelSpec::gaussian(1.0), d.features);
    Vector y(6);
    for (int i = 0; i < 6; ++i) y(i) = d.labels[static_cast<std::size_t>(i)];

    SUBCASE("eta all ones reduces to the nu-SVM dual") {
        qp::QpProblem p = build_subproblem(g.entries, y, std::vector<int>(6, 1), 0.5);
        CHECK(p.c.cwiseAbs().maxCoeff() == 0.0);
        CHECK(p.d == 0.0);
        CHECK(p.s == 0.5);
        CHECK(p.upper(0) == doctest::Approx(1.0 / 6));
    }
    SUBCASE("single zeroed positive sample") {
        std::vector<int> eta(6, 1);
        Eigen::Index z = 0;  // y(0) = +1 by construction
        eta[0] = 0;
        qp::QpProblem p = build_subproblem(g.entries, y, eta, 0.5);
        CHECK(p.d == doctest::Approx(y(z) / 6.0));
        Matrix Kt = (y * y.transpose()).cwiseProduct(g.entries);
        CHECK((p.c + Kt.col(z) / 6.0).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("c and d match a direct loop") {
        std::vector<int> eta = {1, 0, 1, 1, 0, 1};
        qp::QpProblem p = build_subproblem(g.entries, y, eta, 0.4);
        double d_ref = 0;
        for (int i = 0; i < 6; ++i) d_ref += y(i) * (1 - eta[static_cast<std::size_t>(i)]) / 6.0;
        CHECK(p.d == doctest::Approx(d_ref).epsilon(1e-14));
        for (int i = 0; i < 6; ++i) {
            double ci = 0;
            for (int j = 0; j < 6; ++j)
                ci -= y(i) * y(j) * g.entries(i, j) * (1 - eta[static_cast<std::size_t>(j)]) / 6.0;
            CHECK(p.c(i) == doctest::Approx(ci).epsilon(1e-12));
        }
    }
}

TEST_CASE("recover_alpha formula") {
    Vector y = vec({1, -1, 1});
    Vector beta = vec({0.1, 0.0, 0.2});
    CHECK((recover_alpha(beta, {1, 1, 1}, y) - vec({0.1, 0.0, 0.2})).cwiseAbs().maxCoeff() <
          1e-15);
    Vector a = recover_alpha(beta, {1, 0, 1}, y);  // beta_1 = 0, eta_1 = 0 -> -y_1/m
    CHECK(a(1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(a(0) == doctest::Approx(0.1));
}

TEST_CASE("recover_rho_b from one free coordinate per class") {
    // f = K alpha with K = I: f = (0.8, -1.2); free + coord gives b - rho = -0.8,
    // free - coord gives b + rho = 1.2  =>  b = 0.2, rho = 1.0.
    Matrix K = Matrix::Identity(2, 2);
    Vector alpha = vec({0.8, -1.2});
    Vector y = vec({1, -1});
    Vector beta = vec({0.25, 0.25});  // strictly inside [0, 0.5]
    RhoB rb = recover_rho_b(beta, alpha, K, y, 0.5);
    CHECK(!rb.fallback);
    CHECK(rb.b == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(rb.rho == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("recover_rho_b falls back to interval midpoints without free coords") {
    Matrix K = Matrix::Identity(2, 2);
    Vector alpha = vec({0.5, -0.5});
    Vector y = vec({1, -1});
    Vector beta = vec({0.5, 0.5});  // both at the upper bound
    RhoB rb = recover_rho_b(beta, alpha, K, y, 0.5);
    CHECK(rb.fallback);
}

TEST_CASE("mu=0 training matches the enumeration-oracle nu-SVM dual") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Dataset d = testsup::random_dataset(8, 2, 300 + seed);
        GramMatrix g = gram(KernelSpec::gaussian(0.8), d.features);
        TrainConfig cfg;
        cfg.nu = 0.5;
        cfg.mu = 0.0;
        cfg.kernel = g.kernel;
        Model model = train_with_gram(d, g, cfg);

        Vector y(8);
        for (int i = 0; i < 8; ++i) y(i) = d.labels[static_cast<std::size_t>(i)];
        qp::QpProblem p = build_subproblem(g.entries, y, std::vector<int>(8, 1), 0.5);
        testsup::OracleResult oracle = testsup::qp_oracle(p);
        REQUIRE(oracle.feasible);
        Vector alpha_ref = recover_alpha(oracle.beta, std::vector<int>(8, 1), y);
        Vector f_ref = g.entries * alpha_ref;
        Vector f_got = g.entries * model.alpha;
        CHECK((f_got - f_ref).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("one flipped label is trimmed and the rest matches the reduced fit") {
    // flip one positive deep inside its blob: it becomes the unique gross
    // margin violator and the single trimming slot must land on it
    Dataset d_bad = testsup::blobs(40, 3);
    const Eigen::Index flipped = 5;
    d_bad.labels[static_cast<std::size_t>(flipped)] = -1;

    TrainConfig cfg;
    cfg.nu = 0.3;
    cfg.mu = 1.0 / 40;
    cfg.kernel = KernelSpec::gaussian(1.0);
    cfg.restarts = 3;
    Model model = train(d_bad, cfg);
    CHECK(model.eta[static_cast<std::size_t>(flipped)] == 0);

    // At the stationary eta, (f, b) optimizes the fixed-eta problem; its value
    // must match the dual geometry identity.
    GramMatrix g = gram(cfg.kernel, d_bad.features);
    Vector y(40);
    for (int i = 0; i < 40; ++i) y(i) = d_bad.labels[static_cast<std::size_t>(i)];
    const double residual = primal_dual_check(g.entries, y, model.nu, model.mu, model.eta);
    CHECK(residual < 1e-6);
    const double fixed_eta_opt =
        -std::pow(model.nu - model.mu, 2) / 8.0 *
        min_norm_between_hulls(g.entries, y, model.eta, model.nu, model.mu).value;
    CHECK(model.objective == doctest::Approx(fixed_eta_opt).epsilon(1e-5));
}

TEST_CASE("training invariants: trace, eta count, support bounds") {
    Dataset d = spiral(60, 0.1, 11);
    TrainConfig cfg;
    cfg.nu = 0.5;
    cfg.mu = 0.1;
    cfg.kernel = KernelSpec::gaussian(1.5);
    Model model = train(d, cfg);

    CHECK(model.status == TrainStatus::Converged);
    for (std::size_t i = 1; i < model.trace.size(); ++i)
        CHECK(model.trace[i] <= model.trace[i - 1] + 1e-9 * std::max(1.0, std::abs(model.trace[i])));
    int zeros = 0;
    for (int e : model.eta) zeros += (e == 0);
    CHECK(zeros == 6);  // exactly mu*m
    CHECK(static_cast<double>(model.support_idx.size()) >= (model.nu - model.mu) * 60 - 1e-9);
    for (Eigen::Index i : model.support_idx) CHECK(model.eta[static_cast<std::size_t>(i)] == 1);
}

TEST_CASE("single-class data is rejected") {
    Dataset d = testsup::random_dataset(6, 2, 1);
    std::fill(d.labels.begin(), d.labels.end(), 1);
    TrainConfig cfg;
    CHECK_THROWS_AS(train(d, cfg), single_class_error);
}

TEST_CASE("infeasible first subproblem surfaces as infeasible_error") {
    // 1 positive vs 9 negatives, nu = 0.8 > 2r = 0.2
    Dataset d = testsup::random_dataset(10, 2, 2);
    for (std::size_t i = 0; i < 10; ++i) d.labels[i] = i == 0 ? 1 : -1;
    TrainConfig cfg;
    cfg.nu = 0.8;
    cfg.mu = 0.0;
    CHECK_THROWS_AS(train(d, cfg), infeasible_error);
}

TEST_CASE("strict levels reject non-integer nu*m") {
    Dataset d = testsup::random_dataset(7, 2, 3);
    TrainConfig cfg;
    cfg.nu = 0.5;  // 3.5 samples
    cfg.integrality = LevelPolicy::Strict;
    CHECK_THROWS_AS(train(d, cfg), non_integer_level_error);
}

TEST_CASE("predict conventions") {
    Dataset d = spiral(20, 0.05, 4);
    TrainConfig cfg;
    cfg.nu = 0.4;
    cfg.mu = 0.05;
    cfg.kernel = KernelSpec::gaussian(1.0);
    Model model = train(d, cfg);
    Prediction pred = predict(model, d.features);
    CHECK(pred.scores.size() == 20);
    for (Eigen::Index i = 0; i < 20; ++i)
        CHECK(pred.labels[static_cast<std::size_t>(i)] == (pred.scores(i) >= 0 ? 1 : -1));

    Model constant = model;
    constant.alpha.setZero();
    constant.train_rows.clear();
    constant.train_features.resize(0, 2);
    constant.b = 1.0;
    Prediction all_plus = predict(constant, d.features);
    for (int lbl : all_plus.labels) CHECK(lbl == 1);
    constant.b = 0.0;  // score exactly 0 -> +1
    Prediction zero = predict(constant, d.features);
    for (int lbl : zero.labels) CHECK(lbl == 1);
}

TEST_CASE("serialization round-trips scores to 1e-12") {
    Dataset d = spiral(30, 0.08, 21);
    TrainConfig cfg;
    cfg.nu = 0.4;
    cfg.mu = 0.1;
    cfg.kernel = KernelSpec::gaussian(1.2);
    Model model = train(d, cfg);
    const auto path = testsup::temp_dir() / "model_unit.json";
    save_model(model, path.string());
    Model back = load_model(path.string());
    CHECK(back.nu == model.nu);
    CHECK(back.mu == model.mu);
    CHECK(back.b == model.b);
    CHECK(back.eta == model.eta);
    Prediction a = predict(model, d.features);
    Prediction b = predict(back, d.features);
    CHECK((a.scores - b.scores).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("training is deterministic given the seed") {
    Dataset d = spiral(40, 0.1, 8);
    TrainConfig cfg;
    cfg.nu = 0.5;
    cfg.mu = 0.1;
    cfg.restarts = 3;
    cfg.seed = 123;
    cfg.kernel = KernelSpec::gaussian(1.0);
    Model a = train(d, cfg);
    Model b = train(d, cfg);
    CHECK(a.objective == b.objective);
    CHECK((a.alpha - b.alpha).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.eta == b.eta);
}
