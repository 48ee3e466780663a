#include <doctest.h>

#include <fstream>
#include <sstream>

#include "trimsvm/dataset.hpp"
#include "trimsvm/errors.hpp"
#include "support.hpp"

using namespace trimsvm;

TEST_CASE("csv with {1,-1} labels parses as given") {
    auto p = testsup::write_file("basic.csv", "a,b,label\n1,2,1\n3,4,-1\n5,6,1\n7,8,-1\n");
    Dataset d = load_csv(p.string(), "label");
    CHECK(d.size() == 4);
    CHECK(d.dim() == 2);
    CHECK(d.labels == std::vector<int>{1, -1, 1, -1});
    CHECK(d.features(2, 1) == 6.0);
    CHECK(d.ids == std::vector<std::int64_t>{0, 1, 2, 3});
    CHECK(!d.label_mapping);
}

TEST_CASE("csv {1,0} labels map 0 to -1") {
    auto p = testsup::write_file("zeroone.csv", "x,label\n1,1\n2,0\n3,0\n");
    Dataset d = load_csv(p.string(), "label");
    CHECK(d.labels == std::vector<int>{1, -1, -1});
}

TEST_CASE("csv string labels map by first-seen order with a recorded mapping") {
    auto p = testsup::write_file("strings.csv", "x,label\n1,spam\n2,ham\n3,spam\n");
    Dataset d = load_csv(p.string(), "label");
    CHECK(d.labels == std::vector<int>{1, -1, 1});
    REQUIRE(d.label_mapping);
    CHECK(d.label_mapping->first == "spam");
    CHECK(d.label_mapping->second == "ham");
}

TEST_CASE("malformed numeric cell reports its line") {
    auto p = testsup::write_file("bad.csv", "x,label\n1,1\n2x,1\n3,-1\n");
    try {
        load_csv(p.string(), "label");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("csv rejects NaN and Inf") {
    auto p = testsup::write_file("nan.csv", "x,label\nnan,1\n1,-1\n");
    CHECK_THROWS_AS(load_csv(p.string(), "label"), parse_error);
    auto q = testsup::write_file("inf.csv", "x,label\ninf,1\n1,-1\n");
    CHECK_THROWS_AS(load_csv(q.string(), "label"), parse_error);
}

TEST_CASE("missing file error") {
    CHECK_THROWS_AS(load_csv("/nonexistent/x.csv", "label"), missing_file_error);
}

TEST_CASE("label column by index") {
    auto p = testsup::write_file("byidx.csv", "label,x\n1,9\n-1,8\n");
    Dataset d = load_csv(p.string(), Eigen::Index{0});
    CHECK(d.labels == std::vector<int>{1, -1});
    CHECK(d.features(0, 0) == 9.0);
}

TEST_CASE("libsvm basic") {
    auto p = testsup::write_file("basic.libsvm", "+1 1:1 3:2\n-1 2:5\n");
    Dataset d = load_libsvm(p.string());
    CHECK(d.size() == 2);
    CHECK(d.dim() == 3);
    CHECK(d.features(0, 0) == 1.0);
    CHECK(d.features(0, 1) == 0.0);
    CHECK(d.features(0, 2) == 2.0);
    CHECK(d.features(1, 1) == 5.0);
    CHECK(d.labels == std::vector<int>{1, -1});
}

TEST_CASE("libsvm empty file") {
    auto p = testsup::write_file("empty.libsvm", "");
    CHECK_THROWS_AS(load_libsvm(p.string()), empty_file_error);
}

TEST_CASE("libsvm non-monotone indices accepted") {
    auto p = testsup::write_file("nonmono.libsvm", "1 3:1 1:2\n-1 2:1\n");
    Dataset d = load_libsvm(p.string());
    CHECK(d.features(0, 0) == 2.0);
    CHECK(d.features(0, 2) == 1.0);
}

TEST_CASE("standardize column [1,3]") {
    Dataset d;
    d.features.resize(2, 1);
    d.features << 1, 3;
    d.labels = {1, -1};
    d.ids = {0, 1};
    auto [z, stats] = standardize(d);
    CHECK(z.features(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(z.features(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(stats.mean(0) == 2.0);
    CHECK(stats.sd(0) == doctest::Approx(std::sqrt(2.0)));  // sample sd, n-1
    CHECK(z.ids == d.ids);
}

TEST_CASE("constant column zeroed and flagged") {
    Dataset d;
    d.features.resize(3, 2);
    d.features << 5, 1, 5, 2, 5, 3;
    d.labels = {1, -1, 1};
    d.ids = {0, 1, 2};
    auto [z, stats] = standardize(d);
    CHECK(z.features.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(stats.zero_variance[0]);
    CHECK(!stats.zero_variance[1]);
}

TEST_CASE("standardize is idempotent and invertible") {
    Dataset d = testsup::random_dataset(20, 3, 7);
    auto [z, stats] = standardize(d);
    auto [z2, stats2] = standardize(z);
    CHECK((z2.features - z.features).cwiseAbs().maxCoeff() < 1e-12);
    Matrix back = invert_scaler(z.features, stats);
    CHECK((back - d.features).cwiseAbs().maxCoeff() < 1e-12);
    Matrix again = apply_scaler(d.features, stats);
    CHECK((again - z.features).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("label_ratio") {
    Dataset d;
    d.features.resize(4, 1);
    d.features.setZero();
    d.ids = {0, 1, 2, 3};
    d.labels = {1, 1, -1, -1};
    CHECK(label_ratio(d) == 0.5);
    d.labels = {1, -1, -1, -1};
    CHECK(label_ratio(d) == 0.25);
    // invariant under global flip
    d.labels = {-1, 1, 1, 1};
    CHECK(label_ratio(d) == 0.25);
}

TEST_CASE("csv save/load round-trips") {
    Dataset d = testsup::random_dataset(10, 2, 11);
    auto p = testsup::temp_dir() / "roundtrip.csv";
    save_csv(d, p.string());
    Dataset d2 = load_csv(p.string(), "label");
    CHECK(d2.size() == d.size());
    CHECK((d2.features - d.features).cwiseAbs().maxCoeff() == 0.0);  // bit-identical
    CHECK(d2.labels == d.labels);
}
