#include <doctest.h>

#include <cmath>

#include "cmdist/distance.hpp"
#include "cmdist/error.hpp"
#include "cmdist/features.hpp"
#include "cmdist/oracle.hpp"
#include "helpers.hpp"

using namespace cmdist;

namespace {

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

BinaryDataset make(std::size_t k, testing::Rows rows, const std::string& name = "d") {
    return BinaryDataset(k, std::move(rows), name);
}

}  // namespace

TEST_CASE("three-point example through the general path") {
    Eigen::VectorXd t1(1), t2(1);
    t1 << 0.75;
    t2 << 0.25;
    Eigen::MatrixXd cov(1, 1);
    cov << 2.0 / 9.0;
    CHECK(std::abs(cm_distance_general(t1, t2, cov) - 3.0 / std::sqrt(8.0)) <= 1e-12);
    CHECK(cm_distance_general(t1, t1, cov) == 0.0);
}

TEST_CASE("fast path on singletons is scaled L2 of the marginals") {
    const auto d1 = make(2, {{0, 1}, {0}, {}, {1}});
    const auto d2 = make(2, {{0}, {0}, {0, 1}, {}});
    const auto f = singleton_family(2);
    const Eigen::VectorXd diff = conjunction_frequency(d1, f).values - conjunction_frequency(d2, f).values;
    CHECK(cm_distance_fast(d1, d2, f) == doctest::Approx(kParityScale * diff.norm()).epsilon(1e-14));
    CHECK(cm_distance_fast(d1, d1, f) == 0.0);
}

TEST_CASE("fast path equals the general path with the closed-form covariance") {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t k = 6;
        const auto d1 = testing::random_dataset(rng, k, 5, 60);
        const auto d2 = testing::random_dataset(rng, k, 5, 60);
        const auto f = testing::random_antimonotonic(rng, k, 3, 4);
        const double fast = cm_distance_fast(d1, d2, f);
        const double general = cm_distance_general(conjunction_frequency(d1, f), conjunction_frequency(d2, f),
                                                   uniform_covariance_conjunction(f));
        CHECK(close_rel(fast, general, 1e-9));
    }
}

TEST_CASE("fast path rejects non-antimonotonic families in strict mode only") {
    const auto d1 = make(2, {{0, 1}, {0}});
    const auto d2 = make(2, {{1}, {}});
    const ItemsetFamily f({Itemset{0, 1}});
    CHECK_THROWS_AS(cm_distance_fast(d1, d2, f), BasisError);
    const double v = cm_distance_fast(d1, d2, f, {SolverMode::pseudoinverse, 0.0});
    // single conjunction feature of variance 3/16, frequencies 1/2 and 0
    CHECK(v == doctest::Approx(0.5 / std::sqrt(3.0 / 16.0)).epsilon(1e-12));
    CHECK_THROWS_AS(cm_distance_fast(d1, make(3, {{2}}), singleton_family(2)), DimensionError);
}

TEST_CASE("general path validates its inputs") {
    const auto d = make(2, {{0, 1}, {0}});
    const auto f = singleton_family(2);
    const auto conj = conjunction_frequency(d, f);
    const auto par = parity_frequency(d, f);
    CHECK_THROWS_AS(cm_distance_general(conj, par, uniform_covariance_conjunction(f)), ValidationError);
    CHECK_THROWS_AS(cm_distance_general(conj, conj, Eigen::MatrixXd::Identity(3, 3)), DimensionError);

    Eigen::VectorXd a(2), b(2);
    a << 0.1, std::nan("");
    b << 0.1, 0.2;
    CHECK_THROWS_AS(cm_distance_general(a, b, Eigen::MatrixXd::Identity(2, 2)), ValidationError);
}

TEST_CASE("singular covariance: strict fails, pseudoinverse matches the geometric definition") {
    // duplicate feature column: the covariance has rank 1
    Eigen::MatrixXd table(4, 2);
    table << 0, 0, 0, 0, 1, 1, 1, 1;
    const oracle::TabulatedFeature s(table);
    const Eigen::MatrixXd cov = oracle::enumeration_covariance(s);
    Eigen::VectorXd t1(2), t2(2);
    t1 << 0.8, 0.8;
    t2 << 0.3, 0.3;
    try {
        (void)cm_distance_general(t1, t2, cov);
        FAIL("expected a singularity error");
    } catch (const SingularityError& e) {
        CHECK(std::string(e.what()).find("pivot") != std::string::npos);
    }
    const double pinv = cm_distance_general(t1, t2, cov, {SolverMode::pseudoinverse, 0.0});
    CHECK(close_rel(pinv, oracle::cm_distance_geometric(t1, t2, s), 1e-9));
}

TEST_CASE("size-two closed form") {
    const auto same = make(2, {{0, 1}, {}});
    CHECK(cm_distance_cov_formula(same, same) == 0.0);

    const auto one = make(1, {{0}, {0}, {}});
    const auto zero = make(1, {{}, {0}});
    CHECK(cm_distance_cov_formula(one, zero) == doctest::Approx(kParityScale * std::abs(2.0 / 3.0 - 0.5)));

    std::mt19937_64 rng(202);
    for (int rep = 0; rep < 40; ++rep) {
        const auto d1 = testing::random_dataset(rng, 5, 3, 40);
        const auto d2 = testing::random_dataset(rng, 5, 3, 40);
        CHECK(std::abs(cm_distance_cov_formula(d1, d2) - cm_distance_fast(d1, d2, pairs_family(5))) <= 1e-10);
    }
}

TEST_CASE("base distance") {
    const auto d1 = make(2, {{0, 1}, {0, 1}});
    const auto d2 = make(2, {{0, 1}, {}});
    const ItemsetFamily f({Itemset{0, 1}});
    CHECK(base_distance(d1, d2, f) == doctest::Approx(kParityScale * 0.5));
    CHECK(base_distance(d1, d1, f) == 0.0);

    std::mt19937_64 rng(303);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = testing::random_dataset(rng, 7, 3, 30);
        const auto b = testing::random_dataset(rng, 7, 3, 30);
        // identical on singleton families
        CHECK(base_distance(a, b, singleton_family(7)) == cm_distance_fast(a, b, singleton_family(7)));
    }
}

TEST_CASE("empirical covariance against a direct estimate") {
    std::mt19937_64 rng(404);
    const auto d = testing::random_dataset(rng, 4, 10, 30);
    const auto f = pairs_family(4);
    const auto rows = testing::rows_of(d);
    const auto n = static_cast<Eigen::Index>(f.size());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (Eigen::Index i = 0; i < n; ++i) {
            x(static_cast<Eigen::Index>(r), i) = testing::row_has_all(rows[r], f[static_cast<std::size_t>(i)]);
        }
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd expected = centered.transpose() * centered / static_cast<double>(rows.size());
    CHECK((empirical_covariance(d, f) - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fisher distance") {
    // D2 covers {0,1}^2 uniformly: independent attributes with variance 1/4
    const auto d2 = make(2, {{}, {0}, {1}, {0, 1}});
    const auto d1 = make(2, {{0}, {0}, {0, 1}, {}});
    const auto f = singleton_family(2);
    const Eigen::VectorXd g = conjunction_frequency(d1, f).values - conjunction_frequency(d2, f).values;
    const double expected = std::sqrt(0.5 * (g[0] * g[0] / 0.25 + g[1] * g[1] / 0.25));
    CHECK(fisher_distance(d1, d2, f) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(fisher_distance(d2, d2, f) == 0.0);

    // asymmetric on generic inputs
    CHECK(std::abs(fisher_distance(d1, d2, f) - fisher_distance(d2, d1, f)) > 1e-3);

    CHECK_THROWS_AS(fisher_distance(d1, make(2, {{0}}), f), ValidationError);
    // constant column: singular empirical covariance
    const auto flat = make(2, {{0}, {0}, {0, 1}});
    CHECK_THROWS_AS(fisher_distance(d1, flat, f), SingularityError);
    CHECK(std::isfinite(fisher_distance(d1, flat, f, {SolverMode::strict, 1e-3})));
    CHECK(std::isfinite(fisher_distance(d1, flat, f, {SolverMode::pseudoinverse, 0.0})));
}

TEST_CASE("evaluate dispatches on the distance kind") {
    std::mt19937_64 rng(505);
    const auto a = testing::random_dataset(rng, 4, 10, 20);
    const auto b = testing::random_dataset(rng, 4, 10, 20);
    const auto f = pairs_family(4);
    DistanceSpec spec;
    CHECK(evaluate(spec, f, a, b) == cm_distance_fast(a, b, f));
    spec.kind = DistanceKind::base;
    CHECK(evaluate(spec, f, a, b) == base_distance(a, b, f));
    spec.kind = DistanceKind::fisher;
    spec.solver = {SolverMode::pseudoinverse, 0.0};
    CHECK(evaluate(spec, f, a, b) == fisher_distance(a, b, f, spec.solver));
    CHECK(to_string(DistanceKind::cm) == "cm");
    CHECK(to_string(FeatureKind::freq) == "freq");
}

TEST_CASE("resolve_family builds the named feature sets") {
    std::mt19937_64 rng(606);
    std::vector<BinaryDataset> ds{testing::random_dataset(rng, 5, 10, 20), testing::random_dataset(rng, 5, 10, 20)};
    FeatureSpec spec;
    CHECK(resolve_family(spec, ds) == singleton_family(5));
    spec.kind = FeatureKind::cov;
    CHECK(resolve_family(spec, ds) == pairs_family(5));
    spec.kind = FeatureKind::family;
    spec.family = ItemsetFamily({Itemset{0, 1}});
    CHECK(resolve_family(spec, ds) == *spec.family);
    spec.kind = FeatureKind::freq;
    spec.mining.min_support = 0.2;
    const auto mined = resolve_family(spec, ds);
    CHECK(mined.antimonotonic());
    for (std::size_t j = 0; j < 5; ++j) CHECK(mined.contains(Itemset{static_cast<Item>(j)}));
}
