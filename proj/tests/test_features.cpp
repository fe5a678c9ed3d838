#include <doctest.h>

#include <sstream>

#include "cmdist/error.hpp"
#include "cmdist/features.hpp"
#include "helpers.hpp"

using namespace cmdist;

TEST_CASE("itemsets are sorted, nonempty and duplicate free") {
    CHECK(Itemset{2, 0, 1}.to_string() == "0 1 2");
    CHECK_THROWS_AS(Itemset(std::vector<Item>{}), ValidationError);
    CHECK_THROWS_AS((Itemset{1, 1}), ValidationError);
    CHECK_THROWS_AS(ItemsetFamily({Itemset{0}, Itemset{0}}), ValidationError);
}

TEST_CASE("closure appends missing subsets in size-then-lexicographic order") {
    const auto c = closure(ItemsetFamily({Itemset{0, 1, 2}}));
    const ItemsetFamily expected({Itemset{0, 1, 2}, Itemset{0}, Itemset{1}, Itemset{2}, Itemset{0, 1},
                                  Itemset{0, 2}, Itemset{1, 2}});
    CHECK(c == expected);
    CHECK(c.antimonotonic());

    CHECK(closure(ItemsetFamily({Itemset{0}, Itemset{0, 1}})) ==
          ItemsetFamily({Itemset{0}, Itemset{0, 1}, Itemset{1}}));

    const ItemsetFamily closed({Itemset{1}, Itemset{0}, Itemset{0, 1}});
    CHECK(closure(closed) == closed);
}

TEST_CASE("closure is idempotent") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<Itemset> sets;
        std::uniform_int_distribution<int> item(0, 7);
        for (int i = 0; i < 3; ++i) {
            sets.push_back(Itemset{static_cast<Item>(item(rng)), static_cast<Item>(8 + i)});
        }
        const auto once = closure(ItemsetFamily(sets));
        CHECK(closure(once) == once);
        CHECK(is_antimonotonic(once));
    }
}

TEST_CASE("antimonotonicity") {
    CHECK(is_antimonotonic(ItemsetFamily({Itemset{0}, Itemset{1}, Itemset{0, 1}})));
    CHECK_FALSE(is_antimonotonic(ItemsetFamily({Itemset{0, 1}})));
    CHECK(is_antimonotonic(pairs_family(6)));
    CHECK(is_antimonotonic(all_itemsets_family(4)));
    CHECK(all_itemsets_family(4).size() == 15);
}

TEST_CASE("conjunction to parity on pairs and singletons") {
    std::vector<std::vector<Item>> rows{{0, 1}, {0}, {0, 1}, {1}, {}};
    const BinaryDataset d(2, rows);
    const ItemsetFamily f({Itemset{0}, Itemset{1}, Itemset{0, 1}});
    const auto conj = conjunction_frequency(d, f);
    const auto par = conjunction_to_parity(conj, f);
    CHECK(par.basis == Basis::parity);
    CHECK(par.values[0] == conj.values[0]);
    CHECK(par.values[1] == conj.values[1]);
    CHECK(par.values[2] == doctest::Approx(conj.values[0] + conj.values[1] - 2 * conj.values[2]));
}

TEST_CASE("conjunction to parity matches a direct parity scan, and inverts") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t k = 3 + static_cast<std::size_t>(rep % 6);
        const auto rows = testing::skewed_rows(rng, k, 20 + static_cast<std::size_t>(rep));
        const BinaryDataset d(k, rows);
        const auto f = rep == 0 ? closure(ItemsetFamily({Itemset{0, 1, 2}})) : testing::random_antimonotonic(rng, k, 3, 5);
        const auto conj = conjunction_frequency(d, f);
        const auto par = conjunction_to_parity(conj, f);
        CHECK((par.values - testing::scan_parity(rows, f)).cwiseAbs().maxCoeff() <= 1e-12);
        const auto back = parity_to_conjunction(par, f);
        CHECK((back.values - conj.values).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("transform rejects non-antimonotonic families") {
    const ItemsetFamily f({Itemset{0, 1}});
    std::vector<std::vector<Item>> rows{{0, 1}};
    const auto conj = conjunction_frequency(BinaryDataset(2, rows), f);
    CHECK_THROWS_AS(conjunction_to_parity(conj, f), BasisError);
}

TEST_CASE("uniform conjunction covariance: hand-checked entries") {
    // enumeration over {0,1} and {0,1}^2 gives 1/4, 0, 1/8
    const auto c1 = uniform_covariance_conjunction(ItemsetFamily({Itemset{0}}));
    CHECK(c1(0, 0) == 0.25);
    const auto c2 = uniform_covariance_conjunction(ItemsetFamily({Itemset{0}, Itemset{1}, Itemset{0, 1}}));
    CHECK(c2(0, 1) == 0.0);
    CHECK(c2(0, 2) == 0.125);
    CHECK(c2(2, 0) == 0.125);
}

TEST_CASE("uniform conjunction covariance equals brute-force enumeration") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t k = 1 + static_cast<std::size_t>(rep % 8);
        std::vector<Itemset> sets;
        std::uniform_int_distribution<std::size_t> size(1, k);
        std::set<Itemset> seen;
        for (int i = 0; i < 6; ++i) {
            std::vector<Item> all(k);
            for (std::size_t j = 0; j < k; ++j) all[j] = static_cast<Item>(j);
            std::shuffle(all.begin(), all.end(), rng);
            all.resize(size(rng));
            Itemset s(all);
            if (seen.insert(s).second) sets.push_back(s);
        }
        const ItemsetFamily f(sets);
        const auto closed = uniform_covariance_conjunction(f);
        const auto brute = testing::brute_uniform_covariance(f, k, false);
        CHECK((closed - brute).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("parity covariance is a quarter of the identity") {
    const auto one = parity_covariance(ItemsetFamily({Itemset{3}}));
    CHECK(one.rows() == 1);
    CHECK(one(0, 0) == 0.25);
    const ItemsetFamily f({Itemset{0}, Itemset{1}, Itemset{0, 1}});
    CHECK(parity_covariance(f) == 0.25 * Eigen::MatrixXd::Identity(3, 3));
    // and the closed form agrees with enumeration of the parity features
    CHECK((testing::brute_uniform_covariance(f, 2, true) - parity_covariance(f)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(parity_covariance<float>(f)(1, 1) == 0.25f);
}

TEST_CASE("family text serialization") {
    std::istringstream in("# comment\n0 2 # support 0.5\n\n1\n2 0 1\n");
    const auto f = read_family(in);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == Itemset{0, 2});
    CHECK(f[2] == Itemset{0, 1, 2});
    std::ostringstream out;
    write_family(out, f);
    CHECK(out.str() == "0 2\n1\n0 1 2\n");
    std::istringstream bad("0 z\n");
    CHECK_THROWS_AS(read_family(bad), ParseError);
    std::istringstream dup("1 1\n");
    CHECK_THROWS_AS(read_family(dup), ParseError);
}
