#pragma once

// Test-only generators and brute-force reference computations. Nothing here
// calls into the library's counting or covariance code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Core>

#include "cmdist/dataset.hpp"
#include "cmdist/features.hpp"
#include "cmdist/itemset.hpp"

namespace testing {

using Rows = std::vector<std::vector<cmdist::Item>>;

inline Rows random_rows(std::mt19937_64& rng, std::size_t k, std::size_t n, double density = 0.5) {
    std::bernoulli_distribution on(density);
    Rows rows(n);
    for (auto& row : rows) {
        for (std::size_t j = 0; j < k; ++j) {
            if (on(rng)) row.push_back(static_cast<cmdist::Item>(j));
        }
    }
    return rows;
}

/// Rows with per-attribute densities drawn once, so data sets differ in distribution.
inline Rows skewed_rows(std::mt19937_64& rng, std::size_t k, std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<double> p(k);
    for (auto& v : p) v = u(rng);
    Rows rows(n);
    for (auto& row : rows) {
        for (std::size_t j = 0; j < k; ++j) {
            if (std::bernoulli_distribution(p[j])(rng)) row.push_back(static_cast<cmdist::Item>(j));
        }
    }
    return rows;
}

inline cmdist::BinaryDataset random_dataset(std::mt19937_64& rng, std::size_t k, std::size_t min_rows,
                                            std::size_t max_rows, const std::string& name = "d") {
    std::uniform_int_distribution<std::size_t> n(min_rows, max_rows);
    return cmdist::BinaryDataset(k, skewed_rows(rng, k, n(rng)), name);
}

/// Closure of a few random itemsets.
inline cmdist::ItemsetFamily random_antimonotonic(std::mt19937_64& rng, std::size_t k, std::size_t max_generators,
                                                  std::size_t max_size) {
    std::uniform_int_distribution<std::size_t> gens(1, max_generators);
    std::uniform_int_distribution<std::size_t> size(1, std::min(max_size, k));
    std::set<cmdist::Itemset> chosen;
    const std::size_t g = gens(rng);
    // small k may not offer g distinct generators; stop after a bounded number of draws
    for (std::size_t attempt = 0; chosen.size() < g && attempt < 16 * g; ++attempt) {
        std::vector<cmdist::Item> all(k);
        for (std::size_t j = 0; j < k; ++j) all[j] = static_cast<cmdist::Item>(j);
        std::shuffle(all.begin(), all.end(), rng);
        all.resize(size(rng));
        chosen.insert(cmdist::Itemset(all));
    }
    return cmdist::closure(cmdist::ItemsetFamily(std::vector<cmdist::Itemset>(chosen.begin(), chosen.end())));
}

inline bool row_has_all(const std::vector<cmdist::Item>& row, const cmdist::Itemset& s) {
    for (auto j : s.items()) {
        if (std::find(row.begin(), row.end(), j) == row.end()) return false;
    }
    return true;
}

inline bool row_has_odd(const std::vector<cmdist::Item>& row, const cmdist::Itemset& s) {
    std::size_t c = 0;
    for (auto j : s.items()) c += std::find(row.begin(), row.end(), j) != row.end();
    return c % 2 == 1;
}

/// Row-scan frequency over plain item lists.
template <typename Pred>
Eigen::VectorXd scan_frequency(const Rows& rows, const cmdist::ItemsetFamily& f, Pred pred) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::size_t c = 0;
        for (const auto& row : rows) c += pred(row, f[i]);
        out[static_cast<Eigen::Index>(i)] = static_cast<double>(c) / static_cast<double>(rows.size());
    }
    return out;
}

inline Eigen::VectorXd scan_conjunction(const Rows& rows, const cmdist::ItemsetFamily& f) {
    return scan_frequency(rows, f, row_has_all);
}

inline Eigen::VectorXd scan_parity(const Rows& rows, const cmdist::ItemsetFamily& f) {
    return scan_frequency(rows, f, row_has_odd);
}

inline Rows rows_of(const cmdist::BinaryDataset& d) {
    Rows rows(d.rows());
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t j = 0; j < d.dimension(); ++j) {
            if (d.bit(r, j)) rows[r].push_back(static_cast<cmdist::Item>(j));
        }
    }
    return rows;
}

/// Covariance of conjunction (parity) features by explicit enumeration of
/// {0,1}^k with plain loops.
inline Eigen::MatrixXd brute_uniform_covariance(const cmdist::ItemsetFamily& f, std::size_t k, bool parity) {
    const std::size_t omega = std::size_t{1} << k;
    const auto n = static_cast<Eigen::Index>(f.size());
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (std::size_t w = 0; w < omega; ++w) {
        std::vector<cmdist::Item> row;
        for (std::size_t j = 0; j < k; ++j) {
            if (w & (std::size_t{1} << j)) row.push_back(static_cast<cmdist::Item>(j));
        }
        Eigen::VectorXd s(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& b = f[static_cast<std::size_t>(i)];
            s[i] = (parity ? row_has_odd(row, b) : row_has_all(row, b)) ? 1.0 : 0.0;
        }
        second += s * s.transpose();
        mean += s;
    }
    second /= static_cast<double>(omega);
    mean /= static_cast<double>(omega);
    return second - mean * mean.transpose();
}

/// Every itemset over k attributes with support >= sigma, by enumerating all
/// 2^k - 1 candidates.
inline std::set<std::pair<cmdist::Itemset, std::size_t>> brute_frequent(const Rows& rows, std::size_t k, double sigma) {
    std::set<std::pair<cmdist::Itemset, std::size_t>> out;
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
        std::vector<cmdist::Item> items;
        for (std::size_t j = 0; j < k; ++j) {
            if (mask & (std::size_t{1} << j)) items.push_back(static_cast<cmdist::Item>(j));
        }
        const cmdist::Itemset s(items);
        std::size_t c = 0;
        for (const auto& row : rows) c += row_has_all(row, s);
        if (static_cast<double>(c) / static_cast<double>(rows.size()) >= sigma) out.emplace(s, c);
    }
    return out;
}

}  // namespace testing
