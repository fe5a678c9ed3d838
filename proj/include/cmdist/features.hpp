#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Core>

#include "cmdist/dataset.hpp"
#include "cmdist/itemset.hpp"

namespace cmdist {

template <typename Scalar>
using CovarianceMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Largest itemset for which the conjunction/parity transform enumerates
/// subsets (2^size terms per feature).
inline constexpr std::size_t kMaxTransformItemsetSize = 20;

/// True iff every nonempty subset of every member is also a member.
bool is_antimonotonic(const ItemsetFamily& f);

/// Smallest antimonotonic superset. Original members keep their order;
/// missing subsets are appended in (size, lexicographic) order.
ItemsetFamily closure(const ItemsetFamily& f);

/// {0}, {1}, ..., {k-1}
ItemsetFamily singleton_family(std::size_t k);
/// Singletons followed by all pairs in lexicographic order.
ItemsetFamily pairs_family(std::size_t k);
/// Every nonempty itemset over k attributes, (size, lexicographic) order.
ItemsetFamily all_itemsets_family(std::size_t k);

/// Maps conjunction frequencies to parity frequencies on an antimonotonic
/// family: parity(B) = sum over nonempty C subset of B of (-2)^(|C|-1) theta(C).
FrequencyVector conjunction_to_parity(const FrequencyVector& theta, const ItemsetFamily& f);
/// Inverse of conjunction_to_parity.
FrequencyVector parity_to_conjunction(const FrequencyVector& parity, const ItemsetFamily& f);

/// Covariance of conjunction features under the uniform distribution on
/// {0,1}^K: entry (i, j) = 2^-|B_i u B_j| - 2^-(|B_i| + |B_j|).
template <typename Scalar = double>
CovarianceMatrix<Scalar> uniform_covariance_conjunction(const ItemsetFamily& f) {
    const auto n = static_cast<Eigen::Index>(f.size());
    CovarianceMatrix<Scalar> cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& bi = f[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i; j < n; ++j) {
            const auto& bj = f[static_cast<std::size_t>(j)];
            const int joint = -static_cast<int>(bi.union_size(bj));
            const int indep = -static_cast<int>(bi.size() + bj.size());
            const Scalar v = std::ldexp(Scalar(1), joint) - std::ldexp(Scalar(1), indep);
            cov(i, j) = v;
            cov(j, i) = v;
        }
    }
    return cov;
}

/// Variance of a single parity feature under the uniform distribution: a
/// fair 0/1 bit, E[T^2] - E[T]^2 = 1/2 - 1/4.
inline constexpr double kParityVariance = 0.25;

/// Scale turning an L2 difference of parity (or singleton) frequencies into
/// the CM distance: 1 / sqrt(kParityVariance).
inline constexpr double kParityScale = 2.0;

/// Covariance of parity features of distinct itemsets under the uniform
/// distribution: exactly kParityVariance * I.
template <typename Scalar = double>
CovarianceMatrix<Scalar> parity_covariance(const ItemsetFamily& f) {
    const auto n = static_cast<Eigen::Index>(f.size());
    return CovarianceMatrix<Scalar>::Identity(n, n) * Scalar(kParityVariance);
}

}  // namespace cmdist
