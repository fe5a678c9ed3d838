#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "cmdist/dataset.hpp"
#include "cmdist/itemset.hpp"

namespace cmdist {

struct MiningConfig {
    /// sigma in (0, 1]; ignored when target_count is set.
    double min_support = 0.1;
    std::size_t max_size = std::numeric_limits<std::size_t>::max();
    /// Desired family size, singletons included.
    std::optional<std::size_t> target_count;
};

struct FrequentItemset {
    Itemset itemset;
    std::size_t count = 0;
    double support = 0.0;
};

/// Every itemset with support >= sigma (and at most max_size items), grouped
/// by size and lexicographic within a size. The result is downward closed.
std::vector<FrequentItemset> apriori(const BinaryDataset& d, double sigma,
                                     std::size_t max_size = std::numeric_limits<std::size_t>::max());

/// Singletons plus every itemset that is sigma-frequent in at least one of
/// the data sets. With a target count, sigma is the smallest threshold whose
/// family still fits in the target.
ItemsetFamily select_features(std::span<const BinaryDataset> datasets, const MiningConfig& cfg);

/// Threshold chosen by select_features together with the resulting family
/// and, per member, its largest support across the inputs.
struct FeatureSelection {
    ItemsetFamily family;
    std::vector<double> max_support;
    double sigma = 0.0;
};

FeatureSelection select_features_detailed(std::span<const BinaryDataset> datasets, const MiningConfig& cfg);

}  // namespace cmdist
