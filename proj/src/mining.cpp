#include "cmdist/mining.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_set>

#include "cmdist/error.hpp"
#include "cmdist/features.hpp"

namespace cmdist {

namespace {

using Tidset = std::vector<std::uint64_t>;

struct Node {
    Itemset itemset;
    Tidset tids;
    std::size_t count;
};

std::size_t popcount_and(const Tidset& a, const Tidset& b, Tidset& out) {
    std::size_t c = 0;
    for (std::size_t w = 0; w < a.size(); ++w) {
        out[w] = a[w] & b[w];
        c += static_cast<std::size_t>(std::popcount(out[w]));
    }
    return c;
}

bool is_frequent(std::size_t count, std::size_t n, double sigma) {
    return static_cast<double>(count) / static_cast<double>(n) >= sigma;
}

void require_sigma(double sigma) {
    if (!(sigma > 0.0 && sigma <= 1.0)) {
        throw ValidationError("minimum support must lie in (0, 1], got " + std::to_string(sigma));
    }
}

/// Level-wise mining over vertical tidsets. Returns nullopt as soon as more
/// than `limit` itemsets are frequent.
std::optional<std::vector<FrequentItemset>> apriori_limited(const BinaryDataset& d, double sigma,
                                                            std::size_t max_size, std::size_t limit) {
    require_sigma(sigma);
    const std::size_t n = d.rows();
    if (n == 0) {
        throw EmptyDatasetError("data set '" + d.name() + "' has no rows");
    }
    std::vector<FrequentItemset> out;
    if (max_size == 0) return out;

    const std::size_t words = (n + 63) / 64;
    std::vector<Node> level;
    for (std::size_t j = 0; j < d.dimension(); ++j) {
        Tidset tids(words, 0);
        std::size_t count = 0;
        for (std::size_t r = 0; r < n; ++r) {
            if (d.bit(r, j)) {
                tids[r >> 6] |= std::uint64_t{1} << (r & 63);
                ++count;
            }
        }
        if (is_frequent(count, n, sigma)) {
            level.push_back({Itemset{static_cast<Item>(j)}, std::move(tids), count});
        }
    }

    std::size_t size = 1;
    while (!level.empty()) {
        for (const auto& node : level) {
            out.push_back({node.itemset, node.count, static_cast<double>(node.count) / static_cast<double>(n)});
        }
        if (out.size() > limit) return std::nullopt;
        if (size >= max_size) break;

        std::unordered_set<Itemset, ItemsetHash> current;
        current.reserve(level.size());
        for (const auto& node : level) current.insert(node.itemset);

        std::vector<Node> next;
        Tidset scratch(words);
        // Nodes sharing a (size - 1)-prefix are contiguous because each level is lexicographic.
        for (std::size_t a = 0; a < level.size(); ++a) {
            const auto prefix = level[a].itemset.items().first(size - 1);
            for (std::size_t b = a + 1; b < level.size(); ++b) {
                const auto other = level[b].itemset.items();
                if (!std::equal(prefix.begin(), prefix.end(), other.begin())) break;

                std::vector<Item> items(level[a].itemset.items().begin(), level[a].itemset.items().end());
                items.push_back(other.back());
                Itemset candidate(std::move(items));

                bool all_subsets_frequent = true;
                // the two facets dropping either of the last two items are the join parents
                for (std::size_t skip = 0; skip + 2 < candidate.size(); ++skip) {
                    std::vector<Item> sub;
                    for (std::size_t i = 0; i < candidate.size(); ++i) {
                        if (i != skip) sub.push_back(candidate[i]);
                    }
                    if (!current.contains(Itemset(std::move(sub)))) {
                        all_subsets_frequent = false;
                        break;
                    }
                }
                if (!all_subsets_frequent) continue;

                const std::size_t count = popcount_and(level[a].tids, level[b].tids, scratch);
                if (is_frequent(count, n, sigma)) {
                    next.push_back({std::move(candidate), scratch, count});
                }
            }
        }
        level = std::move(next);
        ++size;
    }
    return out;
}

struct Validated {
    std::size_t k;
    std::size_t max_rows;
};

Validated validate_inputs(std::span<const BinaryDataset> datasets, const MiningConfig& cfg) {
    if (datasets.empty()) {
        throw ValidationError("feature selection needs at least one data set");
    }
    const std::size_t k = datasets.front().dimension();
    std::size_t max_rows = 0;
    for (const auto& d : datasets) {
        if (d.dimension() != k) {
            throw DimensionError("data sets have incompatible dimensions " + std::to_string(k) + " and " +
                                 std::to_string(d.dimension()));
        }
        if (d.rows() == 0) {
            throw EmptyDatasetError("data set '" + d.name() + "' has no rows");
        }
        max_rows = std::max(max_rows, d.rows());
    }
    if (cfg.target_count) {
        if (*cfg.target_count < k) {
            throw ValidationError("target count " + std::to_string(*cfg.target_count) +
                                  " is smaller than the number of singletons " + std::to_string(k));
        }
    } else {
        require_sigma(cfg.min_support);
    }
    return {k, max_rows};
}

/// Union of singletons and per-data-set frequent itemsets at `sigma`, with the
/// largest support seen for each. nullopt if it grows past `limit`.
std::optional<std::map<Itemset, double, SizeLexLess>> union_at(std::span<const BinaryDataset> datasets,
                                                               std::size_t k, double sigma,
                                                               std::size_t max_size, std::size_t limit) {
    std::map<Itemset, double, SizeLexLess> merged;
    for (std::size_t j = 0; j < k; ++j) merged.emplace(Itemset{static_cast<Item>(j)}, 0.0);
    for (const auto& d : datasets) {
        auto mined = apriori_limited(d, sigma, max_size, limit);
        if (!mined) return std::nullopt;
        for (auto& fi : *mined) {
            auto [it, inserted] = merged.emplace(fi.itemset, fi.support);
            if (!inserted) it->second = std::max(it->second, fi.support);
        }
        if (merged.size() > limit) return std::nullopt;
    }
    return merged;
}

}  // namespace

std::vector<FrequentItemset> apriori(const BinaryDataset& d, double sigma, std::size_t max_size) {
    return *apriori_limited(d, sigma, max_size, std::numeric_limits<std::size_t>::max());
}

FeatureSelection select_features_detailed(std::span<const BinaryDataset> datasets, const MiningConfig& cfg) {
    const auto [k, max_rows] = validate_inputs(datasets, cfg);
    constexpr std::size_t unlimited = std::numeric_limits<std::size_t>::max();

    std::map<Itemset, double, SizeLexLess> chosen;
    double sigma = cfg.min_support;
    if (!cfg.target_count) {
        chosen = *union_at(datasets, k, sigma, cfg.max_size, unlimited);
    } else {
        const std::size_t target = *cfg.target_count;
        auto at_one = union_at(datasets, k, 1.0, cfg.max_size, target);
        if (!at_one) {
            // even support-1 itemsets overflow the target: singletons only
            sigma = std::nextafter(1.0, 2.0);
            for (std::size_t j = 0; j < k; ++j) chosen.emplace(Itemset{static_cast<Item>(j)}, 0.0);
        } else {
            // Distinct supports c1/n1 != c2/n2 differ by at least 1/(n1 n2), so once
            // the bracket is narrower than that, no support value separates lo from hi.
            const double gap = 1.0 / (static_cast<double>(max_rows) * static_cast<double>(max_rows));
            double lo = 0.0;
            double hi = 1.0;
            chosen = std::move(*at_one);
            while (hi - lo >= gap) {
                const double mid = lo + (hi - lo) / 2;
                if (mid <= lo || mid >= hi) break;
                if (auto m = union_at(datasets, k, mid, cfg.max_size, target)) {
                    hi = mid;
                    chosen = std::move(*m);
                } else {
                    lo = mid;
                }
            }
            sigma = hi;
        }
    }

    // Singleton supports reported for every attribute, frequent or not.
    for (const auto& d : datasets) {
        const auto singles = conjunction_frequency(d, singleton_family(k));
        for (std::size_t j = 0; j < k; ++j) {
            auto& s = chosen[Itemset{static_cast<Item>(j)}];
            s = std::max(s, singles.values[static_cast<Eigen::Index>(j)]);
        }
    }

    FeatureSelection out;
    std::vector<Itemset> members;
    members.reserve(chosen.size());
    for (const auto& [itemset, support] : chosen) {
        members.push_back(itemset);
        out.max_support.push_back(support);
    }
    out.family = ItemsetFamily(std::move(members));
    out.sigma = sigma;
    return out;
}

ItemsetFamily select_features(std::span<const BinaryDataset> datasets, const MiningConfig& cfg) {
    return select_features_detailed(datasets, cfg).family;
}

}  // namespace cmdist
