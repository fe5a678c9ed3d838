#include "cmdist/features.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "cmdist/error.hpp"

namespace cmdist {

namespace {

/// All subsets of `s` with one item removed.
std::vector<Itemset> facets(const Itemset& s) {
    std::vector<Itemset> out;
    if (s.size() < 2) return out;
    out.reserve(s.size());
    const auto items = s.items();
    for (std::size_t skip = 0; skip < items.size(); ++skip) {
        std::vector<Item> sub;
        sub.reserve(items.size() - 1);
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i != skip) sub.push_back(items[i]);
        }
        out.emplace_back(std::move(sub));
    }
    return out;
}

void require_transformable(const FrequencyVector& v, const ItemsetFamily& f, Basis expected) {
    if (!f.antimonotonic()) {
        throw BasisError("conjunction/parity transform needs an antimonotonic family; apply closure() first");
    }
    if (v.size() != f.size()) {
        throw DimensionError("frequency vector has " + std::to_string(v.size()) + " entries, family has " +
                             std::to_string(f.size()));
    }
    if (v.basis != expected) {
        throw ValidationError("frequency vector is in the wrong basis for this transform");
    }
    if (v.family != f.fingerprint()) {
        throw ValidationError("frequency vector was computed over a different family");
    }
    for (const auto& s : f) {
        if (s.size() > kMaxTransformItemsetSize) {
            throw CapacityError("itemset of size " + std::to_string(s.size()) +
                                " exceeds the subset-enumeration cap; use parity_frequency on the data instead");
        }
    }
}

/// Visits every nonempty subset of `s` except `s` itself, with its size.
template <typename Fn>
void for_each_proper_subset(const Itemset& s, Fn&& fn) {
    const auto items = s.items();
    const std::size_t m = items.size();
    std::vector<Item> sub;
    sub.reserve(m);
    const std::uint32_t full = (std::uint32_t{1} << m) - 1;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        sub.clear();
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::uint32_t{1} << i)) sub.push_back(items[i]);
        }
        fn(Itemset(sub));
    }
}

double signed_power_of_two(std::size_t size) {
    // (-2)^(size - 1)
    const double mag = std::ldexp(1.0, static_cast<int>(size) - 1);
    return (size % 2 == 1) ? mag : -mag;
}

}  // namespace

bool is_antimonotonic(const ItemsetFamily& f) {
    for (const auto& s : f) {
        for (const auto& sub : facets(s)) {
            if (!f.contains(sub)) return false;
        }
    }
    return true;
}

ItemsetFamily closure(const ItemsetFamily& f) {
    if (f.antimonotonic()) return f;
    std::set<Itemset, SizeLexLess> added;
    std::vector<Itemset> frontier(f.begin(), f.end());
    while (!frontier.empty()) {
        std::vector<Itemset> next;
        for (const auto& s : frontier) {
            for (auto& sub : facets(s)) {
                if (f.contains(sub) || added.contains(sub)) continue;
                added.insert(sub);
                next.push_back(std::move(sub));
            }
        }
        frontier = std::move(next);
    }
    std::vector<Itemset> out(f.begin(), f.end());
    out.insert(out.end(), added.begin(), added.end());
    return ItemsetFamily(std::move(out));
}

ItemsetFamily singleton_family(std::size_t k) {
    std::vector<Itemset> sets;
    sets.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        sets.push_back(Itemset{static_cast<Item>(j)});
    }
    return ItemsetFamily(std::move(sets));
}

ItemsetFamily pairs_family(std::size_t k) {
    std::vector<Itemset> sets;
    sets.reserve(k + k * (k - 1) / 2);
    for (std::size_t j = 0; j < k; ++j) {
        sets.push_back(Itemset{static_cast<Item>(j)});
    }
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t l = j + 1; l < k; ++l) {
            sets.push_back(Itemset{static_cast<Item>(j), static_cast<Item>(l)});
        }
    }
    return ItemsetFamily(std::move(sets));
}

ItemsetFamily all_itemsets_family(std::size_t k) {
    if (k > 24) {
        throw CapacityError("refusing to enumerate all 2^" + std::to_string(k) + " - 1 itemsets");
    }
    std::vector<Itemset> sets;
    const std::size_t count = (std::size_t{1} << k) - 1;
    sets.reserve(count);
    for (std::size_t mask = 1; mask <= count; ++mask) {
        std::vector<Item> items;
        for (std::size_t j = 0; j < k; ++j) {
            if (mask & (std::size_t{1} << j)) items.push_back(static_cast<Item>(j));
        }
        sets.emplace_back(std::move(items));
    }
    std::sort(sets.begin(), sets.end(), SizeLexLess{});
    return ItemsetFamily(std::move(sets));
}

FrequencyVector conjunction_to_parity(const FrequencyVector& theta, const ItemsetFamily& f) {
    require_transformable(theta, f, Basis::conjunction);
    FrequencyVector out{Eigen::VectorXd(theta.values.size()), Basis::parity, f.fingerprint()};
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& b = f[i];
        double acc = signed_power_of_two(b.size()) * theta.values[static_cast<Eigen::Index>(i)];
        for_each_proper_subset(b, [&](const Itemset& c) {
            acc += signed_power_of_two(c.size()) * theta.values[static_cast<Eigen::Index>(*f.index_of(c))];
        });
        out.values[static_cast<Eigen::Index>(i)] = acc;
    }
    return out;
}

FrequencyVector parity_to_conjunction(const FrequencyVector& parity, const ItemsetFamily& f) {
    require_transformable(parity, f, Basis::parity);
    FrequencyVector out{Eigen::VectorXd::Zero(parity.values.size()), Basis::conjunction, f.fingerprint()};
    // Solve the triangular system with subsets before supersets.
    std::vector<std::size_t> order(f.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&f](std::size_t a, std::size_t b) { return f[a].size() < f[b].size(); });
    for (std::size_t i : order) {
        const auto& b = f[i];
        double rest = 0.0;
        for_each_proper_subset(b, [&](const Itemset& c) {
            rest += signed_power_of_two(c.size()) * out.values[static_cast<Eigen::Index>(*f.index_of(c))];
        });
        out.values[static_cast<Eigen::Index>(i)] =
            (parity.values[static_cast<Eigen::Index>(i)] - rest) / signed_power_of_two(b.size());
    }
    return out;
}

}  // namespace cmdist
