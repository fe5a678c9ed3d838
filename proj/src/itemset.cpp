#include "cmdist/itemset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cmdist/error.hpp"
#include "cmdist/features.hpp"

namespace cmdist {

Itemset::Itemset(std::vector<Item> items) : items_(std::move(items)) {
    if (items_.empty()) {
        throw ValidationError("itemset must be nonempty");
    }
    std::sort(items_.begin(), items_.end());
    if (std::adjacent_find(items_.begin(), items_.end()) != items_.end()) {
        throw ValidationError("itemset contains a duplicate item");
    }
}

bool Itemset::contains(const Itemset& other) const {
    return std::includes(items_.begin(), items_.end(), other.items_.begin(), other.items_.end());
}

std::size_t Itemset::union_size(const Itemset& other) const {
    std::size_t i = 0, j = 0, common = 0;
    while (i < items_.size() && j < other.items_.size()) {
        if (items_[i] < other.items_[j]) {
            ++i;
        } else if (other.items_[j] < items_[i]) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    return items_.size() + other.items_.size() - common;
}

std::string Itemset::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(items_[i]);
    }
    return out;
}

std::size_t ItemsetHash::operator()(const Itemset& s) const noexcept {
    // FNV-1a over the item values
    std::uint64_t h = 1469598103934665603ull;
    for (Item v : s.items()) {
        h ^= v;
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

ItemsetFamily::ItemsetFamily(std::vector<Itemset> itemsets) : itemsets_(std::move(itemsets)) {
    index_.reserve(itemsets_.size());
    std::uint64_t fp = 1469598103934665603ull;
    for (std::size_t i = 0; i < itemsets_.size(); ++i) {
        const auto& s = itemsets_[i];
        if (!index_.emplace(s, i).second) {
            throw ValidationError("duplicate itemset in family: {" + s.to_string() + "}");
        }
        min_dimension_ = std::max<std::size_t>(min_dimension_, s.back() + 1);
        fp ^= ItemsetHash{}(s) + 0x9e3779b97f4a7c15ull + (fp << 6) + (fp >> 2);
    }
    fingerprint_ = fp;
    antimonotonic_ = is_antimonotonic(*this);
}

std::optional<std::size_t> ItemsetFamily::index_of(const Itemset& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

ItemsetFamily read_family(std::istream& in) {
    std::vector<Itemset> sets;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream tokens(line);
        std::vector<Item> items;
        std::string tok;
        while (tokens >> tok) {
            Item v{};
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
                throw ParseError(lineno, "invalid item id '" + tok + "'");
            }
            items.push_back(v);
        }
        if (items.empty()) continue;
        try {
            sets.emplace_back(std::move(items));
        } catch (const ValidationError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return ItemsetFamily(std::move(sets));
}

ItemsetFamily read_family_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open family file '" + path + "'");
    }
    return read_family(in);
}

void write_family(std::ostream& out, const ItemsetFamily& family,
                  std::span<const std::string> comments) {
    if (!comments.empty() && comments.size() != family.size()) {
        throw ValidationError("comment count does not match family size");
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        out << family[i].to_string();
        if (!comments.empty()) out << " # " << comments[i];
        out << '\n';
    }
}

}  // namespace cmdist
