#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cmdist {

using Item = std::uint32_t;

/// Nonempty set of attribute indices, stored strictly increasing.
class Itemset {
public:
    /// Sorts the input; throws ValidationError on empty input or duplicates.
    explicit Itemset(std::vector<Item> items);
    Itemset(std::initializer_list<Item> items) : Itemset(std::vector<Item>(items)) {}

    std::span<const Item> items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    Item front() const noexcept { return items_.front(); }
    Item back() const noexcept { return items_.back(); }
    Item operator[](std::size_t i) const noexcept { return items_[i]; }

    bool contains(const Itemset& other) const;
    std::size_t union_size(const Itemset& other) const;

    /// Lexicographic over the item lists.
    friend auto operator<=>(const Itemset&, const Itemset&) = default;
    friend bool operator==(const Itemset&, const Itemset&) = default;

    std::string to_string() const;

private:
    std::vector<Item> items_;
};

/// Orders by size first, then lexicographically.
struct SizeLexLess {
    bool operator()(const Itemset& a, const Itemset& b) const {
        if (a.size() != b.size()) {
            return a.size() < b.size();
        }
        return a < b;
    }
};

struct ItemsetHash {
    std::size_t operator()(const Itemset& s) const noexcept;
};

/// Ordered list of distinct itemsets. The order fixes the coordinates of every
/// frequency vector and covariance matrix built over the family.
class ItemsetFamily {
public:
    ItemsetFamily() = default;
    /// Throws ValidationError on duplicate members.
    explicit ItemsetFamily(std::vector<Itemset> itemsets);

    std::size_t size() const noexcept { return itemsets_.size(); }
    bool empty() const noexcept { return itemsets_.empty(); }
    const Itemset& operator[](std::size_t i) const noexcept { return itemsets_[i]; }
    auto begin() const noexcept { return itemsets_.begin(); }
    auto end() const noexcept { return itemsets_.end(); }
    const std::vector<Itemset>& itemsets() const noexcept { return itemsets_; }

    std::optional<std::size_t> index_of(const Itemset& s) const;
    bool contains(const Itemset& s) const { return index_of(s).has_value(); }

    /// Cached at construction.
    bool antimonotonic() const noexcept { return antimonotonic_; }

    /// Largest item index + 1 over all members (0 for an empty family).
    std::size_t min_dimension() const noexcept { return min_dimension_; }

    /// Order-sensitive content hash; two families with the same members in a
    /// different order are different coordinate systems.
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }

    friend bool operator==(const ItemsetFamily& a, const ItemsetFamily& b) {
        return a.itemsets_ == b.itemsets_;
    }

private:
    std::vector<Itemset> itemsets_;
    std::unordered_map<Itemset, std::size_t, ItemsetHash> index_;
    bool antimonotonic_ = true;
    std::size_t min_dimension_ = 0;
    std::uint64_t fingerprint_ = 0;
};

/// Text serialization: one itemset per line, item IDs space separated.
/// Blank lines and '#' comments (whole-line or trailing) are ignored.
ItemsetFamily read_family(std::istream& in);
ItemsetFamily read_family_file(const std::string& path);

/// Writes one itemset per line. If `comments` is nonempty it must have one
/// entry per itemset; each is appended as a trailing "# ..." comment.
void write_family(std::ostream& out, const ItemsetFamily& family,
                  std::span<const std::string> comments = {});

}  // namespace cmdist
