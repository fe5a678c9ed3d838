#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmdist/dataset.hpp"
#include "cmdist/itemset.hpp"
#include "cmdist/mahalanobis.hpp"

namespace cmdist {

/// Sorted symbol table; a symbol's attribute index is its sorted position.
class Alphabet {
public:
    /// Sorts and deduplicates. Ordering is bytewise, which for UTF-8 text is
    /// code point order.
    explicit Alphabet(std::vector<std::string> symbols);

    std::size_t size() const noexcept { return symbols_.size(); }
    const std::string& symbol(std::size_t i) const { return symbols_.at(i); }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }
    std::optional<Item> index_of(const std::string& symbol) const;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::vector<std::string> symbols_;
};

/// Union of the distinct tokens of all streams. Throws ValidationError if
/// there are none.
Alphabet build_alphabet(std::span<const std::vector<std::string>> token_streams);

struct EventSequence {
    std::vector<Item> symbols;
    Alphabet alphabet;
};

/// Whitespace-separated tokens; lines whose first non-blank character is '#'
/// are skipped.
std::vector<std::string> read_tokens(std::istream& in);
std::vector<std::string> read_tokens_file(const std::string& path);

/// Encodes tokens against an alphabet; throws ValidationError on unknown symbols.
EventSequence encode(std::span<const std::string> tokens, const Alphabet& alphabet);

/// One row per full window of length k (stride 1); bit j is set iff symbol j
/// occurs in the window.
BinaryDataset windows_to_dataset(const EventSequence& s, std::size_t k, std::string name = {});

/// CM distance between the window data sets of two sequences.
double sequence_cm_distance(const EventSequence& s1, const EventSequence& s2, std::size_t k, const ItemsetFamily& f,
                            SolverOptions opts = {});

}  // namespace cmdist
