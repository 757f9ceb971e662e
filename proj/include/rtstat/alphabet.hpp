#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rtstat/errors.hpp"

namespace rtstat {

using Symbol = std::uint8_t;

/// A finite alphabet of size A, 2 <= A <= 256. Symbols are the integers
/// 0..A-1. An optional symbol table maps external characters (e.g. '0'..'9'
/// in a digit file) to symbol values; it must be injective.
class Alphabet {
public:
    explicit Alphabet(std::uint32_t size) : size_(size) { validate(); }

    Alphabet(std::uint32_t size, std::map<char, Symbol> table)
        : size_(size), table_(std::move(table)) {
        validate();
        std::set<Symbol> seen;
        for (const auto& [ch, sym] : *table_) {
            (void)ch;
            if (sym >= size_) throw DomainError("symbol table maps outside the alphabet");
            if (!seen.insert(sym).second) throw DomainError("symbol table is not injective");
        }
    }

    std::uint32_t size() const { return size_; }

    bool has_table() const { return table_.has_value(); }

    /// Looks up an external character; nullopt when the character is not in
    /// the table (or no table is attached).
    std::optional<Symbol> lookup(char c) const {
        if (!table_) return std::nullopt;
        auto it = table_->find(c);
        if (it == table_->end()) return std::nullopt;
        return it->second;
    }

private:
    void validate() const {
        if (size_ < 2) throw DomainError("alphabet size must be at least 2");
        if (size_ > 256) throw DomainError("alphabet size above 256 is not supported");
    }

    std::uint32_t size_;
    std::optional<std::map<char, Symbol>> table_;
};

/// An immutable finite string over an Alphabet. Storage is one byte per
/// symbol; positions are 0-based.
class SymbolSequence {
public:
    SymbolSequence(Alphabet alphabet, std::vector<Symbol> symbols)
        : alphabet_(std::move(alphabet)), symbols_(std::move(symbols)) {
        for (Symbol s : symbols_) {
            if (s >= alphabet_.size()) throw DomainError("symbol outside the alphabet");
        }
    }

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t size() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }
    const std::vector<Symbol>& symbols() const { return symbols_; }

    /// The contiguous sub-sequence [first, first + count).
    SymbolSequence slice(std::size_t first, std::size_t count) const {
        if (first + count > symbols_.size()) throw DomainError("slice out of range");
        return SymbolSequence(alphabet_,
                              std::vector<Symbol>(symbols_.begin() + static_cast<std::ptrdiff_t>(first),
                                                  symbols_.begin() + static_cast<std::ptrdiff_t>(first + count)));
    }

private:
    Alphabet alphabet_;
    std::vector<Symbol> symbols_;
};

}  // namespace rtstat
