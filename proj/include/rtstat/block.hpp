#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rtstat/alphabet.hpp"
#include "rtstat/errors.hpp"

namespace rtstat {

namespace detail {

inline std::uint64_t mix_u128(unsigned __int128 v) {
    std::uint64_t lo = static_cast<std::uint64_t>(v);
    std::uint64_t hi = static_cast<std::uint64_t>(v >> 64);
    std::uint64_t z = lo ^ (hi * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// A^ell, or nullopt when the product exceeds the 128-bit range.
inline std::optional<unsigned __int128> checked_pow(std::uint32_t base, std::size_t exp) {
    unsigned __int128 r = 1;
    const unsigned __int128 limit = ~static_cast<unsigned __int128>(0);
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > limit / base) return std::nullopt;
        r *= base;
    }
    return r;
}

}  // namespace detail

/// Canonical identity of one ell-block. Blocks whose symbol strings are
/// identical compare equal, and only those. Small alphabets use the base-A
/// integer code; key spaces wider than 128 bits fall back to the raw symbol
/// bytes.
class BlockKey {
public:
    static BlockKey from_code(unsigned __int128 code) {
        BlockKey k;
        k.packed_ = true;
        k.code_ = code;
        return k;
    }

    static BlockKey from_bytes(std::string bytes) {
        BlockKey k;
        k.packed_ = false;
        k.bytes_ = std::move(bytes);
        return k;
    }

    bool is_packed() const { return packed_; }
    unsigned __int128 code() const { return code_; }
    const std::string& bytes() const { return bytes_; }

    friend bool operator==(const BlockKey& a, const BlockKey& b) {
        if (a.packed_ != b.packed_) return false;
        return a.packed_ ? a.code_ == b.code_ : a.bytes_ == b.bytes_;
    }
    friend bool operator!=(const BlockKey& a, const BlockKey& b) { return !(a == b); }

    struct Hash {
        std::size_t operator()(const BlockKey& k) const {
            if (k.packed_) return static_cast<std::size_t>(detail::mix_u128(k.code_));
            return std::hash<std::string>()(k.bytes_);
        }
    };

private:
    BlockKey() = default;
    bool packed_ = true;
    unsigned __int128 code_ = 0;
    std::string bytes_;
};

/// The sequence of non-overlapping ell-blocks cut from a SymbolSequence.
/// Block i (0-based) covers source symbols [i*ell, (i+1)*ell); a trailing
/// remainder shorter than ell is discarded and reported.
class BlockSequence {
public:
    std::size_t block_count() const { return packed_ ? codes_.size() : wide_.size(); }
    std::size_t block_length() const { return block_length_; }
    std::uint32_t alphabet_size() const { return alphabet_size_; }
    std::size_t source_length() const { return source_length_; }
    std::size_t discarded_symbols() const { return source_length_ - block_count() * block_length_; }

    bool packed() const { return packed_; }

    /// Number of possible block values A^ell when it fits in 128 bits.
    std::optional<unsigned __int128> key_space() const { return key_space_; }

    unsigned __int128 code(std::size_t i) const { return codes_[i]; }
    const std::string& wide_key(std::size_t i) const { return wide_[i]; }
    const std::vector<unsigned __int128>& codes() const { return codes_; }
    const std::vector<std::string>& wide_keys() const { return wide_; }

    BlockKey key(std::size_t i) const {
        return packed_ ? BlockKey::from_code(codes_[i]) : BlockKey::from_bytes(wide_[i]);
    }

    std::vector<Symbol> decode_block(std::size_t i) const {
        std::vector<Symbol> out(block_length_);
        if (packed_) {
            unsigned __int128 c = codes_[i];
            for (std::size_t j = block_length_; j-- > 0;) {
                out[j] = static_cast<Symbol>(c % alphabet_size_);
                c /= alphabet_size_;
            }
        } else {
            const std::string& b = wide_[i];
            for (std::size_t j = 0; j < block_length_; ++j) out[j] = static_cast<Symbol>(b[j]);
        }
        return out;
    }

    /// The consumed prefix of the source: concatenation of all blocks.
    std::vector<Symbol> reconstruct() const {
        std::vector<Symbol> out;
        out.reserve(block_count() * block_length_);
        for (std::size_t i = 0; i < block_count(); ++i) {
            auto b = decode_block(i);
            out.insert(out.end(), b.begin(), b.end());
        }
        return out;
    }

    friend BlockSequence blockify(const SymbolSequence& seq, std::size_t block_length);

private:
    std::size_t block_length_ = 0;
    std::uint32_t alphabet_size_ = 0;
    std::size_t source_length_ = 0;
    bool packed_ = true;
    std::optional<unsigned __int128> key_space_;
    std::vector<unsigned __int128> codes_;
    std::vector<std::string> wide_;
};

/// Cuts a symbol sequence into floor(n/ell) non-overlapping ell-blocks.
/// Throws EmptyInputError when fewer than ell symbols are available.
inline BlockSequence blockify(const SymbolSequence& seq, std::size_t block_length) {
    if (block_length < 1) throw DomainError("block length must be at least 1");
    if (seq.size() < block_length)
        throw EmptyInputError("sequence shorter than one block (" + std::to_string(seq.size()) +
                              " symbols, block length " + std::to_string(block_length) + ")");

    BlockSequence bs;
    bs.block_length_ = block_length;
    bs.alphabet_size_ = seq.alphabet().size();
    bs.source_length_ = seq.size();
    bs.key_space_ = detail::checked_pow(bs.alphabet_size_, block_length);
    bs.packed_ = bs.key_space_.has_value();

    const std::size_t count = seq.size() / block_length;
    if (bs.packed_) {
        bs.codes_.reserve(count);
        const auto& sym = seq.symbols();
        for (std::size_t i = 0; i < count; ++i) {
            unsigned __int128 code = 0;
            const std::size_t base = i * block_length;
            for (std::size_t j = 0; j < block_length; ++j)
                code = code * bs.alphabet_size_ + sym[base + j];
            bs.codes_.push_back(code);
        }
    } else {
        bs.wide_.reserve(count);
        const auto& sym = seq.symbols();
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t base = i * block_length;
            bs.wide_.emplace_back(reinterpret_cast<const char*>(sym.data() + base), block_length);
        }
    }
    return bs;
}

}  // namespace rtstat
