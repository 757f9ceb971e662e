#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rtstat/block.hpp"
#include "rtstat/errors.hpp"
#include "rtstat/rng.hpp"

namespace rtstat {

/// One resolved (or censored) return time. Indices are 1-based, matching the
/// definitions; a value t means the match was found t blocks later.
struct ReturnEntry {
    std::size_t index = 0;
    std::uint64_t value = 0;
    bool censored = false;
    std::uint64_t horizon_used = 0;
};

namespace detail {

struct U128Hash {
    std::size_t operator()(unsigned __int128 v) const {
        return static_cast<std::size_t>(mix_u128(v));
    }
};

template <class K>
struct KeyHash : std::hash<K> {};
template <>
struct KeyHash<unsigned __int128> : U128Hash {};

inline void check_k(std::size_t k, std::size_t block_count) {
    if (k < 1 || k > block_count)
        throw DomainError("k out of range: k=" + std::to_string(k) + ", blocks=" +
                          std::to_string(block_count));
}

/// Single forward pass resolving S_j = min{t >= 1 : keys[j-1+t] == keys[j-1]}
/// for j = 1..k. Each position is visited exactly once, so the scan is
/// linear in the number of blocks.
template <class K>
std::vector<ReturnEntry> return_scan(const std::vector<K>& keys, std::size_t k,
                                     std::uint64_t horizon) {
    const std::size_t n = keys.size();
    struct Pending {
        std::vector<std::size_t> sources;  // ascending 0-based indices
        std::size_t cursor = 0;
    };
    std::unordered_map<K, Pending, KeyHash<K>> pending;
    pending.reserve(std::min<std::size_t>(k * 2, 1u << 20));

    std::vector<ReturnEntry> entries(k);
    for (std::size_t j0 = 0; j0 < k; ++j0) {
        entries[j0].index = j0 + 1;
        entries[j0].horizon_used = std::min<std::uint64_t>(horizon, n - (j0 + 1));
        entries[j0].censored = true;
        pending[keys[j0]].sources.push_back(j0);
    }

    for (std::size_t t0 = 1; t0 < n; ++t0) {
        auto it = pending.find(keys[t0]);
        if (it == pending.end()) continue;
        Pending& p = it->second;
        while (p.cursor < p.sources.size() && p.sources[p.cursor] < t0) {
            const std::size_t j0 = p.sources[p.cursor];
            const std::uint64_t s = t0 - j0;
            if (s <= horizon) {
                entries[j0].value = s;
                entries[j0].censored = false;
            }
            ++p.cursor;
        }
    }
    return entries;
}

template <class K>
std::vector<std::size_t> early_match_scan(const std::vector<K>& keys, std::size_t k) {
    std::unordered_set<K, KeyHash<K>> seen;
    seen.reserve(k * 2);
    std::vector<std::size_t> d;
    for (std::size_t j0 = k; j0-- > 0;) {
        if (seen.insert(keys[j0]).second) d.push_back(j0 + 1);
        // a repeated key means j0 sees an early match, so it stays out of D
    }
    std::reverse(d.begin(), d.end());
    return d;
}

}  // namespace detail

/// Return times S_j of the first k blocks (Definition: S_j is the least
/// t >= 1 with X_{j+t} = X_j). Entries are censored when no match exists
/// within min(horizon, available blocks).
class ReturnTimeSet {
public:
    ReturnTimeSet(std::size_t k, std::vector<ReturnEntry> entries)
        : k_(k), entries_(std::move(entries)) {}

    std::size_t k() const { return k_; }
    const std::vector<ReturnEntry>& entries() const { return entries_; }

    /// 1-based access.
    const ReturnEntry& at(std::size_t j) const {
        if (j < 1 || j > k_) throw DomainError("index out of range");
        return entries_[j - 1];
    }

    bool all_uncensored() const {
        for (const auto& e : entries_)
            if (e.censored) return false;
        return true;
    }

    std::vector<std::size_t> censored_indices() const {
        std::vector<std::size_t> out;
        for (const auto& e : entries_)
            if (e.censored) out.push_back(e.index);
        return out;
    }

private:
    std::size_t k_;
    std::vector<ReturnEntry> entries_;
};

/// Computes the return times of the first k blocks, scanning at most
/// `horizon` blocks past each source. Runs one linear pass over the block
/// sequence with a hash index, never a per-source rescan.
inline ReturnTimeSet return_times(const BlockSequence& blocks, std::size_t k,
                                  std::uint64_t horizon) {
    detail::check_k(k, blocks.block_count());
    if (horizon < 1) throw DomainError("horizon must be at least 1");
    auto entries = blocks.packed() ? detail::return_scan(blocks.codes(), k, horizon)
                                   : detail::return_scan(blocks.wide_keys(), k, horizon);
    return ReturnTimeSet(k, std::move(entries));
}

/// The set D of positions among 1..k that do not see an early match:
/// j is in D iff block j differs from every block in (j, k]. Index k is
/// always a member. Returned ascending, 1-based.
inline std::vector<std::size_t> early_match_set(const BlockSequence& blocks, std::size_t k) {
    detail::check_k(k, blocks.block_count());
    return blocks.packed() ? detail::early_match_scan(blocks.codes(), k)
                           : detail::early_match_scan(blocks.wide_keys(), k);
}

/// The modified construction: targets b_j equal the block values for j in D
/// and are drawn uniformly without replacement from the unused part of the
/// key space otherwise; R_j is the wait after block k for b_j to appear.
class ModifiedReturnSet {
public:
    ModifiedReturnSet(std::size_t k, std::vector<std::size_t> d_indices,
                      std::vector<BlockKey> assigned, std::vector<ReturnEntry> entries,
                      std::uint64_t rng_seed)
        : k_(k),
          d_indices_(std::move(d_indices)),
          assigned_(std::move(assigned)),
          entries_(std::move(entries)),
          rng_seed_(rng_seed) {
        in_d_.assign(k_, 0);
        for (std::size_t j : d_indices_) in_d_[j - 1] = 1;
    }

    std::size_t k() const { return k_; }
    std::uint64_t rng_seed() const { return rng_seed_; }
    const std::vector<std::size_t>& d_indices() const { return d_indices_; }
    bool in_d(std::size_t j) const { return in_d_.at(j - 1) != 0; }
    const BlockKey& assigned(std::size_t j) const { return assigned_.at(j - 1); }
    const std::vector<ReturnEntry>& entries() const { return entries_; }

    const ReturnEntry& at(std::size_t j) const {
        if (j < 1 || j > k_) throw DomainError("index out of range");
        return entries_[j - 1];
    }

    bool all_uncensored() const {
        for (const auto& e : entries_)
            if (e.censored) return false;
        return true;
    }

private:
    std::size_t k_;
    std::vector<std::size_t> d_indices_;
    std::vector<char> in_d_;
    std::vector<BlockKey> assigned_;
    std::vector<ReturnEntry> entries_;
    std::uint64_t rng_seed_;
};

namespace detail {

template <class K, class DrawUnused, class MakeKey>
ModifiedReturnSet modified_scan(const std::vector<K>& keys, std::size_t k,
                                std::uint64_t horizon, std::uint64_t seed,
                                DrawUnused&& draw_unused, MakeKey&& make_key) {
    const std::size_t n = keys.size();
    auto d_indices = early_match_scan(keys, k);

    std::vector<char> in_d(k, 0);
    for (std::size_t j : d_indices) in_d[j - 1] = 1;

    std::unordered_set<K, KeyHash<K>> used;
    used.reserve(k * 2);
    std::vector<K> targets(k);
    for (std::size_t j0 = 0; j0 < k; ++j0) {
        if (in_d[j0]) {
            targets[j0] = keys[j0];
            used.insert(keys[j0]);
        }
    }
    Rng rng(seed);
    for (std::size_t j0 = 0; j0 < k; ++j0) {
        if (!in_d[j0]) {
            targets[j0] = draw_unused(rng, used);
            used.insert(targets[j0]);
        }
    }

    // First appearance after block k of every key, one linear pass.
    std::unordered_map<K, std::uint64_t, KeyHash<K>> first_hit;
    first_hit.reserve(std::min<std::size_t>(n - k + 1, 1u << 20));
    const std::uint64_t window = std::min<std::uint64_t>(horizon, n - k);
    for (std::uint64_t t = 1; t <= window; ++t) first_hit.emplace(keys[k - 1 + t], t);

    std::vector<ReturnEntry> entries(k);
    std::vector<BlockKey> assigned;
    assigned.reserve(k);
    for (std::size_t j0 = 0; j0 < k; ++j0) {
        entries[j0].index = j0 + 1;
        entries[j0].horizon_used = window;
        auto it = first_hit.find(targets[j0]);
        if (it == first_hit.end()) {
            entries[j0].censored = true;
        } else {
            entries[j0].value = it->second;
        }
        assigned.push_back(make_key(targets[j0]));
    }
    return ModifiedReturnSet(k, std::move(d_indices), std::move(assigned), std::move(entries),
                             seed);
}

}  // namespace detail

/// Builds the set D, assigns targets b_1..b_k (drawing replacements for
/// early-matched positions in increasing index order, uniformly without
/// replacement from the unseen keys, seeded by `seed`), and resolves
/// R_j = min{t >= 1 : X_{k+t} = b_j} within the horizon.
inline ModifiedReturnSet modified_return_times(const BlockSequence& blocks, std::size_t k,
                                               std::uint64_t horizon, std::uint64_t seed) {
    detail::check_k(k, blocks.block_count());
    if (horizon < 1) throw DomainError("horizon must be at least 1");

    if (blocks.packed()) {
        const unsigned __int128 space = *blocks.key_space();
        if (space < k)
            throw AlphabetTooSmallError("key space smaller than k: cannot assign " +
                                        std::to_string(k) + " distinct targets");
        auto draw = [space, k](Rng& rng, const auto& used) -> unsigned __int128 {
            if (space < static_cast<unsigned __int128>(2) * k) {
                // Small key space: enumerate the complement for an always
                // terminating draw.
                std::vector<unsigned __int128> free_keys;
                for (unsigned __int128 c = 0; c < space; ++c)
                    if (!used.count(c)) free_keys.push_back(c);
                return free_keys[static_cast<std::size_t>(rng.below(free_keys.size()))];
            }
            for (;;) {
                unsigned __int128 c = rng.below_u128(space);
                if (!used.count(c)) return c;
            }
        };
        auto make = [](unsigned __int128 c) { return BlockKey::from_code(c); };
        return detail::modified_scan(blocks.codes(), k, horizon, seed, draw, make);
    }

    const std::size_t ell = blocks.block_length();
    const std::uint32_t a = blocks.alphabet_size();
    auto draw = [ell, a](Rng& rng, const auto& used) -> std::string {
        // A^ell exceeds 2^128 here, so rejection terminates immediately in
        // practice; a uniform string of ell symbols is uniform on the space.
        for (;;) {
            std::string s(ell, '\0');
            for (std::size_t i = 0; i < ell; ++i)
                s[i] = static_cast<char>(static_cast<Symbol>(rng.below(a)));
            if (!used.count(s)) return s;
        }
    };
    auto make = [](const std::string& s) { return BlockKey::from_bytes(s); };
    return detail::modified_scan(blocks.wide_keys(), k, horizon, seed, draw, make);
}

}  // namespace rtstat
