#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rtstat/alphabet.hpp"
#include "rtstat/errors.hpp"
#include "rtstat/process_model.hpp"

namespace rtstat {

/// Overlapping return time of the length-n prefix:
/// T_n = min{ t >= 1 : Z_1^n = Z_{t+1}^{t+n} }. Matches may overlap the
/// prefix itself.
struct OverlapReturn {
    std::size_t n = 0;
    std::uint64_t value = 0;
    bool censored = false;
    std::uint64_t horizon_used = 0;
};

/// KMP scan for the first recurrence of the prefix. Linear in the scanned
/// length; only shifts t <= horizon with t + n <= seq length are testable.
inline OverlapReturn overlapping_return_time(const SymbolSequence& seq, std::size_t n,
                                             std::uint64_t horizon) {
    if (n < 1 || n > seq.size()) throw DomainError("prefix length out of range");
    if (horizon < 1) throw DomainError("horizon must be at least 1");

    OverlapReturn out;
    out.n = n;
    const std::uint64_t testable =
        seq.size() > n ? static_cast<std::uint64_t>(seq.size() - n) : 0;
    out.horizon_used = std::min<std::uint64_t>(horizon, testable);
    out.censored = true;
    if (out.horizon_used == 0) return out;

    // Failure function of the prefix.
    std::vector<std::size_t> fail(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t j = fail[i - 1];
        while (j > 0 && seq[i] != seq[j]) j = fail[j - 1];
        if (seq[i] == seq[j]) ++j;
        fail[i] = j;
    }

    // Scan positions 1.. for a full match; a match starting at position
    // start (0-based) is the shift t = start.
    std::size_t j = 0;
    const std::size_t limit = n + static_cast<std::size_t>(out.horizon_used);
    for (std::size_t i = 1; i < limit; ++i) {
        while (j > 0 && seq[i] != seq[j]) j = fail[j - 1];
        if (seq[i] == seq[j]) ++j;
        if (j == n) {
            const std::size_t start = i + 1 - n;
            out.value = static_cast<std::uint64_t>(start);
            out.censored = false;
            return out;
        }
    }
    return out;
}

/// Wyner's normalized overlapping return statistic
///   (log2 T_n - n H) / sqrt(n V),
/// where V is the information variance of the model. Undefined for
/// equidistributed sources (V = 0).
inline double wyner_statistic(const SymbolSequence& seq, std::size_t n,
                              const ProcessModel& model) {
    const double v = model.information_variance_bits2();
    if (v < 1e-15)
        throw ZeroVarianceError("information variance is zero; the statistic is undefined");
    const OverlapReturn t = overlapping_return_time(seq, n, seq.size());
    if (t.censored)
        throw CensoredDataError("prefix did not recur within the available data", {1});
    const double nd = static_cast<double>(n);
    return (std::log2(static_cast<double>(t.value)) - nd * model.entropy_bits()) /
           std::sqrt(nd * v);
}

/// Prefix-uniqueness lengths: R_{i,n} is the length of the shortest string
/// starting at i that differs from the equal-length strings starting at
/// every other j in 1..n. Strings may run past position n into whatever
/// data is available.
struct PrefixLengths {
    std::size_t n = 0;
    std::vector<std::uint64_t> r;  // r[i-1] = R_{i,n}
};

/// Pairwise longest-common-prefix maxima, O(n^2) with expected O(1) inner
/// compares on non-repetitive data. Throws UnresolvedError when two strings
/// still agree at the end of the data.
inline PrefixLengths grassberger_lengths(const SymbolSequence& seq, std::size_t n) {
    if (n < 2 || n > seq.size()) throw DomainError("need 2 <= n <= sequence length");
    const std::size_t len = seq.size();
    std::vector<std::uint64_t> best(n, 0);  // longest common prefix seen per start

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t l = 0;
            while (i + l < len && j + l < len && seq[i + l] == seq[j + l]) ++l;
            if (i + l >= len || j + l >= len)
                throw UnresolvedError("strings at " + std::to_string(i + 1) + " and " +
                                          std::to_string(j + 1) +
                                          " agree to the end of the data",
                                      i + 1);
            best[i] = std::max<std::uint64_t>(best[i], l);
            best[j] = std::max<std::uint64_t>(best[j], l);
        }
    }

    PrefixLengths out;
    out.n = n;
    out.r.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.r[i] = best[i] + 1;
    return out;
}

/// Prefix-based entropy estimate in bits per symbol:
///   (1/n) sum_i log2(n) / R_{i,n}.
inline double grassberger_entropy(const SymbolSequence& seq, std::size_t n) {
    const PrefixLengths pl = grassberger_lengths(seq, n);
    const double log2n = std::log2(static_cast<double>(n));
    double acc = 0.0;
    for (std::uint64_t r : pl.r) acc += log2n / static_cast<double>(r);
    return acc / static_cast<double>(n);
}

}  // namespace rtstat
