#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rtstat/alphabet.hpp"
#include "rtstat/errors.hpp"

namespace rtstat {

/// How to read a plain-text digit file. Exactly the characters '.', ' ',
/// TAB, CR and LF are skipped (so "3.14159..." keeps its leading digit);
/// any other byte outside the digit alphabet is an error with its offset.
struct DigitFileSpec {
    std::string path;
    std::uint32_t alphabet_size = 10;  // 10 for decimal files, 2 for binary
    bool record_offsets = false;       // keep a byte offset per symbol
};

struct ParsedDigits {
    SymbolSequence seq;
    std::vector<std::uint64_t> offsets;  // filled when record_offsets is set
    std::uint64_t bytes_read = 0;
    std::uint64_t skipped = 0;
};

namespace detail {

inline bool is_skippable(unsigned char c) {
    return c == '.' || c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

inline Alphabet digit_alphabet(std::uint32_t size) {
    if (size < 2 || size > 10) throw DomainError("digit alphabet size must be in 2..10");
    std::map<char, Symbol> table;
    for (std::uint32_t d = 0; d < size; ++d)
        table[static_cast<char>('0' + d)] = static_cast<Symbol>(d);
    return Alphabet(size, std::move(table));
}

}  // namespace detail

/// Parses the bytes of an in-memory buffer under the digit-file rules.
inline ParsedDigits parse_digit_buffer(const std::string& data, std::uint32_t alphabet_size,
                                       bool record_offsets = false) {
    const Alphabet alpha = detail::digit_alphabet(alphabet_size);
    std::vector<Symbol> symbols;
    symbols.reserve(data.size());
    std::vector<std::uint64_t> offsets;
    std::uint64_t skipped = 0;

    for (std::uint64_t i = 0; i < data.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(data[i]);
        if (detail::is_skippable(c)) {
            ++skipped;
            continue;
        }
        const auto sym = alpha.lookup(static_cast<char>(c));
        if (!sym) {
            static const char* hex = "0123456789abcdef";
            const std::string byte_hex{hex[c >> 4], hex[c & 0xf]};
            throw BadCharacterError(
                "unexpected byte 0x" + byte_hex + " at offset " + std::to_string(i), i, c);
        }
        symbols.push_back(*sym);
        if (record_offsets) offsets.push_back(i);
    }
    if (symbols.empty()) throw EmptyFileError("no digits found");

    return ParsedDigits{SymbolSequence(alpha, std::move(symbols)), std::move(offsets),
                        data.size(), skipped};
}

/// Reads and parses a digit file.
inline ParsedDigits parse_digit_file(const DigitFileSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw FileError("cannot open " + spec.path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw FileError("read failure on " + spec.path);
    return parse_digit_buffer(data, spec.alphabet_size, spec.record_offsets);
}

/// floor(n / segment_length) disjoint consecutive segments; the remainder
/// is discarded and reported.
struct Segmentation {
    std::vector<SymbolSequence> segments;
    std::size_t discarded = 0;
};

inline Segmentation segment(const SymbolSequence& seq, std::size_t segment_length) {
    if (segment_length < 1) throw DomainError("segment length must be at least 1");
    Segmentation out;
    const std::size_t count = seq.size() / segment_length;
    out.segments.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.segments.push_back(seq.slice(i * segment_length, segment_length));
    out.discarded = seq.size() - count * segment_length;
    return out;
}

}  // namespace rtstat
