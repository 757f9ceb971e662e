#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>

#include "test_helpers.hpp"

using namespace rtstat;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "rtstat_ingest_test_" + std::to_string(counter++) + ".tmp";
        std::ofstream out(path, std::ios::binary);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("digit parsing keeps digits and skips separators", "[ingest]") {
    const auto pi = parse_digit_buffer("3.14159", 10);
    CHECK(pi.seq.symbols() == std::vector<Symbol>{3, 1, 4, 1, 5, 9});
    CHECK(pi.skipped == 1);

    const auto bits = parse_digit_buffer("0110\n01", 2);
    CHECK(bits.seq.symbols() == std::vector<Symbol>{0, 1, 1, 0, 0, 1});

    try {
        parse_digit_buffer("31x4", 10);
        FAIL("expected BadCharacterError");
    } catch (const BadCharacterError& e) {
        CHECK(e.offset == 2);
        CHECK(e.byte == 'x');
    }

    // a decimal digit is not a binary digit
    CHECK_THROWS_AS(parse_digit_buffer("0120", 2), BadCharacterError);
    CHECK_THROWS_AS(parse_digit_buffer(" .\n", 10), EmptyFileError);
}

TEST_CASE("digit parsing is position-faithful", "[ingest]") {
    const auto r = parse_digit_buffer("3.1 4\t1\r\n5", 10, true);
    CHECK(r.seq.symbols() == std::vector<Symbol>{3, 1, 4, 1, 5});
    CHECK(r.offsets == std::vector<std::uint64_t>{0, 2, 4, 6, 9});
    CHECK(r.bytes_read == 10);

    // idempotence: reparsing the same buffer yields the same sequence
    const auto r2 = parse_digit_buffer("3.1 4\t1\r\n5", 10, true);
    CHECK(r.seq.symbols() == r2.seq.symbols());
    CHECK(r.offsets == r2.offsets);
}

TEST_CASE("digit files round-trip through the filesystem", "[ingest]") {
    TempFile f("2.718281828459045\n");
    DigitFileSpec spec;
    spec.path = f.path;
    spec.alphabet_size = 10;
    const auto parsed = parse_digit_file(spec);
    CHECK(parsed.seq.size() == 16);
    CHECK(parsed.seq[0] == 2);

    DigitFileSpec missing;
    missing.path = "definitely_not_here.txt";
    CHECK_THROWS_AS(parse_digit_file(missing), FileError);
}

TEST_CASE("segmentation counts and round trip", "[ingest]") {
    const auto model = ProcessModel::equidistributed(10);
    const auto seq = gen_iid(model, 2000, 11);

    const auto s1 = segment(seq, 400);
    CHECK(s1.segments.size() == 5);
    CHECK(s1.discarded == 0);

    const auto s2 = segment(seq, 300);
    CHECK(s2.segments.size() == 6);
    CHECK(s2.discarded == 200);

    const auto s3 = segment(seq, 4000);
    CHECK(s3.segments.empty());
    CHECK(s3.discarded == 2000);

    // concatenation of segments plus the discarded tail reconstructs the input
    std::vector<Symbol> glued;
    for (const auto& s : s2.segments)
        glued.insert(glued.end(), s.symbols().begin(), s.symbols().end());
    glued.insert(glued.end(), seq.symbols().end() - 200, seq.symbols().end());
    CHECK(glued == seq.symbols());
}

TEST_CASE("segment counts for the full-scale layout", "[ingest][slow]") {
    const auto seq = gen_iid(ProcessModel::equidistributed(10), 20000000, 1);
    const auto s = segment(seq, 400000);
    CHECK(s.segments.size() == 50);
    CHECK(s.discarded == 0);
}
