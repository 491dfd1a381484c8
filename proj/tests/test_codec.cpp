#include <doctest.h>

#include <set>

#include "csem/codec.hpp"
#include "helpers.hpp"

using namespace csem;

namespace {

CompressedMatrix worked_compressed() {
    return encode(testutil::worked_remainder(), make_cse_set({testutil::worked_term()}));
}

} // namespace

TEST_CASE("encode produces the six arrays of the worked example") {
    const CompressedMatrix c = worked_compressed();
    CHECK(c.rows == 4);
    CHECK(c.cols == 4);
    CHECK(c.weights == std::vector<Weight>{2, 3, 1, 5});
    CHECK(c.wp == std::vector<std::uint32_t>{1, 2, 3, 4});
    CHECK(c.cse == std::vector<std::uint32_t>{0, 2, 0, 1});
    CHECK(c.cp == std::vector<std::uint32_t>{4});
    CHECK(c.singles == std::vector<std::uint32_t>{1, 3, 0, 3});
    CHECK(c.sp == std::vector<std::uint32_t>{0, 0, 2, 4});
}

TEST_CASE("decode inverts encode on the worked example") {
    CHECK(decode(worked_compressed()) == testutil::worked_matrix());
}

TEST_CASE("empty matrix encodes to pointer arrays only") {
    const CompressedMatrix c = encode(DenseMatrix(3, 5), {});
    CHECK(c.weights.empty());
    CHECK(c.cse.empty());
    CHECK(c.cp.empty());
    CHECK(c.singles.empty());
    CHECK(c.wp == std::vector<std::uint32_t>{0, 0, 0, 0, 0});
    CHECK(c.sp == std::vector<std::uint32_t>{0, 0, 0});
    CHECK(decode(c) == DenseMatrix(3, 5));
}

TEST_CASE("encode/decode roundtrip without terms") {
    Rng rng(10);
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const std::uint32_t rows = 1 + rng.below(16);
        const std::uint32_t cols = 1 + rng.below(16);
        const DenseMatrix m =
            testutil::random_small_matrix(rng, rows, cols, rng.below(101), 6);
        CHECK(decode(encode(m, {})) == m);
    }
}

TEST_CASE("encode validates consistency of set and remainder") {
    // the term cell is still nonzero in the remainder
    CHECK_THROWS_AS(encode(testutil::worked_matrix(), make_cse_set({testutil::worked_term()})),
                    ConsistencyError);

    // two terms claiming one cell
    CseTerm t1 = testutil::worked_term();
    CseTerm t2 = testutil::worked_term();
    t2.col_j = 3;
    CHECK_THROWS_AS(encode(DenseMatrix(4, 4), make_cse_set({t1, t2})), ConsistencyError);

    // malformed terms
    CseTerm zero_w = testutil::worked_term();
    zero_w.w_i = 0;
    CHECK_THROWS_AS(encode(testutil::worked_remainder(), make_cse_set({zero_w})),
                    ConsistencyError);
    CseTerm one_row = testutil::worked_term();
    one_row.occ_rows = {0};
    CHECK_THROWS_AS(encode(testutil::worked_remainder(), make_cse_set({one_row})),
                    ConsistencyError);
}

TEST_CASE("storage_report of the worked example") {
    const StorageReport rep = storage_report(worked_compressed(), 8);
    CHECK(rep.s_weights == 8);
    CHECK(rep.s_cse == 5);
    CHECK(rep.s_singles == 8);
    CHECK(rep.s_total == 21);
    CHECK(rep.s_csr == 20);  // CSR wins on this tiny dense-ish matrix
    CHECK(rep.gain == 1);
    CHECK(rep.n_cse == 1);
}

TEST_CASE("storage identities hold on random extractions") {
    Rng rng(20);
    for (std::uint64_t trial = 0; trial < 25; ++trial) {
        const std::uint32_t rows = 4 + rng.below(14);
        const std::uint32_t cols = 4 + rng.below(10);
        const DenseMatrix m = testutil::random_small_matrix(rng, rows, cols, 70, 2);
        const std::uint64_t e = m.nonzero_count();
        const ExtractResult res = extract(m, {5, 25, trial + 7, false});
        const CompressedMatrix c = encode(res.remainder, res.commons);
        const StorageReport rep = storage_report(c, e);

        CHECK(rep.gain == res.commons.total_gain);
        CHECK(rep.n_cse == res.commons.terms.size());
        CHECK(rep.s_cse == rep.gain + 4 * static_cast<std::uint64_t>(rep.n_cse));
        CHECK(rep.s_singles == e - 2 * (rep.gain + rep.n_cse) + rows);
        CHECK(rep.s_total == rep.s_weights + rep.s_cse + rep.s_singles);

        const std::set<Weight> alphabet = [&] {
            std::set<Weight> s;
            for (const Weight w : m.entries()) {
                if (w != 0) {
                    s.insert(w);
                }
            }
            return s;
        }();
        const std::uint64_t u = alphabet.size();
        CHECK(rep.s_weights <= static_cast<std::uint64_t>(cols) * (u + 1));
        CHECK(rep.s_total <= static_cast<std::uint64_t>(cols) * (u + 1) + e + rows +
                                 2 * static_cast<std::uint64_t>(rep.n_cse) - rep.gain);
    }
}

TEST_CASE("crossover_predicate matches the analytic threshold") {
    // exact equality is not a crossover
    CHECK_FALSE(crossover_predicate(0.1, 99, 1000, 1000, 0, 0));
    CHECK(crossover_predicate(0.5, 2, 1000, 1000, 0, 0));
    CHECK_THROWS_AS(crossover_predicate(0.5, 2, 0, 1000, 0, 0), DegenerateInputError);
}

TEST_CASE("crossover_predicate implies measured s_total < s_csr on full-alphabet columns") {
    // every column carries the whole alphabet, the worst case for the
    // weights pair, so the bound is tight and the predicate is exact
    Rng rng(30);
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const std::uint32_t rows = 10 + rng.below(20);
        const std::uint32_t cols = 4 + rng.below(8);
        const std::uint32_t u = 1 + rng.below(3);
        DenseMatrix m(rows, cols);
        for (std::uint32_t c = 0; c < cols; ++c) {
            // all u values once, then extra random fill below them
            for (std::uint32_t k = 0; k < u; ++k) {
                m.set(k, c, static_cast<Weight>(k + 1));
            }
            for (std::uint32_t r = u; r < rows; ++r) {
                if (rng.below(100) < 60) {
                    m.set(r, c, static_cast<Weight>(1 + rng.below(u)));
                }
            }
        }
        const std::uint64_t e = m.nonzero_count();
        const double alpha = nonzero_ratio(m);

        const ExtractResult res = extract(m, {4, 20, trial, false});
        const CompressedMatrix c = encode(res.remainder, res.commons);
        const StorageReport rep = storage_report(c, e);
        REQUIRE(rep.s_weights == static_cast<std::uint64_t>(cols) * (u + 1));
        if (crossover_predicate(alpha, u, rows, cols, rep.n_cse, rep.gain)) {
            CHECK(rep.s_total < rep.s_csr);
        }
    }
}

TEST_CASE("container layout is frozen byte for byte") {
    // magic, u16 version, u32 rows/cols, then six length-prefixed arrays,
    // all little-endian; hand-assembled for the worked example
    const char* hex =
        "4353454d" "0100" "04000000" "04000000"                              // CSEM v1 4x4
        "04000000" "02000000" "03000000" "01000000" "05000000"               // weights
        "04000000" "01000000" "02000000" "03000000" "04000000"               // wp
        "04000000" "00000000" "02000000" "00000000" "01000000"               // cse
        "01000000" "04000000"                                                // cp
        "04000000" "01000000" "03000000" "00000000" "03000000"               // singles
        "04000000" "00000000" "00000000" "02000000" "04000000";              // sp
    std::vector<std::uint8_t> expected;
    for (const char* p = hex; p[0] != '\0'; p += 2) {
        const auto nibble = [](char c) {
            return static_cast<std::uint8_t>(c <= '9' ? c - '0' : c - 'a' + 10);
        };
        expected.push_back(static_cast<std::uint8_t>((nibble(p[0]) << 4) | nibble(p[1])));
    }
    CHECK(serialize_bytes(worked_compressed()) == expected);
}

TEST_CASE("serialize/deserialize roundtrips bit-exactly") {
    for (const CompressedMatrix& c : {worked_compressed(), encode(DenseMatrix(2, 2), {})}) {
        const std::vector<std::uint8_t> bytes = serialize_bytes(c);
        const CompressedMatrix back = deserialize_bytes(bytes);
        CHECK(back == c);
        CHECK(serialize_bytes(back) == bytes);
    }
}

TEST_CASE("deserialize rejects corrupted containers") {
    const std::vector<std::uint8_t> bytes = serialize_bytes(worked_compressed());

    SUBCASE("bad magic") {
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(deserialize_bytes(bad), FormatError);
    }
    SUBCASE("unsupported version") {
        auto bad = bytes;
        bad[4] = 9;
        CHECK_THROWS_AS(deserialize_bytes(bad), FormatError);
    }
    SUBCASE("truncation at every prefix") {
        for (std::size_t cut = 0; cut < bytes.size(); cut += 3) {
            const std::vector<std::uint8_t> prefix(bytes.begin(), bytes.begin() + cut);
            CHECK_THROWS_AS(deserialize_bytes(prefix), FormatError);
        }
    }
    SUBCASE("corrupted length field claims more data than present") {
        auto bad = bytes;
        bad[14] = 0xff;  // weights count, low byte
        CHECK_THROWS_AS(deserialize_bytes(bad), FormatError);
    }
}

TEST_CASE("deserialize re-validates structural invariants") {
    SUBCASE("weight index out of range") {
        CompressedMatrix c = worked_compressed();
        c.cse[0] = 99;
        CHECK_THROWS_AS(deserialize_bytes(serialize_bytes(c)), FormatError);
    }
    SUBCASE("record shorter than four entries") {
        CompressedMatrix c = worked_compressed();
        c.cse = {0, 2, 0};
        c.cp = {3};
        CHECK_THROWS_AS(deserialize_bytes(serialize_bytes(c)), FormatError);
    }
    SUBCASE("record referencing one column twice") {
        CompressedMatrix c = worked_compressed();
        c.cse[1] = 0;
        CHECK_THROWS_AS(deserialize_bytes(serialize_bytes(c)), FormatError);
    }
    SUBCASE("non-monotonic weight pointers") {
        CompressedMatrix c = worked_compressed();
        c.wp = {3, 2, 3, 4};
        CHECK_THROWS_AS(deserialize_bytes(serialize_bytes(c)), FormatError);
    }
    SUBCASE("zero weight") {
        CompressedMatrix c = worked_compressed();
        c.weights[0] = 0;
        CHECK_THROWS_AS(deserialize_bytes(serialize_bytes(c)), FormatError);
    }
}

TEST_CASE("deserialize survives arbitrary corruption") {
    // mutated or random streams must either load a self-consistent object
    // or throw a library error; anything else is a parser bug
    const std::vector<std::uint8_t> valid = serialize_bytes(worked_compressed());
    Rng rng(0xF0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::uint8_t> blob;
        if (trial % 3 == 0) {
            blob.resize(rng.below(160));
            for (auto& b : blob) {
                b = static_cast<std::uint8_t>(rng.below(256));
            }
        } else {
            blob = valid;
            const std::uint32_t flips = 1 + rng.below(4);
            for (std::uint32_t k = 0; k < flips; ++k) {
                blob[rng.below(static_cast<std::uint32_t>(blob.size()))] =
                    static_cast<std::uint8_t>(rng.below(256));
            }
        }
        try {
            const CompressedMatrix c = deserialize_bytes(blob);
            CHECK_NOTHROW(validate(c));
        } catch (const Error&) {
            // expected for most corruptions
        }
    }
}

TEST_CASE("decode rejects overlapping coverage") {
    CompressedMatrix c = worked_compressed();
    // make the single at row 2 collide with itself duplicated
    c.singles = {1, 1, 0, 3};
    CHECK_THROWS_AS(decode(c), ConsistencyError);
}

TEST_CASE("json export mirrors the arrays") {
    const CompressedMatrix c = worked_compressed();
    const nlohmann::json j = to_json(c);
    CHECK(j["rows"] == 4);
    CHECK(j["cols"] == 4);
    CHECK(j["weights"] == nlohmann::json({2, 3, 1, 5}));
    CHECK(j["wp"] == nlohmann::json({1, 2, 3, 4}));
    CHECK(j["cse"] == nlohmann::json({0, 2, 0, 1}));
    CHECK(j["cp"] == nlohmann::json({4}));
    CHECK(j["singles"] == nlohmann::json({1, 3, 0, 3}));
    CHECK(j["sp"] == nlohmann::json({0, 0, 2, 4}));
}

TEST_CASE("full pipeline roundtrip on random matrices") {
    Rng rng(40);
    for (std::uint64_t trial = 0; trial < 30; ++trial) {
        const std::uint32_t rows = 2 + rng.below(20);
        const std::uint32_t cols = 2 + rng.below(16);
        const DenseMatrix m = testutil::random_small_matrix(rng, rows, cols, 60, 3);
        const ExtractResult res = extract(m, {6, 25, trial * 3 + 11, false});
        const CompressedMatrix c = encode(res.remainder, res.commons);
        CHECK(decode(c) == m);
        CHECK(deserialize_bytes(serialize_bytes(c)) == c);
    }
}
