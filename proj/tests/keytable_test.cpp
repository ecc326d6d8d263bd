#include "chordcodec/keytable.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

namespace chordcodec {
namespace {

    // All z-subsets of {1..n} in lexicographic order, by brute force.
    std::vector<std::vector<std::uint64_t>> lexicographic_subsets(std::uint64_t n, std::uint64_t z)
    {
        std::vector<std::vector<std::uint64_t>> out;
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            if (static_cast<std::uint64_t>(__builtin_popcountll(mask)) != z) {
                continue;
            }
            std::vector<std::uint64_t> s;
            for (std::uint64_t i = 0; i < n; ++i) {
                if (mask >> i & 1U) {
                    s.push_back(i + 1);
                }
            }
            out.push_back(std::move(s));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    BitBlock random_block(std::mt19937_64& rng, std::size_t n)
    {
        std::vector<std::uint8_t> bits(n);
        for (auto& b : bits) {
            b = static_cast<std::uint8_t>(rng() & 1U);
        }
        return BitBlock(std::move(bits));
    }

    TEST(Rank, WorkedBlockAgainstEnumeration)
    {
        const auto subsets = lexicographic_subsets(6, 4);
        ASSERT_EQ(subsets.size(), 15u);
        const std::vector<std::uint64_t> target = { 2, 4, 5, 6 };
        const auto where = std::find(subsets.begin(), subsets.end(), target) - subsets.begin();
        EXPECT_EQ(where, 13);
        EXPECT_EQ(rank(BitBlock::parse("010111")), (PairCode { 4, 13 }));
    }

    TEST(Rank, DegenerateBlocks)
    {
        EXPECT_EQ(rank(BitBlock::zeros(9)), (PairCode { 0, 0 }));
        EXPECT_EQ(rank(BitBlock::ones(9)), (PairCode { 9, 0 }));
        EXPECT_EQ(rank(BitBlock::ones(1)), (PairCode { 1, 0 }));
    }

    TEST(Rank, MatchesEnumerationOrderForSmallN)
    {
        for (std::uint64_t n = 1; n <= 10; ++n) {
            for (std::uint64_t z = 0; z <= n; ++z) {
                const auto subsets = lexicographic_subsets(n, z);
                for (std::size_t k = 0; k < subsets.size(); ++k) {
                    const auto block = BitBlock::from_positions(n, subsets[k]);
                    ASSERT_EQ(rank(block).index, k) << "N=" << n << " Z=" << z;
                }
            }
        }
    }

    TEST(Unrank, Examples)
    {
        EXPECT_EQ(unrank(6, 4, 13).to_string(), "010111");
        EXPECT_EQ(unrank(6, 4, 0).to_string(), "111100");
        EXPECT_EQ(unrank(6, 4, 14).to_string(), "001111");
        EXPECT_EQ(unrank(7, 0, 0), BitBlock::zeros(7));
        EXPECT_EQ(unrank(7, PairCode { 7, 0 }), BitBlock::ones(7));
    }

    TEST(Unrank, RejectsOutOfRange)
    {
        EXPECT_THROW(unrank(6, 4, 15), Error);
        EXPECT_THROW(unrank(6, 7, 0), Error);
        EXPECT_THROW(unrank(0, 0, 0), Error);
        EXPECT_THROW(unrank(6, 0, 1), Error);
    }

    TEST(Rank, BijectionExhaustive)
    {
        for (std::uint64_t n = 1; n <= 12; ++n) {
            EXPECT_TRUE(pair_roundtrip_check(n)) << "N=" << n;
        }
        EXPECT_THROW(pair_roundtrip_check(21), Error);
    }

    TEST(Rank, BijectionSampledWide)
    {
        std::mt19937_64 rng(99);
        for (std::size_t n : { 64u, 65u, 100u, 257u }) {
            for (int i = 0; i < 2000; ++i) {
                const auto block = random_block(rng, n);
                const auto code = rank(block);
                ASSERT_LT(code.index, binomial(n, code.ones));
                ASSERT_EQ(unrank(n, code), block) << "N=" << n;
            }
        }
    }

    TEST(Rank, WideAndNarrowPathsAgree)
    {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 3000; ++i) {
            const std::size_t n = 1 + rng() % 64;
            const auto block = random_block(rng, n);
            const auto narrow = detail::lex_rank<std::uint64_t>(block.bits(), block.popcount());
            const auto wide = detail::lex_rank<BigInt>(block.bits(), block.popcount());
            ASSERT_EQ(BigInt(narrow), wide);
        }
    }

    TEST(Rank, LexicographicOrderAtLargeN)
    {
        // consecutive ranks are consecutive subsets in lexicographic order
        std::mt19937_64 rng(11);
        const std::uint64_t n = 120;
        const std::uint64_t z = 60;
        const BigInt count = binomial(n, z);
        for (int i = 0; i < 200; ++i) {
            BigInt k = 0;
            for (int w = 0; w < 2; ++w) {
                k = (k << 64) | BigInt(rng());
            }
            k %= (count - 1);
            const auto a = unrank(n, z, k).positions();
            const auto b = unrank(n, z, BigInt(k + 1)).positions();
            EXPECT_TRUE(std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()));
        }
    }

    TEST(TableCount, SumOfBinomials)
    {
        EXPECT_EQ(table_count(6), 64);
        EXPECT_EQ(table_count(1), 2);
        EXPECT_EQ(table_count(20), 1048576);
        for (std::uint64_t n = 1; n <= 62; ++n) {
            EXPECT_EQ(table_count(n), BigInt(1) << n) << n;
        }
        EXPECT_EQ(table_count(200), BigInt(1) << 200);
        EXPECT_THROW(table_count(0), Error);
    }

    TEST(KeyTable, SixFourTable)
    {
        const auto table = build_key_table(6, 4);
        ASSERT_EQ(table.size(), 15u);
        const auto& row = table.rows()[13];
        EXPECT_EQ(row.positions, (std::vector<std::uint64_t> { 2, 4, 5, 6 }));
        EXPECT_EQ(row.r_value.to_decimal(9), "0.534074174");
        for (std::size_t k = 0; k < table.size(); ++k) {
            EXPECT_EQ(table.rows()[k].k, k);
        }
    }

    TEST(KeyTable, FullTableHasOneRow)
    {
        const auto table = build_key_table(6, 6);
        ASSERT_EQ(table.size(), 1u);
        EXPECT_EQ(table.rows()[0].r_value, Fixed::one(0));
        EXPECT_EQ(build_key_table(3, 0).rows()[0].r_value.to_decimal(9), "0.000000000");
    }

    TEST(KeyTable, RowsMatchEncodeOfUnrank)
    {
        for (std::uint64_t n = 1; n <= 14; ++n) {
            const auto projections = projection_table(n);
            for (std::uint64_t z = 0; z <= n; ++z) {
                const auto table = build_key_table(n, z);
                ASSERT_EQ(table.size(), binomial(n, z));
                for (const auto& row : table.rows()) {
                    const auto block = unrank(n, z, row.k);
                    ASSERT_EQ(encode(block, projections).r_sum, row.r_value) << n << "," << z << "," << row.k;
                    ASSERT_EQ(block.positions(), row.positions);
                }
            }
        }
    }

    TEST(KeyTable, ValuesAreNotMonotoneInRank)
    {
        const auto table = build_key_table(6, 4);
        bool decreasing_pair = false;
        bool increasing_pair = false;
        for (std::size_t k = 1; k < table.size(); ++k) {
            decreasing_pair |= table.rows()[k].r_value < table.rows()[k - 1].r_value;
            increasing_pair |= table.rows()[k].r_value > table.rows()[k - 1].r_value;
        }
        EXPECT_TRUE(decreasing_pair);
        EXPECT_TRUE(increasing_pair);
    }

    TEST(KeyTable, LookupReproducesRankOfDecode)
    {
        const auto table = build_key_table(9, 4);
        const auto projections = projection_table(9);
        const Fixed tol = default_tolerance(projections.precision());
        for (const auto& row : table.rows()) {
            const auto block = unrank(9, 4, row.k);
            const auto triple = encode(block, projections);
            try {
                const auto k = table.lookup(triple.r_sum, tol);
                EXPECT_EQ(k, rank(decode_bounded(triple, projections, tol)).index);
            } catch (const Error& e) {
                // (9, 4) contains coinciding sums; both routes must refuse them
                EXPECT_EQ(e.kind(), ErrorKind::AmbiguousMatch);
                EXPECT_THROW(decode_bounded(triple, projections, tol), Error);
            }
        }
        const auto six_four = build_key_table(6, 4);
        EXPECT_EQ(six_four.lookup(Fixed::parse_decimal("0.534074174", 200).value,
                               Fixed::parse_decimal("0.0000000005", 200).value),
                  13u);
        EXPECT_THROW(six_four.lookup(Fixed::parse_decimal("0.9", 200).value, Fixed::pow2(-20)), Error);
    }

    TEST(KeyTable, CapacityExceeded)
    {
        EXPECT_THROW(build_key_table(30, 15, Precision {}, 1000), Error);
        EXPECT_THROW(build_key_table(3, 4), Error);
    }

    TEST(KeyTable, CsvDump)
    {
        std::ostringstream out;
        write_key_table_csv(out, build_key_table(6, 4));
        const std::string csv = out.str();
        EXPECT_EQ(csv.rfind("k,positions,r_value\n0,1+2+3+4,0.866025404\n", 0), 0u);
        EXPECT_NE(csv.find("\n13,2+4+5+6,0.534074174\n"), std::string::npos);
        EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 16);

        std::ostringstream empty;
        write_key_table_csv(empty, build_key_table(3, 0), 4);
        EXPECT_EQ(empty.str(), "k,positions,r_value\n0,,0.0000\n");
    }

} // namespace
} // namespace chordcodec
