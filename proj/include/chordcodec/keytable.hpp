#ifndef CHORDCODEC_KEYTABLE_HPP
#define CHORDCODEC_KEYTABLE_HPP

#include "chordcodec/bitblock.hpp"
#include "chordcodec/codec.hpp"
#include "chordcodec/combinatorics.hpp"
#include "chordcodec/errors.hpp"
#include "chordcodec/fixed.hpp"
#include "chordcodec/projection.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace chordcodec {

/// A block as (Z, k_x): its popcount and the 0-based lexicographic rank of
/// its 1-position set among all Z-subsets of {1..N}.
struct PairCode {
    std::uint64_t ones = 0;
    BigInt index = 0;

    friend bool operator==(const PairCode&, const PairCode&) = default;
};

namespace detail {

    template <class Int>
    struct WideProduct {
        using type = Int;
    };
    template <>
    struct WideProduct<std::uint64_t> {
        using type = unsigned __int128;
    };

    // Largest N whose binomials (and the products formed while stepping
    // between them) fit the 64-bit path.
    inline constexpr std::uint64_t narrow_rank_limit = 64;

    // Lexicographic rank via the combinatorial number system. Walking the
    // positions left to right, every 0 at a spot where a 1 was still
    // possible skips the C(m, j) subsets that place a 1 there, where m is
    // the number of positions after it and j the 1s still owed after it.
    // C(m, j) is stepped multiplicatively, so no table is needed.
    template <class Int>
    Int lex_rank(std::span<const std::uint8_t> bits, std::uint64_t ones)
    {
        using Wide = typename WideProduct<Int>::type;
        if (ones == 0) {
            return Int(0);
        }
        std::uint64_t m = bits.size() - 1;
        std::uint64_t j = ones - 1;
        Int c = static_cast<Int>(binomial(m, j));
        Int rank = 0;
        for (std::size_t v = 0;; ++v) {
            if (bits[v]) {
                if (j == 0) {
                    break;
                }
                c = static_cast<Int>(Wide(c) * j / m);
                --j;
            } else {
                rank += c;
                c = static_cast<Int>(Wide(c) * (m - j) / m);
            }
            --m;
        }
        return rank;
    }

    template <class Int>
    void lex_unrank(std::uint64_t ones, Int k, std::span<std::uint8_t> out)
    {
        using Wide = typename WideProduct<Int>::type;
        std::fill(out.begin(), out.end(), std::uint8_t { 0 });
        if (ones == 0) {
            return;
        }
        std::uint64_t m = out.size() - 1;
        std::uint64_t j = ones - 1;
        Int c = static_cast<Int>(binomial(m, j));
        for (std::size_t v = 0;; ++v) {
            if (k < c) {
                out[v] = 1;
                if (j == 0) {
                    break;
                }
                c = static_cast<Int>(Wide(c) * j / m);
                --j;
            } else {
                k -= c;
                c = static_cast<Int>(Wide(c) * (m - j) / m);
            }
            --m;
        }
    }

    inline std::uint64_t popcount(std::span<const std::uint8_t> bits)
    {
        return static_cast<std::uint64_t>(std::count(bits.begin(), bits.end(), std::uint8_t { 1 }));
    }

    /// Rank of a raw 0/1 span; `ones` must equal its popcount.
    inline BigInt rank_bits(std::span<const std::uint8_t> bits, std::uint64_t ones)
    {
        if (bits.size() <= narrow_rank_limit) {
            return BigInt(lex_rank<std::uint64_t>(bits, ones));
        }
        return lex_rank<BigInt>(bits, ones);
    }

    /// Caller guarantees index < C(out.size(), ones).
    inline void unrank_bits(std::uint64_t ones, const BigInt& index, std::span<std::uint8_t> out)
    {
        if (out.size() <= narrow_rank_limit) {
            lex_unrank<std::uint64_t>(ones, index.convert_to<std::uint64_t>(), out);
        } else {
            lex_unrank<BigInt>(ones, index, out);
        }
    }

} // namespace detail

inline PairCode rank(const BitBlock& block)
{
    return { block.popcount(), detail::rank_bits(block.bits(), block.popcount()) };
}

inline BitBlock unrank(std::uint64_t n_terms, std::uint64_t ones, const BigInt& index)
{
    if (n_terms == 0) {
        domain_error("number of terms must be positive");
    }
    if (ones > n_terms) {
        domain_error("Z=" + std::to_string(ones) + " exceeds N=" + std::to_string(n_terms));
    }
    const BigInt count = binomial(n_terms, ones);
    if (index < 0 || index >= count) {
        domain_error("rank " + index.str() + " outside 0.." + BigInt(count - 1).str() + " for C("
                     + std::to_string(n_terms) + "," + std::to_string(ones) + ")");
    }
    std::vector<std::uint8_t> bits(n_terms);
    detail::unrank_bits(ones, index, bits);
    return BitBlock(std::move(bits));
}

inline BitBlock unrank(std::uint64_t n_terms, const PairCode& code)
{
    return unrank(n_terms, code.ones, code.index);
}

/// Number of distinct R values over every Z: sum of C(N, z) for z = 0..N.
inline BigInt table_count(std::uint64_t n_terms)
{
    if (n_terms == 0) {
        domain_error("number of terms must be positive");
    }
    BigInt total = 0;
    BigInt c = 1;
    for (std::uint64_t z = 0; z <= n_terms; ++z) {
        total += c;
        c = c * (n_terms - z) / (z + 1);
    }
    return total;
}

/// Materialized key table for one (N, Z): row k holds the sum of the
/// projections of the k-th subset in lexicographic order.
class KeyTable {
public:
    struct Row {
        std::uint64_t k = 0;
        std::vector<std::uint64_t> positions; ///< 1-based
        Fixed r_value;
    };

    KeyTable(std::uint64_t n_terms, std::uint64_t ones, Precision precision, std::vector<Row> rows)
        : n_terms_(n_terms)
        , ones_(ones)
        , precision_(precision)
        , rows_(std::move(rows))
        , by_value_(rows_.size())
    {
        std::iota(by_value_.begin(), by_value_.end(), std::size_t { 0 });
        std::sort(by_value_.begin(), by_value_.end(),
                  [this](std::size_t a, std::size_t b) { return rows_[a].r_value < rows_[b].r_value; });
    }

    std::uint64_t n_terms() const noexcept { return n_terms_; }
    std::uint64_t ones() const noexcept { return ones_; }
    const Precision& precision() const noexcept { return precision_; }
    std::span<const Row> rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    /// Index-retrieval decode: the k whose r_value is within `tolerance` of R.
    std::uint64_t lookup(const Fixed& r, const Fixed& tolerance) const
    {
        const Fixed low = r - tolerance;
        const Fixed high = r + tolerance;
        auto first = std::upper_bound(by_value_.begin(), by_value_.end(), low,
                                      [this](const Fixed& v, std::size_t i) { return v < rows_[i].r_value; });
        // upper_bound leaves first at the earliest row > low; rows equal to low are excluded
        std::vector<std::size_t> hits;
        for (auto it = first; it != by_value_.end() && rows_[*it].r_value < high; ++it) {
            hits.push_back(*it);
            if (hits.size() == 2) {
                break;
            }
        }
        if (hits.empty()) {
            throw Error(ErrorKind::NoMatch, "no key-table row within tolerance of R=" + r.to_decimal(12));
        }
        if (hits.size() > 1) {
            throw Error(ErrorKind::AmbiguousMatch,
                        "rows " + std::to_string(rows_[hits[0]].k) + " and " + std::to_string(rows_[hits[1]].k)
                            + " both lie within tolerance of R=" + r.to_decimal(12));
        }
        return rows_[hits.front()].k;
    }

private:
    std::uint64_t n_terms_;
    std::uint64_t ones_;
    Precision precision_;
    std::vector<Row> rows_;
    std::vector<std::size_t> by_value_;
};

inline KeyTable build_key_table(std::uint64_t n_terms, std::uint64_t ones, const Precision& precision = {},
                                std::uint64_t enumeration_budget = DecodeLimits {}.enumeration_budget)
{
    if (ones > n_terms) {
        domain_error("Z=" + std::to_string(ones) + " exceeds N=" + std::to_string(n_terms));
    }
    detail::check_enumeration_budget(n_terms, ones, enumeration_budget);
    const ProjectionTable table(n_terms, precision);
    std::vector<KeyTable::Row> rows;
    rows.reserve(binomial(n_terms, ones).convert_to<std::size_t>());

    detail::with_integer_for(detail::kernel_bits(table), [&]<class Int>(std::type_identity<Int>) {
        const auto values = detail::grid_values<Int>(table);
        std::uint64_t k = 0;
        for (detail::CombinationWalker<Int> walk(values, ones); walk.valid(); walk.next()) {
            KeyTable::Row row;
            row.k = k++;
            for (auto i : walk.indices()) {
                row.positions.push_back(i + 1);
            }
            row.r_value = Fixed(BigInt(walk.sum()), table.grid_bits());
            rows.push_back(std::move(row));
        }
    });
    return KeyTable(n_terms, ones, precision, std::move(rows));
}

/// CSV dump: header `k,positions,r_value`, positions `+`-joined.
inline void write_key_table_csv(std::ostream& out, const KeyTable& table, unsigned decimals = 9)
{
    out << "k,positions,r_value\n";
    for (const auto& row : table.rows()) {
        out << row.k << ',' << join_positions(row.positions) << ',' << row.r_value.to_decimal(decimals) << '\n';
    }
}

/// Exhaustive check that unrank(rank(b)) == b for every block of length N.
inline bool pair_roundtrip_check(std::uint64_t n_terms, std::uint64_t exhaustive_budget = 20)
{
    if (n_terms == 0) {
        domain_error("number of terms must be positive");
    }
    if (n_terms > exhaustive_budget) {
        throw Error(ErrorKind::CapacityExceeded,
                    "2^" + std::to_string(n_terms) + " blocks exceeds the exhaustive budget of N <= "
                        + std::to_string(exhaustive_budget));
    }
    std::vector<std::uint8_t> bits(n_terms);
    std::vector<std::uint8_t> back(n_terms);
    for (std::uint64_t mask = 0; mask < (std::uint64_t { 1 } << n_terms); ++mask) {
        for (std::uint64_t i = 0; i < n_terms; ++i) {
            bits[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
        }
        const auto ones = detail::popcount(bits);
        detail::unrank_bits(ones, detail::rank_bits(bits, ones), back);
        if (back != bits) {
            return false;
        }
    }
    return true;
}

} // namespace chordcodec

#endif // CHORDCODEC_KEYTABLE_HPP
