#ifndef CHORDCODEC_CODEC_HPP
#define CHORDCODEC_CODEC_HPP

#include "chordcodec/bitblock.hpp"
#include "chordcodec/combinatorics.hpp"
#include "chordcodec/errors.hpp"
#include "chordcodec/fixed.hpp"
#include "chordcodec/projection.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chordcodec {

/// The coded form (N, Z, R) of a block.
struct CodeTriple {
    std::uint64_t n_terms = 0;
    std::uint64_t ones = 0;
    Fixed r_sum;
    Precision precision;

    void validate() const
    {
        if (n_terms == 0) {
            domain_error("triple needs at least one term");
        }
        if (ones > n_terms) {
            domain_error("Z=" + std::to_string(ones) + " exceeds N=" + std::to_string(n_terms));
        }
        if (r_sum.sign() < 0 || r_sum > Fixed::one(0)) {
            domain_error("R must lie in [0, 1], got " + r_sum.to_decimal(12));
        }
    }
};

struct DecodeLimits {
    /// Cap on C(N, Z) for the exhaustive paths.
    std::uint64_t enumeration_budget = 10'000'000;
    /// Cap on search-tree nodes visited by decode_bounded.
    std::uint64_t node_budget = 100'000'000;
};

/// R = sum of P_n over the 1-positions, added in ascending n.
inline CodeTriple encode(const BitBlock& block, const ProjectionTable& table)
{
    if (block.empty()) {
        domain_error("cannot encode an empty block");
    }
    if (block.size() != table.n_terms()) {
        domain_error("block has " + std::to_string(block.size()) + " bits but table has "
                     + std::to_string(table.n_terms()) + " terms");
    }
    Fixed r = Fixed::zero(table.grid_bits());
    for (std::size_t i = 0; i < block.size(); ++i) {
        if (block[i]) {
            r += table.values()[i];
        }
    }
    return { block.size(), block.popcount(), std::move(r), table.precision() };
}

inline CodeTriple encode(const BitBlock& block, const Precision& precision = {})
{
    if (block.empty()) {
        domain_error("cannot encode an empty block");
    }
    return encode(block, ProjectionTable(block.size(), precision));
}

/// Fallback tolerance when no gap measurement is at hand: 2^-(bits/2).
inline Fixed default_tolerance(const Precision& precision)
{
    return Fixed::pow2(-static_cast<int>(precision.bits / 2));
}

namespace detail {

    /// Integer window (lo, hi) on the table grid such that a grid sum C
    /// satisfies |C - R| < tolerance exactly when lo < C < hi.
    struct MatchWindow {
        BigInt lo;
        BigInt hi;
    };

    inline MatchWindow match_window(const Fixed& r, const Fixed& tolerance, unsigned grid_bits)
    {
        const Fixed low = r - tolerance;
        const Fixed high = r + tolerance;
        const unsigned fine = std::max({ grid_bits, low.frac_bits(), high.frac_bits() });
        const unsigned shift = fine - grid_bits;
        const BigInt one = BigInt(1) << grid_bits;

        MatchWindow w;
        const BigInt low_raw = low.rescaled(fine).raw();
        w.lo = low_raw < 0 ? BigInt(-1) : BigInt(low_raw >> shift);
        const BigInt high_raw = high.rescaled(fine).raw();
        if (high_raw <= 0) {
            w.hi = 0;
        } else {
            BigInt q = high_raw >> shift;
            if ((q << shift) != high_raw) {
                ++q;
            }
            w.hi = q;
        }
        // every subset sum lies in [0, 1]; clamp so fixed-width kernels never overflow
        w.lo = std::min(w.lo, BigInt(one + 1));
        w.hi = std::min(w.hi, BigInt(one + 2));
        return w;
    }

    template <class Int>
    std::vector<Int> grid_values(const ProjectionTable& table)
    {
        std::vector<Int> out;
        out.reserve(table.n_terms());
        for (const auto& v : table.values()) {
            out.push_back(Int(v.raw()));
        }
        return out;
    }

    inline unsigned kernel_bits(const ProjectionTable& table) { return table.grid_bits() + 4; }

    inline BitBlock block_from_indices(std::size_t n, std::span<const std::size_t> indices)
    {
        std::vector<std::uint8_t> bits(n, 0);
        for (auto i : indices) {
            bits[i] = 1;
        }
        return BitBlock(std::move(bits));
    }

    inline void check_decode_args(const CodeTriple& triple, const ProjectionTable& table, const Fixed& tolerance)
    {
        triple.validate();
        if (tolerance.sign() <= 0) {
            domain_error("tolerance must be positive");
        }
        if (table.n_terms() != triple.n_terms || !(table.precision() == triple.precision)) {
            domain_error("projection table does not match the triple's N and precision");
        }
    }

    inline void check_enumeration_budget(std::uint64_t n, std::uint64_t z, std::uint64_t budget)
    {
        const BigInt count = binomial(n, z);
        if (count > budget) {
            throw Error(ErrorKind::CapacityExceeded,
                        "C(" + std::to_string(n) + "," + std::to_string(z) + ")=" + count.str()
                            + " combinations exceeds the enumeration budget of "
                            + std::to_string(budget));
        }
    }

    [[noreturn]] inline void throw_no_match(const CodeTriple& triple, const Fixed& tolerance)
    {
        throw Error(ErrorKind::NoMatch,
                    "no " + std::to_string(triple.ones) + "-of-" + std::to_string(triple.n_terms)
                        + " combination sum lies within " + tolerance.to_scientific(3) + " of R="
                        + triple.r_sum.to_decimal(12));
    }

    [[noreturn]] inline void throw_ambiguous(const BitBlock& first, const BitBlock& second)
    {
        throw Error(ErrorKind::AmbiguousMatch,
                    "R matches at least two combinations ("
                        + join_positions(first.positions()) + " and "
                        + join_positions(second.positions())
                        + "); tolerance too wide or sums coincide at this precision");
    }

    /// Z = 0 and Z = N admit a single combination; no search needed.
    inline std::optional<BitBlock> decode_degenerate(const CodeTriple& triple, const ProjectionTable& table,
                                                     const Fixed& tolerance)
    {
        if (triple.ones != 0 && triple.ones != triple.n_terms) {
            return std::nullopt;
        }
        const Fixed only = triple.ones == 0 ? Fixed::zero(table.grid_bits()) : table.sum();
        if ((only - triple.r_sum).abs() >= tolerance) {
            throw_no_match(triple, tolerance);
        }
        return triple.ones == 0 ? BitBlock::zeros(triple.n_terms) : BitBlock::ones(triple.n_terms);
    }

    /// Depth-first include/exclude over positions with range pruning.
    ///
    /// Projections are strictly decreasing, so among the still-open positions
    /// v..N-1 the largest attainable sum of r more terms is the r leading
    /// ones and the smallest is the r trailing ones; both come from prefix
    /// sums in O(1).
    template <class Int>
    class BoundedSearch {
    public:
        BoundedSearch(std::span<const Int> values, std::size_t ones, Int lo, Int hi, std::uint64_t node_budget)
            : values_(values)
            , ones_(ones)
            , lo_(std::move(lo))
            , hi_(std::move(hi))
            , node_budget_(node_budget)
            , prefix_(values.size() + 1, Int(0))
            , partial_(ones + 1, Int(0))
            , chosen_(values.size(), 0)
        {
            for (std::size_t i = 0; i < values.size(); ++i) {
                prefix_[i + 1] = prefix_[i] + values[i];
            }
        }

        /// Up to two matching blocks (two means ambiguous).
        std::vector<std::vector<std::uint8_t>> run()
        {
            visit(0, 0);
            return std::move(matches_);
        }

        std::uint64_t nodes() const noexcept { return nodes_; }

    private:
        void visit(std::size_t v, std::size_t taken)
        {
            if (++nodes_ > node_budget_) {
                throw Error(ErrorKind::CapacityExceeded,
                            "bounded search exceeded its node budget of " + std::to_string(node_budget_));
            }
            const std::size_t n = values_.size();
            const std::size_t need = ones_ - taken;
            const Int& sum = partial_[taken];
            if (need == 0) {
                if (lo_ < sum && sum < hi_) {
                    matches_.push_back(chosen_);
                }
                return;
            }
            if (!(sum + (prefix_[v + need] - prefix_[v]) > lo_)) {
                return;
            }
            if (!(sum + (prefix_[n] - prefix_[n - need]) < hi_)) {
                return;
            }
            partial_[taken + 1] = sum + values_[v];
            chosen_[v] = 1;
            visit(v + 1, taken + 1);
            chosen_[v] = 0;
            if (matches_.size() >= 2) {
                return;
            }
            if (n - v - 1 >= need) {
                visit(v + 1, taken);
            }
        }

        std::span<const Int> values_;
        std::size_t ones_;
        Int lo_;
        Int hi_;
        std::uint64_t node_budget_;
        std::uint64_t nodes_ = 0;
        std::vector<Int> prefix_;
        std::vector<Int> partial_;
        std::vector<std::uint8_t> chosen_;
        std::vector<std::vector<std::uint8_t>> matches_;
    };

} // namespace detail

/// Exhaustive decoder: sums every Z-subset of the projections and returns
/// the unique block whose sum lies strictly within `tolerance` of R.
inline BitBlock decode_bruteforce(const CodeTriple& triple, const ProjectionTable& table, const Fixed& tolerance,
                                  const DecodeLimits& limits = {})
{
    detail::check_decode_args(triple, table, tolerance);
    if (auto block = detail::decode_degenerate(triple, table, tolerance)) {
        return std::move(*block);
    }
    detail::check_enumeration_budget(triple.n_terms, triple.ones, limits.enumeration_budget);
    const auto window = detail::match_window(triple.r_sum, tolerance, table.grid_bits());

    return detail::with_integer_for(detail::kernel_bits(table), [&]<class Int>(std::type_identity<Int>) {
        const auto values = detail::grid_values<Int>(table);
        const Int lo(window.lo);
        const Int hi(window.hi);
        std::vector<BitBlock> found;
        for (detail::CombinationWalker<Int> walk(values, triple.ones); walk.valid(); walk.next()) {
            if (lo < walk.sum() && walk.sum() < hi) {
                found.push_back(detail::block_from_indices(triple.n_terms, walk.indices()));
                if (found.size() == 2) {
                    detail::throw_ambiguous(found[0], found[1]);
                }
            }
        }
        if (found.empty()) {
            detail::throw_no_match(triple, tolerance);
        }
        return std::move(found.front());
    });
}

inline BitBlock decode_bruteforce(const CodeTriple& triple, const Fixed& tolerance, const DecodeLimits& limits = {})
{
    triple.validate();
    return decode_bruteforce(triple, ProjectionTable(triple.n_terms, triple.precision), tolerance, limits);
}

/// Branch-and-bound decoder; agrees with decode_bruteforce wherever that
/// succeeds, including raising AmbiguousMatch for coinciding sums.
inline BitBlock decode_bounded(const CodeTriple& triple, const ProjectionTable& table, const Fixed& tolerance,
                               const DecodeLimits& limits = {})
{
    detail::check_decode_args(triple, table, tolerance);
    if (auto block = detail::decode_degenerate(triple, table, tolerance)) {
        return std::move(*block);
    }
    const auto window = detail::match_window(triple.r_sum, tolerance, table.grid_bits());

    return detail::with_integer_for(detail::kernel_bits(table), [&]<class Int>(std::type_identity<Int>) {
        const auto values = detail::grid_values<Int>(table);
        detail::BoundedSearch<Int> search(values, triple.ones, Int(window.lo), Int(window.hi), limits.node_budget);
        auto matches = search.run();
        if (matches.empty()) {
            detail::throw_no_match(triple, tolerance);
        }
        if (matches.size() > 1) {
            detail::throw_ambiguous(BitBlock(std::move(matches[0])), BitBlock(std::move(matches[1])));
        }
        return BitBlock(std::move(matches.front()));
    });
}

inline BitBlock decode_bounded(const CodeTriple& triple, const Fixed& tolerance, const DecodeLimits& limits = {})
{
    triple.validate();
    return decode_bounded(triple, ProjectionTable(triple.n_terms, triple.precision), tolerance, limits);
}

/// How far apart the C(N, Z) combination sums sit for one (N, Z).
struct GapReport {
    std::uint64_t n_terms = 0;
    std::uint64_t ones = 0;
    std::uint64_t combination_count = 0;

    /// Smallest difference between two sums of distinct combinations;
    /// empty when there is only one combination.
    std::optional<Fixed> min_gap;

    /// ceil(-log2(min_gap)) + 1; empty when there is one combination or
    /// when the sums are not distinct at this precision.
    std::optional<long> required_bits;

    /// Largest difference that rounding alone can put between two sums
    /// that are mathematically equal. A gap at or below this is a collision.
    Fixed resolution;

    /// Every pair of sums is separated by more than `resolution`.
    bool distinct = true;

    /// The two closest combinations, when there are at least two.
    std::optional<std::pair<BitBlock, BitBlock>> closest_pair;

    Fixed default_tolerance() const
    {
        if (!min_gap) {
            return Fixed::pow2(-2);
        }
        return min_gap->scaled_down(2);
    }
};

inline GapReport gap_report(const ProjectionTable& table, std::uint64_t ones,
                            std::uint64_t enumeration_budget = DecodeLimits {}.enumeration_budget)
{
    const std::uint64_t n = table.n_terms();
    if (ones > n) {
        domain_error("Z=" + std::to_string(ones) + " exceeds N=" + std::to_string(n));
    }
    detail::check_enumeration_budget(n, ones, enumeration_budget);

    GapReport report;
    report.n_terms = n;
    report.ones = ones;
    report.combination_count = binomial(n, ones).convert_to<std::uint64_t>();
    const unsigned grid = table.grid_bits();
    // each computed sum is a signed sum of at most min(2Z, N+1) grid-rounded
    // sines, each off by at most half a grid step
    report.resolution = Fixed(BigInt(std::min<std::uint64_t>(2 * ones, n + 1) + 1), grid);

    if (report.combination_count < 2) {
        return report;
    }

    detail::with_integer_for(detail::kernel_bits(table), [&]<class Int>(std::type_identity<Int>) {
        const auto values = detail::grid_values<Int>(table);
        struct Entry {
            Int sum;
            std::uint64_t rank;
        };
        std::vector<Entry> sums;
        sums.reserve(report.combination_count);
        std::uint64_t rank = 0;
        for (detail::CombinationWalker<Int> walk(values, ones); walk.valid(); walk.next()) {
            sums.push_back({ walk.sum(), rank++ });
        }
        std::sort(sums.begin(), sums.end(), [](const Entry& a, const Entry& b) {
            return a.sum < b.sum || (a.sum == b.sum && a.rank < b.rank);
        });
        std::size_t best = 1;
        Int best_gap = sums[1].sum - sums[0].sum;
        for (std::size_t i = 2; i < sums.size(); ++i) {
            Int gap = sums[i].sum - sums[i - 1].sum;
            if (gap < best_gap) {
                best_gap = std::move(gap);
                best = i;
            }
        }
        report.min_gap = Fixed(BigInt(best_gap), grid);

        // recover the closest combinations by replaying the lexicographic walk
        const std::uint64_t want_a = std::min(sums[best - 1].rank, sums[best].rank);
        const std::uint64_t want_b = std::max(sums[best - 1].rank, sums[best].rank);
        rank = 0;
        std::optional<BitBlock> first;
        for (detail::CombinationWalker<Int> walk(values, ones); walk.valid(); walk.next(), ++rank) {
            if (rank == want_a) {
                first = detail::block_from_indices(n, walk.indices());
            } else if (rank == want_b) {
                report.closest_pair.emplace(std::move(*first), detail::block_from_indices(n, walk.indices()));
                break;
            }
        }
    });

    report.distinct = *report.min_gap > report.resolution;
    if (report.distinct) {
        const long msb = static_cast<long>(boost::multiprecision::msb(report.min_gap->raw()));
        report.required_bits = static_cast<long>(grid) - msb + 1;
    }
    return report;
}

inline GapReport gap_report(std::uint64_t n_terms, std::uint64_t ones, const Precision& precision = {},
                            std::uint64_t enumeration_budget = DecodeLimits {}.enumeration_budget)
{
    if (ones > n_terms) {
        domain_error("Z=" + std::to_string(ones) + " exceeds N=" + std::to_string(n_terms));
    }
    detail::check_enumeration_budget(n_terms, ones, enumeration_budget);
    return gap_report(ProjectionTable(n_terms, precision), ones, enumeration_budget);
}

} // namespace chordcodec

#endif // CHORDCODEC_CODEC_HPP
