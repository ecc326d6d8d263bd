#ifndef CHORDCODEC_COMBINATORICS_HPP
#define CHORDCODEC_COMBINATORICS_HPP

#include "chordcodec/fixed.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace chordcodec {

/// C(n, k), exact. Zero when k > n.
inline BigInt binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c *= n - k + i;
        c /= i;
    }
    return c;
}

/// Smallest w with x <= 2^w, i.e. the bits needed to store any value in [0, x).
inline unsigned ceil_log2(const BigInt& x)
{
    if (x <= 1) {
        return 0;
    }
    return static_cast<unsigned>(boost::multiprecision::msb(BigInt(x - 1))) + 1;
}

/// Bits to store one of `count` distinct indices 0..count-1.
inline unsigned index_width(const BigInt& count) { return ceil_log2(count); }

inline std::uint64_t to_u64_saturating(const BigInt& x)
{
    if (x > BigInt(std::numeric_limits<std::uint64_t>::max())) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return x.convert_to<std::uint64_t>();
}

namespace detail {

    /// Runs `f(std::type_identity<Int>{})` with the narrowest fixed-width
    /// signed integer that holds `magnitude_bits`, falling back to BigInt.
    template <class F>
    decltype(auto) with_integer_for(unsigned magnitude_bits, F&& f)
    {
        using namespace boost::multiprecision;
        if (magnitude_bits <= 250) {
            return f(std::type_identity<int256_t> {});
        }
        if (magnitude_bits <= 506) {
            return f(std::type_identity<int512_t> {});
        }
        if (magnitude_bits <= 1018) {
            return f(std::type_identity<int1024_t> {});
        }
        return f(std::type_identity<BigInt> {});
    }

    /// Steps through all k-subsets of {0..n-1} in lexicographic order,
    /// carrying the running sums of `values` over each prefix so every step
    /// costs amortized O(1) additions.
    template <class Int>
    class CombinationWalker {
    public:
        CombinationWalker(std::span<const Int> values, std::size_t k)
            : values_(values)
            , index_(k)
            , prefix_(k + 1, Int(0))
        {
            for (std::size_t i = 0; i < k; ++i) {
                index_[i] = i;
                prefix_[i + 1] = prefix_[i] + values_[i];
            }
            valid_ = k <= values.size();
        }

        bool valid() const noexcept { return valid_; }
        const Int& sum() const noexcept { return prefix_.back(); }
        std::span<const std::size_t> indices() const noexcept { return index_; }

        void next()
        {
            const std::size_t n = values_.size();
            const std::size_t k = index_.size();
            std::size_t i = k;
            while (i > 0 && index_[i - 1] == n - k + (i - 1)) {
                --i;
            }
            if (i == 0) {
                valid_ = false;
                return;
            }
            --i;
            ++index_[i];
            prefix_[i + 1] = prefix_[i] + values_[index_[i]];
            for (std::size_t j = i + 1; j < k; ++j) {
                index_[j] = index_[j - 1] + 1;
                prefix_[j + 1] = prefix_[j] + values_[index_[j]];
            }
        }

    private:
        std::span<const Int> values_;
        std::vector<std::size_t> index_;
        std::vector<Int> prefix_;
        bool valid_ = true;
    };

} // namespace detail

} // namespace chordcodec

#endif // CHORDCODEC_COMBINATORICS_HPP
