#ifndef CHORDCODEC_BITBLOCK_HPP
#define CHORDCODEC_BITBLOCK_HPP

#include "chordcodec/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chordcodec {

/// A finite binary sequence a_1..a_N with its popcount cached.
class BitBlock {
public:
    BitBlock() = default;

    explicit BitBlock(std::vector<std::uint8_t> bits)
        : bits_(std::move(bits))
    {
        for (auto& b : bits_) {
            if (b > 1) {
                domain_error("bit values must be 0 or 1");
            }
            ones_ += b;
        }
    }

    static BitBlock zeros(std::size_t length) { return BitBlock(std::vector<std::uint8_t>(length, 0)); }
    static BitBlock ones(std::size_t length) { return BitBlock(std::vector<std::uint8_t>(length, 1)); }

    /// "010111" -> 0,1,0,1,1,1. Rejects anything but '0'/'1', naming the
    /// 1-based position of the first offender.
    static BitBlock parse(std::string_view text)
    {
        std::vector<std::uint8_t> bits;
        bits.reserve(text.size());
        for (std::size_t i = 0; i < text.size(); ++i) {
            const char c = text[i];
            if (c != '0' && c != '1') {
                domain_error("non-binary character '" + std::string(1, c) + "' at position "
                             + std::to_string(i + 1));
            }
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return BitBlock(std::move(bits));
    }

    /// Block of `length` bits whose 1s sit at the given 1-based positions.
    static BitBlock from_positions(std::size_t length, std::span<const std::uint64_t> positions)
    {
        std::vector<std::uint8_t> bits(length, 0);
        for (auto p : positions) {
            if (p < 1 || p > length) {
                domain_error("position " + std::to_string(p) + " outside 1.." + std::to_string(length));
            }
            bits[p - 1] = 1;
        }
        return BitBlock(std::move(bits));
    }

    std::size_t size() const noexcept { return bits_.size(); }
    std::size_t popcount() const noexcept { return ones_; }
    bool empty() const noexcept { return bits_.empty(); }

    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    /// 1-based positions of the 1s, ascending.
    std::vector<std::uint64_t> positions() const
    {
        std::vector<std::uint64_t> out;
        out.reserve(ones_);
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            if (bits_[i]) {
                out.push_back(i + 1);
            }
        }
        return out;
    }

    std::string to_string() const
    {
        std::string s(bits_.size(), '0');
        std::transform(bits_.begin(), bits_.end(), s.begin(), [](std::uint8_t b) { return static_cast<char>('0' + b); });
        return s;
    }

    friend bool operator==(const BitBlock& a, const BitBlock& b) { return a.bits_ == b.bits_; }

private:
    std::vector<std::uint8_t> bits_;
    std::size_t ones_ = 0;
};

/// "2+4+5+6" for positions {2,4,5,6}.
inline std::string join_positions(std::span<const std::uint64_t> positions)
{
    std::string out;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (i) {
            out += '+';
        }
        out += std::to_string(positions[i]);
    }
    return out;
}

} // namespace chordcodec

#endif // CHORDCODEC_BITBLOCK_HPP
