#ifndef CHORDCODEC_BITIO_HPP
#define CHORDCODEC_BITIO_HPP

#include "chordcodec/errors.hpp"
#include "chordcodec/fixed.hpp"

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chordcodec {

/// A packed bit sequence, MSB-first within each byte. Bits past bit_count
/// in the final byte are always zero.
class BitBuffer {
public:
    BitBuffer() = default;

    BitBuffer(std::vector<std::uint8_t> bytes, std::uint64_t bit_count)
        : bytes_(std::move(bytes))
        , bit_count_(bit_count)
    {
        if (bytes_.size() * 8 < bit_count_) {
            domain_error("bit count exceeds the supplied bytes");
        }
        bytes_.resize((bit_count_ + 7) / 8);
        if (bit_count_ % 8 != 0) {
            bytes_.back() &= static_cast<std::uint8_t>(0xFF00U >> (bit_count_ % 8));
        }
    }

    static BitBuffer from_bytes(std::vector<std::uint8_t> bytes)
    {
        const std::uint64_t n = bytes.size() * 8;
        return BitBuffer(std::move(bytes), n);
    }

    static BitBuffer parse(std::string_view text)
    {
        BitBuffer out;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] != '0' && text[i] != '1') {
                domain_error("non-binary character at position " + std::to_string(i + 1));
            }
            out.push_back(text[i] == '1');
        }
        return out;
    }

    std::uint64_t size() const noexcept { return bit_count_; }
    std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

    bool operator[](std::uint64_t i) const { return (bytes_[i / 8] >> (7 - i % 8)) & 1U; }

    void push_back(bool bit)
    {
        if (bit_count_ % 8 == 0) {
            bytes_.push_back(0);
        }
        if (bit) {
            bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (bit_count_ % 8));
        }
        ++bit_count_;
    }

    std::string to_string() const
    {
        std::string s;
        s.reserve(bit_count_);
        for (std::uint64_t i = 0; i < bit_count_; ++i) {
            s += (*this)[i] ? '1' : '0';
        }
        return s;
    }

    friend bool operator==(const BitBuffer&, const BitBuffer&) = default;

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bit_count_ = 0;
};

/// MSB-first bit writer over an output stream. Bytes are staged in a small
/// buffer, so memory stays bounded regardless of stream length.
class BitWriter {
public:
    explicit BitWriter(std::ostream& out)
        : out_(out)
    {
    }

    BitWriter(const BitWriter&) = delete;
    BitWriter& operator=(const BitWriter&) = delete;

    void write_bit(bool bit)
    {
        current_ = static_cast<std::uint8_t>((current_ << 1) | (bit ? 1U : 0U));
        ++bits_written_;
        if (++filled_ == 8) {
            push_byte();
        }
    }

    /// Low `width` bits of value, most significant first. width <= 64.
    void write(std::uint64_t value, unsigned width)
    {
        for (unsigned i = width; i-- > 0;) {
            write_bit((value >> i) & 1U);
        }
    }

    void write(const BigInt& value, unsigned width)
    {
        if (width <= 64) {
            write(value.convert_to<std::uint64_t>(), width);
            return;
        }
        for (unsigned i = width; i-- > 0;) {
            write_bit(bit_test(value, i));
        }
    }

    /// Zero-pads the final byte and pushes everything to the stream.
    void flush()
    {
        if (filled_ != 0) {
            current_ = static_cast<std::uint8_t>(current_ << (8 - filled_));
            push_byte();
        }
        drain();
        out_.flush();
    }

    std::uint64_t bits_written() const noexcept { return bits_written_; }

private:
    void push_byte()
    {
        staged_.push_back(static_cast<char>(current_));
        current_ = 0;
        filled_ = 0;
        if (staged_.size() >= stage_limit) {
            drain();
        }
    }

    void drain()
    {
        out_.write(staged_.data(), static_cast<std::streamsize>(staged_.size()));
        staged_.clear();
    }

    static constexpr std::size_t stage_limit = 1 << 16;

    std::ostream& out_;
    std::vector<char> staged_;
    std::uint8_t current_ = 0;
    unsigned filled_ = 0;
    std::uint64_t bits_written_ = 0;
};

/// MSB-first bit reader. Running out of input raises TruncatedStream with
/// the bit offset at which the missing field started.
class BitReader {
public:
    explicit BitReader(std::istream& in)
        : in_(in)
    {
    }

    std::uint64_t position() const noexcept { return position_; }

    bool read_bit(std::uint64_t field_start)
    {
        if (remaining_ == 0) {
            const int c = in_.get();
            if (c == std::char_traits<char>::eof()) {
                throw StreamError(ErrorKind::TruncatedStream, field_start, "stream ended inside a field");
            }
            current_ = static_cast<std::uint8_t>(c);
            remaining_ = 8;
        }
        --remaining_;
        ++position_;
        return (current_ >> remaining_) & 1U;
    }

    std::uint64_t read(unsigned width)
    {
        const std::uint64_t start = position_;
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) {
            v = (v << 1) | (read_bit(start) ? 1U : 0U);
        }
        return v;
    }

    BigInt read_big(unsigned width)
    {
        if (width <= 64) {
            return BigInt(read(width));
        }
        const std::uint64_t start = position_;
        BigInt v = 0;
        for (unsigned i = 0; i < width; ++i) {
            v <<= 1;
            if (read_bit(start)) {
                v |= 1;
            }
        }
        return v;
    }

private:
    std::istream& in_;
    std::uint8_t current_ = 0;
    unsigned remaining_ = 0;
    std::uint64_t position_ = 0;
};

} // namespace chordcodec

#endif // CHORDCODEC_BITIO_HPP
