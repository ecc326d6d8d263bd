#ifndef CHORDCODEC_CONTAINER_HPP
#define CHORDCODEC_CONTAINER_HPP

// Stream layout (all multi-byte integers big-endian, bits MSB-first):
//
//   "CHDC" | version u8 = 1 | block length N u32 | payload bit count u64 | flags u8
//
// followed by one group per run of blocks:
//
//   Z     : bit_width(N) bits
//   k_x   : ceil(log2 C(N, Z)) bits, absent when C(N, Z) == 1
//   [RLE] : 1 marker bit; when 1, a u16 run length in 2..65535 follows
//
// The last block is zero-padded to N bits and the final byte to 8 bits.

#include "chordcodec/bitio.hpp"
#include "chordcodec/combinatorics.hpp"
#include "chordcodec/errors.hpp"
#include "chordcodec/keytable.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chordcodec {

inline constexpr std::array<char, 4> stream_magic = { 'C', 'H', 'D', 'C' };
inline constexpr std::uint8_t stream_version = 1;
inline constexpr std::uint8_t flag_rle = 0x01;
inline constexpr unsigned header_bits = 8 * (4 + 1 + 4 + 8 + 1);
inline constexpr unsigned run_count_bits = 16;
inline constexpr std::uint64_t max_run = 0xFFFF;

struct StreamHeader {
    std::uint8_t version = stream_version;
    std::uint32_t block_length = 0;
    std::uint64_t payload_bit_count = 0;
    std::uint8_t flags = 0;

    bool rle() const noexcept { return (flags & flag_rle) != 0; }
    std::uint64_t block_count() const noexcept
    {
        return block_length == 0 ? 0 : (payload_bit_count + block_length - 1) / block_length;
    }

    void write(BitWriter& out) const
    {
        for (char c : stream_magic) {
            out.write(static_cast<std::uint8_t>(c), 8);
        }
        out.write(version, 8);
        out.write(block_length, 32);
        out.write(payload_bit_count, 64);
        out.write(flags, 8);
    }

    static StreamHeader read(BitReader& in)
    {
        for (char c : stream_magic) {
            const auto at = in.position();
            if (in.read(8) != static_cast<std::uint8_t>(c)) {
                throw StreamError(ErrorKind::BadMagic, at, "missing CHDC magic");
            }
        }
        StreamHeader h;
        const auto version_at = in.position();
        h.version = static_cast<std::uint8_t>(in.read(8));
        if (h.version != stream_version) {
            throw StreamError(ErrorKind::UnsupportedVersion, version_at,
                              "unsupported stream version " + std::to_string(h.version));
        }
        const auto length_at = in.position();
        h.block_length = static_cast<std::uint32_t>(in.read(32));
        h.payload_bit_count = in.read(64);
        const auto flags_at = in.position();
        h.flags = static_cast<std::uint8_t>(in.read(8));
        if (h.block_length == 0) {
            throw StreamError(ErrorKind::InvalidHeader, length_at, "block length must be positive");
        }
        if ((h.flags & ~flag_rle) != 0) {
            throw StreamError(ErrorKind::InvalidHeader, flags_at, "unknown flag bits set");
        }
        return h;
    }
};

/// Honest bit accounting for one compression pass.
struct SizeReport {
    std::uint64_t input_bits = 0;
    std::uint64_t output_bits = 0; ///< excludes the final byte's zero padding
    std::uint64_t header_bits = chordcodec::header_bits;
    std::uint64_t block_count = 0;
    /// (Z width, k width) for every emitted pair, in stream order.
    std::vector<std::pair<unsigned, unsigned>> per_block_breakdown;
    /// Marker bits and run counts; zero without RLE.
    std::uint64_t rle_overhead_bits = 0;
    /// output_bits / input_bits; empty for empty input.
    std::optional<double> ratio;

    std::uint64_t output_bytes() const noexcept { return (output_bits + 7) / 8; }
};

namespace detail {

    /// C(N, Z) and its field width, memoized per Z.
    class PairWidths {
    public:
        explicit PairWidths(std::uint64_t block_length)
            : block_length_(block_length)
            , z_width_(static_cast<unsigned>(std::bit_width(block_length)))
        {
        }

        unsigned z_width() const noexcept { return z_width_; }

        struct Entry {
            BigInt count;
            unsigned width;
        };

        const Entry& operator()(std::uint64_t ones)
        {
            auto it = cache_.find(ones);
            if (it == cache_.end()) {
                BigInt count = binomial(block_length_, ones);
                const unsigned width = index_width(count);
                it = cache_.emplace(ones, Entry { std::move(count), width }).first;
            }
            return it->second;
        }

    private:
        std::uint64_t block_length_;
        unsigned z_width_;
        std::unordered_map<std::uint64_t, Entry> cache_;
    };

    /// Turns a sequence of blocks into pair groups, writing them to an
    /// optional BitWriter and always tallying a SizeReport.
    class PairEmitter {
    public:
        PairEmitter(std::uint32_t block_length, bool rle, BitWriter* out)
            : widths_(block_length)
            , rle_(rle)
            , out_(out)
        {
            report_.output_bits = report_.header_bits;
        }

        void block(std::span<const std::uint8_t> bits)
        {
            ++report_.block_count;
            PairCode code { detail::popcount(bits), 0 };
            code.index = rank_bits(bits, code.ones);
            if (!rle_) {
                emit(code, 1);
                return;
            }
            if (pending_ && *pending_ == code && run_ < max_run) {
                ++run_;
                return;
            }
            flush_run();
            pending_ = std::move(code);
            run_ = 1;
        }

        SizeReport finish(std::uint64_t input_bits)
        {
            flush_run();
            report_.input_bits = input_bits;
            if (input_bits > 0) {
                report_.ratio = static_cast<double>(report_.output_bits) / static_cast<double>(input_bits);
            }
            return std::move(report_);
        }

    private:
        void flush_run()
        {
            if (pending_) {
                emit(*pending_, run_);
                pending_.reset();
            }
        }

        void emit(const PairCode& code, std::uint64_t run)
        {
            const unsigned zw = widths_.z_width();
            const unsigned kw = widths_(code.ones).width;
            report_.per_block_breakdown.emplace_back(zw, kw);
            report_.output_bits += zw + kw;
            std::uint64_t extra = 0;
            if (rle_) {
                extra = run > 1 ? 1 + run_count_bits : 1;
                report_.rle_overhead_bits += extra;
                report_.output_bits += extra;
            }
            if (out_) {
                out_->write(code.ones, zw);
                out_->write(code.index, kw);
                if (rle_) {
                    out_->write_bit(run > 1);
                    if (run > 1) {
                        out_->write(run, run_count_bits);
                    }
                }
            }
        }

        PairWidths widths_;
        bool rle_;
        BitWriter* out_;
        SizeReport report_;
        std::optional<PairCode> pending_;
        std::uint64_t run_ = 0;
    };

    inline void check_block_length(std::uint64_t block_length)
    {
        if (block_length == 0 || block_length > 0xFFFFFFFFULL) {
            domain_error("block length must be in 1..2^32-1, got " + std::to_string(block_length));
        }
    }

} // namespace detail

/// Incremental compressor. The total payload length goes in the header, so
/// it must be known up front; memory use is bounded by the block length.
class StreamEncoder {
public:
    StreamEncoder(std::ostream& out, std::uint32_t block_length, std::uint64_t payload_bits, bool rle)
        : writer_(out)
        , header_ { stream_version, block_length, payload_bits, static_cast<std::uint8_t>(rle ? flag_rle : 0) }
        , emitter_(block_length, rle, &writer_)
        , block_(block_length)
    {
        detail::check_block_length(block_length);
        header_.write(writer_);
    }

    void put_bit(bool bit)
    {
        if (consumed_ == header_.payload_bit_count) {
            domain_error("more bits supplied than the declared payload of "
                         + std::to_string(header_.payload_bit_count));
        }
        block_[filled_++] = bit ? 1 : 0;
        ++consumed_;
        if (filled_ == block_.size()) {
            emitter_.block(block_);
            filled_ = 0;
        }
    }

    void put_bytes(std::span<const std::uint8_t> bytes, std::uint64_t bit_count)
    {
        for (std::uint64_t i = 0; i < bit_count; ++i) {
            put_bit((bytes[i / 8] >> (7 - i % 8)) & 1U);
        }
    }

    /// Pads the tail block, flushes the stream and returns the accounting.
    SizeReport finish()
    {
        if (consumed_ != header_.payload_bit_count) {
            domain_error("declared " + std::to_string(header_.payload_bit_count) + " payload bits but received "
                         + std::to_string(consumed_));
        }
        if (filled_ > 0) {
            std::fill(block_.begin() + static_cast<std::ptrdiff_t>(filled_), block_.end(), std::uint8_t { 0 });
            emitter_.block(block_);
            filled_ = 0;
        }
        auto report = emitter_.finish(consumed_);
        writer_.flush();
        return report;
    }

private:
    BitWriter writer_;
    StreamHeader header_;
    detail::PairEmitter emitter_;
    std::vector<std::uint8_t> block_;
    std::size_t filled_ = 0;
    std::uint64_t consumed_ = 0;
};

/// Incremental decompressor.
class StreamDecoder {
public:
    explicit StreamDecoder(std::istream& in)
        : reader_(in)
        , header_(StreamHeader::read(reader_))
        , widths_(header_.block_length)
    {
    }

    const StreamHeader& header() const noexcept { return header_; }

    /// Calls sink(bit) for exactly payload_bit_count bits.
    template <class Sink>
    void decode(Sink&& sink)
    {
        const std::uint64_t n = header_.block_length;
        const std::uint64_t total_blocks = header_.block_count();
        std::uint64_t remaining_bits = header_.payload_bit_count;
        std::vector<std::uint8_t> block(n);
        std::uint64_t done = 0;
        while (done < total_blocks) {
            const auto pair_at = reader_.position();
            const std::uint64_t ones = reader_.read(widths_.z_width());
            if (ones > n) {
                throw StreamError(ErrorKind::InvalidPair, pair_at,
                                  "Z=" + std::to_string(ones) + " exceeds block length " + std::to_string(n));
            }
            const auto& entry = widths_(ones);
            const auto index_at = reader_.position();
            const BigInt index = reader_.read_big(entry.width);
            if (index >= entry.count) {
                throw StreamError(ErrorKind::InvalidPair, index_at,
                                  "k=" + index.str() + " out of range for C(" + std::to_string(n) + ","
                                      + std::to_string(ones) + ")=" + entry.count.str());
            }
            std::uint64_t run = 1;
            if (header_.rle()) {
                const auto run_at = reader_.position();
                if (reader_.read_bit(run_at)) {
                    run = reader_.read(run_count_bits);
                    if (run < 2) {
                        throw StreamError(ErrorKind::InvalidRun, run_at,
                                          "run length " + std::to_string(run) + " below the minimum of 2");
                    }
                }
                if (run > total_blocks - done) {
                    throw StreamError(ErrorKind::InvalidRun, run_at, "run extends past the declared payload");
                }
            }
            detail::unrank_bits(ones, index, block);
            for (std::uint64_t r = 0; r < run; ++r) {
                const std::uint64_t take = std::min<std::uint64_t>(n, remaining_bits);
                for (std::uint64_t i = 0; i < take; ++i) {
                    sink(block[i] != 0);
                }
                remaining_bits -= take;
            }
            done += run;
        }
    }

    BitBuffer decode()
    {
        BitBuffer out;
        decode([&out](bool bit) { out.push_back(bit); });
        return out;
    }

    /// Writes the payload as bytes, zero-padding the last one.
    void decode_to(std::ostream& out)
    {
        BitWriter writer(out);
        decode([&writer](bool bit) { writer.write_bit(bit); });
        writer.flush();
    }

private:
    BitReader reader_;
    StreamHeader header_;
    detail::PairWidths widths_;
};

inline std::vector<std::uint8_t> compress_stream(const BitBuffer& source, std::uint32_t block_length, bool rle)
{
    std::ostringstream out(std::ios::binary);
    StreamEncoder encoder(out, block_length, source.size(), rle);
    encoder.put_bytes(source.bytes(), source.size());
    encoder.finish();
    const std::string s = std::move(out).str();
    return { s.begin(), s.end() };
}

inline BitBuffer decompress_stream(std::span<const std::uint8_t> bytes)
{
    std::istringstream in(std::string(bytes.begin(), bytes.end()), std::ios::binary);
    StreamDecoder decoder(in);
    return decoder.decode();
}

/// Same accounting as compress_stream without producing the bytes.
inline SizeReport size_report(const BitBuffer& source, std::uint32_t block_length, bool rle)
{
    detail::check_block_length(block_length);
    detail::PairEmitter emitter(block_length, rle, nullptr);
    std::vector<std::uint8_t> block(block_length);
    std::uint64_t filled = 0;
    for (std::uint64_t i = 0; i < source.size(); ++i) {
        block[filled++] = source[i] ? 1 : 0;
        if (filled == block_length) {
            emitter.block(block);
            filled = 0;
        }
    }
    if (filled > 0) {
        std::fill(block.begin() + static_cast<std::ptrdiff_t>(filled), block.end(), std::uint8_t { 0 });
        emitter.block(block);
    }
    return emitter.finish(source.size());
}

} // namespace chordcodec

#endif // CHORDCODEC_CONTAINER_HPP
