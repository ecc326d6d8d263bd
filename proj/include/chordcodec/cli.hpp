#ifndef CHORDCODEC_CLI_HPP
#define CHORDCODEC_CLI_HPP

// Command-line front end. Kept in a header so tests can drive it in-process
// with string streams; tools/chordcodec.cpp only forwards main().

#include "chordcodec/chordcodec.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace chordcodec::cli {

struct CliConfig {
    std::string command;
    std::uint32_t block_length = 16;
    unsigned precision_bits = Precision {}.bits;
    unsigned decimals = 9;
    std::optional<std::string> tolerance;
    bool rle = false;
    std::string input = "-";
    std::string output = "-";
    std::uint64_t enumeration_budget = DecodeLimits {}.enumeration_budget;
    std::uint64_t node_budget = DecodeLimits {}.node_budget;

    // positional arguments of individual commands
    std::string bits;
    std::uint64_t n_terms = 0;
    std::uint64_t ones = 0;
    std::string r_text;
    std::uint64_t n_min = 1;
    std::uint64_t n_max = 16;
    std::string z_policy = "all";

    Precision precision() const { return Precision { precision_bits, Precision {}.guard_bits }; }
};

/// Thrown for malformed command input; reported with the "Usage" prefix.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

    /// Accepts "0.0001", "1e-30" or "2^-96".
    inline Fixed parse_tolerance(const std::string& text, unsigned grid_bits)
    {
        if (auto caret = text.find("^-"); caret != std::string::npos && text.substr(0, caret) == "2") {
            return Fixed::pow2(-std::stoi(text.substr(caret + 2)));
        }
        const unsigned fine = grid_bits + 16;
        if (auto e = text.find_first_of("eE"); e != std::string::npos) {
            const auto mantissa = Fixed::parse_decimal(text.substr(0, e), fine + 128);
            const int exponent = std::stoi(text.substr(e + 1));
            const BigInt scale = chordcodec::detail::pow10(static_cast<unsigned>(std::abs(exponent)));
            BigInt raw = exponent >= 0 ? BigInt(mantissa.value.raw() * scale) : BigInt(mantissa.value.raw() / scale);
            return Fixed(std::move(raw), fine + 128).rescaled(fine);
        }
        return Fixed::parse_decimal(text, fine).value;
    }

    /// Half a unit in the last decimal place: 5 * 10^-(d+1). Short inputs such as
    /// "0.5" are read at the display precision, so they are not widened to +-0.05.
    inline Fixed half_last_place(unsigned decimals, unsigned grid_bits)
    {
        return Fixed::parse_decimal("0." + std::string(decimals, '0') + "5", grid_bits + 16).value;
    }

    inline std::vector<std::uint8_t> read_all(std::istream& in)
    {
        return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
    }

    inline std::vector<std::uint8_t> read_file(const std::string& path)
    {
        std::ifstream f(path, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot open '" + path + "' for reading");
        }
        return read_all(f);
    }

    class OutputTarget {
    public:
        OutputTarget(const std::string& path, std::ostream& standard)
            : stream_(&standard)
        {
            if (path != "-") {
                file_.open(path, std::ios::binary | std::ios::trunc);
                if (!file_) {
                    throw std::runtime_error("cannot open '" + path + "' for writing");
                }
                stream_ = &file_;
            }
        }
        std::ostream& stream() { return *stream_; }

    private:
        std::ofstream file_;
        std::ostream* stream_;
    };

    inline void print_report(std::ostream& out, const SizeReport& r)
    {
        out << "input_bits=" << r.input_bits << '\n'
            << "output_bits=" << r.output_bits << '\n'
            << "output_bytes=" << r.output_bytes() << '\n'
            << "header_bits=" << r.header_bits << '\n'
            << "blocks=" << r.block_count << '\n'
            << "pairs=" << r.per_block_breakdown.size() << '\n'
            << "rle_overhead_bits=" << r.rle_overhead_bits << '\n';
        if (r.ratio) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", *r.ratio);
            out << "ratio=" << buf << '\n';
        } else {
            out << "ratio=na\n";
        }
    }

    inline std::vector<std::uint64_t> z_values(std::uint64_t n, const std::string& policy)
    {
        std::vector<std::uint64_t> zs;
        if (policy == "all") {
            for (std::uint64_t z = 0; z <= n; ++z) {
                zs.push_back(z);
            }
        } else if (policy == "half") {
            zs.push_back(n / 2);
        } else {
            std::size_t used = 0;
            std::uint64_t z = 0;
            try {
                z = std::stoull(policy, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != policy.size()) {
                throw UsageError("--z must be 'all', 'half' or an integer, got '" + policy + "'");
            }
            if (z <= n) {
                zs.push_back(z);
            }
        }
        return zs;
    }

} // namespace detail

inline int cmd_encode(const CliConfig& cfg, std::ostream& out)
{
    BitBlock block;
    try {
        block = BitBlock::parse(cfg.bits);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (block.empty()) {
        throw UsageError("bit string must not be empty");
    }
    const auto triple = encode(block, cfg.precision());
    out << "N=" << triple.n_terms << " Z=" << triple.ones << " R=" << triple.r_sum.to_decimal(cfg.decimals) << '\n';
    return 0;
}

inline int cmd_decode(const CliConfig& cfg, std::ostream& out)
{
    const Precision precision = cfg.precision();
    Fixed::Parsed r;
    try {
        r = Fixed::parse_decimal(cfg.r_text, precision.grid_bits());
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const Fixed tolerance = cfg.tolerance ? detail::parse_tolerance(*cfg.tolerance, precision.grid_bits())
                                          : detail::half_last_place(std::max(r.decimals, cfg.decimals), precision.grid_bits());
    const CodeTriple triple { cfg.n_terms, cfg.ones, r.value, precision };
    DecodeLimits limits { cfg.enumeration_budget, cfg.node_budget };
    out << decode_bounded(triple, tolerance, limits).to_string() << '\n';
    return 0;
}

inline int cmd_table(const CliConfig& cfg, std::ostream& out)
{
    const auto table = build_key_table(cfg.n_terms, cfg.ones, cfg.precision(), cfg.enumeration_budget);
    write_key_table_csv(out, table, cfg.decimals);
    return 0;
}

inline int cmd_analyze(const CliConfig& cfg, std::ostream& out)
{
    if (cfg.n_min < 1 || cfg.n_min > cfg.n_max) {
        throw UsageError("need 1 <= --n-min <= --n-max");
    }
    out << "N,Z,k,min_gap,required_bits,log2_k\n";
    for (std::uint64_t n = cfg.n_min; n <= cfg.n_max; ++n) {
        const ProjectionTable table(n, cfg.precision());
        for (auto z : detail::z_values(n, cfg.z_policy)) {
            const BigInt k = binomial(n, z);
            char log2k[32];
            std::snprintf(log2k, sizeof log2k, "%.4f", std::log2(k.convert_to<double>()));
            out << n << ',' << z << ',' << k << ',';
            if (k > cfg.enumeration_budget) {
                out << "skipped,skipped," << log2k << '\n';
                continue;
            }
            const auto report = gap_report(table, z, cfg.enumeration_budget);
            if (!report.min_gap) {
                out << "na,na,";
            } else if (!report.distinct) {
                out << (report.min_gap->is_zero() ? std::string("0") : report.min_gap->to_scientific())
                    << ",collision,";
            } else {
                out << report.min_gap->to_scientific() << ',' << *report.required_bits << ',';
            }
            out << log2k << '\n';
        }
    }
    return 0;
}

inline int cmd_compress(const CliConfig& cfg, std::istream& in, std::ostream& standard_out)
{
    detail::OutputTarget target(cfg.output, standard_out);
    if (cfg.input == "-") {
        const auto bytes = detail::read_all(in);
        StreamEncoder encoder(target.stream(), cfg.block_length, bytes.size() * 8, cfg.rle);
        encoder.put_bytes(bytes, bytes.size() * 8);
        encoder.finish();
        return 0;
    }
    std::ifstream f(cfg.input, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + cfg.input + "' for reading");
    }
    const auto size = std::filesystem::file_size(cfg.input);
    StreamEncoder encoder(target.stream(), cfg.block_length, size * 8, cfg.rle);
    std::vector<char> chunk(1 << 16);
    while (f) {
        f.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
        const auto got = static_cast<std::size_t>(f.gcount());
        encoder.put_bytes({ reinterpret_cast<const std::uint8_t*>(chunk.data()), got }, got * 8);
    }
    encoder.finish();
    return 0;
}

inline int cmd_decompress(const CliConfig& cfg, std::istream& in, std::ostream& standard_out)
{
    std::ifstream file;
    std::istream* source = &in;
    if (cfg.input != "-") {
        file.open(cfg.input, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot open '" + cfg.input + "' for reading");
        }
        source = &file;
    }
    detail::OutputTarget target(cfg.output, standard_out);
    StreamDecoder decoder(*source);
    decoder.decode_to(target.stream());
    return 0;
}

/// Compress, decompress and compare; exit status 0 only on an exact match.
inline int cmd_verify(const CliConfig& cfg, std::istream& in, std::ostream& out)
{
    const auto bytes = cfg.input == "-" ? detail::read_all(in) : detail::read_file(cfg.input);
    std::ostringstream packed(std::ios::binary);
    StreamEncoder encoder(packed, cfg.block_length, bytes.size() * 8, cfg.rle);
    encoder.put_bytes(bytes, bytes.size() * 8);
    const SizeReport report = encoder.finish();

    std::istringstream unpack(packed.str(), std::ios::binary);
    StreamDecoder decoder(unpack);
    std::ostringstream restored(std::ios::binary);
    decoder.decode_to(restored);
    const std::string back = restored.str();
    const bool same = back.size() == bytes.size() && std::equal(back.begin(), back.end(), bytes.begin(), [](char a, std::uint8_t b) {
                          return static_cast<std::uint8_t>(a) == b;
                      });
    out << "verify: " << (same ? "PASS" : "FAIL") << '\n';
    out << "block_length=" << cfg.block_length << '\n' << "rle=" << (cfg.rle ? "on" : "off") << '\n';
    detail::print_report(out, report);
    return same ? 0 : 1;
}

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err)
{
    CliConfig cfg;
    CLI::App app { "Chord-projection block codec: encode/decode (N, Z, R) triples and (Z, k) pair streams" };
    app.require_subcommand(1, 1);

    auto add_precision = [&](CLI::App* sub) {
        sub->add_option("--precision", cfg.precision_bits, "Accuracy in bits for real arithmetic")
            ->check(CLI::Range(Precision::min_bits, 1u << 16));
    };
    auto add_decimals = [&](CLI::App* sub) {
        sub->add_option("--decimals", cfg.decimals, "Decimal places when printing reals")->check(CLI::Range(0u, 4096u));
    };
    auto add_budget = [&](CLI::App* sub) {
        sub->add_option("--budget", cfg.enumeration_budget, "Maximum C(N,Z) to enumerate");
    };
    auto add_stream_opts = [&](CLI::App* sub) {
        sub->add_option("-N,--block-length", cfg.block_length, "Bits per block")->check(CLI::Range(1u, 0xFFFFFFFFu));
        sub->add_flag("--rle", cfg.rle, "Group consecutive identical pairs");
    };

    auto* encode_cmd = app.add_subcommand("encode", "Bit string to N Z R");
    encode_cmd->add_option("bits", cfg.bits, "String over {0,1}")->required();
    add_precision(encode_cmd);
    add_decimals(encode_cmd);

    auto* decode_cmd = app.add_subcommand("decode", "N Z R back to the bit string");
    decode_cmd->add_option("n", cfg.n_terms, "Block length N")->required()->check(CLI::PositiveNumber);
    decode_cmd->add_option("z", cfg.ones, "Number of ones Z")->required();
    decode_cmd->add_option("r", cfg.r_text, "Sum R as a decimal")->required();
    decode_cmd->add_option("--tolerance", cfg.tolerance, "Match tolerance (decimal, 1e-30 or 2^-96)");
    decode_cmd->add_option("--node-budget", cfg.node_budget, "Maximum search nodes");
    add_precision(decode_cmd);
    add_decimals(decode_cmd);
    add_budget(decode_cmd);

    auto* table_cmd = app.add_subcommand("table", "Dump the key table for (N, Z) as CSV");
    table_cmd->add_option("n", cfg.n_terms, "Block length N")->required()->check(CLI::PositiveNumber);
    table_cmd->add_option("z", cfg.ones, "Number of ones Z")->required();
    add_precision(table_cmd);
    add_decimals(table_cmd);
    add_budget(table_cmd);

    auto* analyze_cmd = app.add_subcommand("analyze", "Combination-sum gaps and required bits per (N, Z)");
    analyze_cmd->add_option("--n-min", cfg.n_min, "Smallest N");
    analyze_cmd->add_option("--n-max", cfg.n_max, "Largest N");
    analyze_cmd->add_option("--z", cfg.z_policy, "all, half or a fixed Z");
    add_precision(analyze_cmd);
    add_budget(analyze_cmd);

    auto* compress_cmd = app.add_subcommand("compress", "Pack a byte stream into (Z, k) pairs");
    compress_cmd->add_option("input", cfg.input, "Input path or -");
    compress_cmd->add_option("output", cfg.output, "Output path or -");
    add_stream_opts(compress_cmd);

    auto* decompress_cmd = app.add_subcommand("decompress", "Unpack a stream written by compress");
    decompress_cmd->add_option("input", cfg.input, "Input path or -");
    decompress_cmd->add_option("output", cfg.output, "Output path or -");

    auto* verify_cmd = app.add_subcommand("verify", "Round-trip a file and print the size report");
    verify_cmd->add_option("input", cfg.input, "Input path or -")->required();
    add_stream_opts(verify_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: Usage: " << e.what() << '\n';
        return 2;
    }

    try {
        if (encode_cmd->parsed()) {
            return cmd_encode(cfg, out);
        }
        if (decode_cmd->parsed()) {
            return cmd_decode(cfg, out);
        }
        if (table_cmd->parsed()) {
            return cmd_table(cfg, out);
        }
        if (analyze_cmd->parsed()) {
            return cmd_analyze(cfg, out);
        }
        if (compress_cmd->parsed()) {
            return cmd_compress(cfg, in, out);
        }
        if (decompress_cmd->parsed()) {
            return cmd_decompress(cfg, in, out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(cfg, in, out);
        }
    } catch (const UsageError& e) {
        err << "error: Usage: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: IO: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace chordcodec::cli

#endif // CHORDCODEC_CLI_HPP
