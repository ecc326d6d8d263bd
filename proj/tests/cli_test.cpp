#include "chordcodec/cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace chordcodec {
namespace {

    struct Outcome {
        int code;
        std::string out;
        std::string err;
    };

    Outcome run_cli(std::vector<std::string> args, const std::string& input = "")
    {
        args.insert(args.begin(), "chordcodec");
        std::vector<const char*> argv;
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        std::istringstream in(input);
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
        return { code, out.str(), err.str() };
    }

    std::vector<std::string> lines(const std::string& text)
    {
        std::vector<std::string> out;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) {
            out.push_back(line);
        }
        return out;
    }

    std::filesystem::path temp_file(const std::string& name, const std::string& contents)
    {
        const auto path = std::filesystem::temp_directory_path() / ("chordcodec_cli_" + name);
        std::ofstream f(path, std::ios::binary);
        f << contents;
        return path;
    }

    std::string slurp(const std::filesystem::path& path)
    {
        std::ifstream f(path, std::ios::binary);
        return { std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>() };
    }

    TEST(CliEncode, Examples)
    {
        EXPECT_EQ(run_cli({ "encode", "010111" }).out, "N=6 Z=4 R=0.534074174\n");
        EXPECT_EQ(run_cli({ "encode", "0" }).out, "N=1 Z=0 R=0.000000000\n");
        EXPECT_EQ(run_cli({ "encode", "1" }).out, "N=1 Z=1 R=1.000000000\n");
        EXPECT_EQ(run_cli({ "encode", "010111", "--decimals", "4" }).out, "N=6 Z=4 R=0.5341\n");
    }

    TEST(CliEncode, NonBinaryNamesThePosition)
    {
        const auto r = run_cli({ "encode", "0102" });
        EXPECT_EQ(r.code, 2);
        EXPECT_EQ(r.err.rfind("error: Usage:", 0), 0u);
        EXPECT_NE(r.err.find('4'), std::string::npos);
        EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    }

    TEST(CliDecode, Examples)
    {
        EXPECT_EQ(run_cli({ "decode", "6", "4", "0.534074174" }).out, "010111\n");
        EXPECT_EQ(run_cli({ "decode", "6", "4", "0.5" }).out, "001111\n");
        EXPECT_EQ(run_cli({ "decode", "6", "4", "0.866025404" }).out, "111100\n");
        EXPECT_EQ(run_cli({ "decode", "6", "4", "0.534074174", "--tolerance", "1e-9" }).out, "010111\n");
        EXPECT_EQ(run_cli({ "decode", "6", "4", "0.534074174", "--tolerance", "2^-30" }).out, "010111\n");
    }

    TEST(CliDecode, NoMatchExitsNonzero)
    {
        const auto r = run_cli({ "decode", "6", "4", "0.9" });
        EXPECT_EQ(r.code, 1);
        EXPECT_TRUE(r.out.empty());
        EXPECT_EQ(r.err.rfind("error: NoMatch:", 0), 0u);
        EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    }

    TEST(CliDecode, CoincidingSumsAreReportedAsAmbiguous)
    {
        // 1+3+6 and 2+4+5 have the same chord sum for N=6
        const auto r = run_cli({ "decode", "6", "3", "0.500000000" });
        EXPECT_EQ(r.code, 1);
        EXPECT_EQ(r.err.rfind("error: AmbiguousMatch:", 0), 0u);
    }

    TEST(CliDecode, MalformedArguments)
    {
        EXPECT_EQ(run_cli({ "decode", "6", "4", "abc" }).code, 2);
        EXPECT_EQ(run_cli({ "decode", "6", "7", "0.5" }).err.rfind("error: DomainError:", 0), 0u);
        EXPECT_EQ(run_cli({}).code, 2);
        EXPECT_EQ(run_cli({ "frobnicate" }).code, 2);
    }

    TEST(CliTable, Examples)
    {
        const auto r = run_cli({ "table", "6", "4" });
        ASSERT_EQ(r.code, 0);
        const auto rows = lines(r.out);
        ASSERT_EQ(rows.size(), 16u);
        EXPECT_EQ(rows[0], "k,positions,r_value");
        EXPECT_NE(std::find(rows.begin(), rows.end(), "13,2+4+5+6,0.534074174"), rows.end());

        EXPECT_EQ(run_cli({ "table", "3", "0" }).out, "k,positions,r_value\n0,,0.000000000\n");

        const auto big = run_cli({ "table", "30", "15", "--budget", "1000" });
        EXPECT_EQ(big.code, 1);
        EXPECT_EQ(big.err.rfind("error: CapacityExceeded:", 0), 0u);
        EXPECT_NE(big.err.find("155117520"), std::string::npos);
    }

    TEST(CliAnalyze, Rows)
    {
        const auto r = run_cli({ "analyze", "--n-min", "1", "--n-max", "12" });
        ASSERT_EQ(r.code, 0);
        const auto rows = lines(r.out);
        EXPECT_EQ(rows[0], "N,Z,k,min_gap,required_bits,log2_k");
        EXPECT_EQ(rows.size(), 1u + 90u); // sum over N of (N + 1)
        EXPECT_NE(std::find(rows.begin(), rows.end(), "1,1,1,na,na,0.0000"), rows.end());

        auto row_for = [&](const std::string& prefix) {
            const auto it = std::find_if(rows.begin(), rows.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
            return it == rows.end() ? std::string() : *it;
        };
        EXPECT_EQ(row_for("6,4,").rfind("6,4,15,", 0), 0u);
        EXPECT_NE(row_for("6,4,").find(",9,3.9069"), std::string::npos);
        EXPECT_NE(row_for("6,3,").find(",collision,"), std::string::npos);

        // (12, 6): either a resolvable cell needing >= 10 bits or a flagged collision
        const std::string twelve = row_for("12,6,924,");
        ASSERT_FALSE(twelve.empty());
        std::vector<std::string> fields;
        std::stringstream ss(twelve);
        for (std::string f; std::getline(ss, f, ',');) {
            fields.push_back(f);
        }
        ASSERT_EQ(fields.size(), 6u);
        if (fields[4] != "collision") {
            EXPECT_GE(std::stoi(fields[4]), 10);
        }
    }

    TEST(CliAnalyze, SkipsOversizedCells)
    {
        const auto r = run_cli({ "analyze", "--n-min", "30", "--n-max", "30", "--z", "half", "--budget", "1000" });
        ASSERT_EQ(r.code, 0);
        EXPECT_EQ(lines(r.out).at(1), "30,15,155117520,skipped,skipped,27.2088");
        EXPECT_EQ(run_cli({ "analyze", "--z", "many" }).code, 2);
        EXPECT_EQ(run_cli({ "analyze", "--n-min", "5", "--n-max", "4" }).code, 2);
    }

    TEST(CliVerify, ReportsPassAndRatio)
    {
        const auto path = temp_file("verify.bin", std::string(4096, '\0'));
        const auto r = run_cli({ "verify", path.string(), "-N", "16", "--rle" });
        EXPECT_EQ(r.code, 0);
        const auto rows = lines(r.out);
        ASSERT_FALSE(rows.empty());
        EXPECT_EQ(rows[0], "verify: PASS");
        EXPECT_NE(std::find(rows.begin(), rows.end(), "input_bits=32768"), rows.end());
        EXPECT_NE(r.out.find("ratio=0.00"), std::string::npos);
        std::filesystem::remove(path);

        const auto missing = run_cli({ "verify", "/nonexistent/chordcodec/input" });
        EXPECT_EQ(missing.code, 1);
        EXPECT_EQ(missing.err.rfind("error: IO:", 0), 0u);
        EXPECT_NE(missing.err.find("/nonexistent/chordcodec/input"), std::string::npos);
    }

    TEST(CliStreams, CompressDecompressFiles)
    {
        std::mt19937_64 rng(5);
        std::string payload(3001, '\0');
        for (auto& c : payload) {
            c = static_cast<char>(rng() & 0xFF);
        }
        const auto source = temp_file("source.bin", payload);
        const auto packed = std::filesystem::temp_directory_path() / "chordcodec_cli_packed.chdc";
        const auto restored = std::filesystem::temp_directory_path() / "chordcodec_cli_restored.bin";

        ASSERT_EQ(run_cli({ "compress", source.string(), packed.string(), "-N", "24" }).code, 0);
        ASSERT_EQ(run_cli({ "decompress", packed.string(), restored.string() }).code, 0);
        EXPECT_EQ(slurp(restored), payload);

        // standard streams give the same bytes
        const auto piped = run_cli({ "compress", "-N", "24" }, payload);
        EXPECT_EQ(piped.out, slurp(packed));
        EXPECT_EQ(run_cli({ "decompress" }, piped.out).out, payload);

        const auto corrupt = run_cli({ "decompress" }, "XHDC" + piped.out.substr(4));
        EXPECT_EQ(corrupt.code, 1);
        EXPECT_EQ(corrupt.err.rfind("error: BadMagic:", 0), 0u);

        for (const auto& p : { source, packed, restored }) {
            std::filesystem::remove(p);
        }
    }

    TEST(Cli, OutputIsDeterministic)
    {
        for (const auto& args : std::vector<std::vector<std::string>> {
                 { "encode", "1101001110" },
                 { "table", "8", "3" },
                 { "analyze", "--n-max", "7" },
                 { "compress", "-N", "5", "--rle" } }) {
            const auto a = run_cli(args, "determinism");
            const auto b = run_cli(args, "determinism");
            EXPECT_EQ(a.code, b.code);
            EXPECT_EQ(a.out, b.out);
        }
    }

    TEST(Cli, EncodeThenDecodeIsIdentity)
    {
        // every string for short lengths, a sample for longer ones
        std::mt19937_64 rng(24);
        for (int length = 1; length <= 24; ++length) {
            const std::uint64_t total = 1ULL << length;
            const std::uint64_t samples = std::min<std::uint64_t>(total, 40);
            for (std::uint64_t s = 0; s < samples; ++s) {
                const std::uint64_t mask = total <= 40 ? s : rng() % total;
                std::string bits;
                for (int i = 0; i < length; ++i) {
                    bits.push_back(((mask >> i) & 1U) ? '1' : '0');
                }
                const auto encoded = run_cli({ "encode", bits, "--decimals", "60" });
                ASSERT_EQ(encoded.code, 0);
                std::istringstream fields(encoded.out);
                std::string n, z, r;
                fields >> n >> z >> r;
                const auto decoded = run_cli({ "decode", n.substr(2), z.substr(2), r.substr(2) });
                if (decoded.code == 0) {
                    ASSERT_EQ(decoded.out, bits + "\n");
                } else {
                    // exact coincidences of chord sums leave no unique answer
                    ASSERT_EQ(decoded.err.rfind("error: AmbiguousMatch:", 0), 0u) << bits << " " << decoded.err;
                }
            }
        }
    }

} // namespace
} // namespace chordcodec
