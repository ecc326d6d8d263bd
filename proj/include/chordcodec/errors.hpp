#ifndef CHORDCODEC_ERRORS_HPP
#define CHORDCODEC_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chordcodec {

enum class ErrorKind {
    Domain,
    NoMatch,
    AmbiguousMatch,
    CapacityExceeded,
    BadMagic,
    UnsupportedVersion,
    InvalidHeader,
    TruncatedStream,
    InvalidPair,
    InvalidRun,
};

/// Stable, machine-parsable name used by the CLI error prefix.
constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NoMatch: return "NoMatch";
    case ErrorKind::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorKind::CapacityExceeded: return "CapacityExceeded";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::InvalidHeader: return "InvalidHeader";
    case ErrorKind::TruncatedStream: return "TruncatedStream";
    case ErrorKind::InvalidPair: return "InvalidPair";
    case ErrorKind::InvalidRun: return "InvalidRun";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what)
        , kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Container decoding failure. The offset counts bits from the first byte
/// of the stream, so byte offset is offset_bits() / 8.
class StreamError : public Error {
public:
    StreamError(ErrorKind kind, std::uint64_t offset_bits, const std::string& what)
        : Error(kind,
                what + " (at byte " + std::to_string(offset_bits / 8) + ", bit "
                    + std::to_string(offset_bits % 8) + ")")
        , offset_bits_(offset_bits)
    {
    }

    std::uint64_t offset_bits() const noexcept { return offset_bits_; }

private:
    std::uint64_t offset_bits_;
};

[[noreturn]] inline void domain_error(const std::string& what)
{
    throw Error(ErrorKind::Domain, what);
}

} // namespace chordcodec

#endif // CHORDCODEC_ERRORS_HPP
