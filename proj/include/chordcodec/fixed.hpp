#ifndef CHORDCODEC_FIXED_HPP
#define CHORDCODEC_FIXED_HPP

#include "chordcodec/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace chordcodec {

using BigInt = boost::multiprecision::cpp_int;

/// Accuracy contract for every real-valued quantity in the codec.
///
/// `bits` is the guaranteed absolute accuracy: a computed value is within
/// 2^-bits of the true one. Values live on a binary fixed-point grid of
/// bits + 2 fractional digits; the extra two digits absorb the rounding of
/// both endpoints when a projection is formed as a difference of two sines.
/// `guard_bits` are carried on top of the grid while evaluating series and
/// are dropped by a single round-to-nearest-even at the end.
struct Precision {
    unsigned bits = 192;
    unsigned guard_bits = 32;

    static constexpr unsigned min_bits = 32;
    static constexpr unsigned min_guard_bits = 8;

    constexpr unsigned grid_bits() const noexcept { return bits + 2; }
    constexpr unsigned working_bits() const noexcept { return grid_bits() + guard_bits; }

    void validate() const
    {
        if (bits < min_bits) {
            domain_error("precision must carry at least 32 bits, got " + std::to_string(bits));
        }
        if (guard_bits < min_guard_bits) {
            domain_error("guard must be at least 8 bits, got " + std::to_string(guard_bits));
        }
    }

    friend bool operator==(const Precision&, const Precision&) = default;
};

namespace detail {

    inline BigInt pow10(unsigned digits)
    {
        return boost::multiprecision::pow(BigInt(10), digits);
    }

    /// v / 2^shift, rounded to nearest with ties to even.
    inline BigInt shift_right_rne(const BigInt& v, unsigned shift)
    {
        if (shift == 0) {
            return v;
        }
        const bool negative = v < 0;
        BigInt mag = negative ? BigInt(-v) : v;
        BigInt q = mag >> shift;
        BigInt rem = mag - (q << shift);
        const BigInt half = BigInt(1) << (shift - 1);
        if (rem > half || (rem == half && bit_test(q, 0))) {
            ++q;
        }
        return negative ? BigInt(-q) : q;
    }

} // namespace detail

/// Signed binary fixed-point number: raw * 2^-frac_bits.
///
/// Arithmetic between values on different grids is carried out on the finer
/// grid, so addition, subtraction and comparison are always exact.
class Fixed {
public:
    Fixed() = default;
    Fixed(BigInt raw, unsigned frac_bits)
        : raw_(std::move(raw))
        , frac_bits_(frac_bits)
    {
    }

    static Fixed zero(unsigned frac_bits) { return Fixed(BigInt(0), frac_bits); }
    static Fixed one(unsigned frac_bits) { return Fixed(BigInt(1) << frac_bits, frac_bits); }

    /// 2^exponent on a grid fine enough to hold it exactly.
    static Fixed pow2(int exponent)
    {
        if (exponent >= 0) {
            return Fixed(BigInt(1) << exponent, 0);
        }
        return Fixed(BigInt(1), static_cast<unsigned>(-exponent));
    }

    struct Parsed;
    static Parsed parse_decimal(std::string_view text, unsigned frac_bits);

    const BigInt& raw() const noexcept { return raw_; }
    unsigned frac_bits() const noexcept { return frac_bits_; }

    bool is_zero() const { return raw_ == 0; }
    int sign() const { return raw_.sign(); }

    /// Same value moved to another grid; coarsening rounds to nearest even.
    Fixed rescaled(unsigned frac_bits) const
    {
        if (frac_bits >= frac_bits_) {
            return Fixed(raw_ << (frac_bits - frac_bits_), frac_bits);
        }
        return Fixed(detail::shift_right_rne(raw_, frac_bits_ - frac_bits), frac_bits);
    }

    /// Exact division by 2^k.
    Fixed scaled_down(unsigned k) const { return Fixed(raw_, frac_bits_ + k); }

    Fixed abs() const { return Fixed(raw_ < 0 ? BigInt(-raw_) : raw_, frac_bits_); }

    Fixed& operator+=(const Fixed& rhs)
    {
        align_to(rhs.frac_bits_);
        if (rhs.frac_bits_ == frac_bits_) {
            raw_ += rhs.raw_;
        } else {
            raw_ += rhs.raw_ << (frac_bits_ - rhs.frac_bits_);
        }
        return *this;
    }

    Fixed& operator-=(const Fixed& rhs)
    {
        align_to(rhs.frac_bits_);
        if (rhs.frac_bits_ == frac_bits_) {
            raw_ -= rhs.raw_;
        } else {
            raw_ -= rhs.raw_ << (frac_bits_ - rhs.frac_bits_);
        }
        return *this;
    }

    friend Fixed operator+(Fixed lhs, const Fixed& rhs) { return lhs += rhs; }
    friend Fixed operator-(Fixed lhs, const Fixed& rhs) { return lhs -= rhs; }

    friend std::strong_ordering operator<=>(const Fixed& a, const Fixed& b)
    {
        int c = 0;
        if (a.frac_bits_ == b.frac_bits_) {
            c = a.raw_.compare(b.raw_);
        } else if (a.frac_bits_ < b.frac_bits_) {
            c = BigInt(a.raw_ << (b.frac_bits_ - a.frac_bits_)).compare(b.raw_);
        } else {
            c = a.raw_.compare(BigInt(b.raw_ << (a.frac_bits_ - b.frac_bits_)));
        }
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    friend bool operator==(const Fixed& a, const Fixed& b) { return (a <=> b) == 0; }

    /// floor(log2(|x|)) for x != 0.
    long floor_log2() const
    {
        return static_cast<long>(boost::multiprecision::msb(abs().raw_)) - static_cast<long>(frac_bits_);
    }

    double to_double() const
    {
        return std::ldexp(raw_.convert_to<double>(), -static_cast<int>(frac_bits_));
    }

    /// Fixed-point decimal with `digits` places, rounded half away from zero.
    std::string to_decimal(unsigned digits) const
    {
        const bool negative = raw_ < 0;
        const BigInt scale = detail::pow10(digits);
        BigInt mag = negative ? BigInt(-raw_) : raw_;
        BigInt scaled = ((mag * scale << 1) + (BigInt(1) << frac_bits_)) >> (frac_bits_ + 1);
        std::string out = (negative && scaled != 0) ? "-" : "";
        out += BigInt(scaled / scale).str();
        if (digits > 0) {
            std::string frac = BigInt(scaled % scale).str();
            out += '.';
            out.append(digits - frac.size(), '0');
            out += frac;
        }
        return out;
    }

    /// Short scientific rendering for values spanning many magnitudes.
    std::string to_scientific(int significant = 6) const
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*e", significant - 1, to_double());
        return buf;
    }

private:
    void align_to(unsigned frac_bits)
    {
        if (frac_bits > frac_bits_) {
            raw_ <<= (frac_bits - frac_bits_);
            frac_bits_ = frac_bits;
        }
    }

    BigInt raw_ = 0;
    unsigned frac_bits_ = 0;
};

struct Fixed::Parsed {
    Fixed value;
    unsigned decimals = 0; ///< digits after the decimal point in the source text
};

/// Parses an unsigned decimal such as "0.534074174", "1" or ".5" onto the
/// given grid (round to nearest, ties to even).
inline Fixed::Parsed Fixed::parse_decimal(std::string_view text, unsigned frac_bits)
{
    std::string digits;
    unsigned decimals = 0;
    bool seen_point = false;
    for (char c : text) {
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits += c;
            decimals += seen_point ? 1 : 0;
        } else {
            domain_error("not a decimal number: '" + std::string(text) + "'");
        }
    }
    if (digits.empty()) {
        domain_error("not a decimal number: '" + std::string(text) + "'");
    }
    // a leading 0 would make the BigInt parser read octal
    const auto first = digits.find_first_not_of('0');
    const BigInt numerator(first == std::string::npos ? std::string("0") : digits.substr(first));
    const BigInt denominator = detail::pow10(decimals);
    // round(numerator * 2^F / 10^d), ties to even
    BigInt q, r;
    divide_qr(BigInt(numerator << frac_bits), denominator, q, r);
    const BigInt twice = r << 1;
    if (twice > denominator || (twice == denominator && bit_test(q, 0))) {
        ++q;
    }
    return { Fixed(std::move(q), frac_bits), decimals };
}

} // namespace chordcodec

#endif // CHORDCODEC_FIXED_HPP
