#ifndef CHORDCODEC_PROJECTION_HPP
#define CHORDCODEC_PROJECTION_HPP

#include "chordcodec/errors.hpp"
#include "chordcodec/fixed.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace chordcodec {

namespace detail {

    // Bits added below the working precision while summing series, enough
    // to swallow the per-term truncations of every series used here.
    inline constexpr unsigned series_margin_bits = 16;

    /// atan(1/x) * 2^bits, each step truncated.
    inline BigInt atan_inverse_scaled(unsigned x, unsigned bits)
    {
        const BigInt x_squared = BigInt(x) * x;
        BigInt power = (BigInt(1) << bits) / x;
        BigInt sum = power;
        bool subtract = true;
        for (unsigned k = 1; power != 0; ++k) {
            power /= x_squared;
            const BigInt term = power / (2 * k + 1);
            if (subtract) {
                sum -= term;
            } else {
                sum += term;
            }
            subtract = !subtract;
        }
        return sum;
    }

    /// pi * 2^bits by Machin's formula.
    inline BigInt pi_scaled(unsigned bits)
    {
        return 16 * atan_inverse_scaled(5, bits) - 4 * atan_inverse_scaled(239, bits);
    }

    inline BigInt mul_scaled(const BigInt& a, const BigInt& b, unsigned bits)
    {
        return (a * b) >> bits;
    }

    /// Maclaurin series for sin(a) or cos(a), a * 2^bits given, |a| <= pi/4.
    inline BigInt sin_cos_series(const BigInt& arg, unsigned bits, bool cosine)
    {
        const BigInt arg_squared = mul_scaled(arg, arg, bits);
        BigInt term = cosine ? BigInt(BigInt(1) << bits) : arg;
        BigInt sum = term;
        bool subtract = true;
        for (unsigned k = cosine ? 1 : 2; term != 0; k += 2) {
            term = mul_scaled(term, arg_squared, bits) / (BigInt(k) * (k + 1));
            if (subtract) {
                sum -= term;
            } else {
                sum += term;
            }
            subtract = !subtract;
        }
        return sum;
    }

    /// Evaluates sin(n * pi / 2N) for 0 <= n <= N.
    ///
    /// Arguments above pi/4 are reflected to cos((N - n) * pi / 2N) so every
    /// series runs on [0, pi/4]. The quadrant endpoints are exact.
    class QuadrantSine {
    public:
        QuadrantSine(std::uint64_t n_terms, const Precision& precision)
            : n_terms_(n_terms)
            , series_bits_(precision.working_bits() + series_margin_bits)
            , grid_bits_(precision.grid_bits())
            , pi_(pi_scaled(series_bits_))
        {
        }

        /// Rounded to the precision's grid.
        Fixed operator()(std::uint64_t n) const
        {
            if (n == 0) {
                return Fixed::zero(grid_bits_);
            }
            if (n == n_terms_) {
                return Fixed::one(grid_bits_);
            }
            const bool reflect = 2 * n > n_terms_;
            const std::uint64_t m = reflect ? n_terms_ - n : n;
            const BigInt arg = (pi_ * m) / (BigInt(2) * n_terms_);
            const BigInt value = sin_cos_series(arg, series_bits_, reflect);
            return Fixed(value, series_bits_).rescaled(grid_bits_);
        }

        /// pi / 2N on the grid.
        Fixed angle() const
        {
            return Fixed(pi_ / (BigInt(2) * n_terms_), series_bits_).rescaled(grid_bits_);
        }

    private:
        std::uint64_t n_terms_;
        unsigned series_bits_;
        unsigned grid_bits_;
        BigInt pi_;
    };

    inline void check_projection_args(std::uint64_t n, std::uint64_t n_terms, const Precision& precision)
    {
        precision.validate();
        if (n_terms == 0) {
            domain_error("number of terms must be positive");
        }
        if (n < 1 || n > n_terms) {
            domain_error("projection index " + std::to_string(n) + " outside 1.."
                         + std::to_string(n_terms));
        }
    }

} // namespace detail

/// P_n = sin(n*pi/2N) - sin((n-1)*pi/2N) on the unit circle, accurate to
/// 2^-precision.bits. Both sines are rounded to the grid first, so a full
/// table telescopes to exactly 1.
inline Fixed projection(std::uint64_t n, std::uint64_t n_terms, const Precision& precision = {})
{
    detail::check_projection_args(n, n_terms, precision);
    const detail::QuadrantSine sine(n_terms, precision);
    return sine(n) - sine(n - 1);
}

/// All N chord projections of the quarter circle, largest first.
class ProjectionTable {
public:
    ProjectionTable(std::uint64_t n_terms, const Precision& precision = {})
        : n_terms_(n_terms)
        , precision_(precision)
    {
        precision.validate();
        if (n_terms == 0) {
            domain_error("number of terms must be positive");
        }
        const detail::QuadrantSine sine(n_terms, precision);
        theta_ = sine.angle();
        values_.reserve(n_terms);
        Fixed previous = sine(0);
        for (std::uint64_t n = 1; n <= n_terms; ++n) {
            Fixed current = sine(n);
            values_.push_back(current - previous);
            previous = std::move(current);
        }
    }

    std::uint64_t n_terms() const noexcept { return n_terms_; }
    const Precision& precision() const noexcept { return precision_; }
    unsigned grid_bits() const noexcept { return precision_.grid_bits(); }

    /// Sector angle pi / 2N.
    const Fixed& theta() const noexcept { return theta_; }
    static constexpr int radius = 1;

    std::span<const Fixed> values() const noexcept { return values_; }

    /// 1-based, P_1 .. P_N.
    const Fixed& operator[](std::uint64_t n) const { return values_.at(n - 1); }

    Fixed sum() const
    {
        Fixed total = Fixed::zero(grid_bits());
        for (const auto& v : values_) {
            total += v;
        }
        return total;
    }

private:
    std::uint64_t n_terms_;
    Precision precision_;
    Fixed theta_;
    std::vector<Fixed> values_;
};

inline ProjectionTable projection_table(std::uint64_t n_terms, const Precision& precision = {})
{
    return ProjectionTable(n_terms, precision);
}

} // namespace chordcodec

#endif // CHORDCODEC_PROJECTION_HPP
