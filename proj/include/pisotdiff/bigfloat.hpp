#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace pisotdiff {

/// Working precision in bits for high-precision evaluation.
struct Precision {
    long bits;

    explicit Precision(long b);

    /// Scaling rule: phases of level-n values lose ~n*log2(theta) leading
    /// bits to the integer part, so the default working precision is
    /// ceil(n_max*log2(theta)) + 128.
    static Precision for_level(double log2_theta, unsigned n_max);
};

/// Arbitrary-precision real number. Value semantics over mpfr_t; every
/// instance carries its own precision, binary operations round to the
/// larger operand precision (MPFR_RNDN).
class BigFloat {
public:
    BigFloat();
    explicit BigFloat(long prec_bits);
    BigFloat(const BigFloat& o);
    BigFloat(BigFloat&& o) noexcept;
    BigFloat& operator=(const BigFloat& o);
    BigFloat& operator=(BigFloat&& o) noexcept;
    ~BigFloat();

    static BigFloat from(double v, long prec_bits);
    static BigFloat from(const mpz_class& v, long prec_bits);
    static BigFloat from(const mpq_class& v, long prec_bits);
    static BigFloat from_string(const std::string& decimal, long prec_bits);
    static BigFloat pi(long prec_bits);
    static BigFloat euler_e(long prec_bits);
    static BigFloat sqrt_of(unsigned long n, long prec_bits);
    static BigFloat zero(long prec_bits);

    long precision() const { return mpfr_get_prec(x_); }

    BigFloat operator+(const BigFloat& o) const;
    BigFloat operator-(const BigFloat& o) const;
    BigFloat operator*(const BigFloat& o) const;
    BigFloat operator/(const BigFloat& o) const;
    BigFloat operator-() const;

    BigFloat& operator+=(const BigFloat& o);
    BigFloat& operator-=(const BigFloat& o);
    BigFloat& operator*=(const BigFloat& o);

    BigFloat abs() const;
    BigFloat floor() const;
    BigFloat sqrt() const;
    BigFloat square() const;
    /// Round to a (usually lower) precision.
    BigFloat round_to(long prec_bits) const;

    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    bool is_integer() const { return mpfr_integer_p(x_) != 0; }
    int sign() const { return mpfr_sgn(x_); }
    /// Binary exponent of the leading bit; only meaningful for nonzero values.
    long exponent() const { return mpfr_get_exp(x_); }

    int cmp(const BigFloat& o) const { return mpfr_cmp(x_, o.x_); }
    bool operator<(const BigFloat& o) const { return cmp(o) < 0; }
    bool operator<=(const BigFloat& o) const { return cmp(o) <= 0; }
    bool operator>(const BigFloat& o) const { return cmp(o) > 0; }
    bool operator>=(const BigFloat& o) const { return cmp(o) >= 0; }
    int cmp(double v) const { return mpfr_cmp_d(x_, v); }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
    /// Exact rational value of this float.
    mpq_class to_mpq() const;
    /// Decimal rendering with the given number of significant digits.
    std::string str(int digits = 20) const;

    /// sin and cos of x, each at x's precision.
    static void sin_cos(BigFloat& s, BigFloat& c, const BigFloat& x);

    mpfr_ptr raw() { return x_; }
    mpfr_srcptr raw() const { return x_; }

private:
    mpfr_t x_;
};

/// Complex number with BigFloat components.
struct BigComplex {
    BigFloat re, im;

    BigComplex() = default;
    BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
    static BigComplex zero(long prec_bits);
    static BigComplex one(long prec_bits);

    BigComplex operator+(const BigComplex& o) const;
    BigComplex operator-(const BigComplex& o) const;
    BigComplex operator*(const BigComplex& o) const;
    BigComplex& operator+=(const BigComplex& o);

    BigComplex scaled(const BigFloat& f) const;
    BigComplex divided(const BigFloat& f) const;

    BigFloat abs2() const;
    BigFloat abs() const;
};

/// e^{-2 pi i f} for a fractional part f in [0,1).
BigComplex unit_phase_neg(const BigFloat& frac);
/// e^{+2 pi i t}; t is reduced mod 1 internally.
BigComplex unit_phase_pos(const BigFloat& t);

} // namespace pisotdiff
