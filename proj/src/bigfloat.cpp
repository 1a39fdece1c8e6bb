#include "pisotdiff/bigfloat.hpp"

#include "pisotdiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace pisotdiff {

Precision::Precision(long b) : bits(b) {
    if (b < 64)
        throw error("Precision must be at least 64 bits, got " + std::to_string(b));
}

Precision Precision::for_level(double log2_theta, unsigned n_max) {
    long b = static_cast<long>(std::ceil(log2_theta * n_max)) + 128;
    return Precision(std::max<long>(b, 64));
}

BigFloat::BigFloat() { mpfr_init2(x_, 64); }

BigFloat::BigFloat(long prec_bits) { mpfr_init2(x_, std::max<long>(prec_bits, MPFR_PREC_MIN)); }

BigFloat::BigFloat(const BigFloat& o) {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_set(x_, o.x_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(x_, MPFR_PREC_MIN);
    mpfr_swap(x_, o.x_);
}

BigFloat& BigFloat::operator=(const BigFloat& o) {
    if (this != &o) {
        mpfr_set_prec(x_, mpfr_get_prec(o.x_));
        mpfr_set(x_, o.x_, MPFR_RNDN);
    }
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
    if (this != &o) mpfr_swap(x_, o.x_);
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(x_); }

BigFloat BigFloat::from(double v, long prec_bits) {
    BigFloat r(prec_bits);
    mpfr_set_d(r.x_, v, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::from(const mpz_class& v, long prec_bits) {
    BigFloat r(prec_bits);
    mpfr_set_z(r.x_, v.get_mpz_t(), MPFR_RNDN);
    return r;
}

BigFloat BigFloat::from(const mpq_class& v, long prec_bits) {
    BigFloat r(prec_bits);
    mpfr_set_q(r.x_, v.get_mpq_t(), MPFR_RNDN);
    return r;
}

BigFloat BigFloat::from_string(const std::string& decimal, long prec_bits) {
    BigFloat r(prec_bits);
    if (mpfr_set_str(r.x_, decimal.c_str(), 10, MPFR_RNDN) != 0)
        throw error("cannot parse decimal literal '" + decimal + "'");
    return r;
}

BigFloat BigFloat::pi(long prec_bits) {
    BigFloat r(prec_bits);
    mpfr_const_pi(r.x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::euler_e(long prec_bits) {
    BigFloat r(prec_bits);
    mpfr_set_ui(r.x_, 1, MPFR_RNDN);
    mpfr_exp(r.x_, r.x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::sqrt_of(unsigned long n, long prec_bits) {
    BigFloat r(prec_bits);
    mpfr_sqrt_ui(r.x_, n, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::zero(long prec_bits) {
    BigFloat r(prec_bits);
    mpfr_set_zero(r.x_, 1);
    return r;
}

namespace {
long combined_prec(const BigFloat& a, const BigFloat& b) {
    return std::max(a.precision(), b.precision());
}
} // namespace

BigFloat BigFloat::operator+(const BigFloat& o) const {
    BigFloat r(combined_prec(*this, o));
    mpfr_add(r.raw(), x_, o.x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::operator-(const BigFloat& o) const {
    BigFloat r(combined_prec(*this, o));
    mpfr_sub(r.raw(), x_, o.x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::operator*(const BigFloat& o) const {
    BigFloat r(combined_prec(*this, o));
    mpfr_mul(r.raw(), x_, o.x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::operator/(const BigFloat& o) const {
    BigFloat r(combined_prec(*this, o));
    mpfr_div(r.raw(), x_, o.x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::operator-() const {
    BigFloat r(precision());
    mpfr_neg(r.raw(), x_, MPFR_RNDN);
    return r;
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
    mpfr_add(x_, x_, o.x_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& o) {
    mpfr_sub(x_, x_, o.x_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& o) {
    mpfr_mul(x_, x_, o.x_, MPFR_RNDN);
    return *this;
}

BigFloat BigFloat::abs() const {
    BigFloat r(precision());
    mpfr_abs(r.raw(), x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::floor() const {
    BigFloat r(precision());
    mpfr_floor(r.raw(), x_);
    return r;
}

BigFloat BigFloat::sqrt() const {
    BigFloat r(precision());
    mpfr_sqrt(r.raw(), x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::square() const {
    BigFloat r(precision());
    mpfr_sqr(r.raw(), x_, MPFR_RNDN);
    return r;
}

BigFloat BigFloat::round_to(long prec_bits) const {
    BigFloat r(prec_bits);
    mpfr_set(r.raw(), x_, MPFR_RNDN);
    return r;
}

mpq_class BigFloat::to_mpq() const {
    if (!mpfr_number_p(x_)) throw error("cannot convert non-finite BigFloat to rational");
    if (mpfr_zero_p(x_)) return mpq_class(0);
    mpq_t q;
    mpq_init(q);
    mpfr_get_q(q, x_);
    mpq_class r(q);
    mpq_clear(q);
    return r;
}

std::string BigFloat::str(int digits) const {
    char* s = nullptr;
    if (mpfr_asprintf(&s, "%.*Rg", digits, x_) < 0) throw error("mpfr_asprintf failed");
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

void BigFloat::sin_cos(BigFloat& s, BigFloat& c, const BigFloat& x) {
    long p = x.precision();
    BigFloat ss(p), cc(p);
    mpfr_sin_cos(ss.raw(), cc.raw(), x.raw(), MPFR_RNDN);
    s = std::move(ss);
    c = std::move(cc);
}

BigComplex BigComplex::zero(long prec_bits) {
    return {BigFloat::zero(prec_bits), BigFloat::zero(prec_bits)};
}

BigComplex BigComplex::one(long prec_bits) {
    return {BigFloat::from(1.0, prec_bits), BigFloat::zero(prec_bits)};
}

BigComplex BigComplex::operator+(const BigComplex& o) const { return {re + o.re, im + o.im}; }

BigComplex BigComplex::operator-(const BigComplex& o) const { return {re - o.re, im - o.im}; }

BigComplex BigComplex::operator*(const BigComplex& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
}

BigComplex& BigComplex::operator+=(const BigComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
}

BigComplex BigComplex::scaled(const BigFloat& f) const { return {re * f, im * f}; }

BigComplex BigComplex::divided(const BigFloat& f) const { return {re / f, im / f}; }

BigFloat BigComplex::abs2() const { return re.square() + im.square(); }

BigFloat BigComplex::abs() const { return abs2().sqrt(); }

BigComplex unit_phase_neg(const BigFloat& frac) {
    long p = frac.precision() + 32;
    BigFloat arg = BigFloat::pi(p) * BigFloat::from(2.0, p) * frac.round_to(p);
    BigFloat s(p), c(p);
    BigFloat::sin_cos(s, c, arg);
    return {c.round_to(frac.precision()), (-s).round_to(frac.precision())};
}

BigComplex unit_phase_pos(const BigFloat& t) {
    BigFloat f = t - t.floor();
    long p = f.precision() + 32;
    BigFloat arg = BigFloat::pi(p) * BigFloat::from(2.0, p) * f.round_to(p);
    BigFloat s(p), c(p);
    BigFloat::sin_cos(s, c, arg);
    return {c.round_to(t.precision()), s.round_to(t.precision())};
}

} // namespace pisotdiff
