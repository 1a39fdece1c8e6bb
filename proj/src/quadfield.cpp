#include "pisotdiff/quadfield.hpp"

#include "pisotdiff/errors.hpp"

#include <cmath>
#include <sstream>

namespace pisotdiff {

namespace {

bool is_perfect_square(long d) {
    if (d < 0) return false;
    mpz_class z(d);
    return mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

} // namespace

RingParams::RingParams(long p, long q) : p_(p), q_(q), d_(p * p + 4 * q) {}

RingParams RingParams::make(long p, long q) {
    if (p < 1 || q < 1)
        throw invalid_ring_error("ring requires p >= 1 and q >= 1, got p=" + std::to_string(p) +
                                 " q=" + std::to_string(q));
    if (q > p)
        throw invalid_ring_error("ring requires q <= p (Pisot class), got p=" + std::to_string(p) +
                                 " q=" + std::to_string(q));
    if (p > (1L << 20))
        throw invalid_ring_error("p too large: " + std::to_string(p));
    long d = p * p + 4 * q;
    if (is_perfect_square(d))
        throw invalid_ring_error("discriminant " + std::to_string(d) +
                                 " is a perfect square; theta would be rational");
    return RingParams(p, q);
}

RingParams RingParams::make_unchecked(long p, long q) {
    if (p < 1 || q < 1)
        throw invalid_ring_error("ring requires p >= 1 and q >= 1 even unchecked");
    if (p > (1L << 20) || q > (1L << 20))
        throw invalid_ring_error("ring parameters too large");
    return RingParams(p, q);
}

double RingParams::log2_theta() const {
    double theta = (p_ + std::sqrt(static_cast<double>(d_))) / 2.0;
    return std::log2(theta);
}

BigFloat RingParams::theta_value(Precision prec, bool conjugate) const {
    long wp = prec.bits + 32;
    BigFloat sd = BigFloat::from(mpz_class(d_), wp).sqrt();
    BigFloat pp = BigFloat::from(mpz_class(p_), wp);
    BigFloat two = BigFloat::from(2.0, wp);
    BigFloat t = conjugate ? (pp - sd) / two : (pp + sd) / two;
    return t.round_to(prec.bits);
}

std::string RingParams::str() const {
    return "Z[theta], theta^2 = " + std::to_string(p_) + "*theta + " + std::to_string(q_);
}

QuadElem::QuadElem(mpq_class u, mpq_class v, RingParams ring)
    : u_(std::move(u)), v_(std::move(v)), ring_(ring) {
    u_.canonicalize();
    v_.canonicalize();
}

void QuadElem::check_ring(const QuadElem& o, const char* op) const {
    if (ring_ != o.ring_)
        throw ring_mismatch_error(std::string("cannot ") + op + " elements of " + ring_.str() +
                                  " and " + o.ring_.str());
}

QuadElem QuadElem::operator+(const QuadElem& o) const {
    check_ring(o, "add");
    return {u_ + o.u_, v_ + o.v_, ring_};
}

QuadElem QuadElem::operator-(const QuadElem& o) const {
    check_ring(o, "subtract");
    return {u_ - o.u_, v_ - o.v_, ring_};
}

QuadElem QuadElem::operator*(const QuadElem& o) const {
    check_ring(o, "multiply");
    // (u1 + v1 t)(u2 + v2 t) with t^2 = p t + q
    mpq_class vv = v_ * o.v_;
    mpq_class u = u_ * o.u_ + ring_.q() * vv;
    mpq_class v = u_ * o.v_ + v_ * o.u_ + ring_.p() * vv;
    return {std::move(u), std::move(v), ring_};
}

QuadElem QuadElem::operator-() const { return {-u_, -v_, ring_}; }

bool QuadElem::operator==(const QuadElem& o) const {
    return ring_ == o.ring_ && u_ == o.u_ && v_ == o.v_;
}

QuadElem QuadElem::conjugate() const { return {u_ + ring_.p() * v_, -v_, ring_}; }

mpq_class QuadElem::trace() const { return 2 * u_ + ring_.p() * v_; }

mpq_class QuadElem::norm() const {
    // (u + v t)(u + p v - v t) has zero theta-coefficient
    return u_ * u_ + ring_.p() * u_ * v_ - ring_.q() * v_ * v_;
}

std::string QuadElem::str() const {
    std::ostringstream os;
    os << u_.get_str() << " + " << v_.get_str() << "*theta";
    return os.str();
}

QuadElem mul(const QuadElem& x, const QuadElem& y) { return x * y; }

QuadElem theta_power(const RingParams& ring, unsigned n) {
    QuadElem result = QuadElem::one(ring);
    QuadElem base = QuadElem::theta(ring);
    while (n > 0) {
        if (n & 1u) result = result * base;
        n >>= 1u;
        if (n > 0) base = base * base;
    }
    return result;
}

mpz_class recurrence_f(const RingParams& ring, unsigned n) {
    mpz_class a = 0, b = 1; // F_0, F_1
    if (n == 0) return a;
    for (unsigned i = 1; i < n; ++i) {
        mpz_class next = ring.p() * b + ring.q() * a;
        a = std::move(b);
        b = std::move(next);
    }
    return b;
}

BigFloat embed(const QuadElem& x, Precision prec, Embedding which) {
    long wp = prec.bits + 32;
    BigFloat t = x.ring().theta_value(Precision(wp), which == Embedding::conjugate);
    BigFloat u = BigFloat::from(x.u(), wp);
    BigFloat v = BigFloat::from(x.v(), wp);
    return (u + v * t).round_to(prec.bits);
}

FracDist frac_and_dist(const BigFloat& x, Precision prec) {
    if (!mpfr_number_p(x.raw())) throw error("frac_and_dist requires a finite input");
    long wp = std::max(x.precision(), prec.bits) + 8;
    if (x.is_integer()) return {BigFloat::zero(prec.bits), BigFloat::zero(prec.bits)};

    BigFloat xw = x.round_to(wp);
    BigFloat frac = xw - xw.floor();
    BigFloat one = BigFloat::from(1.0, wp);
    BigFloat dist = frac;
    if (frac > one - frac) dist = one - frac;

    // Error model: x carries relative error <= 2^{-prec.bits + guard}. If the
    // distance to the nearest integer is inside that band, the sign of the
    // separation is not determined at this precision.
    long err_exp = (x.is_zero() ? 0 : x.exponent()) - prec.bits + kFracGuardBits;
    if (!dist.is_zero() && dist.exponent() <= err_exp)
        throw precision_exhausted_error(
            "value is within the error band of an integer (dist ~ 2^" +
            std::to_string(dist.exponent()) + ", error band 2^" + std::to_string(err_exp) +
            "); retry with more bits");
    return {frac.round_to(prec.bits), dist.round_to(prec.bits)};
}

FracDist frac_and_dist(const QuadElem& x, Precision prec) {
    if (x.v() == 0) {
        // Rational input: the fractional part is exact.
        mpq_class u = x.u();
        mpz_class num = u.get_num(), den = u.get_den();
        mpz_class f = num % den; // sign of num
        if (f < 0) f += den;
        mpq_class fq(f, den);
        fq.canonicalize();
        mpq_class dq = fq;
        if (fq > mpq_class(1, 2)) dq = mpq_class(1) - fq;
        return {BigFloat::from(fq, prec.bits), BigFloat::from(dq, prec.bits)};
    }
    return frac_and_dist(embed(x, Precision(prec.bits + 32)), prec);
}

Precision recommended_bits(const RingParams& ring, unsigned n_max, bool near_integer_orbit) {
    double l2t = ring.log2_theta();
    long bits = static_cast<long>(std::ceil(l2t * n_max)) + 128;
    if (near_integer_orbit) {
        // ||xi theta^n|| ~ |theta'|^n = (q/theta)^n for field-element xi
        double l2tp = std::log2(static_cast<double>(ring.q())) - l2t;
        if (l2tp < 0) bits += static_cast<long>(std::ceil(-l2tp * n_max));
    }
    return Precision(std::max<long>(bits, 64));
}

} // namespace pisotdiff
