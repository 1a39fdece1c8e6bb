#pragma once

#include "pisotdiff/bigfloat.hpp"

#include <gmpxx.h>

#include <string>

namespace pisotdiff {

/// Parameters of the quadratic ring Z[theta] with theta^2 = p*theta + q.
/// theta = (p + sqrt(p^2+4q))/2 is the principal root, theta' its conjugate.
class RingParams {
public:
    /// Validated construction: requires p >= q >= 1 (the Pisot class) and an
    /// irrational theta (non-square discriminant).
    static RingParams make(long p, long q);

    /// Bypasses the class checks (still requires p, q >= 1). Only for
    /// negative-control diagnostics; ring arithmetic on a ring with a
    /// rational theta is not meaningful.
    static RingParams make_unchecked(long p, long q);

    long p() const { return p_; }
    long q() const { return q_; }
    long discriminant() const { return d_; }

    /// log2(theta), a double-precision convenience for size estimates.
    double log2_theta() const;
    /// theta (or theta') as a high-precision real.
    BigFloat theta_value(Precision prec, bool conjugate = false) const;

    bool operator==(const RingParams& o) const { return p_ == o.p_ && q_ == o.q_; }
    bool operator!=(const RingParams& o) const { return !(*this == o); }

    std::string str() const;

private:
    RingParams(long p, long q);
    long p_, q_, d_;
};

enum class Embedding { principal, conjugate };

/// Element u + v*theta of Q(theta) with exact rational coordinates.
class QuadElem {
public:
    QuadElem(mpq_class u, mpq_class v, RingParams ring);

    static QuadElem zero(const RingParams& ring) { return {0, 0, ring}; }
    static QuadElem one(const RingParams& ring) { return {1, 0, ring}; }
    static QuadElem theta(const RingParams& ring) { return {0, 1, ring}; }

    const mpq_class& u() const { return u_; }
    const mpq_class& v() const { return v_; }
    const RingParams& ring() const { return ring_; }

    QuadElem operator+(const QuadElem& o) const;
    QuadElem operator-(const QuadElem& o) const;
    QuadElem operator*(const QuadElem& o) const;
    QuadElem operator-() const;
    bool operator==(const QuadElem& o) const;

    QuadElem scaled(const mpq_class& c) const { return {u_ * c, v_ * c, ring_}; }

    /// Galois conjugate: u + v*theta  ->  (u + p*v) - v*theta.
    QuadElem conjugate() const;
    /// x + conj(x) = 2u + p*v, always rational.
    mpq_class trace() const;
    /// x * conj(x), always rational.
    mpq_class norm() const;

    std::string str() const;

private:
    void check_ring(const QuadElem& o, const char* op) const;
    mpq_class u_, v_;
    RingParams ring_;
};

/// mul(x, y) as a named free function (same as operator*).
QuadElem mul(const QuadElem& x, const QuadElem& y);

/// theta^n as an exact ring element, by binary exponentiation.
QuadElem theta_power(const RingParams& ring, unsigned n);

/// F_n with F_0 = 0, F_1 = 1, F_n = p F_{n-1} + q F_{n-2}.
mpz_class recurrence_f(const RingParams& ring, unsigned n);

/// Evaluate u + v*theta (or u + v*theta') to the requested precision.
BigFloat embed(const QuadElem& x, Precision prec, Embedding which = Embedding::principal);

struct FracDist {
    BigFloat frac; ///< {x} in [0,1)
    BigFloat dist; ///< ||x|| = min({x}, 1-{x}) in [0,1/2]
};

/// Fractional part and distance to the nearest integer of x, assuming x
/// carries relative error at most 2^{-prec.bits + kFracGuardBits}. Throws
/// precision_exhausted_error when that error band straddles an integer.
FracDist frac_and_dist(const BigFloat& x, Precision prec);

/// Same, for a ring element: embeds at prec first (principal embedding).
FracDist frac_and_dist(const QuadElem& x, Precision prec);

/// Guard bits of the frac_and_dist error model.
inline constexpr long kFracGuardBits = 8;

/// Working-precision helper. Covers the n*log2(theta) integer-part loss of
/// level-n phases; with near_integer_orbit also the |theta'|^n shrinkage of
/// ||xi*theta^n|| for field-element xi.
Precision recommended_bits(const RingParams& ring, unsigned n_max, bool near_integer_orbit = false);

} // namespace pisotdiff
