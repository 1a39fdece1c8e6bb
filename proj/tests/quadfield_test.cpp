#include "pisotdiff/errors.hpp"
#include "pisotdiff/quadfield.hpp"
#include "pisotdiff/substitution.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace pisotdiff;

namespace {

BigFloat tol_bits(int bits) { return BigFloat::from(std::ldexp(1.0, -bits), 32); }

} // namespace

TEST_CASE("ring validation accepts q <= p and rejects the rest") {
    CHECK(RingParams::make(1, 1).discriminant() == 5);
    CHECK(RingParams::make(2, 1).discriminant() == 8);
    CHECK(RingParams::make(4, 3).discriminant() == 28);

    CHECK_THROWS_AS(RingParams::make(1, 2), invalid_ring_error);
    CHECK_THROWS_AS(RingParams::make(3, 4), invalid_ring_error);
    CHECK_THROWS_AS(RingParams::make(0, 1), invalid_ring_error);
    CHECK_THROWS_AS(RingParams::make(1, 0), invalid_ring_error);
    CHECK_THROWS_AS(RingParams::make(-2, 1), invalid_ring_error);

    // Within the class the discriminant p^2 + 4q is never a perfect square:
    // p^2 < D <= p^2 + 4p < (p+2)^2 and D = (p+1)^2 would force 4q = 2p+1.
    for (long p = 1; p <= 20; ++p)
        for (long q = 1; q <= p; ++q) CHECK_NOTHROW(RingParams::make(p, q));
}

TEST_CASE("unchecked boundary ring has a rational root and fails the PV test") {
    RingParams ring = RingParams::make_unchecked(1, 2); // discriminant 9
    CHECK(ring.theta_value(Precision(64)).cmp(2.0) == 0);
    CHECK_FALSE(eigen(ring).is_pv);
    CHECK_THROWS_AS(RingParams::make_unchecked(0, 1), invalid_ring_error);
}

TEST_CASE("multiplication follows the defining quadratic relation") {
    RingParams fib = RingParams::make(1, 1);
    QuadElem t = QuadElem::theta(fib);
    CHECK(t * t == QuadElem(1, 1, fib));
    CHECK((QuadElem::one(fib) + t) * (QuadElem::one(fib) + t) == QuadElem(2, 3, fib));
    CHECK(mul(t, QuadElem::one(fib)) == t);

    RingParams silver = RingParams::make(2, 1);
    QuadElem s = QuadElem::theta(silver);
    CHECK(s * s == QuadElem(1, 2, silver));

    QuadElem x(mpq_class(1, 2), mpq_class(-2, 3), fib);
    QuadElem y(mpq_class(3), mpq_class(1, 5), fib);
    // (u1 + v1 t)(u2 + v2 t) = (u1 u2 + q v1 v2) + (u1 v2 + u2 v1 + p v1 v2) t
    mpq_class u = mpq_class(1, 2) * 3 + mpq_class(-2, 3) * mpq_class(1, 5);
    mpq_class v = mpq_class(1, 2) * mpq_class(1, 5) + mpq_class(3) * mpq_class(-2, 3) +
                  mpq_class(-2, 3) * mpq_class(1, 5);
    CHECK(x * y == QuadElem(u, v, fib));
}

TEST_CASE("theta powers match repeated multiplication") {
    for (auto [p, q] : {std::pair<long, long>{1, 1}, {2, 1}, {3, 2}}) {
        RingParams ring = RingParams::make(p, q);
        QuadElem acc = QuadElem::one(ring);
        for (unsigned n = 0; n <= 40; ++n) {
            CHECK(theta_power(ring, n) == acc);
            acc = acc * QuadElem::theta(ring);
        }
    }
    RingParams fib = RingParams::make(1, 1);
    CHECK(theta_power(fib, 5) == QuadElem(3, 5, fib));
    CHECK(theta_power(fib, 0) == QuadElem::one(fib));
}

TEST_CASE("linear recurrence table") {
    RingParams fib = RingParams::make(1, 1);
    std::vector<long> want = {0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55};
    for (unsigned n = 0; n < want.size(); ++n) CHECK(recurrence_f(fib, n) == want[n]);

    RingParams r32 = RingParams::make(3, 2);
    CHECK(recurrence_f(r32, 2) == 3);
    CHECK(recurrence_f(r32, 3) == 11);
    CHECK(recurrence_f(r32, 4) == 39);

    CHECK(recurrence_f(RingParams::make(2, 1), 3) == 5);

    // Against a direct two-term loop for a larger ring.
    RingParams r43 = RingParams::make(4, 3);
    mpz_class a = 0, b = 1; // F_0, F_1
    for (unsigned n = 0; n <= 60; ++n) {
        CHECK(recurrence_f(r43, n) == a);
        mpz_class next = 4 * b + 3 * a;
        a = b;
        b = next;
    }
}

TEST_CASE("power identity with the recurrence pair") {
    for (long p = 1; p <= 4; ++p)
        for (long q = 1; q <= p; ++q) {
            RingParams ring = RingParams::make(p, q);
            for (unsigned n = 1; n <= 25; ++n) {
                QuadElem want(mpq_class(q * recurrence_f(ring, n - 1)),
                              mpq_class(recurrence_f(ring, n)), ring);
                CHECK(theta_power(ring, n) == want);
            }
        }
}

TEST_CASE("recurrence closed form through both embeddings") {
    Precision prec(256);
    for (auto [p, q] : {std::pair<long, long>{1, 1}, {2, 1}, {3, 3}}) {
        RingParams ring = RingParams::make(p, q);
        BigFloat sqrt_d = BigFloat::sqrt_of((unsigned long)ring.discriminant(), prec.bits);
        for (unsigned n = 1; n <= 50; ++n) {
            QuadElem tp = theta_power(ring, n);
            BigFloat diff = embed(tp, prec) - embed(tp, prec, Embedding::conjugate);
            BigFloat fn = diff / sqrt_d - BigFloat::from(recurrence_f(ring, n), prec.bits);
            CHECK(fn.abs() < tol_bits(150));
        }
    }
}

TEST_CASE("embedding accuracy against direct surd evaluation") {
    RingParams fib = RingParams::make(1, 1);
    Precision prec(256);
    BigFloat golden = (BigFloat::from(1.0, prec.bits) + BigFloat::sqrt_of(5, prec.bits)) /
                      BigFloat::from(2.0, prec.bits);
    CHECK((embed(QuadElem::theta(fib), prec) - golden).abs() < tol_bits(240));
    CHECK(embed(QuadElem::theta(fib), prec, Embedding::conjugate).to_double() ==
          doctest::Approx(-0.6180339887498949).epsilon(1e-12));
    CHECK(embed(QuadElem::one(fib), prec).cmp(1.0) == 0);
    CHECK(embed(QuadElem(3, 5, fib), prec).to_double() ==
          doctest::Approx(3.0 + 5.0 * 1.618033988749895).epsilon(1e-12));
}

TEST_CASE("embedded powers track float powers") {
    RingParams fib = RingParams::make(1, 1);
    Precision prec(256);
    BigFloat t = embed(QuadElem::theta(fib), prec);
    BigFloat acc = BigFloat::from(1.0, prec.bits);
    for (unsigned n = 1; n <= 30; ++n) {
        acc = acc * t;
        CHECK((embed(theta_power(fib, n), prec) - acc).abs() < tol_bits(220));
    }
}

TEST_CASE("galois conjugation is an involutive ring map") {
    RingParams fib = RingParams::make(1, 1);
    QuadElem x(mpq_class(2, 3), mpq_class(-1, 2), fib);
    QuadElem y(mpq_class(5), mpq_class(7, 4), fib);
    CHECK(x.conjugate().conjugate() == x);
    CHECK((x * y).conjugate() == x.conjugate() * y.conjugate());
    CHECK((x + y).conjugate() == x.conjugate() + y.conjugate());

    CHECK(x.trace() == 2 * mpq_class(2, 3) + 1 * mpq_class(-1, 2));
    QuadElem norm_elem = x * x.conjugate();
    CHECK(norm_elem.v() == 0);
    CHECK(norm_elem.u() == x.norm());
    CHECK(QuadElem::theta(fib).norm() == -1); // theta * theta' = -q
    CHECK(QuadElem::theta(RingParams::make(3, 2)).norm() == -2);
}

TEST_CASE("elements of different rings do not combine") {
    QuadElem a = QuadElem::theta(RingParams::make(1, 1));
    QuadElem b = QuadElem::theta(RingParams::make(2, 1));
    CHECK_THROWS_AS(a + b, ring_mismatch_error);
    CHECK_THROWS_AS(a * b, ring_mismatch_error);
}

TEST_CASE("fractional part splits exactly") {
    Precision prec(128);
    FracDist fd = frac_and_dist(BigFloat::from(2.75, 128), prec);
    CHECK(fd.frac.cmp(0.75) == 0);
    CHECK(fd.dist.cmp(0.25) == 0);

    RingParams fib = RingParams::make(1, 1);
    FracDist fi = frac_and_dist(QuadElem(5, 0, fib), prec);
    CHECK(fi.frac.is_zero());
    CHECK(fi.dist.is_zero());

    FracDist fr = frac_and_dist(QuadElem(mpq_class(7, 3), 0, fib), prec);
    CHECK(fr.frac.cmp(BigFloat::from(mpq_class(1, 3), fr.frac.precision())) == 0);
    FracDist fneg = frac_and_dist(QuadElem(mpq_class(-1, 3), 0, fib), prec);
    CHECK(fneg.frac.cmp(BigFloat::from(mpq_class(2, 3), fneg.frac.precision())) == 0);
    CHECK(fneg.dist.cmp(BigFloat::from(mpq_class(1, 3), fneg.dist.precision())) == 0);

    FracDist fsq = frac_and_dist(theta_power(fib, 2), prec); // theta^2 = 1 + theta
    CHECK(fsq.frac.to_double() == doctest::Approx(0.6180339887).epsilon(1e-9));
    CHECK(fsq.dist.to_double() == doctest::Approx(0.3819660113).epsilon(1e-9));
}

TEST_CASE("near-integer values exhaust the declared precision") {
    BigFloat x = BigFloat::from(1.0, 512) + BigFloat::from(std::ldexp(1.0, -300), 512);
    CHECK_THROWS_AS(frac_and_dist(x, Precision(256)), precision_exhausted_error);
    FracDist ok = frac_and_dist(x, Precision(512));
    CHECK(ok.dist.exponent() == -299);
}

TEST_CASE("recommended working precision scales with level and orbit type") {
    RingParams fib = RingParams::make(1, 1);
    long base = recommended_bits(fib, 100).bits;
    CHECK(base >= 128 + 69);
    CHECK(recommended_bits(fib, 2000).bits > base);
    CHECK(recommended_bits(fib, 2000, true).bits > recommended_bits(fib, 2000).bits);
    // q = theta for p=q=1 and near-integer orbits shrink like (q/theta)^n,
    // so the near-integer surcharge roughly doubles the level term.
    long near = recommended_bits(fib, 2000, true).bits;
    CHECK(near >= 2890);
    CHECK(near <= 2930);
}
