#include "pisotdiff/amplitude.hpp"
#include "pisotdiff/errors.hpp"
#include "pisotdiff/geometry.hpp"
#include "pisotdiff/modelset.hpp"
#include "pisotdiff/substitution.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace pisotdiff;

TEST_CASE("module coordinates of small rationals") {
    auto one = module_coords(WaveNumber::rational(1), 1);
    REQUIRE(one.has_value());
    CHECK(one->c == -1);
    CHECK(one->d == 2);
    CHECK(is_in_module(WaveNumber::rational(1), 1));

    CHECK_FALSE(module_coords(WaveNumber::rational(mpq_class(1, 3)), 1).has_value());
    CHECK_FALSE(is_in_module(WaveNumber::rational(mpq_class(1, 3)), 1));

    auto zero = module_coords(WaveNumber::rational(0), 1);
    REQUIRE(zero.has_value());
    CHECK(zero->c == 0);
    CHECK(zero->d == 0);

    for (long m : {1L, 2L, 3L}) {
        CHECK_FALSE(is_in_module(WaveNumber::rational(mpq_class(1, 3)), m));
        CHECK_FALSE(is_in_module(WaveNumber::rational(mpq_class(1, 7)), m));
        CHECK_THROWS_AS(is_in_module(WaveNumber::sqrt_of(2), m), refused_input_error);
    }
}

TEST_CASE("module membership round-trips through the wave number") {
    Precision prec(192);
    for (long c = -3; c <= 3; ++c)
        for (long d = -3; d <= 3; ++d) {
            ModulePoint pt{c, d, 1};
            WaveNumber k = pt.wavenumber();
            CHECK(k.is_field_element());
            auto back = module_coords(k, 1);
            REQUIRE(back.has_value());
            CHECK(*back == pt);
        }
    // The value of (-1, 2) is exactly 1.
    ModulePoint unit{-1, 2, 1};
    CHECK(unit.value(prec).cmp(1.0) == 0);
    // Rational module elements are fixed by the star map.
    CHECK(unit.star_value(prec).cmp(1.0) == 0);
}

TEST_CASE("module point values match surd evaluation") {
    Precision prec(192);
    BigFloat sqrt5 = BigFloat::sqrt_of(5, prec.bits);
    BigFloat tau = (BigFloat::from(1.0, prec.bits) + sqrt5) / BigFloat::from(2.0, prec.bits);
    ModulePoint pt{2, -1, 1};
    BigFloat want = (BigFloat::from(2.0, prec.bits) - tau) / sqrt5;
    CHECK((pt.value(prec) - want).abs().to_double() < 1e-50);
    CHECK(pt.value(prec).to_double() == doctest::Approx(0.17082039).epsilon(1e-7));
    // Star value flips the conjugation on both the numerator and the surd.
    BigFloat taup = (BigFloat::from(1.0, prec.bits) - sqrt5) / BigFloat::from(2.0, prec.bits);
    BigFloat want_star = (BigFloat::from(2.0, prec.bits) - taup) / -sqrt5;
    CHECK((pt.star_value(prec) - want_star).abs().to_double() < 1e-50);
}

TEST_CASE("module points are closed under addition and subtraction") {
    Precision prec(128);
    ModulePoint a{1, 2, 1}, b{-2, 1, 1};
    ModulePoint sum{a.c + b.c, a.d + b.d, 1};
    BigFloat direct = a.value(prec) + b.value(prec);
    CHECK((sum.value(prec) - direct).abs().to_double() < 1e-30);
    CHECK(is_in_module(sum.wavenumber(), 1));

    QuadElem lhs = a.wavenumber().as_field_element(a.ring()) +
                   b.wavenumber().as_field_element(b.ring());
    CHECK(is_in_module(WaveNumber::field_element(lhs), 1));
    QuadElem diff = a.wavenumber().as_field_element(a.ring()) -
                    b.wavenumber().as_field_element(b.ring());
    CHECK(is_in_module(WaveNumber::field_element(diff), 1));
}

TEST_CASE("module enumeration is sorted, bounded, and complete for fixtures") {
    std::vector<ModulePoint> only_zero = enumerate_module(1, 0.0, 5);
    REQUIRE(only_zero.size() == 1);
    CHECK(only_zero[0] == ModulePoint{0, 0, 1});

    std::vector<ModulePoint> pts = enumerate_module(1, 1.0, 2);
    CHECK(std::count(pts.begin(), pts.end(), ModulePoint{-1, 2, 1}) == 1);
    CHECK(std::count(pts.begin(), pts.end(), ModulePoint{2, -1, 1}) == 1);
    Precision prec(128);
    double prev = -1.0;
    for (const ModulePoint& pt : pts) {
        double val = pt.value(prec).to_double();
        CHECK(val >= prev - 1e-15);
        CHECK(val <= 1.0 + 1e-9);
        CHECK(val >= -1e-9);
        CHECK(is_in_module(pt.wavenumber(), 1));
        prev = val;
    }
    CHECK(pts.front() == ModulePoint{0, 0, 1});

    CHECK_THROWS_AS(enumerate_module(1, -1.0, 2), config_error);
    CHECK_THROWS_AS(enumerate_module(1, 1.0, 0), config_error);
    CHECK_THROWS_AS(enumerate_module(0, 1.0, 1), config_error);
}

TEST_CASE("model set amplitude at the zero frequency is the density") {
    Precision prec(256);
    WindowSpec window{BigFloat::from(-0.7, prec.bits), BigFloat::from(0.4, prec.bits), true};
    BigFloat dens = BigFloat::from(0.7236067977, prec.bits);
    BigComplex a = modelset_amplitude(1, ModulePoint{0, 0, 1}, window, dens, prec);
    CHECK(a.re.cmp(dens) == 0);
    CHECK(a.im.is_zero());
}

TEST_CASE("model set amplitude guards its window") {
    Precision prec(128);
    BigFloat dens = BigFloat::from(0.7, prec.bits);
    WindowSpec advisory{BigFloat::from(-0.7, prec.bits), BigFloat::from(0.4, prec.bits), false};
    CHECK_THROWS_AS(modelset_amplitude(1, ModulePoint{0, 1, 1}, advisory, dens, prec),
                    refused_input_error);
    WindowSpec flat{BigFloat::from(0.1, prec.bits), BigFloat::from(0.1, prec.bits), true};
    CHECK_THROWS_AS(modelset_amplitude(1, ModulePoint{0, 1, 1}, flat, dens, prec),
                    refused_input_error);
    WindowSpec ok{BigFloat::from(-0.7, prec.bits), BigFloat::from(0.4, prec.bits), true};
    CHECK_THROWS_AS(modelset_amplitude(2, ModulePoint{0, 1, 1}, ok, dens, prec), config_error);
}

TEST_CASE("closed form intensity meets the exponential sum limit") {
    BinaryPisotRule fib("ab");
    Precision prec(256);
    WindowSpec window = window_estimate(fib, 24, prec);
    Patch patch = realize(iterate(fib, 24), fib.ring());
    BigFloat dens = density(patch, prec);

    ModulePoint pt{-1, 2, 1}; // k = 1
    double formula = modelset_amplitude(1, pt, window, dens, prec).abs2().to_double();
    AmplitudeSeries series = recursive_amplitudes(fib, pt.wavenumber(), 28, prec);
    double expsum = intensity_estimate(series).intensity;
    CHECK(formula == doctest::Approx(expsum).epsilon(0.05));
}
