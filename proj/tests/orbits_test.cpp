#include "pisotdiff/errors.hpp"
#include "pisotdiff/orbits.hpp"
#include "pisotdiff/quadfield.hpp"

#include <doctest.h>

#include <cmath>
#include <variant>
#include <vector>

using namespace pisotdiff;

namespace {

OrbitReport fixture(std::vector<double> fracs) {
    RingParams fib = RingParams::make(1, 1);
    return OrbitReport{WaveNumber::pi(), false, fib,
                       (unsigned)fracs.size(), std::move(fracs), 0.0, {}, 128};
}

} // namespace

TEST_CASE("fractional parts of golden powers") {
    RingParams fib = RingParams::make(1, 1);
    OrbitReport rep = orbit(WaveNumber::rational(1), fib, 5, Precision(256));
    REQUIRE(rep.fracs.size() == 5);
    CHECK(rep.xi_in_field);
    const double want[5] = {0.6180339887, 0.6180339887, 0.2360679775, 0.8541019662,
                            0.0901699437};
    for (int i = 0; i < 5; ++i) CHECK(rep.fracs[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

TEST_CASE("zero seed gives the zero orbit") {
    RingParams fib = RingParams::make(1, 1);
    OrbitReport rep = orbit(WaveNumber::rational(0), fib, 50, Precision(128));
    for (double f : rep.fracs) CHECK(f == 0.0);
    CHECK(gap_estimate(rep, 10).gap == 0.0);
}

TEST_CASE("a single step lands at half the generator") {
    RingParams fib = RingParams::make(1, 1);
    OrbitReport rep = orbit(WaveNumber::rational(mpq_class(1, 2)), fib, 1, Precision(128));
    REQUIRE(rep.fracs.size() == 1);
    CHECK(rep.fracs[0] == doctest::Approx(0.8090169944).epsilon(1e-9));
}

TEST_CASE("orbit input validation") {
    RingParams fib = RingParams::make(1, 1);
    CHECK_THROWS_AS(orbit(WaveNumber::rational(1), fib, 0, Precision(128)), config_error);
    OrbitReport rep = orbit(WaveNumber::sqrt_of(2), fib, 10, Precision(128));
    CHECK_THROWS_AS(gap_estimate(rep, 10), config_error);
    CHECK_THROWS_AS(cluster_cover(rep, 0.3, 2), config_error);
    CHECK_THROWS_AS(cluster_cover(rep, 0.0, 2), config_error);
}

TEST_CASE("exact ring route agrees with one-shot float evaluation") {
    RingParams fib = RingParams::make(1, 1);
    Precision prec(512);
    QuadElem xi(1, 1, fib); // theta^2, a near-integer orbit
    OrbitReport exact = orbit(WaveNumber::field_element(xi), fib, 200, prec);
    CHECK(exact.xi_in_field);
    OrbitReport floated =
        orbit(WaveNumber::literal(embed(xi, Precision(640))), fib, 200, prec);
    CHECK_FALSE(floated.xi_in_field);
    for (unsigned i = 0; i < 200; ++i) {
        double d = std::abs(exact.fracs[i] - floated.fracs[i]);
        if (d > 0.5) d = 1.0 - d; // folded wrap at the integers
        CHECK(d < 1e-9);
    }
}

TEST_CASE("gap bound is one over one plus the generator") {
    RingParams fib = RingParams::make(1, 1);
    Precision prec(256);
    BigFloat bound = gap_bound(fib, prec);
    CHECK(bound.to_double() == doctest::Approx(0.3819660113).epsilon(1e-9));
    // For the golden ring 1/(1+theta) = 1/theta^2 exactly.
    BigFloat theta = fib.theta_value(prec);
    BigFloat inv_sq = BigFloat::from(1.0, prec.bits) / theta.square();
    CHECK((bound - inv_sq).abs() < BigFloat::from(std::ldexp(1.0, -240), 32));
}

TEST_CASE("an equidistributing orbit spreads past the gap bound") {
    RingParams fib = RingParams::make(1, 1);
    OrbitReport rep = orbit(WaveNumber::sqrt_of(2), fib, 500, Precision(512));
    GapEstimate gap = gap_estimate(rep, 100);
    CHECK(gap.bound == doctest::Approx(0.3819660113).epsilon(1e-9));
    CHECK(gap.gap >= gap.bound - 1e-6);
    CHECK(gap.satisfied);
}

TEST_CASE("cluster covering on the circle") {
    CHECK(cluster_count(fixture({0.5}), 0.01, 0) == 1);
    CHECK(cluster_count(fixture({0.999, 0.001, 0.002}), 0.01, 0) == 1);
    CHECK(cluster_count(fixture({0.1, 0.5, 0.9}), 0.01, 0) == 3);
    CHECK(cluster_count(fixture({0.1, 0.105, 0.5, 0.9}), 0.01, 0) == 3);

    auto clusters = cluster_cover(fixture({0.999, 0.001, 0.002}), 0.01, 0);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].second == 3);
    double center = clusters[0].first;
    CHECK((center < 0.01 || center > 0.99));
}

TEST_CASE("near-integer orbits collapse to one circle cluster") {
    RingParams fib = RingParams::make(1, 1);
    Precision prec = recommended_bits(fib, 400, true);
    OrbitReport rep = orbit(WaveNumber::rational(1), fib, 400, prec);
    CHECK(cluster_count(rep, 0.01, rep.N / 5) == 1);
}

TEST_CASE("an off-field orbit keeps spawning clusters as the scan grows") {
    RingParams fib = RingParams::make(1, 1);
    Precision prec = recommended_bits(fib, 2000);
    unsigned c500 = cluster_count(orbit(WaveNumber::sqrt_of(2), fib, 500, prec), 0.01, 100);
    unsigned c2000 = cluster_count(orbit(WaveNumber::sqrt_of(2), fib, 2000, prec), 0.01, 400);
    CHECK(c2000 > c500);
}

TEST_CASE("return-time witness for an equidistributing orbit") {
    RingParams fib = RingParams::make(1, 1);
    OrbitReport rep = orbit(WaveNumber::sqrt_of(2), fib, 500, Precision(512));
    DeltaRResult res = find_delta_r(rep, 20, 25);
    REQUIRE(std::holds_alternative<DeltaRWitness>(res));
    DeltaRWitness wit = std::get<DeltaRWitness>(res);
    CHECK(wit.delta >= 0.05);
    CHECK(wit.r >= 1);
    CHECK(wit.r <= 25);

    // Independent re-scan of the defining implication.
    for (unsigned n = 0; n + wit.r < rep.N; ++n) {
        if (rep.dist(n) >= wit.delta) continue;
        bool returned = false;
        for (int j = 1; j <= wit.r && !returned; ++j)
            returned = rep.dist(n + j) >= wit.delta;
        CHECK(returned);
    }
}

TEST_CASE("all-far orbits give the vacuous top-of-grid witness") {
    DeltaRResult res = find_delta_r(fixture(std::vector<double>(40, 0.5)), 20, 25);
    REQUIRE(std::holds_alternative<DeltaRWitness>(res));
    CHECK(std::get<DeltaRWitness>(res).delta == doctest::Approx(0.5));
    CHECK(std::get<DeltaRWitness>(res).r == 1);
}

TEST_CASE("orbits pinned to the integers never find a witness") {
    DeltaRResult res = find_delta_r(fixture(std::vector<double>(40, 0.0)), 20, 25);
    REQUIRE(std::holds_alternative<DeltaRFailure>(res));
    const DeltaRFailure& fail = std::get<DeltaRFailure>(res);
    CHECK(fail.best_r_per_delta.size() == 10);
    for (auto [delta, r] : fail.best_r_per_delta) CHECK(r == -1);
    CHECK_FALSE(fail.reason.empty());
}

TEST_CASE("field seeds are rejected by the witness search") {
    RingParams fib = RingParams::make(1, 1);
    OrbitReport rep = orbit(WaveNumber::rational(1), fib, 50, Precision(256));
    CHECK_THROWS_AS(find_delta_r(rep, 20, 25), refused_input_error);
    OrbitReport ok = orbit(WaveNumber::sqrt_of(2), fib, 50, Precision(256));
    CHECK_THROWS_AS(find_delta_r(ok, 1, 25), config_error);
    CHECK_THROWS_AS(find_delta_r(ok, 20, 0), config_error);
}
