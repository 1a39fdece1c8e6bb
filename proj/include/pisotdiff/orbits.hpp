#pragma once

#include "pisotdiff/amplitude.hpp"
#include "pisotdiff/quadfield.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pisotdiff {

/// Fractional parts of the orbit xi * theta^n, n = 1..N. fracs[i] holds
/// {xi * theta^{i+1}}; distances to the nearest integer derive from it.
struct OrbitReport {
    WaveNumber xi;
    bool xi_in_field; ///< exact ring route used for the powers
    RingParams ring;
    unsigned N;
    std::vector<double> fracs;
    double gap; ///< max - min of fracs over the default tail n >= max(1, N/5)
    std::vector<std::pair<double, unsigned>> clusters; ///< (center, count), filled on demand
    long prec_bits;

    double dist(std::size_t i) const { return fracs[i] <= 0.5 ? fracs[i] : 1.0 - fracs[i]; }
};

/// Scan the orbit at the given precision. Field elements ride on exact ring
/// powers and only touch floats at the final embedding; other xi multiply a
/// one-time high-precision evaluation onto exact powers of theta.
OrbitReport orbit(const WaveNumber& xi, const RingParams& ring, unsigned N, Precision prec);

struct GapEstimate {
    double gap;     ///< max - min of fracs over n >= tail_start
    double bound;   ///< 1/(1 + theta)
    bool satisfied; ///< gap >= bound - 1e-6; meaningful only for xi outside the field
};

GapEstimate gap_estimate(const OrbitReport& report, unsigned tail_start);

/// 1/(1 + theta) at the requested precision.
BigFloat gap_bound(const RingParams& ring, Precision prec);

/// Greedy cover of the tail fractional parts by eps-arcs on the circle
/// (0 and 1 identified), starting right after the largest empty arc.
/// Returns (arc midpoint, points covered) per cluster. Requires 0 < eps < 1/4.
std::vector<std::pair<double, unsigned>> cluster_cover(const OrbitReport& report, double eps,
                                                       unsigned tail_start);

unsigned cluster_count(const OrbitReport& report, double eps, unsigned tail_start);

struct DeltaRWitness {
    double delta;
    int r;
};

struct DeltaRFailure {
    std::string reason;
    /// Per grid delta (descending): smallest r <= r_max satisfying the
    /// return condition, or -1.
    std::vector<std::pair<double, int>> best_r_per_delta;
};

using DeltaRResult = std::variant<DeltaRWitness, DeltaRFailure>;

/// Largest grid delta (= i/delta_grid <= 1/2) with the smallest r <= r_max
/// such that every n <= N-r with ||xi theta^n|| < delta sees a return
/// ||xi theta^j|| >= delta for some j in (n, n+r]. Empirical over the
/// scanned range; field-element xi is refused.
DeltaRResult find_delta_r(const OrbitReport& report, int delta_grid, int r_max);

} // namespace pisotdiff
