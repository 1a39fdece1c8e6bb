#pragma once

#include "pisotdiff/amplitude.hpp"
#include "pisotdiff/geometry.hpp"
#include "pisotdiff/quadfield.hpp"

#include <optional>
#include <vector>

namespace pisotdiff {

/// Fourier-module element (c + d*lambda_m)/sqrt(m^2+4), where lambda_m is
/// the ring generator of the metallic-mean family (p = m, q = 1). The
/// coordinates (c, d) are unique for a given value.
struct ModulePoint {
    long c = 0;
    long d = 0;
    long m = 1;

    RingParams ring() const { return RingParams::make(m, 1); }
    /// The value as an exact field element: ((2d - cm) + (2c + dm)lambda)/D.
    WaveNumber wavenumber() const;
    /// (c + d*lambda_m)/sqrt(D) as a real.
    BigFloat value(Precision prec) const;
    /// Galois image (c + d*lambda'_m)/(-sqrt(D)); the sign comes from
    /// conjugating sqrt(D) = 2*lambda_m - m itself.
    BigFloat star_value(Precision prec) const;

    bool operator==(const ModulePoint& o) const { return c == o.c && d == o.d && m == o.m; }
};

/// Integer module coordinates of k if it has them: c = 2v' - m*u' and
/// d = 2u' + m*v' from the rational coordinates (u', v') of k in the basis
/// (1, lambda_m). Real literals are refused (membership is not decidable
/// from an approximation).
std::optional<ModulePoint> module_coords(const WaveNumber& k, long m);

bool is_in_module(const WaveNumber& k, long m);

/// All module points with |c|, |d| <= coeff_bound and 0 <= value <= k_max,
/// sorted by value.
std::vector<ModulePoint> enumerate_module(long m, double k_max, long coeff_bound);

/// Bragg amplitude of the model set with the given interval window:
///   A(k) = dens / width * \int_lo^hi exp(-2 pi i x (-k*)) dx,
/// the transform evaluated in closed form. Exactly dens at (0,0). Refuses
/// windows that are not certified intervals.
BigComplex modelset_amplitude(long m, const ModulePoint& pt, const WindowSpec& window,
                              const BigFloat& dens, Precision prec);

} // namespace pisotdiff
