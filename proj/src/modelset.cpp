#include "pisotdiff/modelset.hpp"

#include "pisotdiff/errors.hpp"

#include <algorithm>
#include <string>

namespace pisotdiff {

namespace {

long module_disc(long m) {
    if (m < 1) throw config_error("module parameter m must be positive");
    return m * m + 4;
}

} // namespace

WaveNumber ModulePoint::wavenumber() const {
    long D = module_disc(m);
    // 1/sqrt(D) = (2*lambda - m)/D, so (c + d*lambda)/sqrt(D) expands to
    // ((2d - cm) + (2c + dm)*lambda)/D using lambda^2 = m*lambda + 1.
    QuadElem num(mpq_class(2 * d - c * m), mpq_class(2 * c + d * m), ring());
    return WaveNumber::field_element(num, mpz_class(D));
}

BigFloat ModulePoint::value(Precision prec) const {
    long wp = prec.bits + 32;
    BigFloat lam = ring().theta_value(Precision(wp));
    BigFloat num = BigFloat::from(mpz_class(c), wp) + BigFloat::from(mpz_class(d), wp) * lam;
    return (num / BigFloat::sqrt_of(static_cast<unsigned long>(module_disc(m)), wp))
        .round_to(prec.bits);
}

BigFloat ModulePoint::star_value(Precision prec) const {
    long wp = prec.bits + 32;
    BigFloat lam = ring().theta_value(Precision(wp), true);
    BigFloat num = BigFloat::from(mpz_class(c), wp) + BigFloat::from(mpz_class(d), wp) * lam;
    return (-(num / BigFloat::sqrt_of(static_cast<unsigned long>(module_disc(m)), wp)))
        .round_to(prec.bits);
}

std::optional<ModulePoint> module_coords(const WaveNumber& k, long m) {
    module_disc(m); // validates m
    if (!k.is_field_element())
        throw refused_input_error(
            "module membership needs an exact field element; a real literal only approximates "
            "its value");
    RingParams ring = RingParams::make(m, 1);
    if (auto kr = k.field_ring(); kr && *kr != ring)
        throw ring_mismatch_error("wave number lives in " + kr->str() + ", not " + ring.str());

    auto [u, v] = k.field_coords();
    mpq_class c = 2 * v - m * u;
    mpq_class d = 2 * u + m * v;
    c.canonicalize();
    d.canonicalize();
    if (c.get_den() != 1 || d.get_den() != 1) return std::nullopt;
    if (!c.get_num().fits_slong_p() || !d.get_num().fits_slong_p())
        throw refused_input_error("module coordinates exceed the machine-integer range");
    return ModulePoint{c.get_num().get_si(), d.get_num().get_si(), m};
}

bool is_in_module(const WaveNumber& k, long m) { return module_coords(k, m).has_value(); }

std::vector<ModulePoint> enumerate_module(long m, double k_max, long coeff_bound) {
    module_disc(m);
    if (k_max < 0) throw config_error("k_max must be nonnegative");
    if (coeff_bound < 1) throw config_error("coeff_bound must be at least 1");

    Precision prec(128);
    std::vector<std::pair<double, ModulePoint>> hits;
    for (long c = -coeff_bound; c <= coeff_bound; ++c)
        for (long d = -coeff_bound; d <= coeff_bound; ++d) {
            ModulePoint pt{c, d, m};
            double val = pt.value(prec).to_double();
            // Nonzero values are bounded away from 0, so the slack only
            // absorbs the final double rounding at the interval ends.
            if (val >= -1e-12 && val <= k_max + 1e-12) hits.emplace_back(val, pt);
        }
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<ModulePoint> out;
    out.reserve(hits.size());
    for (auto& h : hits) out.push_back(h.second);
    return out;
}

BigComplex modelset_amplitude(long m, const ModulePoint& pt, const WindowSpec& window,
                              const BigFloat& dens, Precision prec) {
    module_disc(m);
    if (pt.m != m) throw config_error("module point belongs to a different module parameter");
    if (!window.certified)
        throw refused_input_error(
            "amplitude formula needs a certified interval window (q = 1 family only)");
    if (!(window.lo < window.hi)) throw refused_input_error("window has no interior");

    if (pt.c == 0 && pt.d == 0) return {dens, BigFloat::zero(prec.bits)};

    long wp = prec.bits + 32;
    BigFloat kstar = pt.star_value(Precision(wp));
    BigFloat lo = window.lo.round_to(wp);
    BigFloat hi = window.hi.round_to(wp);

    // A = dens/width * (e^{2 pi i hi k*} - e^{2 pi i lo k*}) / (2 pi i k*);
    // dividing by i rotates the numerator by -pi/2.
    BigComplex diff = unit_phase_pos(hi * kstar) - unit_phase_pos(lo * kstar);
    BigComplex rotated{diff.im, -diff.re};
    BigFloat twopi = BigFloat::pi(wp) + BigFloat::pi(wp);
    BigComplex a = rotated.divided(twopi * kstar).scaled(dens.round_to(wp) / (hi - lo));
    return {a.re.round_to(prec.bits), a.im.round_to(prec.bits)};
}

} // namespace pisotdiff
