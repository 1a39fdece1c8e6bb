#include "pisotdiff/amplitude.hpp"

#include "pisotdiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pisotdiff {

// ---------------------------------------------------------------- WaveNumber

WaveNumber WaveNumber::rational(const mpq_class& value) {
    WaveNumber k;
    mpq_class u = value;
    u.canonicalize();
    k.rep_ = Field{std::move(u), mpq_class(0), std::nullopt};
    return k;
}

WaveNumber WaveNumber::field_element(const QuadElem& num, const mpz_class& den) {
    if (den == 0) throw config_error("wave number denominator must be nonzero");
    mpq_class d(den);
    mpq_class u = num.u() / d;
    mpq_class v = num.v() / d;
    u.canonicalize();
    v.canonicalize();
    if (v == 0) return rational(u);
    WaveNumber k;
    k.rep_ = Field{std::move(u), std::move(v), num.ring()};
    return k;
}

WaveNumber WaveNumber::literal(const BigFloat& value) {
    WaveNumber k;
    k.rep_ = value;
    return k;
}

WaveNumber WaveNumber::sqrt_of(unsigned long n) {
    mpz_class m(static_cast<unsigned long>(n));
    if (mpz_perfect_square_p(m.get_mpz_t())) {
        mpz_class r;
        mpz_sqrt(r.get_mpz_t(), m.get_mpz_t());
        return rational(mpq_class(r));
    }
    WaveNumber k;
    k.rep_ = Named{Named::Which::sqrt_int, n};
    return k;
}

WaveNumber WaveNumber::pi() {
    WaveNumber k;
    k.rep_ = Named{Named::Which::pi, 0};
    return k;
}

WaveNumber WaveNumber::euler_e() {
    WaveNumber k;
    k.rep_ = Named{Named::Which::e, 0};
    return k;
}

WaveNumber::Kind WaveNumber::kind() const {
    return std::holds_alternative<Field>(rep_) ? Kind::field_element : Kind::real_literal;
}

std::pair<mpq_class, mpq_class> WaveNumber::field_coords() const {
    const auto* f = std::get_if<Field>(&rep_);
    if (!f) throw refused_input_error("wave number is not a field element");
    return {f->u, f->v};
}

std::optional<RingParams> WaveNumber::field_ring() const {
    const auto* f = std::get_if<Field>(&rep_);
    if (!f) throw refused_input_error("wave number is not a field element");
    return f->ring;
}

QuadElem WaveNumber::as_field_element(const RingParams& ring) const {
    const auto* f = std::get_if<Field>(&rep_);
    if (!f) throw refused_input_error("wave number is not a field element");
    if (f->ring && *f->ring != ring)
        throw ring_mismatch_error("wave number lives in " + f->ring->str() + ", not " +
                                  ring.str());
    return {f->u, f->v, ring};
}

BigFloat WaveNumber::eval(Precision prec) const {
    if (const auto* f = std::get_if<Field>(&rep_)) {
        if (f->v == 0) return BigFloat::from(f->u, prec.bits);
        return embed(QuadElem(f->u, f->v, *f->ring), prec);
    }
    if (const auto* fx = std::get_if<BigFloat>(&rep_)) return fx->round_to(prec.bits);
    const auto& nm = std::get<Named>(rep_);
    switch (nm.which) {
    case Named::Which::sqrt_int: return BigFloat::sqrt_of(nm.arg, prec.bits);
    case Named::Which::pi: return BigFloat::pi(prec.bits);
    case Named::Which::e: break;
    }
    return BigFloat::euler_e(prec.bits);
}

BigFloat WaveNumber::times(const QuadElem& x, Precision prec) const {
    if (std::holds_alternative<Field>(rep_))
        return embed(as_field_element(x.ring()) * x, prec);
    Precision wp(prec.bits + 32);
    return (eval(wp) * embed(x, wp)).round_to(prec.bits);
}

std::string WaveNumber::describe() const {
    if (const auto* f = std::get_if<Field>(&rep_)) {
        if (f->v == 0) return f->u.get_str();
        return QuadElem(f->u, f->v, *f->ring).str();
    }
    if (const auto* fx = std::get_if<BigFloat>(&rep_)) return fx->str(20);
    const auto& nm = std::get<Named>(rep_);
    switch (nm.which) {
    case Named::Which::sqrt_int: return "sqrt(" + std::to_string(nm.arg) + ")";
    case Named::Which::pi: return "pi";
    case Named::Which::e: break;
    }
    return "e";
}

// ------------------------------------------------------------------- phases

BigFloat phase_fraction(const WaveNumber& k, const QuadElem& x, Precision prec) {
    if (k.is_field_element()) return frac_and_dist(k.as_field_element(x.ring()) * x, prec).frac;
    return frac_and_dist(k.times(x, prec), prec).frac;
}

BigComplex direct_amplitude(const Patch& patch, const WaveNumber& k, Precision prec) {
    if (patch.size() == 0) throw refused_input_error("direct_amplitude needs a nonempty patch");
    const RingParams& ring = patch.ring();
    Precision wp(prec.bits + 32);

    // Phase increments of the two tile lengths, already reduced mod 1. The
    // running fraction below is re-reduced after every step, so only these
    // two values ever need the full-size reduction.
    BigFloat inc_a = phase_fraction(k, QuadElem::theta(ring), wp);
    BigFloat inc_b = phase_fraction(k, QuadElem::one(ring), wp);

    BigFloat one = BigFloat::from(1.0, wp.bits);
    BigFloat frac = BigFloat::zero(wp.bits);
    BigComplex sum = BigComplex::one(wp.bits); // j = 0 sits at the origin
    for (std::size_t j = 1; j < patch.size(); ++j) {
        frac += (patch.letter(j - 1) == Letter::A) ? inc_a : inc_b;
        if (frac >= one) frac -= one; // exact: both operands in [1, 2)
        sum += unit_phase_neg(frac);
    }
    return {sum.re.round_to(prec.bits), sum.im.round_to(prec.bits)};
}

std::pair<BigComplex, BigComplex> fg_coefficients(const BinaryPisotRule& rule, unsigned n,
                                                  const WaveNumber& k, Precision prec) {
    const RingParams ring = rule.ring();
    Precision wp(prec.bits + 32);
    BigComplex f = BigComplex::zero(wp.bits);
    BigComplex g = BigComplex::zero(wp.bits);
    QuadElem offset = QuadElem::zero(ring); // left endpoint of the current block
    for (const auto& [letter, level] : blocks(rule, n)) {
        BigComplex term = unit_phase_neg(phase_fraction(k, offset, wp));
        if (letter == Letter::A)
            f += term;
        else
            g += term;
        offset = offset + theta_power(ring, level);
    }
    return {BigComplex{f.re.round_to(prec.bits), f.im.round_to(prec.bits)},
            BigComplex{g.re.round_to(prec.bits), g.im.round_to(prec.bits)}};
}

AmplitudeSeries recursive_amplitudes(const BinaryPisotRule& rule, const WaveNumber& k,
                                     unsigned n_max, Precision prec) {
    AmplitudeSeries series{rule.ring(), prec, k.describe(), {}};
    series.entries.reserve(n_max + 1);

    BigFloat theta = rule.ring().theta_value(prec);
    BigFloat pow = BigFloat::from(1.0, prec.bits); // theta^n alongside the loop
    BigComplex prev2 = BigComplex::one(prec.bits); // A_0
    BigComplex prev = BigComplex::one(prec.bits);  // A_1

    series.entries.push_back({0, prev2, prev2});
    if (n_max >= 1) {
        pow *= theta;
        series.entries.push_back({1, prev, prev.divided(pow)});
    }
    for (unsigned n = 2; n <= n_max; ++n) {
        auto [f, g] = fg_coefficients(rule, n, k, prec);
        BigComplex cur = f * prev + g * prev2;
        pow *= theta;
        series.entries.push_back({n, cur, cur.divided(pow)});
        prev2 = std::move(prev);
        prev = std::move(cur);
    }
    return series;
}

IntensityEstimate intensity_estimate(const AmplitudeSeries& series) {
    if (series.entries.size() < 6)
        throw refused_input_error("intensity_estimate needs at least 6 inflation levels");
    double last = 0.0, lo = 0.0, hi = 0.0;
    std::size_t n = series.entries.size();
    for (std::size_t i = n - 5; i < n; ++i) {
        double val = series.entries[i].normalized.abs2().to_double();
        if (i == n - 5 || val < lo) lo = val;
        if (i == n - 5 || val > hi) hi = val;
        last = val;
    }
    double variation = hi - lo;
    return {last, variation < 1e-4, variation};
}

DecayProfile decay_profile(const AmplitudeSeries& series) {
    if (series.entries.empty()) throw refused_input_error("decay_profile needs a nonempty series");
    DecayProfile prof;
    prof.values.reserve(series.entries.size());
    prof.running_max.reserve(series.entries.size());
    double run = 0.0;
    for (const auto& e : series.entries) {
        double val = e.n * e.normalized.abs2().to_double();
        run = std::max(run, val);
        prof.values.emplace_back(e.n, val);
        prof.running_max.push_back(run);
    }
    prof.empirical_c = run;
    return prof;
}

// ------------------------------------------------------------ decay witness

BigFloat feasibility_epsilon(const RingParams& ring, int r, const mpq_class& delta2,
                             Precision prec) {
    if (r < 0) throw config_error("return-time bound r must be nonnegative");
    unsigned ur = static_cast<unsigned>(r);
    // (F_{r+2} - delta2) + q F_{r+1} / theta collapses to the ring element
    // (q F_r - delta2) + F_{r+1} theta, since q / theta = theta - p.
    mpq_class u = mpq_class(ring.q() * recurrence_f(ring, ur)) - delta2;
    QuadElem inner(u, mpq_class(recurrence_f(ring, ur + 1)), ring);
    QuadElem excess = theta_power(ring, 2 * ur + 2) - inner * inner;
    if (excess == QuadElem::zero(ring)) return BigFloat::zero(prec.bits);
    Precision wp(prec.bits + 32);
    return (embed(excess, wp) / embed(inner * inner, wp)).round_to(prec.bits);
}

namespace {

/// Round a nonnegative value down to an exact rational on the 2^{-64} grid,
/// strictly below the true value its float argument approximates.
mpq_class round_down_to_grid(const BigFloat& x) {
    mpz_class unit = mpz_class(1) << 64;
    BigFloat scaled = x * BigFloat::from(unit, x.precision());
    mpz_class num = scaled.floor().to_mpq().get_num() - 1;
    if (num < 0) num = 0;
    mpq_class out(num, unit);
    out.canonicalize();
    return out;
}

} // namespace

CertifyResult certify_decay(const BinaryPisotRule& rule, const WaveNumber& k, unsigned n_scan,
                            int grid_steps, Precision prec) {
    if (k.is_field_element())
        throw refused_input_error(
            "certify_decay handles wave numbers outside the ring's field only; field elements "
            "belong to the point spectrum's support");
    if (grid_steps < 2) throw config_error("grid_steps must be at least 2");
    if (n_scan < 8) throw config_error("n_scan too small to host an induction window");

    const RingParams ring = rule.ring();

    // Orbit distances ||k theta^n|| for n = 1..n_scan.
    std::vector<double> dist(n_scan + 1, 0.0);
    QuadElem pw = QuadElem::one(ring);
    for (unsigned n = 1; n <= n_scan; ++n) {
        pw = pw * QuadElem::theta(ring);
        dist[n] = frac_and_dist(k.times(pw, prec), prec).dist.to_double();
    }

    // Normalized amplitude profile, shared by every candidate pair.
    DecayProfile prof = decay_profile(recursive_amplitudes(rule, k, n_scan, prec));

    // Return visits: every n with ||k theta^n|| < delta must be followed by
    // some m in (n, n+r] with ||k theta^m|| >= delta. Windows sticking out of
    // the scanned range cannot be checked, so the scan stops at n_scan - r.
    auto orbit_ok = [&](double delta, int r) {
        for (unsigned n = 1; n + static_cast<unsigned>(r) <= n_scan; ++n) {
            if (dist[n] >= delta) continue;
            bool revisit = false;
            for (unsigned m = n + 1; m <= n + static_cast<unsigned>(r); ++m)
                if (dist[m] >= delta) {
                    revisit = true;
                    break;
                }
            if (!revisit) return false;
        }
        return true;
    };

    std::vector<std::pair<double, int>> best_r;
    for (int i = grid_steps - 1; i >= 1; --i) {
        mpq_class delta_q(i, grid_steps);
        delta_q.canonicalize();
        double delta = delta_q.get_d();
        int first_r = -1;

        for (int r = 1; r <= kCertifyMaxR; ++r) {
            if (n_scan < static_cast<unsigned>(2 * r) + 2) break;
            if (!orbit_ok(delta, r)) continue;
            if (first_r < 0) first_r = r;

            // ||z|| >= delta forces |1 + e^{-2 pi i z}| = 2|cos(pi ||z||)|
            // down to 2 - delta' with delta' = 2 - 2|cos(pi delta)|; rounding
            // delta' down only weakens the claim.
            Precision wp(prec.bits + 32);
            BigFloat s(wp.bits), c(wp.bits);
            BigFloat::sin_cos(s, c, BigFloat::pi(wp.bits) * BigFloat::from(delta_q, wp.bits));
            BigFloat two = BigFloat::from(2.0, wp.bits);
            mpq_class delta_prime = round_down_to_grid(two - two * c.abs());

            mpz_class f_r1 = recurrence_f(ring, static_cast<unsigned>(r) + 1);
            mpz_class f_r2 = recurrence_f(ring, static_cast<unsigned>(r) + 2);
            mpq_class delta2 = mpq_class(f_r1) * delta_prime;
            if (delta2 >= mpq_class(f_r2)) continue;

            BigFloat eps = feasibility_epsilon(ring, r, delta2, prec);
            if (eps.sign() <= 0) continue;

            // Smallest n with (n+1)/(n-r-1) <= 1+eps, the start of induction.
            BigFloat one = BigFloat::from(1.0, prec.bits);
            BigFloat n0f = (one + (one + eps) * BigFloat::from(double(r + 1), prec.bits)) / eps;
            if (n0f.cmp(static_cast<double>(n_scan)) > 0) continue;
            unsigned n0 = static_cast<unsigned>(std::ceil(n0f.to_double() - 1e-12));
            n0 = std::max(n0, static_cast<unsigned>(r) + 2);
            if (n0 + 2 * static_cast<unsigned>(r) > n_scan) continue;

            double cbound = 0.0;
            for (unsigned n = n0; n <= n0 + 2 * static_cast<unsigned>(r); ++n)
                cbound = std::max(cbound, prof.values[n].second);

            bool holds = true;
            for (unsigned n = n0; n <= n_scan; ++n)
                if (prof.values[n].second > cbound * (1 + 1e-9)) {
                    holds = false;
                    break;
                }
            if (!holds) continue;

            DecayCertificate cert;
            cert.delta = delta;
            cert.r = r;
            cert.delta_prime = delta_prime.get_d();
            cert.delta2 = delta2.get_d();
            cert.epsilon = eps.to_double();
            cert.n0 = n0;
            cert.c = cbound;
            cert.n_scan = n_scan;
            cert.grid_steps = grid_steps;
            cert.prec_bits = prec.bits;
            cert.note = "empirical up to " + std::to_string(n_scan) +
                        ": orbit return condition checked for n in [1, " +
                        std::to_string(n_scan - static_cast<unsigned>(r)) +
                        "]; bound n|A_n|^2/theta^{2n} <= c verified for n in [" +
                        std::to_string(n0) + ", " + std::to_string(n_scan) + "]";
            return cert;
        }
        best_r.emplace_back(delta, first_r);
    }

    return CertifyFailure{
        "no grid pair (delta, r) gave a positive feasibility margin with an induction "
        "window inside the scanned range and a bound that holds over it",
        std::move(best_r)};
}

// --------------------------------------------------------------------- RNMS

RnmsIntensity rnms_intensity(const RnmsRule& rule, const WaveNumber& k, unsigned n,
                             unsigned samples, std::uint64_t seed, Precision prec, SizeCap cap) {
    if (samples == 0) throw config_error("samples must be positive");
    const RingParams ring = rule.ring();
    BigFloat norm2 = embed(theta_power(ring, n), prec).square(); // lambda^{2n}

    std::vector<double> vals;
    vals.reserve(samples);
    for (unsigned s = 0; s < samples; ++s) {
        std::uint64_t sub = rng::mix64(seed ^ rng::mix64(0x9e3779b97f4a7c15ull * (s + 1)));
        Word w = sample_rnms(rule, n, sub, cap);
        Patch patch = realize(w, ring);
        vals.push_back((direct_amplitude(patch, k, prec).abs2() / norm2).to_double());
    }

    // Running mean and sum of squared deviations; identical samples yield a
    // mean equal to the common value and a standard error of exactly zero.
    double mean = 0.0, m2 = 0.0;
    for (unsigned i = 0; i < samples; ++i) {
        double delta = vals[i] - mean;
        mean += delta / double(i + 1);
        m2 += delta * (vals[i] - mean);
    }
    double se = samples > 1 ? std::sqrt(m2 / (double(samples) * double(samples - 1))) : 0.0;
    return {mean, se, samples};
}

} // namespace pisotdiff
