#pragma once

#include "pisotdiff/geometry.hpp"
#include "pisotdiff/quadfield.hpp"
#include "pisotdiff/substitution.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pisotdiff {

/// Wave number k. Field elements are stored with exact rational coordinates
/// (u + v*theta, the ring attached when v != 0); real literals either as a
/// fixed high-precision value or as a named constant (sqrt n, pi, e) that is
/// re-evaluated at any requested precision.
class WaveNumber {
public:
    enum class Kind { field_element, real_literal };

    static WaveNumber rational(const mpq_class& value);
    static WaveNumber field_element(const QuadElem& num, const mpz_class& den = 1);
    static WaveNumber literal(const BigFloat& value);
    static WaveNumber sqrt_of(unsigned long n);
    static WaveNumber pi();
    static WaveNumber euler_e();

    Kind kind() const;
    bool is_field_element() const { return kind() == Kind::field_element; }

    /// Rational coordinates (u', v') in the basis (1, theta); field kind only.
    std::pair<mpq_class, mpq_class> field_coords() const;
    /// Ring of a field element with v' != 0 (nullopt for plain rationals).
    std::optional<RingParams> field_ring() const;
    /// The element itself; rationals adopt the given ring, proper field
    /// elements must already live in it.
    QuadElem as_field_element(const RingParams& ring) const;

    /// k as a real value at the requested precision.
    BigFloat eval(Precision prec) const;
    /// k * x at the requested precision; exact ring arithmetic first when k
    /// is a field element.
    BigFloat times(const QuadElem& x, Precision prec) const;

    std::string describe() const;

private:
    struct Field {
        mpq_class u, v;
        std::optional<RingParams> ring; // required iff v != 0
    };
    struct Named {
        enum class Which { sqrt_int, pi, e } which;
        unsigned long arg;
    };
    WaveNumber() = default;
    std::variant<Field, BigFloat, Named> rep_;
};

struct AmplitudeEntry {
    unsigned n;
    BigComplex value;      ///< A_n(k)
    BigComplex normalized; ///< A_n(k) / theta^n
};

struct AmplitudeSeries {
    RingParams ring;
    Precision prec;
    std::string k_desc;
    std::vector<AmplitudeEntry> entries;
};

/// {k * x} in [0,1), through exact ring arithmetic when k is a field element.
BigFloat phase_fraction(const WaveNumber& k, const QuadElem& x, Precision prec);

/// A_n(k) = sum_j exp(-2 pi i k x_j) over the patch's left endpoints; each
/// phase is reduced mod 1 at working precision before exponentiation.
BigComplex direct_amplitude(const Patch& patch, const WaveNumber& k, Precision prec);

/// Coefficient pair advancing the recursion to level n (n >= 2):
/// f collects the a-blocks of the concatenation decomposition of w^(n),
/// g the b-blocks, each as exponential sums over exact block offsets.
/// |f| <= p and |g| <= q always.
std::pair<BigComplex, BigComplex> fg_coefficients(const BinaryPisotRule& rule, unsigned n,
                                                  const WaveNumber& k, Precision prec);

/// A_0 = A_1 = 1, A_n = f A_{n-1} + g A_{n-2} via fg_coefficients.
AmplitudeSeries recursive_amplitudes(const BinaryPisotRule& rule, const WaveNumber& k,
                                     unsigned n_max, Precision prec);

struct IntensityEstimate {
    double intensity;      ///< |A_n|^2 / theta^{2n} at the last entry
    bool converged;        ///< tail variation below 1e-4
    double tail_variation; ///< max - min of |normalized|^2 over the last 5 entries
};

IntensityEstimate intensity_estimate(const AmplitudeSeries& series);

struct DecayProfile {
    std::vector<std::pair<unsigned, double>> values; ///< (n, n |A_n|^2 / theta^{2n})
    std::vector<double> running_max;
    double empirical_c; ///< final running maximum
};

DecayProfile decay_profile(const AmplitudeSeries& series);

/// Constructive witness for the inductive c/n decay bound.
struct DecayCertificate {
    double delta;       ///< orbit separation threshold, a grid rational
    int r;              ///< return-time bound of the orbit scan
    double delta_prime; ///< 2 - 2 cos(pi delta), rounded down
    double delta2;      ///< delta'' = F_{r+1} * delta'
    double epsilon;     ///< feasibility margin, > 0
    unsigned n0;        ///< induction start: (n0+1)/(n0-r-1) <= 1+epsilon
    double c;           ///< bound constant from the base window [n0, n0+2r]
    unsigned n_scan;
    int grid_steps;
    long prec_bits;
    std::string note; ///< empirical scope of the orbit scan
};

struct CertifyFailure {
    std::string reason;
    /// For each grid delta (descending): smallest r <= r_max making the
    /// orbit implication hold, or -1 if none.
    std::vector<std::pair<double, int>> best_r_per_delta;
};

using CertifyResult = std::variant<DecayCertificate, CertifyFailure>;

/// Feasibility margin of the induction step:
///   theta^{2r+2} * ((F_{r+2} - delta2) + q F_{r+1} / theta)^{-2} - 1,
/// computed through exact ring arithmetic (exactly 0 for delta2 = 0).
BigFloat feasibility_epsilon(const RingParams& ring, int r, const mpq_class& delta2,
                             Precision prec);

/// Search (delta, r) on the orbit ||k theta^n||, derive (delta', delta'',
/// epsilon, n0, c), and verify |A_n|^2/theta^{2n} <= c/n on [n0, n_scan].
/// Refuses field-element k.
CertifyResult certify_decay(const BinaryPisotRule& rule, const WaveNumber& k, unsigned n_scan,
                            int grid_steps, Precision prec);

inline constexpr int kCertifyMaxR = 25;

struct RnmsIntensity {
    double mean;
    double std_error;
    unsigned samples;
};

/// Monte-Carlo estimate of |A_n(k)|^2 / lambda_m^{2n} over RNMS realizations.
RnmsIntensity rnms_intensity(const RnmsRule& rule, const WaveNumber& k, unsigned n,
                             unsigned samples, std::uint64_t seed, Precision prec, SizeCap cap = {});

} // namespace pisotdiff
