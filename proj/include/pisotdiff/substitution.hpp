#pragma once

#include "pisotdiff/quadfield.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pisotdiff {

enum class Letter : unsigned char { A = 0, B = 1 };

/// Finite word over {a, b}, bit-packed. Carries the inflation level when
/// produced by iteration (level -1 otherwise).
class Word {
public:
    Word() = default;
    static Word from_string(const std::string& letters);
    static Word single(Letter l, int level = -1);

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    Letter letter(std::size_t i) const { return bits_[i] ? Letter::B : Letter::A; }
    int level() const { return level_; }
    void set_level(int lvl) { level_ = lvl; }

    void push_back(Letter l) { bits_.push_back(l == Letter::B); }
    void append(const Word& w);
    void reserve(std::size_t n) { bits_.reserve(n); }

    /// (#a, #b)
    std::pair<std::size_t, std::size_t> letter_counts() const;
    std::string to_string() const;
    bool operator==(const Word& o) const { return bits_ == o.bits_; }

private:
    std::vector<bool> bits_;
    int level_ = -1;
};

struct SizeCap {
    std::size_t max_letters = 10'000'000;
};

/// Binary Pisot rule a -> w(a,b), b -> a with p = #a(w), q = #b(w),
/// p >= q >= 1. Substitution matrix [[p,1],[q,0]].
class BinaryPisotRule {
public:
    explicit BinaryPisotRule(const std::string& image_word);

    const Word& image_word() const { return image_; }
    long p() const { return p_; }
    long q() const { return q_; }
    RingParams ring() const { return ring_; }
    /// Row-major [[p,1],[q,0]].
    std::array<std::array<long, 2>, 2> matrix() const { return {{{p_, 1}, {q_, 0}}}; }

private:
    Word image_;
    long p_, q_;
    RingParams ring_;
};

/// Random noble-means rule: a -> a^i b a^{m-i} with probability probs[i],
/// b -> a. The probability vector is renormalized at construction.
class RnmsRule {
public:
    RnmsRule(long m, std::vector<double> probs);

    long m() const { return m_; }
    const std::vector<double>& probs() const { return probs_; }
    RingParams ring() const { return RingParams::make(m_, 1); }
    /// [[m,1],[1,0]], independent of the probability vector.
    std::array<std::array<long, 2>, 2> matrix() const { return {{{m_, 1}, {1, 0}}}; }

    /// Variant index for a uniform draw in [0,1).
    int variant_for(double unit) const;
    /// Image of 'a' under variant i: a^i b a^{m-i}.
    Word variant_word(int i) const;

private:
    long m_;
    std::vector<double> probs_; ///< renormalized
    std::vector<double> cum_;   ///< cumulative, last pinned to 1
};

/// w^(n) = sigma^n(b), starting from w^(0) = b.
Word iterate(const BinaryPisotRule& rule, unsigned n, SizeCap cap = {});

/// Letter counts (a_n, b_n) = M_sigma^n (0,1)^T, without materializing the word.
std::pair<mpz_class, mpz_class> counts(const BinaryPisotRule& rule, unsigned n);

struct EigenInfo {
    QuadElem theta;    ///< principal eigenvalue as the ring element (0,1)
    double theta_val;  ///< its real value
    double theta_conj; ///< conjugate eigenvalue
    bool is_pv;        ///< theta > 1 and |theta'| < 1
};

EigenInfo eigen(const RingParams& ring);
EigenInfo eigen(const BinaryPisotRule& rule);

/// Concatenation decomposition of w^(n), n >= 2: one block per letter of the
/// image word, block level n-1 for 'a' and n-2 for 'b'.
std::vector<std::pair<Letter, unsigned>> blocks(const BinaryPisotRule& rule, unsigned n);

/// One realization of zeta_m^n(b). Deterministic given (seed, n): each
/// inflation level uses an independent counter-based stream keyed by
/// (seed, level), and the letter at position j of the current word draws
/// the j-th variate of that stream.
Word sample_rnms(const RnmsRule& rule, unsigned n, std::uint64_t seed, SizeCap cap = {});

/// Stochastic substitution matrix [[m,1],[1,0]] of the RNMS family.
std::array<std::array<long, 2>, 2> rnms_matrix(const RnmsRule& rule);

/// Counter-based uniform stream: SplitMix64 finalizer over key + counter.
namespace rng {
std::uint64_t mix64(std::uint64_t x);
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream);
double unit_draw(std::uint64_t key, std::uint64_t counter);
} // namespace rng

/// Rule strings: "w=<word>" for deterministic rules,
/// "m=<int>;probs=<comma-list>" for RNMS.
using RuleSpec = std::variant<BinaryPisotRule, RnmsRule>;
RuleSpec parse_rule_spec(const std::string& spec);

} // namespace pisotdiff
