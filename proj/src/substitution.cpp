#include "pisotdiff/substitution.hpp"

#include "pisotdiff/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pisotdiff {

Word Word::from_string(const std::string& letters) {
    Word w;
    w.reserve(letters.size());
    for (char c : letters) {
        if (c == 'a')
            w.push_back(Letter::A);
        else if (c == 'b')
            w.push_back(Letter::B);
        else
            throw config_error(std::string("invalid letter '") + c + "' in word \"" + letters +
                               "\" (alphabet is {a,b})");
    }
    return w;
}

Word Word::single(Letter l, int level) {
    Word w;
    w.push_back(l);
    w.level_ = level;
    return w;
}

void Word::append(const Word& w) {
    bits_.insert(bits_.end(), w.bits_.begin(), w.bits_.end());
}

std::pair<std::size_t, std::size_t> Word::letter_counts() const {
    std::size_t b = 0;
    for (bool bit : bits_) b += bit ? 1 : 0;
    return {bits_.size() - b, b};
}

std::string Word::to_string() const {
    std::string s;
    s.reserve(size());
    for (bool bit : bits_) s.push_back(bit ? 'b' : 'a');
    return s;
}

BinaryPisotRule::BinaryPisotRule(const std::string& image_word)
    : image_(Word::from_string(image_word)),
      p_(0),
      q_(0),
      ring_(RingParams::make(1, 1)) {
    auto [a, b] = image_.letter_counts();
    p_ = static_cast<long>(a);
    q_ = static_cast<long>(b);
    if (q_ < 1)
        throw invalid_ring_error("image word \"" + image_word + "\" contains no 'b' (q >= 1 required)");
    if (p_ < q_)
        throw invalid_ring_error("image word \"" + image_word + "\" has q > p (outside the Pisot class)");
    ring_ = RingParams::make(p_, q_);
}

RnmsRule::RnmsRule(long m, std::vector<double> probs) : m_(m), probs_(std::move(probs)) {
    if (m_ < 1) throw config_error("RNMS requires m >= 1");
    if (probs_.size() != static_cast<std::size_t>(m_ + 1))
        throw config_error("RNMS with m=" + std::to_string(m_) + " needs " + std::to_string(m_ + 1) +
                           " probabilities, got " + std::to_string(probs_.size()));
    double sum = 0;
    for (double p : probs_) {
        if (p < 0.0 || p > 1.0) throw config_error("RNMS probabilities must lie in [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw config_error("RNMS probabilities sum to " + std::to_string(sum) + ", expected 1");
    cum_.resize(probs_.size());
    double run = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        probs_[i] /= sum;
        run += probs_[i];
        cum_[i] = run;
    }
    cum_.back() = 1.0; // exact upper end regardless of rounding
}

int RnmsRule::variant_for(double unit) const {
    for (std::size_t i = 0; i + 1 < cum_.size(); ++i)
        if (unit < cum_[i]) return static_cast<int>(i);
    return static_cast<int>(cum_.size()) - 1;
}

Word RnmsRule::variant_word(int i) const {
    Word w;
    w.reserve(static_cast<std::size_t>(m_) + 1);
    for (long j = 0; j < i; ++j) w.push_back(Letter::A);
    w.push_back(Letter::B);
    for (long j = i; j < m_; ++j) w.push_back(Letter::A);
    return w;
}

namespace {

std::size_t predicted_length(const RingParams& ring, unsigned n) {
    if (n == 0) return 1;
    mpz_class len = recurrence_f(ring, n) + ring.q() * recurrence_f(ring, n - 1);
    if (!len.fits_ulong_p()) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(len.get_ui());
}

void check_cap(const RingParams& ring, unsigned n, SizeCap cap, const char* what) {
    std::size_t len = predicted_length(ring, n);
    if (len > cap.max_letters)
        throw size_cap_error(std::string(what) + " at level " + std::to_string(n) + " would have " +
                                 std::to_string(len) + " letters (cap " +
                                 std::to_string(cap.max_letters) + ")",
                             len);
}

} // namespace

Word iterate(const BinaryPisotRule& rule, unsigned n, SizeCap cap) {
    check_cap(rule.ring(), n, cap, "word");
    Word cur = Word::single(Letter::B, 0);
    for (unsigned lvl = 1; lvl <= n; ++lvl) {
        Word next;
        next.reserve(predicted_length(rule.ring(), lvl));
        for (std::size_t j = 0; j < cur.size(); ++j) {
            if (cur.letter(j) == Letter::A)
                next.append(rule.image_word());
            else
                next.push_back(Letter::A);
        }
        next.set_level(static_cast<int>(lvl));
        cur = std::move(next);
    }
    return cur;
}

std::pair<mpz_class, mpz_class> counts(const BinaryPisotRule& rule, unsigned n) {
    // M^n (0,1)^T by binary exponentiation of [[p,1],[q,0]]
    using Mat = std::array<mpz_class, 4>;
    auto mul = [](const Mat& x, const Mat& y) -> Mat {
        return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3],
                x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
    };
    Mat result = {1, 0, 0, 1};
    Mat base = {rule.p(), 1, rule.q(), 0};
    unsigned e = n;
    while (e > 0) {
        if (e & 1u) result = mul(result, base);
        e >>= 1u;
        if (e > 0) base = mul(base, base);
    }
    return {result[1], result[3]};
}

EigenInfo eigen(const RingParams& ring) {
    Precision prec(128);
    BigFloat t = ring.theta_value(prec, false);
    BigFloat tc = ring.theta_value(prec, true);
    bool pv = t.cmp(1.0) > 0 && tc.abs().cmp(1.0) < 0;
    return {QuadElem::theta(ring), t.to_double(), tc.to_double(), pv};
}

EigenInfo eigen(const BinaryPisotRule& rule) { return eigen(rule.ring()); }

std::vector<std::pair<Letter, unsigned>> blocks(const BinaryPisotRule& rule, unsigned n) {
    if (n < 2) throw error("blocks requires n >= 2, got " + std::to_string(n));
    std::vector<std::pair<Letter, unsigned>> out;
    out.reserve(rule.image_word().size());
    for (std::size_t i = 0; i < rule.image_word().size(); ++i) {
        Letter l = rule.image_word().letter(i);
        out.emplace_back(l, l == Letter::A ? n - 1 : n - 2);
    }
    return out;
}

namespace rng {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed ^ mix64(stream));
}

double unit_draw(std::uint64_t key, std::uint64_t counter) {
    std::uint64_t bits = mix64(key + counter * 0x9e3779b97f4a7c15ull);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace rng

Word sample_rnms(const RnmsRule& rule, unsigned n, std::uint64_t seed, SizeCap cap) {
    check_cap(rule.ring(), n, cap, "RNMS realization");
    Word cur = Word::single(Letter::B, 0);
    for (unsigned lvl = 1; lvl <= n; ++lvl) {
        std::uint64_t key = rng::stream_key(seed, lvl);
        Word next;
        next.reserve(predicted_length(rule.ring(), lvl));
        for (std::size_t j = 0; j < cur.size(); ++j) {
            if (cur.letter(j) == Letter::A) {
                int variant = rule.variant_for(rng::unit_draw(key, j));
                next.append(rule.variant_word(variant));
            } else {
                next.push_back(Letter::A);
            }
        }
        next.set_level(static_cast<int>(lvl));
        cur = std::move(next);
    }
    return cur;
}

std::array<std::array<long, 2>, 2> rnms_matrix(const RnmsRule& rule) { return rule.matrix(); }

RuleSpec parse_rule_spec(const std::string& spec) {
    if (spec.rfind("w=", 0) == 0) {
        return BinaryPisotRule(spec.substr(2));
    }
    if (spec.rfind("m=", 0) == 0) {
        auto semi = spec.find(';');
        if (semi == std::string::npos)
            throw config_error("RNMS rule string needs \"m=<int>;probs=<comma-list>\", got \"" + spec + "\"");
        std::string m_part = spec.substr(2, semi - 2);
        std::string rest = spec.substr(semi + 1);
        if (rest.rfind("probs=", 0) != 0)
            throw config_error("RNMS rule string missing \"probs=\" at position " +
                               std::to_string(semi + 1) + " in \"" + spec + "\"");
        long m = 0;
        try {
            std::size_t used = 0;
            m = std::stol(m_part, &used);
            if (used != m_part.size()) throw std::invalid_argument(m_part);
        } catch (const std::exception&) {
            throw config_error("cannot parse m value \"" + m_part + "\" in rule string");
        }
        std::vector<double> probs;
        std::stringstream ss(rest.substr(6));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                std::size_t used = 0;
                probs.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw config_error("cannot parse probability \"" + tok + "\" in rule string");
            }
        }
        return RnmsRule(m, std::move(probs));
    }
    throw config_error("rule string must start with \"w=\" or \"m=\" (position 0), got \"" + spec +
                       "\"");
}

} // namespace pisotdiff
