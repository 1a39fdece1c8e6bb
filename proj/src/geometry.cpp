#include "pisotdiff/geometry.hpp"

#include "pisotdiff/errors.hpp"

namespace pisotdiff {

Patch::Patch(Word word, RingParams ring) : word_(std::move(word)), ring_(ring) {
    ucoord_.reserve(word_.size());
    vcoord_.reserve(word_.size());
    mpz_class u = 0, v = 0; // cumulative b-count, a-count
    for (std::size_t j = 0; j < word_.size(); ++j) {
        ucoord_.push_back(u);
        vcoord_.push_back(v);
        if (word_.letter(j) == Letter::A)
            v += 1;
        else
            u += 1;
    }
}

QuadElem Patch::position(std::size_t j) const {
    return {mpq_class(ucoord_[j]), mpq_class(vcoord_[j]), ring_};
}

QuadElem Patch::total_length() const {
    if (word_.empty()) return QuadElem::zero(ring_);
    auto [a, b] = word_.letter_counts();
    return {mpq_class(static_cast<unsigned long>(b)), mpq_class(static_cast<unsigned long>(a)),
            ring_};
}

Patch realize(const Word& word, const RingParams& ring) { return {word, ring}; }

std::vector<BigFloat> star_points(const Patch& patch, Precision prec) {
    long wp = prec.bits + 32;
    BigFloat tc = patch.ring().theta_value(Precision(wp), true);
    std::vector<BigFloat> out;
    out.reserve(patch.size());
    for (std::size_t j = 0; j < patch.size(); ++j) {
        auto [u, v] = patch.coords(j);
        BigFloat val = BigFloat::from(u, wp) + BigFloat::from(v, wp) * tc;
        out.push_back(val.round_to(prec.bits));
    }
    return out;
}

WindowSpec window_estimate(const BinaryPisotRule& rule, unsigned n, Precision prec, SizeCap cap) {
    Patch patch = realize(iterate(rule, n, cap), rule.ring());
    long wp = prec.bits + 32;
    BigFloat tc = rule.ring().theta_value(Precision(wp), true);
    BigFloat lo(wp), hi(wp);
    bool first = true;
    for (std::size_t j = 0; j < patch.size(); ++j) {
        auto [u, v] = patch.coords(j);
        BigFloat val = BigFloat::from(u, wp) + BigFloat::from(v, wp) * tc;
        if (first) {
            lo = val;
            hi = val;
            first = false;
        } else {
            if (val < lo) lo = val;
            if (val > hi) hi = val;
        }
    }
    return {lo.round_to(prec.bits), hi.round_to(prec.bits), rule.q() == 1};
}

BigFloat density(const Patch& patch, Precision prec) {
    if (patch.size() == 0) throw error("density of an empty patch");
    BigFloat len = embed(patch.total_length(), prec);
    return BigFloat::from(mpz_class(static_cast<unsigned long>(patch.size())), prec.bits) / len;
}

} // namespace pisotdiff
