#pragma once

#include "pisotdiff/quadfield.hpp"
#include "pisotdiff/substitution.hpp"

#include <vector>

namespace pisotdiff {

/// Geometric realization of a word: tiles of length theta for 'a' and 1 for
/// 'b', starting at 0. Control points are the LEFT endpoints of the tiles;
/// positions live in Z[theta] with nonnegative integer coordinates.
class Patch {
public:
    Patch(Word word, RingParams ring);

    std::size_t size() const { return word_.size(); }
    const Word& word() const { return word_; }
    const RingParams& ring() const { return ring_; }
    Letter letter(std::size_t j) const { return word_.letter(j); }

    /// Left endpoint of tile j as an exact ring element.
    QuadElem position(std::size_t j) const;
    /// Integer coordinates (u, v) of position j: u = #b before j, v = #a before j.
    std::pair<const mpz_class&, const mpz_class&> coords(std::size_t j) const {
        return {ucoord_[j], vcoord_[j]};
    }

    /// Sum of all tile lengths; equals theta^n exactly for w^(n).
    QuadElem total_length() const;

private:
    Word word_;
    RingParams ring_;
    std::vector<mpz_class> ucoord_, vcoord_;
};

Patch realize(const Word& word, const RingParams& ring);

/// Images of all positions under the conjugate embedding (the star map).
std::vector<BigFloat> star_points(const Patch& patch, Precision prec);

struct WindowSpec {
    BigFloat lo, hi;
    bool certified; ///< interval window guaranteed only for q = 1
    BigFloat width() const { return hi - lo; }
};

/// [min, max] of the star images of the level-n patch. Certified only for
/// q = 1 rules; for q >= 2 the window may be fractal and the estimate is
/// advisory.
WindowSpec window_estimate(const BinaryPisotRule& rule, unsigned n, Precision prec, SizeCap cap = {});

/// Points per unit length under the principal embedding.
BigFloat density(const Patch& patch, Precision prec);

} // namespace pisotdiff
