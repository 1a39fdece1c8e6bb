#include "pisotdiff/orbits.hpp"

#include "pisotdiff/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pisotdiff {

namespace {

double frac_to_unit(const BigFloat& f) {
    double d = f.to_double();
    // A fraction within half an ulp of 1 rounds up; fold it back onto 0.
    if (d >= 1.0) return 0.0;
    if (d < 0.0) return 0.0;
    return d;
}

unsigned clamp_tail(const OrbitReport& report, unsigned tail_start) {
    if (report.N == 0) throw refused_input_error("orbit report is empty");
    if (tail_start >= report.N) throw config_error("tail_start must be below N");
    return std::max(1u, tail_start);
}

} // namespace

OrbitReport orbit(const WaveNumber& xi, const RingParams& ring, unsigned N, Precision prec) {
    if (N == 0) throw config_error("orbit length N must be positive");
    OrbitReport report{xi, xi.is_field_element(), ring, N, {}, 0.0, {}, prec.bits};
    report.fracs.reserve(N);

    QuadElem theta = QuadElem::theta(ring);
    if (report.xi_in_field) {
        QuadElem prod = xi.as_field_element(ring);
        for (unsigned n = 1; n <= N; ++n) {
            prod = prod * theta;
            report.fracs.push_back(frac_to_unit(frac_and_dist(prod, prec).frac));
        }
    } else {
        QuadElem pw = QuadElem::one(ring);
        for (unsigned n = 1; n <= N; ++n) {
            pw = pw * theta;
            report.fracs.push_back(frac_to_unit(frac_and_dist(xi.times(pw, prec), prec).frac));
        }
    }

    report.gap = gap_estimate(report, N / 5).gap;
    return report;
}

BigFloat gap_bound(const RingParams& ring, Precision prec) {
    long wp = prec.bits + 32;
    BigFloat one = BigFloat::from(1.0, wp);
    return (one / (one + ring.theta_value(Precision(wp)))).round_to(prec.bits);
}

GapEstimate gap_estimate(const OrbitReport& report, unsigned tail_start) {
    unsigned start = clamp_tail(report, tail_start);
    double lo = 2.0, hi = -1.0;
    for (std::size_t i = start - 1; i < report.fracs.size(); ++i) {
        lo = std::min(lo, report.fracs[i]);
        hi = std::max(hi, report.fracs[i]);
    }
    double bound = gap_bound(report.ring, Precision(64)).to_double();
    return {hi - lo, bound, hi - lo >= bound - 1e-6};
}

std::vector<std::pair<double, unsigned>> cluster_cover(const OrbitReport& report, double eps,
                                                       unsigned tail_start) {
    if (!(eps > 0.0 && eps < 0.25)) throw config_error("eps must lie in (0, 1/4)");
    unsigned start = clamp_tail(report, tail_start);

    std::vector<double> pts(report.fracs.begin() + (start - 1), report.fracs.end());
    std::sort(pts.begin(), pts.end());

    // Rotate the circle so the cover starts right after the widest empty
    // arc; the points then span an interval and a linear sweep suffices.
    std::size_t n = pts.size();
    std::size_t cut = 0;
    double widest = pts.front() + 1.0 - pts.back(); // arc across the 0/1 seam
    for (std::size_t i = 1; i < n; ++i) {
        double g = pts[i] - pts[i - 1];
        if (g > widest) {
            widest = g;
            cut = i;
        }
    }
    std::vector<double> line;
    line.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = pts[(cut + i) % n];
        line.push_back(i + cut < n ? v : v + 1.0);
    }

    std::vector<std::pair<double, unsigned>> cover;
    std::size_t i = 0;
    while (i < n) {
        double arc_lo = line[i];
        unsigned count = 0;
        double last = arc_lo;
        while (i < n && line[i] <= arc_lo + eps) {
            last = line[i];
            ++count;
            ++i;
        }
        double center = std::fmod((arc_lo + last) / 2.0, 1.0);
        cover.emplace_back(center, count);
    }
    return cover;
}

unsigned cluster_count(const OrbitReport& report, double eps, unsigned tail_start) {
    return static_cast<unsigned>(cluster_cover(report, eps, tail_start).size());
}

DeltaRResult find_delta_r(const OrbitReport& report, int delta_grid, int r_max) {
    if (report.xi_in_field)
        throw refused_input_error(
            "the return-time scan concerns orbits of values outside the field; field elements "
            "have near-integer orbits instead");
    if (delta_grid < 2) throw config_error("delta_grid must be at least 2");
    if (r_max < 1) throw config_error("r_max must be at least 1");

    unsigned N = report.N;
    auto ok = [&](double delta, int r) {
        for (unsigned n = 1; n + static_cast<unsigned>(r) <= N; ++n) {
            if (report.dist(n - 1) >= delta) continue;
            bool revisit = false;
            for (unsigned j = n + 1; j <= n + static_cast<unsigned>(r); ++j)
                if (report.dist(j - 1) >= delta) {
                    revisit = true;
                    break;
                }
            if (!revisit) return false;
        }
        return true;
    };

    std::vector<std::pair<double, int>> best_r;
    for (int i = delta_grid / 2; i >= 1; --i) {
        mpq_class delta_q(i, delta_grid);
        delta_q.canonicalize();
        double delta = delta_q.get_d();
        int hit = -1;
        for (int r = 1; r <= r_max && static_cast<unsigned>(r) < N; ++r)
            if (ok(delta, r)) {
                hit = r;
                break;
            }
        if (hit > 0) return DeltaRWitness{delta, hit};
        best_r.emplace_back(delta, hit);
    }
    return DeltaRFailure{"no grid delta admits a return bound r <= " + std::to_string(r_max) +
                             " over the scanned orbit",
                         std::move(best_r)};
}

} // namespace pisotdiff
