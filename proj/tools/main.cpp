#include "pisotdiff/amplitude.hpp"
#include "pisotdiff/errors.hpp"
#include "pisotdiff/geometry.hpp"
#include "pisotdiff/modelset.hpp"
#include "pisotdiff/orbits.hpp"
#include "pisotdiff/quadfield.hpp"
#include "pisotdiff/substitution.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

using nlohmann::json;
using namespace pisotdiff;

namespace {

struct Options {
    std::string rule_spec;
    std::vector<std::string> k_specs;
    std::string xi_spec;
    std::optional<double> module_kmax;
    long coeff_bound = 3;
    unsigned n_max = 0; // 0: command default
    unsigned n_scan = 60;
    int grid_steps = 20;
    long prec_bits = 0; // 0: command default (auto-scaled)
    unsigned samples = 50;
    std::vector<std::uint64_t> seeds;
    std::string out;
    std::string format; // "": command default
    bool no_timestamp = false;
    double eps = 0.01;
    unsigned tail_start = 0; // 0: N/5
    int r_max = 25;
    unsigned window_level = 24;
    std::string config_path;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_output(const Options& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(opt.out, std::ios::binary);
    if (!f) throw error("cannot open output file \"" + opt.out + "\"");
    f << text;
    if (!f.good()) throw error("failed writing \"" + opt.out + "\"");
}

std::string csv_preamble(const Options& opt, long prec_bits) {
    std::string head;
    if (!opt.no_timestamp) head += "# generated: " + timestamp() + "\n";
    head += "# prec_bits=" + std::to_string(prec_bits) + "\n";
    return head;
}

void stamp_json(const Options& opt, json& doc, long prec_bits) {
    if (!opt.no_timestamp) doc["generated"] = timestamp();
    doc["prec_bits"] = prec_bits;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

mpq_class parse_rational(const std::string& text, const std::string& whole) {
    try {
        mpq_class q(text);
        q.canonicalize();
        return q;
    } catch (const std::exception&) {
        throw config_error("cannot parse rational \"" + text + "\" in wave number \"" + whole +
                           "\"");
    }
}

// Wave-number grammar: "pi", "e", "sqrt<n>" / "sqrt(<n>)", a rational "u" or
// "num/den", a field element "v*theta", "u+v*theta", "u-v*theta", "theta",
// or a decimal literal such as "0.25" or "1.5e-3".
WaveNumber parse_wavenumber(const std::string& raw, const std::optional<RingParams>& ring,
                            long prec_bits) {
    std::string s = trim(raw);
    if (s.empty()) throw config_error("empty wave number string");
    if (s == "pi") return WaveNumber::pi();
    if (s == "e") return WaveNumber::euler_e();
    if (s.rfind("sqrt", 0) == 0) {
        std::string arg = s.substr(4);
        if (arg.size() >= 2 && arg.front() == '(' && arg.back() == ')')
            arg = arg.substr(1, arg.size() - 2);
        try {
            std::size_t used = 0;
            unsigned long n = std::stoul(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
            return WaveNumber::sqrt_of(n);
        } catch (const std::exception&) {
            throw config_error("cannot parse square root argument in \"" + s + "\"");
        }
    }
    std::size_t tpos = s.find("theta");
    if (tpos != std::string::npos) {
        if (tpos + 5 != s.size())
            throw config_error("wave number \"" + s + "\" must end with theta");
        if (!ring)
            throw config_error("wave number \"" + s +
                               "\" needs the ring of a deterministic rule (pass --rule w=...)");
        std::string left = s.substr(0, tpos);
        mpq_class u = 0, v = 1;
        if (left.empty()) {
            // just "theta"
        } else if (left == "-") {
            v = -1;
        } else if (left.back() == '*') {
            std::string core = left.substr(0, left.size() - 1);
            std::size_t cut = core.find_last_of("+-");
            if (cut == std::string::npos || cut == 0) {
                v = parse_rational(core, s);
            } else {
                u = parse_rational(core.substr(0, cut), s);
                v = parse_rational(core.substr(cut), s); // sign included
            }
        } else if (left.back() == '+' || left.back() == '-') {
            v = left.back() == '-' ? -1 : 1;
            u = parse_rational(left.substr(0, left.size() - 1), s);
        } else {
            throw config_error("cannot parse wave number \"" + s + "\"");
        }
        return WaveNumber::field_element(QuadElem(u, v, *ring));
    }
    if (s.find_first_not_of("0123456789+-/") == std::string::npos) {
        try {
            mpq_class q(s);
            q.canonicalize();
            return WaveNumber::rational(q);
        } catch (const std::exception&) {
            throw config_error("cannot parse wave number \"" + s + "\"");
        }
    }
    if (s.find_first_not_of("0123456789+-.eE") == std::string::npos) {
        long bits = std::max(prec_bits, 256L) + 16;
        try {
            return WaveNumber::literal(BigFloat::from_string(s, bits));
        } catch (const std::exception&) {
            throw config_error("cannot parse wave number \"" + s + "\"");
        }
    }
    throw config_error("cannot parse wave number \"" + s + "\"");
}

RuleSpec parse_rule(const Options& opt) {
    if (opt.rule_spec.empty()) throw config_error("--rule is required for this command");
    return parse_rule_spec(opt.rule_spec);
}

const BinaryPisotRule& need_deterministic(const RuleSpec& rule) {
    if (const auto* det = std::get_if<BinaryPisotRule>(&rule)) return *det;
    throw config_error("this command needs a deterministic rule (\"w=...\")");
}

std::optional<RingParams> rule_ring(const Options& opt) {
    if (opt.rule_spec.empty()) return std::nullopt;
    RuleSpec rule = parse_rule_spec(opt.rule_spec);
    if (const auto* det = std::get_if<BinaryPisotRule>(&rule)) return det->ring();
    return std::get<RnmsRule>(rule).ring();
}

long pick_bits(const Options& opt, long fallback) {
    return opt.prec_bits > 0 ? opt.prec_bits : fallback;
}

// ----------------------------------------------------------------- inspect

int cmd_inspect(const Options& opt) {
    RuleSpec rule = parse_rule(opt);
    RingParams ring = std::holds_alternative<BinaryPisotRule>(rule)
                          ? std::get<BinaryPisotRule>(rule).ring()
                          : std::get<RnmsRule>(rule).ring();
    EigenInfo info = eigen(ring);
    Precision prec(128);

    std::ostringstream os;
    os << "rule: " << opt.rule_spec << "\n";
    if (const auto* det = std::get_if<BinaryPisotRule>(&rule)) {
        os << "kind: deterministic\n";
        os << "p: " << det->p() << "\nq: " << det->q() << "\n";
        auto m = det->matrix();
        os << "matrix: [[" << m[0][0] << "," << m[0][1] << "],[" << m[1][0] << "," << m[1][1]
           << "]]\n";
    } else {
        const auto& rnms = std::get<RnmsRule>(rule);
        os << "kind: random noble means\nm: " << rnms.m() << "\nprobs:";
        for (double p : rnms.probs()) os << " " << fmt(p);
        os << "\n";
        auto m = rnms.matrix();
        os << "matrix: [[" << m[0][0] << "," << m[0][1] << "],[" << m[1][0] << "," << m[1][1]
           << "]]\n";
    }
    os << "discriminant: " << ring.discriminant() << "\n";
    os << "theta: " << ring.theta_value(prec).str(25) << "\n";
    os << "theta_conj: " << ring.theta_value(prec, true).str(25) << "\n";
    os << "pv: " << (info.is_pv ? "true" : "false") << "\n";
    os << "F[0..20]:";
    for (unsigned n = 0; n <= 20; ++n) os << " " << recurrence_f(ring, n).get_str();
    os << "\n";
    write_output(opt, os.str());
    return 0;
}

// ------------------------------------------------------------------- patch

Word realize_word(const RuleSpec& rule, unsigned n, std::uint64_t seed) {
    if (const auto* det = std::get_if<BinaryPisotRule>(&rule)) return iterate(*det, n);
    return sample_rnms(std::get<RnmsRule>(rule), n, seed);
}

int cmd_patch(const Options& opt) {
    RuleSpec rule = parse_rule(opt);
    RingParams ring = std::holds_alternative<BinaryPisotRule>(rule)
                          ? std::get<BinaryPisotRule>(rule).ring()
                          : std::get<RnmsRule>(rule).ring();
    unsigned n = opt.n_max ? opt.n_max : 6;
    long bits = pick_bits(opt, std::max(256L, recommended_bits(ring, n).bits));
    Precision prec(bits);
    std::uint64_t seed = opt.seeds.empty() ? 0 : opt.seeds.front();

    Patch patch = realize(realize_word(rule, n, seed), ring);
    std::vector<BigFloat> stars = star_points(patch, prec);

    if (opt.format == "json") {
        json doc;
        doc["command"] = "patch";
        doc["rule"] = opt.rule_spec;
        doc["n"] = n;
        stamp_json(opt, doc, bits);
        json rows = json::array();
        for (std::size_t j = 0; j < patch.size(); ++j) {
            auto [u, v] = patch.coords(j);
            rows.push_back({{"index", j},
                            {"letter", patch.letter(j) == Letter::A ? "a" : "b"},
                            {"u", u.get_str()},
                            {"v", v.get_str()},
                            {"position", embed(patch.position(j), prec).to_double()},
                            {"star", stars[j].to_double()}});
        }
        doc["points"] = rows;
        write_output(opt, doc.dump(2) + "\n");
        return 0;
    }

    std::string text = csv_preamble(opt, bits);
    text += "index,letter,u,v,position_float,star_float\n";
    for (std::size_t j = 0; j < patch.size(); ++j) {
        auto [u, v] = patch.coords(j);
        text += std::to_string(j);
        text += patch.letter(j) == Letter::A ? ",a," : ",b,";
        text += u.get_str() + "," + v.get_str() + ",";
        text += fmt(embed(patch.position(j), prec).to_double()) + "," +
                fmt(stars[j].to_double()) + "\n";
    }
    write_output(opt, text);
    return 0;
}

// --------------------------------------------------------------- amplitude

int cmd_amplitude(const Options& opt) {
    RuleSpec spec = parse_rule(opt);
    const BinaryPisotRule& rule = need_deterministic(spec);
    if (opt.k_specs.size() != 1)
        throw config_error("amplitude needs exactly one --k wave number");
    unsigned n_max = opt.n_max ? opt.n_max : 30;
    long bits = pick_bits(opt, std::max(256L, recommended_bits(rule.ring(), n_max).bits));
    WaveNumber k = parse_wavenumber(opt.k_specs[0], rule.ring(), bits);

    AmplitudeSeries series = recursive_amplitudes(rule, k, n_max, Precision(bits));
    DecayProfile profile = decay_profile(series);

    if (opt.format == "json") {
        json doc;
        doc["command"] = "amplitude";
        doc["rule"] = opt.rule_spec;
        doc["k"] = opt.k_specs[0];
        doc["n_max"] = n_max;
        stamp_json(opt, doc, bits);
        json rows = json::array();
        for (const AmplitudeEntry& e : series.entries)
            rows.push_back({{"n", e.n},
                            {"re", e.value.re.str(25)},
                            {"im", e.value.im.str(25)},
                            {"abs_normalized", e.normalized.abs().to_double()},
                            {"profile", profile.values[e.n].second}});
        doc["entries"] = rows;
        write_output(opt, doc.dump(2) + "\n");
        return 0;
    }

    std::string text = csv_preamble(opt, bits);
    text += "n,re,im,abs_normalized,profile\n";
    for (const AmplitudeEntry& e : series.entries) {
        text += std::to_string(e.n) + "," + e.value.re.str(25) + "," + e.value.im.str(25) + "," +
                fmt(e.normalized.abs().to_double()) + "," + fmt(profile.values[e.n].second) +
                "\n";
    }
    write_output(opt, text);
    return 0;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumRow {
    double k_value = 0.0;
    std::string c, d;                 // empty when off the module
    std::string intensity_formula;    // empty when no closed form applies
    std::string intensity_expsum;     // value or error note
    std::string rel_error;
    std::string converged;
};

int cmd_spectrum(const Options& opt) {
    RuleSpec spec = parse_rule(opt);
    const BinaryPisotRule& rule = need_deterministic(spec);
    unsigned n_max = opt.n_max ? opt.n_max : 28;
    long bits = pick_bits(opt, std::max(256L, recommended_bits(rule.ring(),
                                                               std::max(n_max, opt.window_level))
                                                  .bits));
    Precision prec(bits);

    std::vector<WaveNumber> ks;
    if (opt.module_kmax) {
        if (rule.q() != 1)
            throw config_error("module enumeration applies to q=1 rules only");
        if (!opt.k_specs.empty())
            throw config_error("--k and --module-kmax are mutually exclusive");
        for (const ModulePoint& pt : enumerate_module(rule.p(), *opt.module_kmax, opt.coeff_bound))
            ks.push_back(pt.wavenumber());
    } else {
        for (const std::string& s : opt.k_specs)
            ks.push_back(parse_wavenumber(s, rule.ring(), bits));
    }

    // Closed-form ingredients exist only for the q=1 interval-window family.
    std::optional<WindowSpec> window;
    std::optional<BigFloat> dens;
    if (rule.q() == 1) {
        window = window_estimate(rule, opt.window_level, prec);
        Patch patch = realize(iterate(rule, opt.window_level), rule.ring());
        dens = density(patch, prec);
    }

    std::vector<SpectrumRow> rows;
    rows.reserve(ks.size());
    for (const WaveNumber& k : ks) {
        SpectrumRow row;
        row.k_value = k.eval(prec).to_double();
        double expsum = 0.0;
        bool have_expsum = false;
        try {
            IntensityEstimate est = intensity_estimate(recursive_amplitudes(rule, k, n_max, prec));
            expsum = est.intensity;
            have_expsum = true;
            row.intensity_expsum = fmt(est.intensity);
            row.converged = est.converged ? "true" : "false";
        } catch (const precision_exhausted_error&) {
            row.intensity_expsum = "precision_exhausted";
            row.converged = "false";
        }
        if (window && window->certified && k.is_field_element() && is_in_module(k, rule.p())) {
            ModulePoint pt = *module_coords(k, rule.p());
            row.c = std::to_string(pt.c);
            row.d = std::to_string(pt.d);
            double formula =
                modelset_amplitude(rule.p(), pt, *window, *dens, prec).abs2().to_double();
            row.intensity_formula = fmt(formula);
            if (have_expsum) {
                double denom = std::max({std::abs(formula), std::abs(expsum), 1e-300});
                row.rel_error = fmt(std::abs(formula - expsum) / denom);
            }
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SpectrumRow& a, const SpectrumRow& b) { return a.k_value < b.k_value; });

    if (opt.format == "json") {
        json doc;
        doc["command"] = "spectrum";
        doc["rule"] = opt.rule_spec;
        doc["n_max"] = n_max;
        stamp_json(opt, doc, bits);
        json out = json::array();
        for (const SpectrumRow& r : rows) {
            json j = {{"k_value", r.k_value},
                      {"intensity_expsum", r.intensity_expsum},
                      {"converged", r.converged == "true"}};
            if (!r.c.empty()) {
                j["c"] = std::stol(r.c);
                j["d"] = std::stol(r.d);
            }
            if (!r.intensity_formula.empty()) j["intensity_formula"] = r.intensity_formula;
            if (!r.rel_error.empty()) j["rel_error"] = r.rel_error;
            out.push_back(std::move(j));
        }
        doc["rows"] = out;
        write_output(opt, doc.dump(2) + "\n");
        return 0;
    }

    std::string text = csv_preamble(opt, bits);
    text += "c,d,k_value,intensity_formula,intensity_expsum,rel_error,converged\n";
    for (const SpectrumRow& r : rows) {
        text += r.c + "," + r.d + "," + fmt(r.k_value) + "," + r.intensity_formula + "," +
                r.intensity_expsum + "," + r.rel_error + "," + r.converged + "\n";
    }
    write_output(opt, text);
    return 0;
}

// ------------------------------------------------------------------- decay

int cmd_decay(const Options& opt) {
    RuleSpec spec = parse_rule(opt);
    const BinaryPisotRule& rule = need_deterministic(spec);
    if (opt.k_specs.size() != 1) throw config_error("decay needs exactly one --k wave number");
    long bits = pick_bits(opt, std::max(512L, recommended_bits(rule.ring(), opt.n_scan).bits));
    Precision prec(bits);
    WaveNumber k = parse_wavenumber(opt.k_specs[0], rule.ring(), bits);

    CertifyResult result = certify_decay(rule, k, opt.n_scan, opt.grid_steps, prec);
    DecayProfile profile = decay_profile(recursive_amplitudes(rule, k, opt.n_scan, prec));

    if (opt.format == "csv") {
        std::string text = csv_preamble(opt, bits);
        if (const auto* cert = std::get_if<DecayCertificate>(&result)) {
            text += "# certificate: delta=" + fmt(cert->delta) + " r=" + std::to_string(cert->r) +
                    " delta_prime=" + fmt(cert->delta_prime) + " delta2=" + fmt(cert->delta2) +
                    " epsilon=" + fmt(cert->epsilon) + " n0=" + std::to_string(cert->n0) +
                    " c=" + fmt(cert->c) + "\n";
        } else {
            text += "# certificate: none (" + std::get<CertifyFailure>(result).reason + ")\n";
        }
        text += "n,profile,running_max\n";
        for (std::size_t i = 0; i < profile.values.size(); ++i)
            text += std::to_string(profile.values[i].first) + "," +
                    fmt(profile.values[i].second) + "," + fmt(profile.running_max[i]) + "\n";
        write_output(opt, text);
        return 0;
    }

    json doc;
    doc["command"] = "decay";
    doc["rule"] = opt.rule_spec;
    doc["k"] = opt.k_specs[0];
    doc["n_scan"] = opt.n_scan;
    doc["grid_steps"] = opt.grid_steps;
    stamp_json(opt, doc, bits);
    json prof = json::array();
    for (std::size_t i = 0; i < profile.values.size(); ++i)
        prof.push_back({{"n", profile.values[i].first},
                        {"value", profile.values[i].second},
                        {"running_max", profile.running_max[i]}});
    doc["profile"] = prof;
    doc["empirical_c"] = profile.empirical_c;
    if (const auto* cert = std::get_if<DecayCertificate>(&result)) {
        doc["certificate"] = {{"delta", cert->delta},
                              {"r", cert->r},
                              {"delta_prime", cert->delta_prime},
                              {"delta2", cert->delta2},
                              {"epsilon", cert->epsilon},
                              {"n0", cert->n0},
                              {"c", cert->c},
                              {"n_scan", cert->n_scan},
                              {"grid_steps", cert->grid_steps},
                              {"prec_bits", cert->prec_bits},
                              {"note", cert->note}};
    } else {
        const auto& fail = std::get<CertifyFailure>(result);
        json table = json::array();
        for (auto [delta, r] : fail.best_r_per_delta) table.push_back({{"delta", delta}, {"r", r}});
        doc["failure"] = {{"reason", fail.reason}, {"best_r_per_delta", table}};
    }
    write_output(opt, doc.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------- orbit

int cmd_orbit(const Options& opt) {
    RuleSpec spec = parse_rule(opt);
    RingParams ring = std::holds_alternative<BinaryPisotRule>(spec)
                          ? std::get<BinaryPisotRule>(spec).ring()
                          : std::get<RnmsRule>(spec).ring();
    if (opt.xi_spec.empty()) throw config_error("orbit needs --xi");
    unsigned N = opt.n_max ? opt.n_max : 500;
    WaveNumber xi = parse_wavenumber(opt.xi_spec, ring, std::max(opt.prec_bits, 256L));
    long bits = pick_bits(opt, recommended_bits(ring, N, xi.is_field_element()).bits);
    Precision prec(bits);

    OrbitReport rep = orbit(xi, ring, N, prec);
    unsigned tail = opt.tail_start ? opt.tail_start : std::max(1u, N / 5);

    if (opt.format == "json") {
        GapEstimate gap = gap_estimate(rep, tail);
        auto clusters = cluster_cover(rep, opt.eps, tail);
        json doc;
        doc["command"] = "orbit";
        doc["rule"] = opt.rule_spec;
        doc["xi"] = opt.xi_spec;
        doc["xi_in_field"] = rep.xi_in_field;
        doc["N"] = N;
        doc["tail_start"] = tail;
        doc["eps"] = opt.eps;
        stamp_json(opt, doc, bits);
        doc["gap"] = {{"gap", gap.gap}, {"bound", gap.bound}, {"satisfied", gap.satisfied}};
        json cl = json::array();
        for (auto [center, count] : clusters) cl.push_back({{"center", center}, {"count", count}});
        doc["clusters"] = cl;
        doc["cluster_count"] = clusters.size();
        if (!rep.xi_in_field) {
            DeltaRResult res = find_delta_r(rep, opt.grid_steps, opt.r_max);
            if (const auto* wit = std::get_if<DeltaRWitness>(&res)) {
                doc["witness"] = {{"delta", wit->delta}, {"r", wit->r}};
            } else {
                const auto& fail = std::get<DeltaRFailure>(res);
                json table = json::array();
                for (auto [delta, r] : fail.best_r_per_delta)
                    table.push_back({{"delta", delta}, {"r", r}});
                doc["witness_failure"] = {{"reason", fail.reason}, {"best_r_per_delta", table}};
            }
        } else {
            doc["witness"] = nullptr;
        }
        write_output(opt, doc.dump(2) + "\n");
        return 0;
    }

    std::string text = csv_preamble(opt, bits);
    text += "n,frac,dist_to_int\n";
    for (unsigned i = 0; i < rep.N; ++i)
        text += std::to_string(i + 1) + "," + fmt(rep.fracs[i]) + "," + fmt(rep.dist(i)) + "\n";
    write_output(opt, text);
    return 0;
}

// -------------------------------------------------------------------- rnms

int cmd_rnms(const Options& opt) {
    RuleSpec spec = parse_rule(opt);
    const auto* rnms = std::get_if<RnmsRule>(&spec);
    if (!rnms) throw config_error("rnms needs a random rule (\"m=<int>;probs=...\")");
    if (opt.k_specs.empty()) throw config_error("rnms needs at least one --k wave number");
    unsigned n = opt.n_max ? opt.n_max : 18;
    long bits = pick_bits(opt, std::max(256L, recommended_bits(rnms->ring(), n).bits));
    Precision prec(bits);
    std::vector<std::uint64_t> seeds = opt.seeds.empty() ? std::vector<std::uint64_t>{0}
                                                         : opt.seeds;

    struct Row {
        std::string k_spec;
        double k_value;
        std::uint64_t seed;
        RnmsIntensity stats;
    };
    std::vector<Row> rows;
    for (const std::string& kspec : opt.k_specs) {
        WaveNumber k = parse_wavenumber(kspec, rnms->ring(), bits);
        double kval = k.eval(prec).to_double();
        for (std::uint64_t seed : seeds)
            rows.push_back({kspec, kval, seed, rnms_intensity(*rnms, k, n, opt.samples, seed, prec)});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.k_value != b.k_value) return a.k_value < b.k_value;
        return a.seed < b.seed;
    });

    if (opt.format == "json") {
        json doc;
        doc["command"] = "rnms";
        doc["rule"] = opt.rule_spec;
        doc["n"] = n;
        doc["samples"] = opt.samples;
        stamp_json(opt, doc, bits);
        json out = json::array();
        for (const Row& r : rows)
            out.push_back({{"k", r.k_spec},
                           {"k_value", r.k_value},
                           {"seed", r.seed},
                           {"mean_intensity", r.stats.mean},
                           {"std_error", r.stats.std_error}});
        doc["rows"] = out;
        write_output(opt, doc.dump(2) + "\n");
        return 0;
    }

    std::string text = csv_preamble(opt, bits);
    text += "k,n,samples,seed,mean_intensity,std_error\n";
    for (const Row& r : rows)
        text += fmt(r.k_value) + "," + std::to_string(n) + "," + std::to_string(opt.samples) +
                "," + std::to_string(r.seed) + "," + fmt(r.stats.mean) + "," +
                fmt(r.stats.std_error) + "\n";
    write_output(opt, text);
    return 0;
}

// ------------------------------------------------------------------ config

bool flag_given(const CLI::App* sub, const std::string& name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o && o->count() > 0;
}

void apply_config(const std::string& path, CLI::App* sub, Options& opt) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot read config file \"" + path + "\"");
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::exception& e) {
        throw config_error("config file \"" + path + "\": " + e.what());
    }
    if (!doc.is_object()) throw config_error("config file must hold a JSON object");

    auto as_strings = [](const json& v, const char* key) {
        std::vector<std::string> out;
        if (v.is_string()) {
            out.push_back(v.get<std::string>());
        } else if (v.is_number()) {
            out.push_back(v.dump());
        } else if (v.is_array()) {
            for (const json& e : v) {
                if (e.is_string())
                    out.push_back(e.get<std::string>());
                else if (e.is_number())
                    out.push_back(e.dump());
                else
                    throw config_error(std::string("config key \"") + key +
                                       "\" holds a non-scalar entry");
            }
        } else {
            throw config_error(std::string("config key \"") + key + "\" has the wrong type");
        }
        return out;
    };
    auto number = [](const json& v, const char* key) {
        if (!v.is_number())
            throw config_error(std::string("config key \"") + key + "\" must be a number");
        return v;
    };

    for (const auto& [key, value] : doc.items()) {
        if (key == "rule") {
            if (!flag_given(sub, "--rule")) opt.rule_spec = value.get<std::string>();
        } else if (key == "k") {
            if (!flag_given(sub, "--k")) opt.k_specs = as_strings(value, "k");
        } else if (key == "xi") {
            if (!flag_given(sub, "--xi")) opt.xi_spec = as_strings(value, "xi").at(0);
        } else if (key == "module_kmax") {
            if (!flag_given(sub, "--module-kmax"))
                opt.module_kmax = number(value, "module_kmax").get<double>();
        } else if (key == "coeff_bound") {
            if (!flag_given(sub, "--coeff-bound"))
                opt.coeff_bound = number(value, "coeff_bound").get<long>();
        } else if (key == "n_max") {
            if (!flag_given(sub, "--n-max")) opt.n_max = number(value, "n_max").get<unsigned>();
        } else if (key == "n_scan") {
            if (!flag_given(sub, "--n-scan")) opt.n_scan = number(value, "n_scan").get<unsigned>();
        } else if (key == "grid_steps") {
            if (!flag_given(sub, "--grid-steps"))
                opt.grid_steps = number(value, "grid_steps").get<int>();
        } else if (key == "prec_bits") {
            if (!flag_given(sub, "--prec-bits"))
                opt.prec_bits = number(value, "prec_bits").get<long>();
        } else if (key == "samples") {
            if (!flag_given(sub, "--samples"))
                opt.samples = number(value, "samples").get<unsigned>();
        } else if (key == "seed") {
            if (!flag_given(sub, "--seed")) {
                opt.seeds.clear();
                if (value.is_array())
                    for (const json& e : value)
                        opt.seeds.push_back(number(e, "seed").get<std::uint64_t>());
                else
                    opt.seeds.push_back(number(value, "seed").get<std::uint64_t>());
            }
        } else if (key == "out") {
            if (!flag_given(sub, "--out")) opt.out = value.get<std::string>();
        } else if (key == "format") {
            if (!flag_given(sub, "--format")) opt.format = value.get<std::string>();
        } else if (key == "no_timestamp") {
            if (!flag_given(sub, "--no-timestamp")) {
                if (!value.is_boolean())
                    throw config_error("config key \"no_timestamp\" must be a boolean");
                opt.no_timestamp = value.get<bool>();
            }
        } else if (key == "eps") {
            if (!flag_given(sub, "--eps")) opt.eps = number(value, "eps").get<double>();
        } else if (key == "tail_start") {
            if (!flag_given(sub, "--tail-start"))
                opt.tail_start = number(value, "tail_start").get<unsigned>();
        } else if (key == "r_max") {
            if (!flag_given(sub, "--r-max")) opt.r_max = number(value, "r_max").get<int>();
        } else if (key == "window_level") {
            if (!flag_given(sub, "--window-level"))
                opt.window_level = number(value, "window_level").get<unsigned>();
        } else {
            throw config_error("unknown config key \"" + key + "\"");
        }
    }
}

void add_common_flags(CLI::App* sub, Options& opt) {
    sub->add_option("--rule", opt.rule_spec, "rule string: \"w=<word>\" or \"m=<int>;probs=<list>\"");
    sub->add_option("--prec-bits", opt.prec_bits, "working precision in bits (0 = auto)");
    sub->add_option("--out", opt.out, "output file (default: stdout)");
    sub->add_option("--format", opt.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json", ""}));
    sub->add_flag("--no-timestamp", opt.no_timestamp, "omit the generated-at header line");
    sub->add_option("--config", opt.config_path, "JSON config file; explicit flags win");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffraction intensities of binary Pisot substitution tilings"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* inspect = app.add_subcommand("inspect", "ring and rule diagnostics");
    add_common_flags(inspect, opt);

    CLI::App* patch = app.add_subcommand("patch", "export a geometric patch");
    add_common_flags(patch, opt);
    patch->add_option("--n-max", opt.n_max, "inflation level");
    patch->add_option("--seed", opt.seeds, "sampling seed for random rules");

    CLI::App* amplitude = app.add_subcommand("amplitude", "amplitude series for one wave number");
    add_common_flags(amplitude, opt);
    amplitude->add_option("--k", opt.k_specs, "wave number");
    amplitude->add_option("--n-max", opt.n_max, "highest inflation level");

    CLI::App* spectrum = app.add_subcommand("spectrum", "intensities across wave numbers");
    add_common_flags(spectrum, opt);
    spectrum->add_option("--k", opt.k_specs, "explicit wave numbers");
    spectrum->add_option("--module-kmax", opt.module_kmax, "enumerate module points up to this value");
    spectrum->add_option("--coeff-bound", opt.coeff_bound, "coefficient bound for module enumeration");
    spectrum->add_option("--n-max", opt.n_max, "inflation level for the intensity estimate");
    spectrum->add_option("--window-level", opt.window_level, "inflation level for window and density");

    CLI::App* decay = app.add_subcommand("decay", "decay profile and certificate");
    add_common_flags(decay, opt);
    decay->add_option("--k", opt.k_specs, "wave number");
    decay->add_option("--n-scan", opt.n_scan, "scan depth");
    decay->add_option("--grid-steps", opt.grid_steps, "delta grid resolution");

    CLI::App* orbit_cmd = app.add_subcommand("orbit", "fractional parts of xi times powers");
    add_common_flags(orbit_cmd, opt);
    orbit_cmd->add_option("--xi", opt.xi_spec, "orbit seed");
    orbit_cmd->add_option("--n-max", opt.n_max, "orbit length");
    orbit_cmd->add_option("--eps", opt.eps, "cluster radius");
    orbit_cmd->add_option("--tail-start", opt.tail_start, "first index of the analysis tail");
    orbit_cmd->add_option("--grid-steps", opt.grid_steps, "delta grid resolution");
    orbit_cmd->add_option("--r-max", opt.r_max, "largest return time tried");

    CLI::App* rnms = app.add_subcommand("rnms", "sampled intensities of random rules");
    add_common_flags(rnms, opt);
    rnms->add_option("--k", opt.k_specs, "wave numbers");
    rnms->add_option("--n-max", opt.n_max, "inflation level");
    rnms->add_option("--samples", opt.samples, "realizations per wave number");
    rnms->add_option("--seed", opt.seeds, "base seeds, one row per seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        if (!opt.config_path.empty()) apply_config(opt.config_path, sub, opt);
        if (sub == inspect) return cmd_inspect(opt);
        if (sub == patch) return cmd_patch(opt);
        if (sub == amplitude) return cmd_amplitude(opt);
        if (sub == spectrum) return cmd_spectrum(opt);
        if (sub == decay) return cmd_decay(opt);
        if (sub == orbit_cmd) return cmd_orbit(opt);
        if (sub == rnms) return cmd_rnms(opt);
        throw config_error("unknown command");
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const invalid_ring_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ring_mismatch_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const refused_input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
