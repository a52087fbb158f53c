#pragma once

// Serialization: the map-spec file, certificates, censuses, experiment
// reports, and bulk curve/bundle CSV.  Every real number is written as a
// decimal string with 17 significant digits so files round-trip the exact
// doubles and reruns are byte-identical.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "torusdyn/dynamics.hpp"
#include "torusdyn/experiments.hpp"
#include "torusdyn/splitting.hpp"
#include "torusdyn/surgery.hpp"

namespace torusdyn {

using ordered_json = nlohmann::ordered_json;

inline std::string decimal17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_real(const ordered_json& j) {
    if (j.is_string()) return std::strtod(j.get<std::string>().c_str(), nullptr);
    return j.get<double>();
}

inline std::string fnv1a64_hex(const std::string& bytes) {
    uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// map-spec file

struct RationalPoint {
    long num1 = 0, den1 = 1;
    long num2 = 0, den2 = 1;
    TorusPoint value() const {
        return wrap(LiftedPoint{double(num1) / double(den1), double(num2) / double(den2)});
    }
    std::string str1() const { return std::to_string(num1) + "/" + std::to_string(den1); }
    std::string str2() const { return std::to_string(num2) + "/" + std::to_string(den2); }
};

inline RationalPoint parse_rational_pair(const std::string& a, const std::string& b) {
    auto parse_one = [](const std::string& s, long& num, long& den) {
        const auto slash = s.find('/');
        if (slash == std::string::npos) {
            num = std::stol(s);
            den = 1;
        } else {
            num = std::stol(s.substr(0, slash));
            den = std::stol(s.substr(slash + 1));
        }
        if (den == 0) throw std::invalid_argument("rational with zero denominator");
    };
    RationalPoint r;
    parse_one(a, r.num1, r.den1);
    parse_one(b, r.num2, r.den2);
    return r;
}

struct SiteSpec {
    RationalPoint center;
    std::string orientation = "forward";  // or "inverse"
    bool second_stage = true;
};

struct MapSpec {
    std::string schema = "torus-da-map/1";
    std::string label = "example";
    std::string mode = "demo";  // demo | strict | custom
    double eps = 5e-3;
    double delta = 9e-4;
    SurgeryParams params;
    std::vector<SiteSpec> sites;
};

inline ordered_json ramp_json(const OddRamp& r) {
    ordered_json j;
    j["half_support"] = decimal17(r.half_support);
    j["knots"] = ordered_json::array();
    for (const auto& k : r.knots)
        j["knots"].push_back({decimal17(k.position), decimal17(k.slope)});
    j["slope_at_zero"] = decimal17(r.slope_at_zero);
    j["slope_at_flip"] = decimal17(r.slope_at_flip);
    j["tail_slope"] = decimal17(r.tail_slope);
    j["flip_points"] = {decimal17(-r.flip), decimal17(r.flip)};
    return j;
}

inline ordered_json bump_json(const PlateauBump& b) {
    ordered_json j;
    j["half_support"] = decimal17(b.half_support);
    j["plateau_half_width"] = decimal17(b.plateau_half_width);
    j["ease"] = decimal17(b.ease);
    j["peak_slope"] = decimal17(b.peak_slope);
    return j;
}

inline ordered_json to_json(const MapSpec& s) {
    ordered_json j;
    j["schema"] = s.schema;
    j["label"] = s.label;
    j["mode"] = s.mode;
    j["base"] = {{5, 3}, {3, 2}};
    j["eps"] = decimal17(s.eps);
    j["delta"] = decimal17(s.delta);
    ordered_json pj;
    pj["source_mult"] = decimal17(s.params.source_mult);
    pj["sink_mult"] = decimal17(s.params.sink_mult);
    pj["second_sink_mult"] = decimal17(s.params.second_sink_mult);
    pj["second_flip_mult"] = decimal17(s.params.second_flip_mult);
    pj["beta_fill"] = decimal17(s.params.beta_fill);
    pj["beta_plateau_frac"] = decimal17(s.params.beta_plateau_frac);
    pj["offdiag_budget"] = decimal17(s.params.offdiag_budget);
    pj["eta"] = decimal17(s.params.eta);
    j["profile_params"] = pj;
    j["sites"] = ordered_json::array();
    const ToralAutomorphism A = linear_model();
    SurgeryParams params = s.params;
    params.delta = s.delta;
    for (const auto& site : s.sites) {
        ordered_json sj;
        sj["center"] = {site.center.str1(), site.center.str2()};
        sj["orientation"] = site.orientation;
        sj["second_stage"] = site.second_stage;
        // derived profile data, re-created deterministically on load; kept in
        // the file so the construction is auditable without running code
        try {
            const Orientation o = site.orientation == "inverse" ? Orientation::inverse
                                                                : Orientation::forward;
            const SurgerySite built =
                make_site(A, site.center.value(), o, s.eps, params, site.second_stage);
            ordered_json dj;
            dj["alpha"] = ramp_json(built.alpha1);
            dj["beta"] = bump_json(built.beta1);
            dj["support_half"] = {decimal17(built.h1), decimal17(built.h2)};
            if (built.has_second) {
                dj["alpha2"] = ramp_json(built.alpha2);
                dj["beta2"] = bump_json(built.beta2);
                dj["inner_center_offset"] = {decimal17(built.s_flip), decimal17(0.0)};
                dj["second_support_half"] = {decimal17(built.w_U),
                                             decimal17(built.h2p)};
            }
            sj["derived"] = dj;
        } catch (const std::exception&) {
            // an unbuildable spec still serializes; loading will report it
        }
        j["sites"].push_back(sj);
    }
    return j;
}

inline MapSpec map_spec_from_json(const ordered_json& j) {
    MapSpec s;
    s.schema = j.at("schema").get<std::string>();
    if (s.schema != "torus-da-map/1")
        throw std::invalid_argument("unsupported map-spec schema: " + s.schema);
    s.label = j.at("label").get<std::string>();
    s.mode = j.at("mode").get<std::string>();
    s.eps = parse_real(j.at("eps"));
    s.delta = parse_real(j.at("delta"));
    const auto& pj = j.at("profile_params");
    s.params.source_mult = parse_real(pj.at("source_mult"));
    s.params.sink_mult = parse_real(pj.at("sink_mult"));
    s.params.second_sink_mult = parse_real(pj.at("second_sink_mult"));
    s.params.second_flip_mult = parse_real(pj.at("second_flip_mult"));
    s.params.beta_fill = parse_real(pj.at("beta_fill"));
    s.params.beta_plateau_frac = parse_real(pj.at("beta_plateau_frac"));
    s.params.offdiag_budget = parse_real(pj.at("offdiag_budget"));
    s.params.eta = parse_real(pj.at("eta"));
    s.params.delta = s.delta;
    for (const auto& sj : j.at("sites")) {
        SiteSpec site;
        site.center = parse_rational_pair(sj.at("center")[0].get<std::string>(),
                                          sj.at("center")[1].get<std::string>());
        site.orientation = sj.at("orientation").get<std::string>();
        site.second_stage = sj.at("second_stage").get<bool>();
        s.sites.push_back(site);
    }
    return s;
}

inline std::string serialize(const MapSpec& s) { return to_json(s).dump(2) + "\n"; }

inline MapSpec parse_map_spec(const std::string& text) {
    return map_spec_from_json(ordered_json::parse(text));
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << bytes;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ComposedDiffeo make_map_from_spec(const MapSpec& spec) {
    ComposedDiffeo f;
    f.base = linear_model();
    f.eps = spec.eps;
    f.delta = spec.delta;
    f.label = spec.label;
    f.mode = spec.mode;
    SurgeryParams p = spec.params;
    p.delta = spec.delta;
    for (const auto& site : spec.sites) {
        const Orientation o =
            site.orientation == "inverse" ? Orientation::inverse : Orientation::forward;
        f.sites.push_back(
            make_site(f.base, site.center.value(), o, spec.eps, p, site.second_stage));
    }
    if (f.sites.size() > 1) check_disjoint_regions(f.sites);
    if (!f.sites.empty()) quick_bijection_check(f);
    return f;
}

// canonical premade specs
inline MapSpec example_map_spec(const std::string& mode) {
    MapSpec s;
    s.label = "example";
    s.mode = mode;
    s.eps = mode == "strict" ? strict_eps() : demo_eps();
    s.sites = {{RationalPoint{0, 1, 0, 1}, "forward", true}};
    return s;
}
inline MapSpec single_da_map_spec(const std::string& mode) {
    MapSpec s = example_map_spec(mode);
    s.label = "single-da";
    s.sites[0].second_stage = false;
    return s;
}
inline MapSpec theorem_map_spec(const std::string& mode,
                                RationalPoint p1 = {0, 1, 0, 1},
                                RationalPoint p2 = {1, 5, 2, 5}) {
    MapSpec s;
    s.label = "theorem";
    s.mode = mode;
    s.eps = mode == "strict" ? strict_eps() : demo_eps();
    s.sites = {{p1, "forward", true}, {p2, "inverse", true}};
    return s;
}
inline MapSpec linear_map_spec() {
    MapSpec s;
    s.label = "linear";
    s.mode = "none";
    s.eps = demo_eps();
    s.sites = {};
    return s;
}

// ---------------------------------------------------------------------------
// report serialization

inline ordered_json to_json(const ConditionCheck& c) {
    ordered_json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["measured"] = decimal17(c.measured);
    j["bound"] = decimal17(c.bound);
    j["margin"] = decimal17(c.margin);
    j["witness"] = {decimal17(c.witness.x1), decimal17(c.witness.x2)};
    j["witness_jacobian"] = {decimal17(c.witness_jac.a), decimal17(c.witness_jac.b),
                             decimal17(c.witness_jac.c), decimal17(c.witness_jac.d)};
    return j;
}

inline ordered_json to_json(const DominationCertificate& c) {
    ordered_json j;
    j["pass"] = c.pass;
    if (c.K > 0.0) j["K"] = decimal17(c.K);
    if (c.eta > 0.0) j["eta"] = decimal17(c.eta);
    if (c.eps_offdiag > 0.0) j["eps_offdiag"] = decimal17(c.eps_offdiag);
    if (c.delta > 0.0) j["delta"] = decimal17(c.delta);
    j["grid_spacing"] = decimal17(c.grid_spacing);
    j["conditions"] = ordered_json::array();
    for (const auto& cc : c.conditions) j["conditions"].push_back(to_json(cc));
    return j;
}

inline ordered_json certificate_json(const DominationCertificate& entry,
                                     const DominationCertificate& cone,
                                     const std::string& map_hash) {
    ordered_json j;
    j["schema"] = "torus-da-certificate/1";
    j["map_hash"] = map_hash;
    j["pass"] = entry.pass && cone.pass;
    j["entry_conditions"] = to_json(entry);
    j["cone_invariance"] = to_json(cone);
    return j;
}

inline const char* kind_name(FixedPointKind k) {
    switch (k) {
        case FixedPointKind::source: return "source";
        case FixedPointKind::sink: return "sink";
        default: return "saddle";
    }
}

inline ordered_json census_json(const std::vector<FixedPointRecord>& recs,
                                const std::string& map_hash) {
    ordered_json j;
    j["schema"] = "torus-da-fixed-points/1";
    j["map_hash"] = map_hash;
    j["count"] = recs.size();
    j["fixed_points"] = ordered_json::array();
    for (const auto& r : recs) {
        ordered_json rj;
        rj["location"] = {decimal17(r.location.x1), decimal17(r.location.x2)};
        rj["kind"] = kind_name(r.kind);
        rj["eigenvalues"] = {decimal17(r.ev1), decimal17(r.ev2)};
        rj["complex_pair"] = r.complex_pair;
        rj["degenerate"] = r.degenerate;
        rj["jacobian"] = {decimal17(r.jacobian.a), decimal17(r.jacobian.b),
                          decimal17(r.jacobian.c), decimal17(r.jacobian.d)};
        j["fixed_points"].push_back(rj);
    }
    return j;
}

inline ordered_json to_json(const ExperimentReport& r) {
    ordered_json j;
    j["schema"] = "torus-da-experiment/1";
    j["which"] = r.which;
    j["label"] = r.label;
    j["mode"] = r.mode;
    j["map_hash"] = r.map_hash;
    j["seed"] = r.seed;
    j["eps"] = decimal17(r.eps);
    j["delta"] = decimal17(r.delta);
    j["step"] = decimal17(r.step);
    j["pass_tol"] = decimal17(r.pass_tol);
    j["inapplicable"] = r.inapplicable;
    if (r.inapplicable) {
        j["reason"] = r.inapplicable_reason;
        return j;
    }
    j["aggregate_pass"] = r.aggregate_pass;
    j["samples"] = ordered_json::array();
    for (const auto& s : r.samples) {
        ordered_json sj;
        sj["point"] = {decimal17(s.sample.x1), decimal17(s.sample.x2)};
        sj["basin_hitting_time"] = s.basin_hitting_time;
        sj["closest_approach"] = decimal17(s.closest_approach);
        sj["arc_position"] = decimal17(s.arc_position);
        sj["crossings"] = s.crossings;
        sj["pass"] = s.pass;
        j["samples"].push_back(sj);
    }
    ordered_json lj;
    lj["entries"] = r.ledger.entries.size();
    lj["ambiguous"] = r.ledger.ambiguous;
    lj["inf_position"] = decimal17(r.ledger.inf_position);
    lj["sup_position"] = decimal17(r.ledger.sup_position);
    lj["d_a"] = decimal17(r.ledger.d_a);
    lj["d_b"] = decimal17(r.ledger.d_b);
    lj["bound_2eps_ok"] = r.ledger.bound_2eps_ok;
    j["intersection_ledger"] = lj;
    ordered_json ij;
    ij["on_manifold"] = r.invariance.on_manifold;
    ij["worst_image_distance"] = decimal17(r.invariance.worst_image_distance);
    ij["min_outer_expansion"] = decimal17(r.invariance.min_outer_expansion);
    ij["expansion_ok"] = r.invariance.expansion_ok;
    ij["base_image_position"] = decimal17(r.invariance.base_image_position);
    j["forward_invariance"] = ij;
    if (!r.note.empty()) j["note"] = r.note;
    if (r.holder_present) {
        ordered_json hj;
        hj["exponent"] = decimal17(r.holder_exponent);
        hj["semantics"] = "informational only";
        j["holder_diagnostic"] = hj;
    }
    // the one-curve-per-start-point limitation: the tracer realizes a single
    // numerical solution of the direction field per sample
    j["limitation"] =
        "each sample contributes one numerically traced curve; the direction "
        "field may admit other solutions through the same point";
    return j;
}

inline ordered_json to_json(const TheoremReport& r) {
    ordered_json j;
    j["schema"] = "torus-da-theorem-experiment/1";
    j["aggregate_pass"] = r.aggregate_pass;
    j["region_distance"] = decimal17(r.region_distance);
    j["locality_ok"] = r.locality_ok;
    j["part_a"] = to_json(r.part_a);
    j["part_b"] = to_json(r.part_b);
    return j;
}

inline ordered_json to_json(const RobustnessReport& r) {
    ordered_json j;
    j["schema"] = "torus-da-robustness/1";
    j["magnitude"] = decimal17(r.magnitude);
    j["aggregate_pass"] = r.aggregate_pass;
    j["trials"] = ordered_json::array();
    for (const auto& t : r.trials) {
        ordered_json tj;
        tj["trial"] = t.trial;
        tj["certified"] = t.certified;
        tj["lemma3_pass"] = t.lemma3_pass;
        if (!t.note.empty()) tj["note"] = t.note;
        j["trials"].push_back(tj);
    }
    return j;
}

inline ordered_json to_json(const FoliationWitness& w) {
    ordered_json j;
    j["schema"] = "torus-da-foliation-witness/1";
    j["found"] = w.found;
    j["sample_a"] = {decimal17(w.sample_a.x1), decimal17(w.sample_a.x2)};
    j["sample_b"] = {decimal17(w.sample_b.x1), decimal17(w.sample_b.x2)};
    j["closest_a"] = decimal17(w.closest_a);
    j["closest_b"] = decimal17(w.closest_b);
    j["min_pairwise_distance"] = decimal17(w.min_pairwise_distance);
    j["note"] = w.note;
    return j;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string curve_csv(const TorusCurve& c) {
    std::ostringstream os;
    os << "arclength,x1,x2,lift_x1,lift_x2\n";
    for (size_t i = 0; i < c.vertices.size(); ++i) {
        const TorusPoint p = wrap(c.vertices[i]);
        os << decimal17(c.arclength[i]) << ',' << decimal17(p.x1) << ','
           << decimal17(p.x2) << ',' << decimal17(c.vertices[i].x1) << ','
           << decimal17(c.vertices[i].x2) << '\n';
    }
    return os.str();
}

inline std::string manifold_csv(const ManifoldSegment& seg) {
    std::ostringstream os;
    os << "arclength,x1,x2,lift_x1,lift_x2\n";
    const auto poly = seg.polyline();
    const double arc0 = seg.minus_branch.total_length();
    for (size_t i = 0; i < poly.size(); ++i) {
        const TorusPoint p = wrap(poly[i]);
        os << decimal17(double(i) * seg.step - arc0) << ',' << decimal17(p.x1) << ','
           << decimal17(p.x2) << ',' << decimal17(poly[i].x1) << ','
           << decimal17(poly[i].x2) << '\n';
    }
    return os.str();
}

inline std::string bundle_csv(const std::vector<BundleSample>& Es,
                              const std::vector<BundleSample>& Fs) {
    if (Es.size() != Fs.size())
        throw std::invalid_argument("bundle_csv: mismatched sample lists");
    std::ostringstream os;
    os << "x1,x2,theta_E,theta_F,residual_E,residual_F\n";
    for (size_t i = 0; i < Es.size(); ++i) {
        os << decimal17(Es[i].point.x1) << ',' << decimal17(Es[i].point.x2) << ','
           << decimal17(Es[i].dir.theta) << ',' << decimal17(Fs[i].dir.theta) << ','
           << decimal17(Es[i].convergence_residual) << ','
           << decimal17(Fs[i].convergence_residual) << '\n';
    }
    return os.str();
}

}  // namespace torusdyn
