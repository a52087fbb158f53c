#pragma once

// Reporting experiments: integral curves started in the sink's basin are
// funneled through the source, their intersections with the strong unstable
// manifold are single and forward-invariant, the two-sided map shows the
// same on both bundles, and the behavior survives small shear perturbations.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "torusdyn/dynamics.hpp"
#include "torusdyn/splitting.hpp"
#include "torusdyn/surgery.hpp"

namespace torusdyn {

// ---------------------------------------------------------------------------
// report types

struct SampleOutcome {
    TorusPoint sample;
    int basin_hitting_time = -1;
    double closest_approach = 1e300;
    double arc_position = 0.0;
    int crossings = -1;
    bool pass = false;
};

struct IntersectionEntry {
    int curve_id = -1;
    TorusPoint point;
    double wuu_position = 0.0;  // signed arclength from the manifold base
};

struct IntersectionLedger {
    std::vector<IntersectionEntry> entries;
    int ambiguous = 0;          // tangential near-misses, flagged not counted
    double inf_position = 0.0;  // a
    double sup_position = 0.0;  // b
    TorusPoint inf_point, sup_point;
    double d_a = 0.0, d_b = 0.0;  // distances of a, b to the target point
    bool bound_2eps_ok = false;
};

struct InvarianceReport {
    bool on_manifold = true;          // images within 2*step of the polyline
    double worst_image_distance = 0.0;
    double min_outer_expansion = 1e300;  // arclength growth on the outer half
    bool expansion_ok = true;
    double base_image_position = 0.0;
    bool pass() const { return on_manifold && expansion_ok; }
};

struct ExperimentReport {
    std::string label;
    std::string mode;
    std::string which;
    std::string map_hash;  // filled by the caller that owns the spec bytes
    uint64_t seed = 0;
    double eps = 0.0, delta = 0.0, step = 0.0, pass_tol = 0.0;
    int n_samples = 0;
    std::vector<SampleOutcome> samples;
    IntersectionLedger ledger;
    InvarianceReport invariance;
    bool certificate_pass = false;
    bool aggregate_pass = false;
    bool inapplicable = false;
    std::string inapplicable_reason;
    std::string note;
    // informational only, no pass/fail semantics attached
    bool holder_present = false;
    double holder_exponent = 0.0;
    double timing_sec = 0.0;  // never serialized; reruns must be byte-identical
};

// ---------------------------------------------------------------------------
// parameters

struct Lemma3Params {
    int n_samples = 20;
    double radius_lo = 0.25;  // fractions of eps, measured from the sink
    double radius_hi = 0.5;
    double step_frac = 1.0 / 500.0;  // curve step = eps * step_frac
    double pass_tol_steps = 5.0;
    double manifold_step = 1e-4;
    int bundle_n = 200;
    double bundle_tol = 1e-10;
    int basin_max_iter = 400;
    uint64_t seed = 20240601ULL;
};

// ---------------------------------------------------------------------------
// crossings of a curve with a manifold polyline, in a site chart

namespace detail {

inline double cross2(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

struct SegmentHit {
    bool proper = false;
    bool ambiguous = false;
    double t = 0.0;  // parameter on the second segment
    Vec2 point;
};

inline SegmentHit segment_intersection(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    SegmentHit hit;
    const Vec2 r = a1 - a0, s = b1 - b0;
    const double denom = cross2(r, s);
    const Vec2 d = b0 - a0;
    const double eps_par = 1e-15 * std::max(r.norm() * s.norm(), 1e-300);
    if (std::fabs(denom) <= eps_par) {
        // parallel or degenerate; flag a near miss if the segments almost touch
        double tt;
        const double gap = std::min(point_segment_distance(b0, a0, a1, &tt),
                                    point_segment_distance(b1, a0, a1, &tt));
        hit.ambiguous = gap < 1e-12;
        return hit;
    }
    const double t = cross2(d, s) / denom;   // on [a0,a1]
    const double u = cross2(d, r) / denom;   // on [b0,b1]
    const double tol = 1e-12;
    if (t > -tol && t < 1.0 + tol && u > -tol && u < 1.0 + tol) {
        if (t < tol || t > 1.0 - tol || u < tol || u > 1.0 - tol) {
            hit.ambiguous = true;  // endpoint touch, resolved by the caller
        }
        hit.proper = true;
        hit.t = u;
        hit.point = {a0.x + t * r.x, a0.y + t * r.y};
    }
    return hit;
}

}  // namespace detail

// Count transversal crossings of each curve with the manifold polyline and
// assemble the ledger.  All geometry happens in the chart of `site`, valid
// because every player stays well inside the chart radius.
inline IntersectionLedger unique_intersection_check(
    const SurgerySite& site, const ManifoldSegment& wuu,
    const std::vector<TorusCurve>& curves, TorusPoint target, double eps,
    std::vector<int>* crossings_out = nullptr) {
    IntersectionLedger led;
    const std::vector<LiftedPoint> poly = wuu.polyline();
    const double arc0 = wuu.minus_branch.total_length();

    std::vector<Vec2> w;
    w.reserve(poly.size());
    for (const auto& p : poly) w.push_back(site.chart_of(wrap(p)));

    // curve segments can only reach the manifold from inside this radius;
    // the guard also drops the spurious jump segments a long curve produces
    // when its nearest-lift displacement wraps around the torus
    const double reach = 0.105 + wuu.step;
    int curve_id = 0;
    for (const auto& c : curves) {
        int count = 0;
        for (size_t i = 0; i + 1 < c.vertices.size(); ++i) {
            const Vec2 a0 = site.chart_of(wrap(c.vertices[i]));
            const Vec2 a1 = site.chart_of(wrap(c.vertices[i + 1]));
            if (a0.norm() > reach + 2.0 * c.step && a1.norm() > reach + 2.0 * c.step)
                continue;
            if ((a1 - a0).norm() > 10.0 * c.step + 1e-12) continue;  // wrap jump
            for (size_t j = 0; j + 1 < w.size(); ++j) {
                const auto hit = detail::segment_intersection(a0, a1, w[j], w[j + 1]);
                if (hit.ambiguous && !hit.proper) ++led.ambiguous;
                if (!hit.proper) continue;
                // shared polyline vertices produce endpoint touches on both
                // neighbors; count the hit only on the segment owning u<1
                if (hit.t >= 1.0 - 1e-12 && j + 2 < w.size()) continue;
                ++count;
                IntersectionEntry e;
                e.curve_id = curve_id;
                e.point = site.point_of(hit.point);
                e.wuu_position = (double(j) + hit.t) * wuu.step - arc0;
                led.entries.push_back(e);
            }
        }
        if (crossings_out) crossings_out->push_back(count);
        ++curve_id;
    }

    if (!led.entries.empty()) {
        const auto lo = std::min_element(
            led.entries.begin(), led.entries.end(),
            [](const auto& a, const auto& b) { return a.wuu_position < b.wuu_position; });
        const auto hi = std::max_element(
            led.entries.begin(), led.entries.end(),
            [](const auto& a, const auto& b) { return a.wuu_position < b.wuu_position; });
        led.inf_position = lo->wuu_position;
        led.sup_position = hi->wuu_position;
        led.inf_point = lo->point;
        led.sup_point = hi->point;
        led.d_a = torus_distance(led.inf_point, target);
        led.d_b = torus_distance(led.sup_point, target);
        led.bound_2eps_ok = std::max(led.d_a, led.d_b) < 2.0 * eps;
    }
    return led;
}

// Push every intersection point one step forward: it must land on the
// manifold polyline, and its arclength position away from the base must grow
// on the outer half of [a, b].
inline InvarianceReport forward_invariance_check(const FlowView& view,
                                                 const IntersectionLedger& led,
                                                 const ManifoldSegment& wuu,
                                                 TorusPoint target) {
    InvarianceReport rep;
    const auto poly = wuu.polyline();
    const double arc0 = wuu.minus_branch.total_length();
    const double span =
        std::max(std::fabs(led.inf_position), std::fabs(led.sup_position));
    for (const auto& e : led.entries) {
        const TorusPoint img = view.eval(e.point);
        double arc = 0.0;
        const double dist = distance_to_polyline(poly, img, &arc, arc0, wuu.step);
        rep.worst_image_distance = std::max(rep.worst_image_distance, dist);
        if (dist > 2.0 * wuu.step) rep.on_manifold = false;
        if (span > 0.0 && std::fabs(e.wuu_position) >= 0.5 * span &&
            std::fabs(e.wuu_position) > 4.0 * wuu.step) {
            const double growth = std::fabs(arc) / std::fabs(e.wuu_position);
            rep.min_outer_expansion = std::min(rep.min_outer_expansion, growth);
            if (growth < 1.3) rep.expansion_ok = false;
        }
    }
    const TorusPoint base_img = view.eval(target);
    distance_to_polyline(poly, base_img, &rep.base_image_position, arc0, wuu.step);
    return rep;
}

// Informational diagnostic: log-log slope of the dominated bundle's angular
// modulus of continuity across the inner surgery shoulder, where the bundle
// is not Lipschitz.  Recorded in reports, never asserted.
inline double holder_exponent_diagnostic(const FlowView& view, const SurgerySite& site,
                                         int bundle_n, double bundle_tol) {
    const TorusPoint base = site.point_of({site.s_flip + 0.5 * site.w_U, 0.0});
    const BundleSample E0 = compute_E_direction(view, base, bundle_n, bundle_tol);
    std::vector<double> logd, loga;
    for (int k = 0; k <= 9; ++k) {
        const double d = site.h2p * std::pow(10.0, -3.0 + k / 3.0);
        const TorusPoint x = site.point_of({site.s_flip + 0.5 * site.w_U, d});
        const BundleSample E = compute_E_direction(view, x, bundle_n, bundle_tol);
        const double a = angle_between(E0.dir, E.dir);
        if (a <= 10.0 * bundle_tol) continue;
        logd.push_back(std::log(d));
        loga.push_back(std::log(a));
    }
    if (logd.size() < 3) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(logd.size());
    for (size_t i = 0; i < logd.size(); ++i) {
        sx += logd[i];
        sy += loga[i];
        sxx += logd[i] * logd[i];
        sxy += logd[i] * loga[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// the basin-to-source protocol
//
// Samples are taken along the contracted axis through the sink (the basin is
// O(eps^3)-thin off that axis, so circle sampling would starve the filter),
// each verified by in_basin_of_sink, then an integral curve of the dominated
// bundle of total length 3 eps is traced from each and tested for passing
// through the target within 5 steps of tolerance.

inline ExperimentReport lemma3_protocol(const FlowView& view, const SurgerySite& site,
                                        TorusPoint pass_target,
                                        TorusPoint manifold_base,
                                        const Lemma3Params& P,
                                        const std::string& which) {
    const ComposedDiffeo& f = *view.f;
    ExperimentReport rep;
    rep.label = f.label;
    rep.mode = f.mode;
    rep.which = which;
    rep.seed = P.seed;
    rep.eps = f.eps;
    rep.delta = f.delta;
    rep.step = f.eps * P.step_frac;
    rep.pass_tol = P.pass_tol_steps * rep.step;
    rep.n_samples = P.n_samples;

    const TorusPoint q = site.sink_location();
    std::mt19937_64 rng(P.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    // basin samples on the contracted axis through q, built and verified in
    // exact chart coordinates (the basin is thinner than wrap rounding)
    std::vector<TorusPoint> samples;
    std::vector<int> times;
    for (int i = 0; i < P.n_samples; ++i) {
        const double frac = (double(i) + 0.35 * U(rng)) / double(P.n_samples);
        const double r = f.eps * (P.radius_lo + (P.radius_hi - P.radius_lo) * frac);
        const Vec2 u{site.s_flip + r, 0.0};
        const BasinResult b =
            in_basin_of_sink_chart(view, site, u, q, P.basin_max_iter);
        if (!b.in_basin) continue;
        samples.push_back(site.point_of(u));
        times.push_back(b.hitting_time);
    }
    if (int(samples.size()) < P.n_samples) {
        rep.inapplicable = true;
        rep.inapplicable_reason = "could not collect the requested basin samples";
        return rep;
    }

    const ManifoldSegment wuu =
        grow_unstable_manifold(view, manifold_base, 0.1, P.manifold_step, P.bundle_n,
                               P.bundle_tol);

    std::vector<TorusCurve> curves;
    bool all_pass = true;
    for (size_t i = 0; i < samples.size(); ++i) {
        SampleOutcome oc;
        oc.sample = samples[i];
        oc.basin_hitting_time = times[i];
        TorusCurve c = trace_integral_curve(view, samples[i], Bundle::E,
                                            1.5 * f.eps, rep.step, P.bundle_n,
                                            P.bundle_tol);
        const PassThroughResult pt = curve_passes_through(c, pass_target, rep.pass_tol);
        oc.closest_approach = pt.closest;
        oc.arc_position = pt.arc_position;
        oc.pass = pt.pass;
        all_pass = all_pass && oc.pass;
        rep.samples.push_back(oc);
        curves.push_back(std::move(c));
    }

    std::vector<int> crossings;
    rep.ledger = unique_intersection_check(site, wuu, curves, pass_target, f.eps,
                                           &crossings);
    bool crossings_ok = true;
    for (size_t i = 0; i < crossings.size(); ++i) {
        rep.samples[i].crossings = crossings[i];
        crossings_ok = crossings_ok && crossings[i] == 1;
    }
    rep.invariance = forward_invariance_check(view, rep.ledger, wuu, manifold_base);

    rep.holder_present = true;
    rep.holder_exponent =
        holder_exponent_diagnostic(view, site, P.bundle_n, P.bundle_tol);

    rep.aggregate_pass = all_pass && crossings_ok && rep.ledger.bound_2eps_ok &&
                         rep.invariance.pass();
    return rep;
}

// locate a site with a second-stage sink; reports inapplicability otherwise
inline const SurgerySite* find_sink_site(const ComposedDiffeo& f,
                                         Orientation orient) {
    for (const auto& s : f.sites)
        if (s.has_second && s.orient == orient) return &s;
    return nullptr;
}

inline ExperimentReport lemma3_experiment(const ComposedDiffeo& f,
                                          const Lemma3Params& P = {}) {
    ExperimentReport rep;
    rep.label = f.label;
    rep.mode = f.mode;
    rep.which = "lemma3";
    const SurgerySite* site = find_sink_site(f, Orientation::forward);
    if (!site) {
        rep.inapplicable = true;
        rep.inapplicable_reason = "no sink basin: the map has no attracting fixed point";
        return rep;
    }
    return lemma3_protocol(forward_view(f), *site, site->center, site->center, P,
                           "lemma3");
}

// same phenomenon between the saddle on the other flip and the sink
inline ExperimentReport remark_experiment(const ComposedDiffeo& f,
                                          const Lemma3Params& P = {}) {
    ExperimentReport rep;
    rep.label = f.label;
    rep.which = "remark";
    const SurgerySite* site = find_sink_site(f, Orientation::forward);
    if (!site) {
        rep.inapplicable = true;
        rep.inapplicable_reason = "no sink basin: the map has no attracting fixed point";
        return rep;
    }
    const TorusPoint q_prime = site->saddle_location();
    return lemma3_protocol(forward_view(f), *site, q_prime, q_prime, P, "remark");
}

// ---------------------------------------------------------------------------
// foliation violation witness: two distinct basin points whose curves both
// pass through the target yet stay disjoint near the sink

struct FoliationWitness {
    bool found = false;
    TorusPoint sample_a, sample_b;
    double closest_a = 0.0, closest_b = 0.0;
    double min_pairwise_distance = 1e300;  // restricted to the sink's vicinity
    std::string note;
    TorusCurve curve_a, curve_b;
};

inline FoliationWitness foliation_violation_witness(const ComposedDiffeo& f,
                                                    const Lemma3Params& P = {}) {
    FoliationWitness w;
    const SurgerySite* site = find_sink_site(f, Orientation::forward);
    if (!site) {
        w.note = "no sink basin";
        return w;
    }
    const FlowView view = forward_view(f);
    const TorusPoint q = site->sink_location();
    const double step = f.eps * P.step_frac;
    const double tol = P.pass_tol_steps * step;

    // one sample on the axis, one inside the vertical needle of the basin;
    // both verified from exact chart coordinates
    const Vec2 ua{site->s_flip + f.eps / 3.0, 0.0};
    const Vec2 ub{site->s_flip, 0.5 * site->alpha2.flip};
    if (!in_basin_of_sink_chart(view, *site, ua, q, P.basin_max_iter).in_basin) {
        w.note = "axis sample left the basin";
        return w;
    }
    if (!in_basin_of_sink_chart(view, *site, ub, q, P.basin_max_iter).in_basin) {
        w.note = "needle sample left the basin";
        return w;
    }
    const TorusPoint xa = site->point_of(ua);
    const TorusPoint xb = site->point_of(ub);
    w.sample_a = xa;
    w.sample_b = xb;
    w.curve_a = trace_integral_curve(view, xa, Bundle::E, 1.5 * f.eps, step,
                                     P.bundle_n, P.bundle_tol);
    w.curve_b = trace_integral_curve(view, xb, Bundle::E, 1.5 * f.eps, step,
                                     P.bundle_n, P.bundle_tol);
    w.closest_a = curve_passes_through(w.curve_a, site->center, tol).closest;
    w.closest_b = curve_passes_through(w.curve_b, site->center, tol).closest;

    // pairwise separation over the portion near the sink
    for (const auto& va : w.curve_a.vertices) {
        if (torus_distance(wrap(va), q) > 0.5 * f.eps) continue;
        for (size_t j = 0; j + 1 < w.curve_b.vertices.size(); ++j) {
            const LiftedPoint b0 = w.curve_b.vertices[j], b1 = w.curve_b.vertices[j + 1];
            const LiftedPoint t = nearest_lift(
                wrap(va), {0.5 * (b0.x1 + b1.x1), 0.5 * (b0.x2 + b1.x2)});
            double tt;
            const double d = point_segment_distance(t.vec(), b0.vec(), b1.vec(), &tt);
            w.min_pairwise_distance = std::min(w.min_pairwise_distance, d);
        }
    }
    // two distinct local leaves through one point: both curves meet the
    // target yet are separated near the sink (by the basin's true thickness)
    w.found = w.closest_a <= tol && w.closest_b <= tol &&
              w.min_pairwise_distance > 0.0;
    w.note = "separation near q is bounded by the basin half-thickness s2 = " +
             std::to_string(site->alpha2.flip);
    return w;
}

// ---------------------------------------------------------------------------
// the two-sided map: dominated bundle on the forward side, dominating bundle
// under the inverse on the mirrored side

struct TheoremReport {
    ExperimentReport part_a;
    ExperimentReport part_b;
    double region_distance = 0.0;
    bool locality_ok = false;
    bool aggregate_pass = false;
};

inline TheoremReport theorem_experiment(const ComposedDiffeo& f,
                                        const Lemma3Params& P = {}) {
    TheoremReport rep;
    const SurgerySite* fwd = find_sink_site(f, Orientation::forward);
    const SurgerySite* inv = find_sink_site(f, Orientation::inverse);
    if (!fwd || !inv) {
        rep.part_a.inapplicable = true;
        rep.part_a.inapplicable_reason = "map does not carry both surgery sites";
        return rep;
    }
    rep.part_a = lemma3_protocol(forward_view(f), *fwd, fwd->center, fwd->center, P,
                                 "theorem-part-a");
    Lemma3Params Pb = P;
    Pb.seed = P.seed + 1;
    rep.part_b = lemma3_protocol(reversed_view(f), *inv, inv->center, inv->center, Pb,
                                 "theorem-part-b");

    rep.region_distance = torus_distance(fwd->center, inv->center) -
                          site_region_radius(*fwd) - site_region_radius(*inv);

    // spot check: the map equals the linear model outside both regions
    std::mt19937_64 rng(P.seed + 2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    bool loc = true;
    for (int i = 0; i < 2000; ++i) {
        const TorusPoint x{U(rng), U(rng)};
        if (f.in_modified_region(x)) continue;
        const TorusPoint y = f.evaluate(x), z = f.apply_linear(x);
        loc = loc && y.x1 == z.x1 && y.x2 == z.x2;
    }
    rep.locality_ok = loc;
    rep.aggregate_pass = rep.part_a.aggregate_pass && rep.part_b.aggregate_pass &&
                         rep.region_distance > 0.0 && rep.locality_ok;
    return rep;
}

// ---------------------------------------------------------------------------
// robustness probe: shear perturbations of bounded C1 size

inline ShearChart make_probe_shear(const ComposedDiffeo& f, double magnitude,
                                   uint64_t seed, int trial) {
    const double r = 0.01;
    PlateauBump b = build_beta(r, r / 8.0);
    ShearChart sh;
    sh.frame = f.base.frame;
    sh.b1 = b;
    sh.b2 = b;
    sh.r1 = r;
    sh.r2 = r;
    std::mt19937_64 rng(seed + 1000003ULL * uint64_t(trial + 1));
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    sh.m = (trial % 2 == 0 ? 1.0 : -1.0) * magnitude / b.peak_slope;

    // keep the support away from every site's surgeries, manifolds and
    // curve-tracing neighborhoods
    const double clearance = 3.0 * std::hypot(sh.r1 + std::fabs(sh.m), sh.r2);
    std::vector<Vec2> candidates;
    for (const double off1 : {0.18, -0.18, 0.22, -0.22, 0.26, -0.26, 0.30, -0.30})
        candidates.push_back({off1 + 0.003 * U(rng), 0.19 + 0.003 * U(rng)});
    for (const Vec2& cand : candidates) {
        const Vec2 wc = f.base.frame.apply(cand);
        const TorusPoint center = wrap({wc.x, wc.y});
        bool ok = true;
        for (const auto& site : f.sites) {
            const Vec2 u = site.chart_of(center);
            // manifolds span |coord| <= 0.12 along the site axes; the
            // curve-tracing neighborhood is a 3 eps ball
            double tt;
            const double d_v = point_segment_distance(u, {0.0, -0.12}, {0.0, 0.12}, &tt);
            const double d_h = point_segment_distance(u, {-0.12, 0.0}, {0.12, 0.0}, &tt);
            if (d_v < clearance || d_h < clearance ||
                u.norm() < 3.0 * f.eps + clearance)
                ok = false;
        }
        if (ok) {
            sh.center = center;
            return sh;
        }
    }
    throw std::runtime_error("make_probe_shear: no admissible support location");
}

struct RobustnessTrial {
    int trial = 0;
    bool certified = false;
    bool lemma3_pass = false;
    std::string note;
};

struct RobustnessReport {
    double magnitude = 0.0;
    std::vector<RobustnessTrial> trials;
    bool aggregate_pass = false;
};

inline RobustnessReport robustness_experiment(const ComposedDiffeo& f,
                                              double perturbation_magnitude,
                                              int n_trials, double cert_K,
                                              double cert_eta,
                                              const Lemma3Params& P = {}) {
    RobustnessReport rep;
    rep.magnitude = perturbation_magnitude;
    bool all = true;
    for (int t = 0; t < n_trials; ++t) {
        RobustnessTrial tr;
        tr.trial = t;
        ComposedDiffeo g = f;
        g.shears.push_back(make_probe_shear(f, perturbation_magnitude, P.seed, t));
        const auto cert = check_lemma2_conditions(g, cert_K, cert_eta, f.eps, 128);
        const auto cone = check_cone_invariance(g, f.delta, 128);
        tr.certified = cert.pass && cone.pass;
        if (!tr.certified) {
            tr.note = "outside certified neighborhood";
            all = false;
            rep.trials.push_back(tr);
            continue;
        }
        Lemma3Params Pt = P;
        Pt.seed = P.seed + 77ULL * uint64_t(t);
        const ExperimentReport er = lemma3_experiment(g, Pt);
        tr.lemma3_pass = er.aggregate_pass;
        all = all && tr.lemma3_pass;
        rep.trials.push_back(tr);
    }
    rep.aggregate_pass = all;
    return rep;
}

}  // namespace torusdyn
