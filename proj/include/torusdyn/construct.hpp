#pragma once

// Checked map builders: assemble a surgered diffeomorphism and establish its
// defining properties, itemized in a construction report.

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "torusdyn/dynamics.hpp"
#include "torusdyn/experiments.hpp"
#include "torusdyn/splitting.hpp"
#include "torusdyn/surgery.hpp"

namespace torusdyn {

struct CheckItem {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct ConstructionReport {
    std::string label;
    std::vector<CheckItem> items;
    bool pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
    std::string failures() const {
        std::ostringstream os;
        for (const auto& it : items)
            if (!it.pass)
                os << "  [FAIL] " << it.name << ": measured " << it.measured
                   << " vs bound " << it.bound << " (" << it.detail << ")\n";
        return os.str();
    }
};

struct BuiltMap {
    ComposedDiffeo map;
    ConstructionReport report;
};

namespace detail {

inline CheckItem locality_check(const ComposedDiffeo& f, int n_samples, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    CheckItem it{"locality_outside_regions", true, 0.0, 0.0,
                 "evaluate equals the linear model bitwise outside modified regions"};
    int checked = 0;
    while (checked < n_samples) {
        const TorusPoint x{U(rng), U(rng)};
        if (f.in_modified_region(x)) continue;
        ++checked;
        const TorusPoint y = f.evaluate(x), z = f.apply_linear(x);
        if (y.x1 != z.x1 || y.x2 != z.x2) {
            it.pass = false;
            it.measured += 1.0;
        }
    }
    return it;
}

inline void append_profile_items(ConstructionReport& rep, const SurgerySite& site,
                                 double eps, double mu) {
    const ValidationReport v = validate_profiles(site.alpha1, site.beta1, eps, mu);
    for (const auto& item : v.items)
        rep.items.push_back(
            {"profiles/" + item.name, item.pass, item.measured, item.bound, item.detail});
}

inline CheckItem wuu_length_item(const FlowView& view, TorusPoint base,
                                 const std::string& name, double step) {
    CheckItem it{name, false, 0.0, 0.1, "both branch arclengths within one step of 1/10"};
    const ManifoldSegment seg = grow_unstable_manifold(view, base, 0.1, step);
    const double lp = seg.plus_branch.total_length();
    const double lm = seg.minus_branch.total_length();
    it.measured = std::max(std::fabs(lp - 0.1), std::fabs(lm - 0.1));
    it.pass = it.measured <= step;
    return it;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// single-stage map: the basic surgery and its defining inequalities

inline BuiltMap build_single_da_map(double eps, double delta,
                                    SurgeryParams params = {}) {
    params.delta = delta;
    BuiltMap out{make_single_da_diffeo(eps, params), {}};
    const ComposedDiffeo& f = out.map;
    ConstructionReport& rep = out.report;
    rep.label = f.label;
    const SurgerySite& site = f.sites[0];
    const double lam = f.base.lambda, mu = f.base.mu;

    detail::append_profile_items(rep, site, eps, mu);

    // Jacobian entry bounds over a box grid
    {
        CheckItem lo{"entry_a_above_lambda_sq", true, 1e300, lam * lam, ""};
        CheckItem hi{"entry_a_below_sqrt_mu", true, 0.0, std::sqrt(mu), ""};
        CheckItem off{"entry_b_below_eps", true, 0.0, eps, ""};
        const int N = 512;
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j) {
                const Vec2 u{site.h1 * (2.0 * i / N - 1.0), site.h2 * (2.0 * j / N - 1.0)};
                const Mat2 J = site.local_jacobian(u);
                lo.measured = std::min(lo.measured, J.a);
                hi.measured = std::max(hi.measured, J.a);
                off.measured = std::max(off.measured, std::fabs(J.b));
            }
        lo.pass = lo.measured > lo.bound;
        hi.pass = hi.measured < hi.bound;
        off.pass = off.measured < off.bound;
        rep.items.push_back(lo);
        rep.items.push_back(hi);
        rep.items.push_back(off);
    }

    // exactly three fixed points on the contracted axis inside the ball
    {
        CheckItem it{"axis_fixed_points", false, 0.0, 3.0,
                     "1-D scan of the axis map at resolution l(I1)/1e5"};
        it.measured = count_interior_fixed_points(site.alpha1, 100000);
        it.pass = int(it.measured) == 3;
        rep.items.push_back(it);
    }

    rep.items.push_back(detail::locality_check(f, 10000, 7101ULL));

    // the strong unstable manifold is the expanded axis segment
    {
        const double step = 1e-4;
        const ManifoldSegment seg =
            grow_unstable_manifold(forward_view(f), site.center, 0.1, step);
        CheckItem axis{"wuu_on_axis", false, 0.0, 1e-9,
                       "max |u1| over manifold vertices"};
        for (const auto& p : seg.polyline()) {
            const Vec2 u = site.chart_of(wrap(p));
            axis.measured = std::max(axis.measured, std::fabs(u.x));
        }
        axis.pass = axis.measured < axis.bound;
        rep.items.push_back(axis);
        CheckItem len{"wuu_branch_lengths", false, 0.0, 0.1, ""};
        len.measured = std::max(std::fabs(seg.plus_branch.total_length() - 0.1),
                                std::fabs(seg.minus_branch.total_length() - 0.1));
        len.pass = len.measured <= step;
        rep.items.push_back(len);
    }
    return out;
}

// ---------------------------------------------------------------------------
// the double-surgery map and its five defining properties

inline BuiltMap build_example_map(double eps, double delta, SurgeryParams params = {}) {
    params.delta = delta;
    BuiltMap out{make_example_diffeo(eps, params), {}};
    const ComposedDiffeo& f = out.map;
    ConstructionReport& rep = out.report;
    rep.label = f.label;
    const SurgerySite& site = f.sites[0];
    const double lam = f.base.lambda, mu = f.base.mu;

    detail::append_profile_items(rep, site, eps, mu);

    // (1) dominated splitting via the entry conditions and cone invariance
    const double K = lam * lam;
    const auto cert = check_lemma2_conditions(f, K, params.eta, eps, 128);
    rep.items.push_back({"domination_entry_conditions", cert.pass,
                         cert.find("domination_ratio")->measured, params.eta,
                         "min |d|/|a| over the grid"});
    const auto cone = check_cone_invariance(f, delta, 128);
    rep.items.push_back({"cone_invariance", cone.pass,
                         std::min(cone.conditions[0].margin, cone.conditions[1].margin),
                         0.0, "minimal cone contraction margin"});

    // (2) both bundles stay delta-close to the linear eigendirections
    {
        const AngleReport ar = angle_report(f, 300, delta);
        rep.items.push_back({"angle_bounds", ar.pass,
                             std::max(ar.max_angle_E, ar.max_angle_F), delta,
                             "max angle to the eigen-axes over stratified samples"});
    }

    // (3) the map is the linear model outside the surgery ball
    rep.items.push_back(detail::locality_check(f, 10000, 7103ULL));

    // (4) source and sink inside the ball
    {
        CheckItem it{"source_and_sink_present", false, 0.0, 1e-9,
                     "census contains the source and the second-stage sink"};
        const auto census = find_fixed_points(f, 256);
        bool src = false, snk = false;
        double worst = 0.0;
        for (const auto& r : census) {
            if (torus_distance(r.location, site.center) < 1e-9 &&
                r.kind == FixedPointKind::source) {
                src = true;
                worst = std::max(worst, std::fabs(r.ev1 - params.source_mult));
                worst = std::max(worst, std::fabs(r.ev2 - mu));
            }
            if (torus_distance(r.location, site.sink_location()) < 1e-9 &&
                r.kind == FixedPointKind::sink) {
                snk = true;
                worst = std::max(worst, std::fabs(std::min(r.ev1, r.ev2) - params.sink_mult));
                worst = std::max(worst,
                                 std::fabs(std::max(r.ev1, r.ev2) - params.second_sink_mult));
            }
        }
        it.measured = worst;
        it.pass = src && snk && worst < it.bound;
        rep.items.push_back(it);
    }

    // (5) manifold components of length 1/10 and the norm smallness condition
    rep.items.push_back(
        detail::wuu_length_item(forward_view(f), site.center, "wuu_branch_lengths", 1e-4));
    {
        CheckItem it{"norm_condition", false, 0.0, 0.1, "2 eps ||Df|| < 1/10"};
        const SupNormEstimate sn = sup_norm_Df(f, 128);
        it.measured = 2.0 * eps * sn.value;
        it.pass = it.measured < it.bound;
        rep.items.push_back(it);
    }
    return out;
}

// ---------------------------------------------------------------------------
// the two-sided map

inline BuiltMap build_theorem_map(double eps, SurgeryParams params, TorusPoint p1,
                                  TorusPoint p2) {
    BuiltMap out{make_theorem_diffeo(eps, params, p1, p2), {}};
    const ComposedDiffeo& f = out.map;
    ConstructionReport& rep = out.report;
    rep.label = f.label;
    const double lam = f.base.lambda;

    {
        CheckItem it{"regions_disjoint", false, 0.0, 0.0,
                     "gap between the two modified regions"};
        it.measured = torus_distance(p1, p2) - site_region_radius(f.sites[0]) -
                      site_region_radius(f.sites[1]);
        it.pass = it.measured > 0.0;
        rep.items.push_back(it);
    }

    const auto cert = check_lemma2_conditions(f, lam * lam, params.eta, eps, 128);
    rep.items.push_back({"domination_entry_conditions", cert.pass,
                         cert.find("domination_ratio")->measured, params.eta,
                         "min |d|/|a| over the grid"});
    const auto cone = check_cone_invariance(f, params.delta, 128);
    rep.items.push_back({"cone_invariance", cone.pass,
                         std::min(cone.conditions[0].margin, cone.conditions[1].margin),
                         0.0, "minimal cone contraction margin"});

    rep.items.push_back(detail::locality_check(f, 10000, 7105ULL));

    rep.items.push_back(detail::wuu_length_item(forward_view(f), f.sites[0].center,
                                                "wuu_p1_branch_lengths", 1e-4));
    rep.items.push_back(detail::wuu_length_item(reversed_view(f), f.sites[1].center,
                                                "wss_p2_branch_lengths", 1e-4));
    return out;
}

}  // namespace torusdyn
