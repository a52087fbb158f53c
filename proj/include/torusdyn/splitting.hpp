#pragma once

// Certification of the dominated splitting and numerical estimation of the
// two invariant direction fields.
//
// The certificate verifies, on stratified grids, the entry conditions
//
//     min{|a|, |d|} > K,   |d| > eta |a|,   max{|b|, |c|} < eps
//
// of the Jacobian in the eigen-frame, and the strict invariance of the
// delta-cones around e_u (forward) and e_s (backward).  The direction
// fields are computed by power iteration on renormalized products of 2x2
// Jacobians: F by pushing a seed forward from deep in the backward orbit,
// E by pulling a seed back along the forward orbit.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "torusdyn/surgery.hpp"
#include "torusdyn/torus_core.hpp"

namespace torusdyn {

// A time direction on a composed map.  The reversed view swaps the roles of
// the two bundles: the dominated bundle of the reversed view is F of the
// underlying map.
struct FlowView {
    const ComposedDiffeo* f = nullptr;
    bool reversed = false;

    TorusPoint eval(TorusPoint x) const {
        return reversed ? f->evaluate_inverse(x) : f->evaluate(x);
    }
    TorusPoint eval_inverse(TorusPoint x) const {
        return reversed ? f->evaluate(x) : f->evaluate_inverse(x);
    }
    // axis the dominated (resp. dominating) bundle stays close to
    Direction dominated_axis() const {
        return reversed ? f->base.e_u : f->base.e_s;
    }
    Direction dominating_axis() const {
        return reversed ? f->base.e_s : f->base.e_u;
    }
};

inline FlowView forward_view(const ComposedDiffeo& f) { return {&f, false}; }
inline FlowView reversed_view(const ComposedDiffeo& f) { return {&f, true}; }

// ---------------------------------------------------------------------------
// stratified grid visitor: global grid plus box-normalized refinements

template <class Fn>
void for_each_grid_point(const ComposedDiffeo& f, int grid_n, Fn&& fn) {
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j)
            fn(TorusPoint{(i + 0.5) / grid_n, (j + 0.5) / grid_n});
    const int bn = std::max(64, grid_n);
    for (const RegionBox& box : f.refinement_boxes())
        for (int i = 0; i <= bn; ++i)
            for (int j = 0; j <= bn; ++j)
                fn(wrap(box.at(-1.0 + 2.0 * i / bn, -1.0 + 2.0 * j / bn)));
}

// ---------------------------------------------------------------------------
// certificates

struct ConditionCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;  // the extremal value found
    double bound = 0.0;
    double margin = 0.0;    // positive iff pass
    TorusPoint witness;
    JacobianAtPoint witness_jac;
};

struct DominationCertificate {
    double K = 0.0, eta = 0.0, eps_offdiag = 0.0, delta = 0.0;
    double grid_spacing = 0.0;
    bool pass = false;
    std::vector<ConditionCheck> conditions;

    const ConditionCheck* find(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return &c;
        return nullptr;
    }
};

inline DominationCertificate check_lemma2_conditions(const ComposedDiffeo& f, double K,
                                                     double eta, double eps,
                                                     int grid_n) {
    if (grid_n < 128)
        throw std::invalid_argument("check_lemma2_conditions: grid_n >= 128 required");
    DominationCertificate cert;
    cert.K = K;
    cert.eta = eta;
    cert.eps_offdiag = eps;
    cert.grid_spacing = 1.0 / grid_n;

    ConditionCheck floor_c{"entry_floor", false, 1e300, K, 0, {}, {}};
    ConditionCheck ratio_c{"domination_ratio", false, 1e300, eta, 0, {}, {}};
    ConditionCheck off_c{"offdiagonal", false, 0.0, eps, 0, {}, {}};

    for_each_grid_point(f, grid_n, [&](TorusPoint x) {
        const JacobianAtPoint J = f.jacobian(x);
        const double fl = std::min(std::fabs(J.a), std::fabs(J.d));
        if (fl < floor_c.measured) {
            floor_c.measured = fl;
            floor_c.witness = x;
            floor_c.witness_jac = J;
        }
        const double rt = std::fabs(J.d) / std::max(std::fabs(J.a), 1e-300);
        if (rt < ratio_c.measured) {
            ratio_c.measured = rt;
            ratio_c.witness = x;
            ratio_c.witness_jac = J;
        }
        const double off = std::max(std::fabs(J.b), std::fabs(J.c));
        if (off > off_c.measured) {
            off_c.measured = off;
            off_c.witness = x;
            off_c.witness_jac = J;
        }
    });

    floor_c.margin = floor_c.measured - K;
    floor_c.pass = floor_c.margin > 0.0;
    ratio_c.margin = ratio_c.measured - eta;
    ratio_c.pass = ratio_c.margin > 0.0;
    off_c.margin = eps - off_c.measured;
    off_c.pass = off_c.margin > 0.0;

    cert.conditions = {floor_c, ratio_c, off_c};
    cert.pass = floor_c.pass && ratio_c.pass && off_c.pass;
    return cert;
}

// angle of a tangent vector measured from the vertical axis of the
// eigen-frame, in (-pi/2, pi/2]
inline double angle_from_vertical(Vec2 v) {
    if (v.y < 0.0) v = {-v.x, -v.y};
    return std::atan2(v.x, v.y);
}
inline double angle_from_horizontal(Vec2 v) {
    if (v.x < 0.0) v = {-v.x, -v.y};
    return std::atan2(v.y, v.x);
}

inline DominationCertificate check_cone_invariance(const ComposedDiffeo& f,
                                                   double delta, int grid_n) {
    if (!(delta > 0.0 && delta < kPi / 4.0))
        throw std::invalid_argument("check_cone_invariance: delta in (0, pi/4)");
    DominationCertificate cert;
    cert.delta = delta;
    cert.grid_spacing = 1.0 / grid_n;

    ConditionCheck fw{"unstable_cone", false, 1e300, delta, 0, {}, {}};
    ConditionCheck bw{"stable_cone", false, 1e300, delta, 0, {}, {}};
    const double sd = std::sin(delta), cd = std::cos(delta);

    for_each_grid_point(f, grid_n, [&](TorusPoint x) {
        const JacobianAtPoint Jp = f.jacobian(x);
        const Mat2 J = Jp.mat();
        const Mat2 Ji = J.inverse();
        // image of the cone boundary around e_u under DF must tilt by < delta
        for (const double sgn : {-1.0, 1.0}) {
            const double ang =
                std::fabs(angle_from_vertical(J.apply({sgn * sd, cd})));
            const double margin = delta - ang;
            if (margin < fw.measured) {
                fw.measured = margin;
                fw.witness = x;
                fw.witness_jac = Jp;
            }
        }
        // preimage of the cone boundary around e_s must tilt by < delta
        for (const double sgn : {-1.0, 1.0}) {
            const double ang =
                std::fabs(angle_from_horizontal(Ji.apply({cd, sgn * sd})));
            const double margin = delta - ang;
            if (margin < bw.measured) {
                bw.measured = margin;
                bw.witness = x;
                bw.witness_jac = Jp;
            }
        }
    });

    fw.margin = fw.measured;
    fw.pass = fw.margin > 0.0;
    bw.margin = bw.measured;
    bw.pass = bw.margin > 0.0;
    cert.conditions = {fw, bw};
    cert.pass = fw.pass && bw.pass;
    return cert;
}

// ---------------------------------------------------------------------------
// bundle directions by power iteration

enum class Bundle { E, F };

struct BundleSample {
    TorusPoint point;
    Direction dir;
    int iterations_used = 0;
    double convergence_residual = 0.0;
    bool converged = false;
};

namespace detail {
inline Vec2 normalized(Vec2 v) {
    const double n = v.norm();
    return {v.x / n, v.y / n};
}

// view Jacobian in the eigen-frame at z; for reversed views the preimage
// under the view equals the next backward point, so callers pass it in to
// avoid recomputing the orbit
inline Mat2 view_jacobian(const FlowView& view, TorusPoint z, TorusPoint view_preimage) {
    if (!view.reversed) return view.f->jacobian(z).mat();
    return view.f->jacobian(view_preimage).mat().inverse();
}
}  // namespace detail

// F(x): direction of D(view)^n at view^{-n}(x) applied to a seed, deepened
// until the angular increment drops below tol.
inline BundleSample compute_F_direction(const FlowView& view, TorusPoint x, int n,
                                        double tol, Vec2 seed = {0.0, 1.0},
                                        bool allow_reseed = true) {
    if (n > 10000) throw std::invalid_argument("compute_F_direction: n too large");
    const Mat2 P = view.f->base.frame;

    BundleSample out;
    out.point = x;
    Mat2 prod{1.0, 0.0, 0.0, 1.0};
    Vec2 w_prev = detail::normalized(seed);
    TorusPoint z = x;
    for (int j = 1; j <= n; ++j) {
        const TorusPoint z_next = view.eval_inverse(z);
        prod = prod.mul(detail::view_jacobian(view, z_next, z));
        const double scale = prod.max_abs_entry();
        prod = {prod.a / scale, prod.b / scale, prod.c / scale, prod.d / scale};
        const Vec2 w = detail::normalized(prod.apply(seed));
        out.iterations_used = j;
        out.convergence_residual = angle_between(w, w_prev);
        w_prev = w;
        z = z_next;
        if (j >= 2 && out.convergence_residual < tol) {
            out.converged = true;
            break;
        }
    }
    // a seed exactly on the complementary bundle converges to the wrong
    // limit; detect by the angle to the expanding axis and re-seed once
    const Direction d = Direction::from_vector(P.apply(w_prev));
    if (allow_reseed && angle_between(d, view.dominating_axis()) > kPi / 4.0) {
        std::mt19937_64 rng(0x5eedULL);
        std::uniform_real_distribution<double> U(0.2, 0.9);
        return compute_F_direction(view, x, n, tol, {U(rng), U(rng)}, false);
    }
    out.dir = d;
    return out;
}

// E(x): direction of D(view)^{-n} at view^n(x) applied to a seed.
inline BundleSample compute_E_direction(const FlowView& view, TorusPoint x, int n,
                                        double tol, Vec2 seed = {1.0, 0.0},
                                        bool allow_reseed = true) {
    if (n > 10000) throw std::invalid_argument("compute_E_direction: n too large");
    const Mat2 P = view.f->base.frame;

    BundleSample out;
    out.point = x;
    Mat2 prod{1.0, 0.0, 0.0, 1.0};
    Vec2 w_prev = detail::normalized(seed);
    TorusPoint z = x;
    for (int j = 1; j <= n; ++j) {
        const TorusPoint z_next = view.eval(z);
        // D(view)(z)^{-1}; for reversed views this is the underlying map's
        // Jacobian at the image point
        const Mat2 Jinv = view.reversed ? view.f->jacobian(z_next).mat()
                                        : view.f->jacobian(z).mat().inverse();
        prod = prod.mul(Jinv);
        const double scale = prod.max_abs_entry();
        prod = {prod.a / scale, prod.b / scale, prod.c / scale, prod.d / scale};
        const Vec2 w = detail::normalized(prod.apply(seed));
        out.iterations_used = j;
        out.convergence_residual = angle_between(w, w_prev);
        w_prev = w;
        z = z_next;
        if (j >= 2 && out.convergence_residual < tol) {
            out.converged = true;
            break;
        }
    }
    const Direction d = Direction::from_vector(P.apply(w_prev));
    if (allow_reseed && angle_between(d, view.dominated_axis()) > kPi / 4.0) {
        std::mt19937_64 rng(0x5eedULL);
        std::uniform_real_distribution<double> U(0.2, 0.9);
        return compute_E_direction(view, x, n, tol, {U(rng), U(rng)}, false);
    }
    out.dir = d;
    return out;
}

inline BundleSample compute_bundle(const FlowView& view, TorusPoint x, Bundle which,
                                   int n, double tol) {
    return which == Bundle::F ? compute_F_direction(view, x, n, tol)
                              : compute_E_direction(view, x, n, tol);
}

// ---------------------------------------------------------------------------
// stratified sample points (seeded, deterministic)

inline std::vector<TorusPoint> stratified_samples(const ComposedDiffeo& f, int count,
                                                  uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<TorusPoint> pts;
    pts.reserve(size_t(count));
    const auto boxes = f.refinement_boxes();
    const int per_box = boxes.empty() ? 0 : std::max(1, count / (4 * int(boxes.size())));
    for (const auto& box : boxes)
        for (int i = 0; i < per_box && int(pts.size()) < count; ++i)
            pts.push_back(wrap(box.at(2.0 * U(rng) - 1.0, 2.0 * U(rng) - 1.0)));
    while (int(pts.size()) < count) pts.push_back({U(rng), U(rng)});
    return pts;
}

// ---------------------------------------------------------------------------
// angle report

struct AngleReport {
    double max_angle_E = 0.0;  // max over samples of angle(E, e_s)
    double max_angle_F = 0.0;  // max over samples of angle(F, e_u)
    double delta = 0.0;
    int samples = 0;
    bool pass = false;
    TorusPoint witness_E, witness_F;
};

inline AngleReport angle_report(const ComposedDiffeo& f, int samples, double delta,
                                uint64_t seed = 20240501ULL, int n = 200,
                                double tol = 1e-10) {
    AngleReport rep;
    rep.delta = delta;
    rep.samples = samples;
    const FlowView view = forward_view(f);
    for (const TorusPoint& x : stratified_samples(f, samples, seed)) {
        const BundleSample E = compute_E_direction(view, x, n, tol);
        const BundleSample F = compute_F_direction(view, x, n, tol);
        const double aE = angle_between(E.dir, f.base.e_s);
        const double aF = angle_between(F.dir, f.base.e_u);
        if (aE > rep.max_angle_E) { rep.max_angle_E = aE; rep.witness_E = x; }
        if (aF > rep.max_angle_F) { rep.max_angle_F = aF; rep.witness_F = x; }
    }
    rep.pass = rep.max_angle_E < delta && rep.max_angle_F < delta;
    return rep;
}

}  // namespace torusdyn
