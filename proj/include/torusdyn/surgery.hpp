#pragma once

// Local surgeries on the linear torus automorphism and their composition
// into a full diffeomorphism with exact evaluation, Jacobian and inverse.
//
// A surgery site sits at a fixed point of the linear model.  In the site's
// eigen-frame chart the map is
//
//     (u1, u2) -> (lambda u1 + alpha(u1) beta(u2),  mu u2)
//
// which turns the saddle at the origin into a source plus two 1-D sinks on
// the u1-axis.  A second stage, supported where the first stage is exactly
// affine, mirrors the formula with the coordinates swapped,
//
//     (v1, v2) -> (a_q v1,  mu v2 + alpha2(v2) beta2(v1)),
//
// and turns the flip point q = (s, 0) into a genuine sink.  Inverse-oriented
// sites carry the same construction built for the inverse of the linear
// model; the forward map there is obtained by inverting the chart formula,
// which stays a pair of monotone 1-D solves thanks to the triangular
// structure.

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusdyn/bump_profiles.hpp"
#include "torusdyn/torus_core.hpp"

namespace torusdyn {

// ---------------------------------------------------------------------------
// parameters

struct SurgeryParams {
    double source_mult = 1.5;        // 1-D map slope at the surgered fixed point
    double sink_mult = 0.5;          // 1-D map slope at the flip points
    double second_sink_mult = 0.85;  // transverse map slope at q after stage two
    double second_flip_mult = 1.15;  // transverse map slope at q's flip pair
    double beta_fill = 0.9;          // I2 half-length as a fraction of eps
    double beta_plateau_frac = 0.125;
    double offdiag_budget = 0.1;     // |c| <= budget * eps
    double eta = 1.6;                // domination ratio target
    double delta = 9e-4;             // angle bound / cone half-angle
};

inline double demo_eps() { return 5e-3; }
inline double strict_eps() { return 9e-4; }

// ---------------------------------------------------------------------------
// 1-D monotone solve (safeguarded Newton with bisection fallback)

inline double solve_monotone(const std::function<double(double)>& g,
                             const std::function<double(double)>& dg, double lo,
                             double hi, double target, double tol) {
    if (lo > hi) std::swap(lo, hi);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = g(x) - target;
        if (std::fabs(f) <= tol) return x;
        if (f > 0.0) hi = x; else lo = x;
        const double d = dg(x);
        double nx = d > 0.0 ? x - f / d : x;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (nx == x) return x;  // interval exhausted at rounding resolution
        x = nx;
    }
    throw std::runtime_error("solve_monotone: no convergence after 200 iterations");
}

// ---------------------------------------------------------------------------
// charts

enum class ChartKind { first_da, second_da };
enum class Orientation { forward, inverse };

// One DA stage viewed in its own chart coordinates.
struct DaChart {
    TorusPoint center;        // the surgered fixed point
    Mat2 frame;               // chart axes as world columns
    ChartKind kind = ChartKind::first_da;
    Orientation orientation = Orientation::forward;
    OddRamp alpha;
    PlateauBump beta;
    double eps = 0.0;
    double contract = 0.0;    // first-coordinate linear multiplier
    double expand = 0.0;      // second-coordinate linear multiplier
    Vec2 support_half;        // support box half-widths in chart coordinates
    Vec2 inner_center_offset; // second-stage center relative to the site point
};

inline void require_chart_radius(Vec2 u) {
    if (std::max(std::fabs(u.x), std::fabs(u.y)) >= kChartRadius)
        throw std::invalid_argument("da_chart: point outside chart validity radius");
}

inline Vec2 da_chart_eval(const DaChart& c, Vec2 u) {
    require_chart_radius(u);
    if (c.kind == ChartKind::first_da)
        return {c.contract * u.x + c.alpha.value(u.x) * c.beta.value(u.y),
                c.expand * u.y};
    return {c.contract * u.x,
            c.expand * u.y + c.alpha.value(u.y) * c.beta.value(u.x)};
}

inline Mat2 da_chart_jacobian_mat(const DaChart& c, Vec2 u) {
    require_chart_radius(u);
    if (c.kind == ChartKind::first_da)
        return {c.alpha.derivative(u.x) * c.beta.value(u.y) + c.contract,
                c.alpha.value(u.x) * c.beta.derivative(u.y), 0.0, c.expand};
    return {c.contract, 0.0, c.alpha.value(u.y) * c.beta.derivative(u.x),
            c.alpha.derivative(u.y) * c.beta.value(u.x) + c.expand};
}

inline Vec2 da_chart_invert(const DaChart& c, Vec2 w) {
    const double tol = 1e-14 * std::max(1.0, std::max(std::fabs(w.x), std::fabs(w.y)));
    if (c.kind == ChartKind::first_da) {
        const double u2 = w.y / c.expand;
        const double B = c.beta.value(u2);
        const double M = c.alpha.max_abs * std::max(B, 0.0) + tol;
        const double u1 = solve_monotone(
            [&](double t) { return c.contract * t + c.alpha.value(t) * B; },
            [&](double t) { return c.contract + c.alpha.derivative(t) * B; },
            (w.x - M) / c.contract, (w.x + M) / c.contract, w.x, tol);
        return {u1, u2};
    }
    const double v1 = w.x / c.contract;
    const double B = c.beta.value(v1);
    const double M = c.alpha.max_abs * std::max(B, 0.0) + tol;
    const double v2 = solve_monotone(
        [&](double t) { return c.expand * t + c.alpha.value(t) * B; },
        [&](double t) { return c.expand + c.alpha.derivative(t) * B; },
        (w.y - M) / c.expand, (w.y + M) / c.expand, w.y, tol);
    return {v1, v2};
}

// ---------------------------------------------------------------------------
// surgery site: first stage plus optional nested second stage

struct SurgerySite {
    TorusPoint center;  // the fixed point of the linear model being surgered
    Mat2 frame;         // [contracted | expanded] axes for this site's chart
    Orientation orient = Orientation::forward;
    double eps = 0.0;

    double lam = 0.0, mu = 0.0;  // linear diagonal in the site frame

    OddRamp alpha1;
    PlateauBump beta1;
    double h1 = 0.0, h2 = 0.0;  // support box half-widths

    bool has_second = false;
    OddRamp alpha2;
    PlateauBump beta2;
    double s_flip = 0.0;  // q = (s_flip, 0) in chart coordinates
    double a_q = 0.0;     // first-coordinate multiplier on the affine zone
    double w_U = 0.0;     // second-stage horizontal half-width
    double h2p = 0.0;     // second-stage vertical half-width

    // dispatch regions (chart coordinates, boxes centered at the origin)
    double img_r1 = 0.0, img_r2 = 0.0;  // bounding box of the image of the support

    bool in_support(Vec2 u) const {
        return std::fabs(u.x) <= h1 && std::fabs(u.y) <= h2;
    }
    bool in_image_bbox(Vec2 u) const {
        return std::fabs(u.x) <= img_r1 && std::fabs(u.y) <= img_r2;
    }
    bool in_second_box(Vec2 u) const {
        return has_second && std::fabs(u.x - s_flip) <= w_U && std::fabs(u.y) <= h2p;
    }

    Vec2 chart_of(TorusPoint x) const {
        return frame.transpose().apply(torus_displacement(center, x));
    }
    TorusPoint point_of(Vec2 u) const {
        const Vec2 w = frame.apply(u);
        return wrap({center.x1 + w.x, center.x2 + w.y});
    }
    TorusPoint sink_location() const { return point_of({s_flip, 0.0}); }
    TorusPoint saddle_location() const { return point_of({-s_flip, 0.0}); }

    // chart-coordinate map of the full site (both stages)
    Vec2 local_forward(Vec2 u) const {
        if (in_second_box(u)) {
            const double v1 = u.x - s_flip;
            return {lam * u.x + alpha1.value(u.x),
                    mu * u.y + alpha2.value(u.y) * beta2.value(v1)};
        }
        return {lam * u.x + alpha1.value(u.x) * beta1.value(u.y), mu * u.y};
    }

    Mat2 local_jacobian(Vec2 u) const {
        if (in_second_box(u)) {
            const double v1 = u.x - s_flip;
            return {lam + alpha1.slope_at_flip, 0.0,
                    alpha2.value(u.y) * beta2.derivative(v1),
                    mu + alpha2.derivative(u.y) * beta2.value(v1)};
        }
        return {alpha1.derivative(u.x) * beta1.value(u.y) + lam,
                alpha1.value(u.x) * beta1.derivative(u.y), 0.0, mu};
    }

    // solve local_forward(v) = w
    Vec2 local_solve(Vec2 w) const {
        const double tol =
            1e-14 * std::max(1.0, std::max(std::fabs(w.x), std::fabs(w.y)));
        const double v2a = w.y / mu;
        const double B = beta1.value(v2a);
        const double M = alpha1.max_abs + tol;
        const double v1 = solve_monotone(
            [&](double t) { return lam * t + alpha1.value(t) * B; },
            [&](double t) { return lam + alpha1.derivative(t) * B; },
            (w.x - M) / lam, (w.x + M) / lam, w.x, tol);
        if (has_second && std::fabs(v1 - s_flip) <= w_U &&
            std::fabs(v2a) <= beta1.plateau_half_width) {
            const double B2 = beta2.value(v1 - s_flip);
            const double M2 = alpha2.max_abs + tol;
            const double v2 = solve_monotone(
                [&](double t) { return mu * t + alpha2.value(t) * B2; },
                [&](double t) { return mu + alpha2.derivative(t) * B2; },
                (w.y - M2) / mu, (w.y + M2) / mu, w.y, tol);
            return {v1, v2};
        }
        return {v1, v2a};
    }

    // spec-shaped chart views
    DaChart first_chart() const {
        DaChart c;
        c.center = center;
        c.frame = frame;
        c.kind = ChartKind::first_da;
        c.orientation = orient;
        c.alpha = alpha1;
        c.beta = beta1;
        c.eps = eps;
        c.contract = lam;
        c.expand = mu;
        c.support_half = {h1, h2};
        c.inner_center_offset = {0.0, 0.0};
        return c;
    }
    DaChart second_chart() const {
        if (!has_second) throw std::logic_error("site has no second stage");
        DaChart c;
        c.center = sink_location();
        c.frame = frame;
        c.kind = ChartKind::second_da;
        c.orientation = orient;
        c.alpha = alpha2;
        c.beta = beta2;
        c.eps = eps;
        c.contract = a_q;
        c.expand = mu;
        c.support_half = {w_U, h2p};
        c.inner_center_offset = {s_flip, 0.0};
        return c;
    }
};

// ---------------------------------------------------------------------------
// perturbation chart for robustness probes: a compactly supported shear

struct ShearChart {
    TorusPoint center;
    Mat2 frame;
    PlateauBump b1, b2;
    double m = 0.0;  // displacement amplitude; C1 size is m * peak slope
    double r1 = 0.0, r2 = 0.0;

    Vec2 chart_of(TorusPoint x) const {
        return frame.transpose().apply(torus_displacement(center, x));
    }
    bool in_region(Vec2 u) const {
        return std::fabs(u.x) <= r1 && std::fabs(u.y) <= r2;
    }
    TorusPoint apply(TorusPoint x) const {
        const Vec2 u = chart_of(x);
        if (!in_region(u)) return x;
        const double disp = m * b1.value(u.x) * b2.value(u.y);
        if (disp == 0.0) return x;  // bitwise identity off the bump
        const Vec2 w = frame.apply({u.x + disp, u.y});
        return wrap({center.x1 + w.x, center.x2 + w.y});
    }
    TorusPoint apply_inverse(TorusPoint x) const {
        if (m == 0.0) return x;
        const Vec2 u = chart_of(x);
        if (std::fabs(u.x) > r1 + std::fabs(m) || std::fabs(u.y) > r2) return x;
        const double tol = 1e-14;
        const double t = solve_monotone(
            [&](double s) { return s + m * b1.value(s) * b2.value(u.y); },
            [&](double s) { return 1.0 + m * b1.derivative(s) * b2.value(u.y); },
            u.x - std::fabs(m) - tol, u.x + std::fabs(m) + tol, u.x, tol);
        if (t == u.x) return x;
        const Vec2 w = frame.apply({t, u.y});
        return wrap({center.x1 + w.x, center.x2 + w.y});
    }
    Mat2 local_jacobian(Vec2 u) const {
        return {1.0 + m * b1.derivative(u.x) * b2.value(u.y),
                m * b1.value(u.x) * b2.derivative(u.y), 0.0, 1.0};
    }
};

// ---------------------------------------------------------------------------
// the composed diffeomorphism

struct JacobianAtPoint {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // entries in the global eigen-frame
    Mat2 mat() const { return {a, b, c, d}; }
    double det() const { return a * d - b * c; }
};

struct ComposedDiffeo {
    ToralAutomorphism base;
    std::vector<SurgerySite> sites;
    std::vector<ShearChart> shears;
    std::string label;
    std::string mode = "demo";
    double eps = 0.0;
    double delta = 9e-4;

    // --- evaluation ------------------------------------------------------

    TorusPoint apply_linear(TorusPoint x) const {
        const Vec2 v = base.apply(x.vec());
        return wrap({v.x, v.y});
    }
    TorusPoint apply_linear_inverse(TorusPoint x) const {
        const Vec2 v = base.apply_inverse(x.vec());
        return wrap({v.x, v.y});
    }

    TorusPoint evaluate(TorusPoint x) const {
        TorusPoint y = main_forward(x);
        for (const auto& s : shears) y = s.apply(y);
        return y;
    }

    TorusPoint evaluate_inverse(TorusPoint x) const {
        TorusPoint y = x;
        for (auto it = shears.rbegin(); it != shears.rend(); ++it)
            y = it->apply_inverse(y);
        return main_inverse(y);
    }

    Mat2 jacobian_world(TorusPoint x) const {
        Mat2 J = main_jacobian_world(x);
        TorusPoint y = main_forward(x);
        for (const auto& s : shears) {
            const Vec2 u = s.chart_of(y);
            if (s.in_region(u))
                J = s.frame.mul(s.local_jacobian(u)).mul(s.frame.transpose()).mul(J);
            y = s.apply(y);
        }
        return J;
    }

    // entries in the global eigen-frame {e_s, e_u}
    JacobianAtPoint jacobian(TorusPoint x) const {
        if (shears.empty()) {
            Mat2 J;
            bool in_site = false;
            for (const auto& s : sites) {
                const Vec2 u = s.chart_of(x);
                if (site_handles_forward(s, u)) {
                    J = site_jacobian_eigen(s, u);
                    in_site = true;
                    break;
                }
            }
            if (!in_site) J = {base.lambda, 0.0, 0.0, base.mu};
            return {J.a, J.b, J.c, J.d};
        }
        const Mat2 P = base.frame;
        const Mat2 J = P.transpose().mul(jacobian_world(x)).mul(P);
        return {J.a, J.b, J.c, J.d};
    }

    // --- regions ---------------------------------------------------------

    std::vector<RegionBox> modified_regions() const {
        std::vector<RegionBox> out;
        for (const auto& s : sites) {
            RegionBox b;
            b.center = s.center;
            b.frame = s.frame;
            b.offset = {0.0, 0.0};
            if (s.orient == Orientation::forward) {
                b.half1 = s.h1;
                b.half2 = s.h2;
            } else {
                b.half1 = s.img_r1;
                b.half2 = s.img_r2;
            }
            out.push_back(b);
        }
        for (const auto& s : shears) {
            RegionBox b;
            b.center = s.center;
            b.frame = s.frame;
            b.offset = {0.0, 0.0};
            b.half1 = s.r1 + std::fabs(s.m);
            b.half2 = s.r2;
            out.push_back(b);
        }
        return out;
    }

    bool in_modified_region(TorusPoint x) const {
        for (const auto& b : modified_regions()) {
            const Vec2 u = b.frame.transpose().apply(torus_displacement(b.center, x));
            if (std::fabs(u.x - b.offset.x) <= b.half1 &&
                std::fabs(u.y - b.offset.y) <= b.half2)
                return true;
        }
        return false;
    }

    // boxes that deserve refined grids: supports, nested second stages, and
    // image regions of inverse-oriented sites
    std::vector<RegionBox> refinement_boxes() const {
        std::vector<RegionBox> out;
        for (const auto& s : sites) {
            out.push_back({s.center, s.frame, {0.0, 0.0}, s.h1, s.h2});
            if (s.has_second)
                out.push_back({s.center, s.frame, {s.s_flip, 0.0}, s.w_U, s.h2p});
            if (s.orient == Orientation::inverse) {
                out.push_back({s.center, s.frame, {0.0, 0.0}, s.img_r1, s.img_r2});
                if (s.has_second)
                    out.push_back({s.center, s.frame, {s.s_flip, 0.0},
                                   s.a_q * s.w_U * 1.05,
                                   s.mu * s.h2p + s.alpha2.max_abs});
            }
        }
        for (const auto& s : shears)
            out.push_back({s.center, s.frame, {0.0, 0.0}, s.r1 + std::fabs(s.m), s.r2});
        return out;
    }

  private:
    static bool site_handles_forward(const SurgerySite& s, Vec2 u) {
        return s.orient == Orientation::forward ? s.in_support(u) : s.in_image_bbox(u);
    }
    static bool site_handles_inverse(const SurgerySite& s, Vec2 u) {
        return s.orient == Orientation::forward ? s.in_image_bbox(u) : s.in_support(u);
    }

    TorusPoint main_forward(TorusPoint x) const {
        for (const auto& s : sites) {
            const Vec2 u = s.chart_of(x);
            if (!site_handles_forward(s, u)) continue;
            const Vec2 w = s.orient == Orientation::forward ? s.local_forward(u)
                                                            : s.local_solve(u);
            return s.point_of(w);
        }
        return apply_linear(x);
    }

    TorusPoint main_inverse(TorusPoint x) const {
        for (const auto& s : sites) {
            const Vec2 u = s.chart_of(x);
            if (!site_handles_inverse(s, u)) continue;
            const Vec2 w = s.orient == Orientation::forward ? s.local_solve(u)
                                                            : s.local_forward(u);
            return s.point_of(w);
        }
        return apply_linear_inverse(x);
    }

    Mat2 site_jacobian_local(const SurgerySite& s, Vec2 u) const {
        if (s.orient == Orientation::forward) return s.local_jacobian(u);
        const Vec2 v = s.local_solve(u);
        return s.local_jacobian(v).inverse();
    }

    // conjugate the site-local Jacobian into the global eigen-frame; the two
    // frames differ at most by the axis swap, handled entry-exactly
    Mat2 site_jacobian_eigen(const SurgerySite& s, Vec2 u) const {
        const Mat2 J = site_jacobian_local(s, u);
        if (s.frame.a == base.frame.a && s.frame.b == base.frame.b &&
            s.frame.c == base.frame.c && s.frame.d == base.frame.d)
            return J;
        return {J.d, J.c, J.b, J.a};  // swapped axes
    }

    Mat2 main_jacobian_world(TorusPoint x) const {
        for (const auto& s : sites) {
            const Vec2 u = s.chart_of(x);
            if (!site_handles_forward(s, u)) continue;
            return s.frame.mul(site_jacobian_local(s, u)).mul(s.frame.transpose());
        }
        return {double(base.m[0][0]), double(base.m[0][1]), double(base.m[1][0]),
                double(base.m[1][1])};
    }
};

// ---------------------------------------------------------------------------
// site construction

inline Mat2 swapped_columns(const Mat2& m) { return {m.b, m.a, m.d, m.c}; }

inline SurgerySite make_site(const ToralAutomorphism& A, TorusPoint center,
                             Orientation orient, double eps,
                             const SurgeryParams& p, bool with_second) {
    SurgerySite s;
    s.center = center;
    s.orient = orient;
    s.eps = eps;
    s.lam = A.lambda;
    s.mu = A.mu;
    s.frame = orient == Orientation::forward ? A.frame : swapped_columns(A.frame);

    // the image of an inverse-oriented support must stay inside the eps-ball
    s.h2 = orient == Orientation::forward ? p.beta_fill * eps
                                          : p.beta_fill * eps / A.mu;
    const double l2 = 2.0 * s.h2;
    const double l1 = (eps / (3.0 * A.mu)) * l2;
    s.h1 = 0.5 * l1;
    if (std::hypot(s.h1, s.h2) >= eps)
        throw std::invalid_argument("make_site: support box does not fit the eps-ball");

    const double sq_mu = std::sqrt(A.mu);
    s.alpha1 = build_alpha(s.h1, A.lambda, A.lambda * A.lambda - A.lambda,
                           sq_mu - A.lambda, p.source_mult, p.sink_mult);
    s.beta1 = build_beta(s.h2, p.beta_plateau_frac * s.h2);
    s.s_flip = s.alpha1.flip;
    s.a_q = A.lambda + s.alpha1.slope_at_flip;

    s.has_second = with_second;
    if (with_second) {
        s.w_U = s.alpha1.plateau_half;
        s.beta2 = build_beta(s.w_U, p.beta_plateau_frac * s.w_U);
        // |c| = |alpha2 beta2'| budget: peak |alpha2| scales linearly with the
        // half-support, so size it from a unit ramp
        const OddRamp unit = build_alpha(1.0, A.mu, p.eta * s.a_q - A.mu, 1.0,
                                         p.second_sink_mult, p.second_flip_mult);
        s.h2p = p.offdiag_budget * eps * s.w_U / (unit.max_abs * s.beta2.peak_slope * s.w_U);
        if (s.h2p > 0.9 * s.beta1.plateau_half_width)
            s.h2p = 0.9 * s.beta1.plateau_half_width;
        s.alpha2 = build_alpha(s.h2p, A.mu, p.eta * s.a_q - A.mu, 1.0,
                               p.second_sink_mult, p.second_flip_mult);
    }

    const double a2max = with_second ? s.alpha2.max_abs : 0.0;
    s.img_r1 = (s.lam * s.h1 + s.alpha1.max_abs) * (1.0 + 1e-9);
    s.img_r2 = (s.mu * s.h2 + a2max) * (1.0 + 1e-9);
    if (orient == Orientation::inverse && std::hypot(s.img_r1, s.img_r2) >= eps)
        throw std::invalid_argument(
            "make_site: image of an inverse-oriented support leaves the eps-ball");
    return s;
}

// overlap test between the modified regions of two sites (conservative:
// bounding circles in the world metric)
inline double site_region_radius(const SurgerySite& s) {
    return s.orient == Orientation::forward ? std::hypot(s.h1, s.h2)
                                            : std::hypot(s.img_r1, s.img_r2);
}

inline void check_disjoint_regions(const std::vector<SurgerySite>& sites) {
    for (size_t i = 0; i < sites.size(); ++i)
        for (size_t j = i + 1; j < sites.size(); ++j) {
            const double d = torus_distance(sites[i].center, sites[j].center);
            if (d <= site_region_radius(sites[i]) + site_region_radius(sites[j]))
                throw std::invalid_argument(
                    "overlapping-region configuration: surgery sites collide");
        }
}

inline void quick_bijection_check(const ComposedDiffeo& f) {
    // round-trip sanity on a few points, dense near the surgeries
    std::vector<TorusPoint> pts;
    for (int i = 0; i < 64; ++i)
        pts.push_back({(i * 0.137 + 0.05) - std::floor(i * 0.137 + 0.05),
                       (i * 0.233 + 0.02) - std::floor(i * 0.233 + 0.02)});
    for (const auto& s : f.sites)
        for (int i = -3; i <= 3; ++i)
            for (int j = -3; j <= 3; ++j)
                pts.push_back(s.point_of({s.h1 * i / 3.2, s.h2 * j / 3.2}));
    for (const auto& x : pts) {
        const TorusPoint y = f.evaluate_inverse(f.evaluate(x));
        if (torus_distance(x, y) > 1e-12)
            throw std::runtime_error("composed map failed the bijection round trip");
    }
}

// raw constructors; property verification lives in construct.hpp

inline ComposedDiffeo make_linear_diffeo() {
    ComposedDiffeo f;
    f.base = linear_model();
    f.label = "linear";
    f.mode = "none";
    return f;
}

inline ComposedDiffeo make_single_da_diffeo(double eps, const SurgeryParams& p,
                                            TorusPoint center = {0.0, 0.0}) {
    ComposedDiffeo f;
    f.base = linear_model();
    f.eps = eps;
    f.delta = p.delta;
    f.label = "single-da";
    f.sites.push_back(make_site(f.base, center, Orientation::forward, eps, p, false));
    quick_bijection_check(f);
    return f;
}

inline ComposedDiffeo make_example_diffeo(double eps, const SurgeryParams& p,
                                          TorusPoint center = {0.0, 0.0}) {
    ComposedDiffeo f;
    f.base = linear_model();
    f.eps = eps;
    f.delta = p.delta;
    f.label = "example";
    f.sites.push_back(make_site(f.base, center, Orientation::forward, eps, p, true));
    quick_bijection_check(f);
    return f;
}

inline ComposedDiffeo make_theorem_diffeo(double eps, const SurgeryParams& p,
                                          TorusPoint p1, TorusPoint p2) {
    if (torus_distance(p1, p2) == 0.0)
        throw std::invalid_argument("make_theorem_diffeo: sites must be distinct");
    ComposedDiffeo f;
    f.base = linear_model();
    f.eps = eps;
    f.delta = p.delta;
    f.label = "theorem";
    f.sites.push_back(make_site(f.base, p1, Orientation::forward, eps, p, true));
    f.sites.push_back(make_site(f.base, p2, Orientation::inverse, eps, p, true));
    check_disjoint_regions(f.sites);
    quick_bijection_check(f);
    return f;
}

}  // namespace torusdyn
