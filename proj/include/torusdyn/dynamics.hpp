#pragma once

// Fixed points and their classification, basin membership, local strong
// invariant manifolds, and integral curves of the estimated direction
// fields.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "torusdyn/splitting.hpp"
#include "torusdyn/surgery.hpp"
#include "torusdyn/torus_core.hpp"

namespace torusdyn {

// ---------------------------------------------------------------------------
// fixed points

enum class FixedPointKind { source, sink, saddle };

struct FixedPointRecord {
    TorusPoint location;
    JacobianAtPoint jacobian;
    double ev1 = 0.0, ev2 = 0.0;  // real parts; moduli equal |ev| when real
    double mod1 = 0.0, mod2 = 0.0;
    bool complex_pair = false;
    bool degenerate = false;  // Df - I singular at the root
    FixedPointKind kind = FixedPointKind::saddle;
};

inline void classify_record(FixedPointRecord& r) {
    const Mat2 J = r.jacobian.mat();
    const double tr = J.a + J.d, dt = J.det();
    const double disc = tr * tr - 4.0 * dt;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        r.ev1 = 0.5 * (tr - sq);
        r.ev2 = 0.5 * (tr + sq);
        r.mod1 = std::fabs(r.ev1);
        r.mod2 = std::fabs(r.ev2);
        r.complex_pair = false;
    } else {
        r.ev1 = r.ev2 = 0.5 * tr;
        r.mod1 = r.mod2 = std::sqrt(std::fabs(dt));
        r.complex_pair = true;
    }
    const double lo = std::min(r.mod1, r.mod2), hi = std::max(r.mod1, r.mod2);
    if (lo > 1.0)
        r.kind = FixedPointKind::source;
    else if (hi < 1.0)
        r.kind = FixedPointKind::sink;
    else
        r.kind = FixedPointKind::saddle;
    r.degenerate = std::fabs((J.a - 1.0) * (J.d - 1.0) - J.b * J.c) < 1e-10;
}

// Newton on the lifted displacement f(x) - x from one seed.
inline std::optional<TorusPoint> newton_fixed_point(const ComposedDiffeo& f,
                                                    TorusPoint seed) {
    TorusPoint z = seed;
    double res = torus_displacement(z, f.evaluate(z)).norm();
    for (int it = 0; it < 50; ++it) {
        if (res < 1e-13) return z;
        const Mat2 J = f.jacobian_world(z);
        const Mat2 JmI{J.a - 1.0, J.b, J.c, J.d - 1.0};
        if (std::fabs(JmI.det()) < 1e-14) return std::nullopt;
        const Vec2 r = torus_displacement(z, f.evaluate(z));
        Vec2 step = JmI.inverse().apply({-r.x, -r.y});
        if (step.norm() > 1.2) return std::nullopt;  // hopeless seed
        // damp if the residual refuses to decrease
        for (int k = 0; k < 7; ++k) {
            const TorusPoint zn = wrap({z.x1 + step.x, z.x2 + step.y});
            const double rn = torus_displacement(zn, f.evaluate(zn)).norm();
            if (rn < res || rn < 1e-13) {
                z = zn;
                res = rn;
                break;
            }
            step = step * 0.5;
            if (k == 6) return std::nullopt;
        }
    }
    return res < 1e-13 ? std::optional<TorusPoint>(z) : std::nullopt;
}

// Census over a global seed grid plus box-normalized seeds in every surgery
// support.  Roots closer than the merge radius collapse to the most
// attracting member (sub-radius clusters do occur: the second surgery's
// vertical flip pair sits within ~1e-12 of the sink).
inline std::vector<FixedPointRecord> find_fixed_points(const ComposedDiffeo& f,
                                                       int seed_grid_n) {
    if (seed_grid_n < 256)
        throw std::invalid_argument("find_fixed_points: seed_grid_n >= 256 required");
    std::vector<TorusPoint> seeds;
    for (int i = 0; i < seed_grid_n; ++i)
        for (int j = 0; j < seed_grid_n; ++j)
            seeds.push_back({(i + 0.5) / seed_grid_n, (j + 0.5) / seed_grid_n});
    for (const RegionBox& box : f.refinement_boxes()) {
        const int bn = 20;
        for (int i = 0; i <= bn; ++i)
            for (int j = 0; j <= bn; ++j)
                seeds.push_back(
                    wrap(box.at(-1.0 + 2.0 * i / bn, -1.0 + 2.0 * j / bn)));
    }

    std::vector<FixedPointRecord> records;
    const double merge_radius = 1e-8;
    for (const TorusPoint& seed : seeds) {
        const auto root = newton_fixed_point(f, seed);
        if (!root) continue;
        const TorusPoint z = *root;
        if (torus_displacement(z, f.evaluate(z)).norm() > 1e-11) continue;
        FixedPointRecord rec;
        rec.location = z;
        rec.jacobian = f.jacobian(z);
        classify_record(rec);

        bool merged = false;
        for (auto& other : records) {
            if (torus_distance(other.location, z) <= merge_radius) {
                // keep the most attracting representative, then lexicographic
                const double mo = std::max(other.mod1, other.mod2);
                const double mn = std::max(rec.mod1, rec.mod2);
                if (mn < mo - 1e-12 ||
                    (std::fabs(mn - mo) <= 1e-12 &&
                     (z.x1 < other.location.x1 ||
                      (z.x1 == other.location.x1 && z.x2 < other.location.x2))))
                    other = rec;
                merged = true;
                break;
            }
        }
        if (!merged) records.push_back(rec);
    }
    std::sort(records.begin(), records.end(),
              [](const FixedPointRecord& a, const FixedPointRecord& b) {
                  if (a.location.x1 != b.location.x1) return a.location.x1 < b.location.x1;
                  return a.location.x2 < b.location.x2;
              });
    return records;
}

// ---------------------------------------------------------------------------
// basin membership

struct BasinResult {
    bool in_basin = false;
    int hitting_time = -1;
    bool undetermined = false;
};

// Capture region: the box around the sink where both profile derivatives sit
// on their constant plateaus, so D(view) is exactly the diagonal contraction
// and the box is forward invariant.
struct CaptureBox {
    const SurgerySite* site = nullptr;
    double r1 = 0.0, r2 = 0.0;

    bool contains_chart(Vec2 u) const {
        return std::fabs(u.x - site->s_flip) <= r1 && std::fabs(u.y) <= r2;
    }
    bool contains(TorusPoint x) const { return contains_chart(site->chart_of(x)); }
};

inline CaptureBox capture_box_of_sink(const ComposedDiffeo& f, TorusPoint q) {
    for (const auto& s : f.sites) {
        if (!s.has_second) continue;
        if (torus_distance(s.sink_location(), q) < 1e-9) {
            CaptureBox cb;
            cb.site = &s;
            cb.r1 = 0.999 * s.beta2.plateau_half_width;
            cb.r2 = 0.999 * s.alpha2.zero_plateau_half;
            return cb;
        }
    }
    throw std::invalid_argument("capture_box_of_sink: q is not a surgered sink");
}

// Basin membership from exact chart coordinates of the sink's site.  The
// orbit is iterated in the chart as long as it stays there: within the chart
// the local formula is the map itself, and it preserves the invariant axis
// bitwise.  This matters because the basin is thinner than the wrap-rounding
// noise of global coordinates (the transverse capture scale is O(eps^3)),
// so membership of an exactly-representable chart point must be decided in
// the chart.
inline BasinResult in_basin_of_sink_chart(const FlowView& view, const SurgerySite& site,
                                          Vec2 u, TorusPoint q, int max_iter = 400) {
    const CaptureBox cb = capture_box_of_sink(*view.f, q);
    const bool local_is_forward = (site.orient == Orientation::inverse) == view.reversed;
    bool local = true;
    TorusPoint z;
    for (int t = 0; t <= max_iter; ++t) {
        if (local) {
            if (cb.site == &site && cb.contains_chart(u)) return {true, t, false};
            if (std::max(std::fabs(u.x), std::fabs(u.y)) >= 0.2) {
                local = false;
                z = site.point_of(u);
            } else {
                u = local_is_forward ? site.local_forward(u) : site.local_solve(u);
                continue;
            }
        }
        if (cb.contains(z)) return {true, t, false};
        z = view.eval(z);
    }
    return {false, -1, true};
}

inline BasinResult in_basin_of_sink(const FlowView& view, TorusPoint x, TorusPoint q,
                                    int max_iter = 400) {
    const CaptureBox cb = capture_box_of_sink(*view.f, q);
    const Vec2 u = cb.site->chart_of(x);
    if (std::max(std::fabs(u.x), std::fabs(u.y)) < 0.2)
        return in_basin_of_sink_chart(view, *cb.site, u, q, max_iter);
    TorusPoint z = x;
    for (int t = 0; t <= max_iter; ++t) {
        if (cb.contains(z)) return {true, t, false};
        z = view.eval(z);
    }
    return {false, -1, true};
}

// ---------------------------------------------------------------------------
// curves

enum class CurveKind { E_curve, F_curve, unstable_manifold, stable_manifold };

struct TorusCurve {
    std::vector<LiftedPoint> vertices;
    std::vector<double> arclength;  // cumulative, same size
    CurveKind kind = CurveKind::E_curve;
    double step = 0.0;
    int center_index = 0;  // index of the start point for centered curves
    bool aborted = false;

    double total_length() const { return arclength.empty() ? 0.0 : arclength.back(); }
    void rebuild_arclength() {
        arclength.assign(vertices.size(), 0.0);
        for (size_t i = 1; i < vertices.size(); ++i)
            arclength[i] = arclength[i - 1] +
                           Vec2{vertices[i].x1 - vertices[i - 1].x1,
                                vertices[i].x2 - vertices[i - 1].x2}
                               .norm();
    }
};

struct PassThroughResult {
    bool pass = false;
    double closest = 1e300;
    double arc_position = 0.0;
};

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b, double* t_out) {
    const Vec2 ab{b.x - a.x, b.y - a.y};
    const double L2 = ab.dot(ab);
    double t = L2 > 0.0 ? std::clamp((p - a).dot(ab) / L2, 0.0, 1.0) : 0.0;
    const Vec2 c{a.x + t * ab.x, a.y + t * ab.y};
    if (t_out) *t_out = t;
    return (p - c).norm();
}

inline PassThroughResult curve_passes_through(const TorusCurve& c, TorusPoint target,
                                              double tol) {
    PassThroughResult res;
    for (size_t i = 0; i + 1 < c.vertices.size(); ++i) {
        const LiftedPoint a = c.vertices[i], b = c.vertices[i + 1];
        // lift the target next to this segment
        const LiftedPoint t =
            nearest_lift(target, {0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)});
        double tt = 0.0;
        const double d =
            point_segment_distance(t.vec(), a.vec(), b.vec(), &tt);
        if (d < res.closest) {
            res.closest = d;
            res.arc_position =
                c.arclength[i] + tt * (c.arclength[i + 1] - c.arclength[i]);
        }
    }
    res.pass = res.closest <= tol;
    return res;
}

// ---------------------------------------------------------------------------
// RK4 tracing of a unit direction field

// field(TorusPoint) must return a unit vector; throws to abort
using DirectionFieldFn = std::function<Vec2(TorusPoint)>;

inline TorusCurve trace_direction_field(const DirectionFieldFn& field, TorusPoint x0,
                                        double half_length, double step,
                                        CurveKind kind) {
    auto trace_branch = [&](double orientation) {
        std::vector<LiftedPoint> pts;
        LiftedPoint z{x0.x1, x0.x2};
        pts.push_back(z);
        Vec2 prev_dir = field(x0) * orientation;
        const int steps = int(std::ceil(half_length / step));
        for (int i = 0; i < steps; ++i) {
            const double h = std::min(step, half_length - i * step);
            auto eval = [&](Vec2 at) {
                Vec2 v = field(wrap({at.x, at.y}));
                // keep a coherent orientation along the curve
                if (v.dot(prev_dir) < 0.0) v = v * -1.0;
                return v;
            };
            const Vec2 z0{z.x1, z.x2};
            const Vec2 k1 = eval(z0);
            const Vec2 k2 = eval(z0 + 0.5 * h * k1);
            const Vec2 k3 = eval(z0 + 0.5 * h * k2);
            const Vec2 k4 = eval(z0 + h * k3);
            const Vec2 d = (1.0 / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            z = {z.x1 + h * d.x, z.x2 + h * d.y};
            prev_dir = eval({z.x1, z.x2});
            pts.push_back(z);
        }
        return pts;
    };

    TorusCurve c;
    c.kind = kind;
    c.step = step;
    std::vector<LiftedPoint> neg = trace_branch(-1.0), pos = trace_branch(1.0);
    c.vertices.assign(neg.rbegin(), neg.rend());
    c.center_index = int(c.vertices.size()) - 1;
    c.vertices.insert(c.vertices.end(), pos.begin() + 1, pos.end());
    c.rebuild_arclength();
    return c;
}

// Integral curve of a bundle, oriented by the positive component along the
// axis the bundle stays delta-close to.
inline TorusCurve trace_integral_curve(const FlowView& view, TorusPoint x,
                                       Bundle bundle, double half_length, double step,
                                       int n = 200, double tol = 1e-10) {
    const Direction axis =
        bundle == Bundle::E ? view.dominated_axis() : view.dominating_axis();
    const Vec2 ax = axis.unit();
    DirectionFieldFn field = [view, bundle, ax, n, tol](TorusPoint p) -> Vec2 {
        const BundleSample s = compute_bundle(view, p, bundle, n, tol);
        Vec2 v = s.dir.unit();
        if (v.dot(ax) < 0.0) v = v * -1.0;
        if (angle_between(s.dir, Direction::from_vector(ax)) > kPi / 4.0)
            throw std::runtime_error("trace_integral_curve: field orientation lost");
        return v;
    };
    return trace_direction_field(
        field, x, half_length, step,
        bundle == Bundle::E ? CurveKind::E_curve : CurveKind::F_curve);
}

// ---------------------------------------------------------------------------
// strong invariant manifolds

struct ManifoldSegment {
    TorusPoint base;
    TorusCurve plus_branch;   // ordered away from the base point
    TorusCurve minus_branch;
    double half_length = 0.0;
    double step = 0.0;
    int verification_depth = 0;  // N of the backward characterization

    // both branches concatenated, signed arclength from the base
    std::vector<LiftedPoint> polyline() const {
        std::vector<LiftedPoint> out(minus_branch.vertices.rbegin(),
                                     minus_branch.vertices.rend());
        out.insert(out.end(), plus_branch.vertices.begin() + 1,
                   plus_branch.vertices.end());
        return out;
    }
};

namespace detail {

// map a lifted polyline forward, keeping lift continuity
inline std::vector<LiftedPoint> map_polyline(const FlowView& view,
                                             const std::vector<LiftedPoint>& pts,
                                             LiftedPoint anchor_image) {
    std::vector<LiftedPoint> out;
    out.reserve(pts.size());
    LiftedPoint prev = anchor_image;
    for (size_t i = 0; i < pts.size(); ++i) {
        const TorusPoint img = view.eval(wrap(pts[i]));
        const LiftedPoint lifted = nearest_lift(img, prev);
        out.push_back(lifted);
        prev = lifted;
    }
    return out;
}

inline std::vector<LiftedPoint> resample_polyline(const std::vector<LiftedPoint>& pts,
                                                  double step, double max_length) {
    std::vector<LiftedPoint> out{pts.front()};
    double carried = 0.0;
    double emitted = 0.0;
    for (size_t i = 0; i + 1 < pts.size() && emitted < max_length; ++i) {
        Vec2 seg{pts[i + 1].x1 - pts[i].x1, pts[i + 1].x2 - pts[i].x2};
        const double L = seg.norm();
        if (L == 0.0) continue;
        double pos = step - carried;
        while (pos <= L && emitted + 1e-300 < max_length) {
            const double t = pos / L;
            out.push_back({pts[i].x1 + t * seg.x, pts[i].x2 + t * seg.y});
            emitted += step;
            pos += step;
            if (emitted >= max_length - 1e-12 * step) break;
        }
        carried = L - (pos - step);
    }
    return out;
}

}  // namespace detail

// Grow the strong unstable manifold of a source/saddle: seed a short segment
// tangent to F at the fixed point, push it forward, re-sample to uniform
// step, trim to the target arclength.
inline ManifoldSegment grow_unstable_manifold(const FlowView& view, TorusPoint p,
                                              double half_length, double step,
                                              int n = 200, double tol = 1e-10) {
    const BundleSample Fp = compute_F_direction(view, p, n, tol);
    const Vec2 dir = Fp.dir.unit();
    ManifoldSegment seg;
    seg.base = p;
    seg.half_length = half_length;
    seg.step = step;

    auto grow_branch = [&](double sign) {
        std::vector<LiftedPoint> pts;
        for (int k = 0; k <= 10; ++k)
            pts.push_back({p.x1 + sign * k * step * dir.x,
                           p.x2 + sign * k * step * dir.y});
        const LiftedPoint anchor{p.x1, p.x2};  // fixed point maps to itself
        for (int round = 0; round < 80; ++round) {
            pts = detail::map_polyline(view, pts, anchor);
            pts = detail::resample_polyline(pts, step, half_length + 0.5 * step);
            double len = 0.0;
            for (size_t i = 0; i + 1 < pts.size(); ++i) {
                len += Vec2{pts[i + 1].x1 - pts[i].x1, pts[i + 1].x2 - pts[i].x2}.norm();
                const double dist = torus_distance(wrap(pts[i + 1]), p);
                if (dist > 0.1 + 2.0 * step && len < half_length)
                    throw std::runtime_error(
                        "grow_unstable_manifold: branch leaves the 1/10-ball "
                        "before reaching the target length");
            }
            if (len >= half_length - 1.5 * step) break;
            if (round == 79)
                throw std::runtime_error("grow_unstable_manifold: no growth");
        }
        TorusCurve c;
        c.kind = CurveKind::unstable_manifold;
        c.step = step;
        c.vertices = pts;
        c.rebuild_arclength();
        return c;
    };

    seg.plus_branch = grow_branch(1.0);
    seg.minus_branch = grow_branch(-1.0);
    return seg;
}

inline ManifoldSegment grow_stable_manifold(const FlowView& view, TorusPoint p,
                                            double half_length, double step,
                                            int n = 200, double tol = 1e-10) {
    FlowView rev{view.f, !view.reversed};
    ManifoldSegment seg = grow_unstable_manifold(rev, p, half_length, step, n, tol);
    seg.plus_branch.kind = CurveKind::stable_manifold;
    seg.minus_branch.kind = CurveKind::stable_manifold;
    return seg;
}

// Backward characterization of the strong unstable manifold, checked on a
// few sample vertices: d(view^{-n}(y), p) < 1/10 for all n <= N_max, and the
// ratio d / |D(view)^{-n}|restricted to E(p)| drops below 1/2 past some N.
struct ManifoldVerification {
    bool ball_condition = true;
    bool ratio_condition = true;
    int max_N = 0;              // depth at which every sample's ratio fell below 1/2
    int transient_exceedances = 0;  // ratio re-crossings after the first drop
};

inline ManifoldVerification verify_strong_unstable(const FlowView& view,
                                                   const ManifoldSegment& seg,
                                                   int N_max = 40,
                                                   int samples_per_branch = 10) {
    ManifoldVerification v;
    // contraction rate of the view restricted to E at the fixed base point
    const Mat2 Jp = view.reversed
                        ? view.f->jacobian(view.f->evaluate_inverse(seg.base)).mat().inverse()
                        : view.f->jacobian(seg.base).mat();
    const BundleSample Ep = compute_E_direction(view, seg.base, 200, 1e-12);
    const Vec2 e = view.f->base.frame.transpose().apply(Ep.dir.unit());
    const double aE = Jp.apply(e).norm() / e.norm();

    auto check = [&](const TorusCurve& branch) {
        const size_t n = branch.vertices.size();
        for (int k = 1; k <= samples_per_branch; ++k) {
            const size_t idx = k * (n - 1) / samples_per_branch;
            TorusPoint z = wrap(branch.vertices[idx]);
            bool dropped = false;
            int firstN = 0;
            for (int it = 1; it <= N_max; ++it) {
                z = view.eval_inverse(z);
                const double d = torus_distance(z, seg.base);
                if (d >= 0.1) v.ball_condition = false;
                const double denom = std::pow(aE, -double(it));
                const double ratio = d / denom;
                if (ratio < 0.5 && !dropped) {
                    dropped = true;
                    firstN = it;
                } else if (ratio >= 0.5 && dropped) {
                    ++v.transient_exceedances;
                }
            }
            if (!dropped) v.ratio_condition = false;
            v.max_N = std::max(v.max_N, firstN);
        }
    };
    check(seg.plus_branch);
    check(seg.minus_branch);
    return v;
}

// distance from a point to a manifold polyline (lift-aware)
inline double distance_to_polyline(const std::vector<LiftedPoint>& pts, TorusPoint x,
                                   double* arc_out = nullptr, double arc0 = 0.0,
                                   double step = 0.0) {
    double best = 1e300, arc = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const LiftedPoint a = pts[i], b = pts[i + 1];
        const LiftedPoint t = nearest_lift(x, {0.5 * (a.x1 + b.x1), 0.5 * (a.x2 + b.x2)});
        double tt = 0.0;
        const double d = point_segment_distance(t.vec(), a.vec(), b.vec(), &tt);
        if (d < best) {
            best = d;
            arc = (double(i) + tt) * step - arc0;
        }
    }
    if (arc_out) *arc_out = arc;
    return best;
}

}  // namespace torusdyn
