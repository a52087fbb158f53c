#pragma once

// Torus arithmetic, the linear hyperbolic model and its eigen-frame.
//
// The torus is T^2 = R^2/Z^2 with fundamental domain [0,1)^2.  The linear
// model is the automorphism induced by A = [[2,1],[1,1]]^2 = [[5,3],[3,2]],
// whose eigenvalues lambda < 1 < mu solve t^2 - 7t + 1 = 0.  All eigen-data
// is computed from that closed form, never from a generic eigensolver, so
// every run reproduces the same doubles.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusdyn {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// small fixed-size linear algebra

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Mat2 {
    // row-major: [[a, b], [c, d]]
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 mul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 transpose() const { return {a, c, b, d}; }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const {
        const double dt = det();
        if (dt == 0.0) throw std::runtime_error("Mat2::inverse: singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    double max_abs_entry() const {
        return std::max(std::max(std::fabs(a), std::fabs(b)),
                        std::max(std::fabs(c), std::fabs(d)));
    }
};

// Largest singular value.  sigma^2 are the roots of
// t^2 - (|M|_F^2) t + det(M)^2.
inline double operator_norm(const Mat2& m) {
    const double f = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    const double dt = m.det();
    const double disc = std::max(0.0, f * f - 4.0 * dt * dt);
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

// ---------------------------------------------------------------------------
// points

struct LiftedPoint {
    double x1 = 0.0;
    double x2 = 0.0;
    Vec2 vec() const { return {x1, x2}; }
};

struct TorusPoint {
    double x1 = 0.0;  // in [0,1)
    double x2 = 0.0;  // in [0,1)
    Vec2 vec() const { return {x1, x2}; }
};

inline double wrap_coord(double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("wrap: non-finite coordinate");
    double r = t - std::floor(t);
    if (r >= 1.0) r -= 1.0;  // floor rounding edge
    return r;
}

inline TorusPoint wrap(LiftedPoint p) { return {wrap_coord(p.x1), wrap_coord(p.x2)}; }
inline TorusPoint wrap(double x1, double x2) { return wrap(LiftedPoint{x1, x2}); }

// Signed displacement q - p reduced into [-1/2, 1/2)^2 (the nearest lift of q
// relative to p).
inline Vec2 torus_displacement(TorusPoint p, TorusPoint q) {
    auto red = [](double d) {
        double r = d - std::floor(d + 0.5);
        if (r >= 0.5) r -= 1.0;
        return r;
    };
    return {red(q.x1 - p.x1), red(q.x2 - p.x2)};
}

inline double torus_distance(TorusPoint p, TorusPoint q) {
    return torus_displacement(p, q).norm();
}

// Lift of x nearest to the lifted point c.
inline LiftedPoint nearest_lift(TorusPoint x, LiftedPoint c) {
    const Vec2 d = torus_displacement(wrap(c), x);
    return {c.x1 + d.x, c.x2 + d.y};
}

// ---------------------------------------------------------------------------
// projective directions

struct Direction {
    double theta = 0.0;  // in [0, pi)

    static Direction from_angle(double t) {
        double r = std::fmod(t, kPi);
        if (r < 0.0) r += kPi;
        if (r >= kPi) r = 0.0;
        return Direction{r};
    }
    static Direction from_vector(Vec2 v) {
        if (v.norm() == 0.0) throw std::invalid_argument("Direction: zero vector");
        return from_angle(std::atan2(v.y, v.x));
    }
    Vec2 unit() const { return {std::cos(theta), std::sin(theta)}; }
};

// Acute angle between two lines, in [0, pi/2].
inline double angle_between(Direction d1, Direction d2) {
    double d = std::fabs(d1.theta - d2.theta);
    if (d > kPi / 2.0) d = kPi - d;
    return d;
}

inline double angle_between(Vec2 u, Vec2 v) {
    return angle_between(Direction::from_vector(u), Direction::from_vector(v));
}

// ---------------------------------------------------------------------------
// the linear model

struct ToralAutomorphism {
    std::array<std::array<long, 2>, 2> m{{{5, 3}, {3, 2}}};
    double lambda = 0.0;  // contracting eigenvalue, in (0,1)
    double mu = 0.0;      // expanding eigenvalue, = 1/lambda
    Direction e_s;        // contracting eigenline
    Direction e_u;        // expanding eigenline
    Mat2 frame;           // columns [e_s | e_u], orthonormal, det +1

    Vec2 apply(Vec2 v) const {
        return {double(m[0][0]) * v.x + double(m[0][1]) * v.y,
                double(m[1][0]) * v.x + double(m[1][1]) * v.y};
    }
    Vec2 apply_inverse(Vec2 v) const {
        // [[5,3],[3,2]]^-1 = [[2,-3],[-3,5]]
        return {2.0 * v.x - 3.0 * v.y, -3.0 * v.x + 5.0 * v.y};
    }
    TorusPoint forward(TorusPoint p) const { return wrap({apply(p.vec()).x, apply(p.vec()).y}); }
    TorusPoint backward(TorusPoint p) const {
        const Vec2 v = apply_inverse(p.vec());
        return wrap({v.x, v.y});
    }
};

inline ToralAutomorphism linear_model() {
    ToralAutomorphism A;
    const double s5 = std::sqrt(5.0);
    A.mu = 0.5 * (7.0 + 3.0 * s5);
    A.lambda = 1.0 / A.mu;  // product of the roots of t^2-7t+1 is 1
    const double phi = 0.5 * (1.0 + s5);
    const double nrm = std::sqrt(2.0 + phi);  // |(1,-phi)| = |(phi,1)| = sqrt(2+phi)
    const Vec2 es{1.0 / nrm, -phi / nrm};
    const Vec2 eu{phi / nrm, 1.0 / nrm};
    A.e_s = Direction::from_vector(es);
    A.e_u = Direction::from_vector(eu);
    A.frame = Mat2{es.x, eu.x, es.y, eu.y};
    return A;
}

// Fixed points of the induced torus map: solutions of (A - I)x = 0 mod Z^2.
// There are |det(A - I)| of them, enumerated exactly over the rational grid
// (i/D, j/D) with D = |det(A - I)|.
inline std::vector<TorusPoint> fixed_points_of_linear(const ToralAutomorphism& A) {
    const long a = A.m[0][0] - 1, b = A.m[0][1], c = A.m[1][0], d = A.m[1][1] - 1;
    const long det = a * d - b * c;
    if (det == 0) throw std::invalid_argument("fixed_points_of_linear: A - I singular");
    const long D = std::labs(det);
    std::vector<TorusPoint> out;
    for (long i = 0; i < D; ++i) {
        for (long j = 0; j < D; ++j) {
            const long r1 = ((a * i + b * j) % D + D) % D;
            const long r2 = ((c * i + d * j) % D + D) % D;
            if (r1 == 0 && r2 == 0)
                out.push_back({double(i) / double(D), double(j) / double(D)});
        }
    }
    if (long(out.size()) != D)
        throw std::runtime_error("fixed_points_of_linear: count != |det(A-I)|");
    return out;
}

// ---------------------------------------------------------------------------
// eigen-frame charts
//
// Chart coordinates u = P^T (lift(x) - center) with P = [e_s | e_u]; the
// first coordinate is the contracted one.  Valid within radius 1/4 of the
// center, using the nearest lift.

inline constexpr double kChartRadius = 0.25;

inline Vec2 to_eigen_frame(const ToralAutomorphism& A, TorusPoint x, TorusPoint center) {
    const Vec2 d = torus_displacement(center, x);
    if (d.norm() >= kChartRadius)
        throw std::invalid_argument("to_eigen_frame: point outside chart radius");
    return A.frame.transpose().apply(d);
}

inline LiftedPoint from_eigen_frame(const ToralAutomorphism& A, double u1, double u2,
                                    TorusPoint center) {
    const Vec2 v = A.frame.apply({u1, u2});
    return {center.x1 + v.x, center.x2 + v.y};
}

// ---------------------------------------------------------------------------
// sup-norm of Df over the torus
//
// Any map type exposing jacobian_world(TorusPoint)->Mat2 and
// refinement_boxes()->vector of (center TorusPoint, frame Mat2, half-widths)
// works here.  The Jacobian is constant outside the surgery supports, so the
// global grid only needs to be dense enough to hit every support box once;
// the per-box grids do the real work.

struct RegionBox {
    TorusPoint center;
    Mat2 frame;       // columns = chart axes
    Vec2 offset;      // box center in chart coordinates
    double half1 = 0.0;
    double half2 = 0.0;

    LiftedPoint at(double s1, double s2) const {  // s in [-1,1]^2
        const Vec2 u{offset.x + s1 * half1, offset.y + s2 * half2};
        const Vec2 w = frame.apply(u);
        return {center.x1 + w.x, center.x2 + w.y};
    }
};

struct SupNormEstimate {
    double value = 0.0;
    double grid_spacing = 0.0;        // global grid
    TorusPoint argmax;
};

template <class MapT>
SupNormEstimate sup_norm_Df(const MapT& f, int grid_n) {
    if (grid_n < 64) throw std::invalid_argument("sup_norm_Df: grid_n >= 64 required");
    SupNormEstimate est;
    est.grid_spacing = 1.0 / double(grid_n);
    auto consider = [&](TorusPoint p) {
        const double s = operator_norm(f.jacobian_world(p));
        if (s > est.value) { est.value = s; est.argmax = p; }
    };
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j)
            consider({(i + 0.5) / grid_n, (j + 0.5) / grid_n});
    const int bn = 96;  // box-normalized refinement inside each support
    for (const RegionBox& box : f.refinement_boxes())
        for (int i = 0; i <= bn; ++i)
            for (int j = 0; j <= bn; ++j)
                consider(wrap(box.at(-1.0 + 2.0 * i / bn, -1.0 + 2.0 * j / bn)));
    return est;
}

}  // namespace torusdyn
