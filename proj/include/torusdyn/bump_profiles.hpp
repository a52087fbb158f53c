#pragma once

// Compactly supported 1-D profiles with closed-form values and derivatives.
//
// OddRamp is the odd bump added to a contracting (or expanding) linear map
// to split a fixed point into three; PlateauBump is the even cutoff that
// localizes it in the transverse coordinate.  Both are assembled from
// constant-slope segments blended by quintic smoothsteps, so evaluation and
// differentiation are exact polynomials piece by piece and the support edge
// is a hard zero.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusdyn/torus_core.hpp"

namespace torusdyn {

// quintic smoothstep and its antiderivative
inline double smoothstep5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}
inline double smoothstep5_int(double x) {  // int_0^x S
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 0.5 + (x - 1.0);
    const double x4 = x * x * x * x;
    return x4 * (2.5 + x * (-3.0 + x));
}

struct ProfileKnot {
    double position = 0.0;  // on [0, half_support]
    double slope = 0.0;     // derivative plateau value starting here
};

// ---------------------------------------------------------------------------
// OddRamp
//
// alpha is odd, vanishes off [-half_support, half_support], and its
// derivative is piecewise constant with smoothstep blends:
//
//   [0,t1]=A0  ~  [t2,t3]=A1  ~  [t4,t5]=A2  ~  [t5,H]->0
//
// A0 and A1 realize the requested map slopes at 0 and at the interior fixed
// points of base*t + alpha(t); A2 is solved so the total integral vanishes
// (support exactness).  The interior fixed points +-s land inside the A1
// plateau; when the two map-slope targets average to 1, s = t1 + t2 exactly.

struct OddRamp {
    double half_support = 0.0;
    double base = 0.0;            // the linear multiplier alpha perturbs
    double slope_at_zero = 0.0;   // A0 = sigma0 - base
    double slope_at_flip = 0.0;   // A1 = sigma1 - base
    double tail_slope = 0.0;      // A2, solved
    double slope_lo = 0.0, slope_hi = 0.0;
    std::vector<ProfileKnot> knots;  // positions t1..t5 with entering slopes
    double flip = 0.0;               // s > 0; fixed points at 0 and +-s
    double plateau_half = 0.0;       // half-width of the A1 plateau around s
    double zero_plateau_half = 0.0;  // = t1, where the derivative equals A0
    double max_abs = 0.0;            // max |alpha| over the support

    double t(int i) const { return knots[size_t(i)].position; }

    double derivative(double x) const {
        const double a = std::fabs(x);
        if (a >= half_support) return 0.0;
        const double t1 = t(0), t2 = t(1), t3 = t(2), t4 = t(3), t5 = t(4);
        if (a <= t1) return slope_at_zero;
        if (a <= t2)
            return slope_at_zero +
                   (slope_at_flip - slope_at_zero) * smoothstep5((a - t1) / (t2 - t1));
        if (a <= t3) return slope_at_flip;
        if (a <= t4)
            return slope_at_flip +
                   (tail_slope - slope_at_flip) * smoothstep5((a - t3) / (t4 - t3));
        if (a <= t5) return tail_slope;
        return tail_slope * (1.0 - smoothstep5((a - t5) / (half_support - t5)));
    }

    double value(double x) const {
        const double a = std::fabs(x);
        if (a >= half_support) return 0.0;
        const double t1 = t(0), t2 = t(1), t3 = t(2), t4 = t(3), t5 = t(4);
        double v;
        if (a <= t1) {
            v = slope_at_zero * a;
        } else if (a <= t2) {
            const double L = t2 - t1;
            v = v1_ + slope_at_zero * (a - t1) +
                (slope_at_flip - slope_at_zero) * L * smoothstep5_int((a - t1) / L);
        } else if (a <= t3) {
            v = v2_ + slope_at_flip * (a - t2);
        } else if (a <= t4) {
            const double L = t4 - t3;
            v = v3_ + slope_at_flip * (a - t3) +
                (tail_slope - slope_at_flip) * L * smoothstep5_int((a - t3) / L);
        } else if (a <= t5) {
            v = v4_ + tail_slope * (a - t4);
        } else {
            const double L = half_support - t5;
            v = v5_ + tail_slope * (a - t5) -
                tail_slope * L * smoothstep5_int((a - t5) / L);
        }
        return x < 0.0 ? -v : v;
    }

    // cumulative values at the knots, filled by the builder
    double v1_ = 0, v2_ = 0, v3_ = 0, v4_ = 0, v5_ = 0;
};

namespace detail {
inline void ramp_fail(const std::string& what) {
    throw std::invalid_argument("build_alpha: " + what);
}
}  // namespace detail

// base:        linear multiplier being perturbed (lambda or mu)
// map slope at 0 is deriv_at_zero_target, at the flips deriv_at_flip_target;
// one must exceed 1 and the other fall below it.  slope_lo/hi bound alpha'.
inline OddRamp build_alpha(double half_support, double base, double slope_lo,
                           double slope_hi, double deriv_at_zero_target,
                           double deriv_at_flip_target) {
    if (!(half_support > 0.0)) detail::ramp_fail("half_support must be positive");
    if (!(slope_lo < slope_hi)) detail::ramp_fail("empty slope window");
    const double A0 = deriv_at_zero_target - base;
    const double A1 = deriv_at_flip_target - base;
    if ((deriv_at_zero_target - 1.0) * (deriv_at_flip_target - 1.0) >= 0.0)
        detail::ramp_fail("need one target above 1 and one below 1");
    auto in_window = [&](double s, const char* name) {
        if (!(slope_lo < s && s < slope_hi)) {
            std::ostringstream os;
            os << name << " violates slope window: " << slope_lo << " < " << s
               << " < " << slope_hi << " fails";
            detail::ramp_fail(os.str());
        }
    };
    in_window(A0, "slope at zero");
    in_window(A1, "slope at flip plateau");

    const double H = half_support;
    OddRamp r;
    r.half_support = H;
    r.base = base;
    r.slope_at_zero = A0;
    r.slope_at_flip = A1;
    r.slope_lo = slope_lo;
    r.slope_hi = slope_hi;
    const double t1 = H / 40.0, t2 = H / 20.0, t3 = H / 10.0, t4 = H / 8.0,
                 t5 = H * (19.0 / 20.0);

    // integral of the derivative must vanish; solve the tail slope
    const double head = A0 * t1 + (t2 - t1) * 0.5 * (A0 + A1) + A1 * (t3 - t2) +
                        (t4 - t3) * 0.5 * A1;
    const double eff = (t4 - t3) * 0.5 + (t5 - t4) + (H - t5) * 0.5;
    const double A2 = -head / eff;
    {
        std::ostringstream os;
        os << "tail slope " << A2 << " outside window (" << slope_lo << ", "
           << slope_hi << ")";
        if (!(slope_lo < A2 && A2 < slope_hi)) detail::ramp_fail(os.str());
    }
    r.tail_slope = A2;
    r.knots = {{t1, A0}, {t2, A1}, {t3, A1}, {t4, A2}, {t5, A2}};

    r.v1_ = A0 * t1;
    r.v2_ = r.v1_ + (t2 - t1) * 0.5 * (A0 + A1);
    r.v3_ = r.v2_ + A1 * (t3 - t2);
    r.v4_ = r.v3_ + (t4 - t3) * 0.5 * (A1 + A2);
    r.v5_ = r.v4_ + A2 * (t5 - t4);

    // interior fixed point of base*t + alpha(t) on the A1 plateau:
    // alpha(s) = (1-base) s
    const double g2 = r.v2_ - (1.0 - base) * t2;
    const double denom = (1.0 - base) - A1;  // = 1 - deriv_at_flip_target
    const double s = t2 + g2 / denom;
    if (!(s > t2 + 0.2 * (t3 - t2) && s < t3 - 0.2 * (t3 - t2)))
        detail::ramp_fail("flip point does not land inside its constant-slope plateau");
    r.flip = s;
    r.plateau_half = std::min(s - t2, t3 - s);
    r.zero_plateau_half = t1;

    // residual of the flip equation should be at the rounding floor
    if (std::fabs(r.value(s) + base * s - s) > 1e-12 * std::max(1.0, H))
        detail::ramp_fail("flip equation residual too large");

    double m = 0.0;
    for (int i = 0; i <= 4096; ++i)
        m = std::max(m, std::fabs(r.value(H * double(i) / 4096.0)));
    r.max_abs = m;
    return r;
}

// ---------------------------------------------------------------------------
// PlateauBump
//
// Even, 1 on [-plateau, plateau], 0 off the support, shoulders descend with
// a constant slope eased in and out by smoothsteps.  Peak slope is
// 1/((1-ease)*shoulder), kept strictly below 3/(2*half_support).

struct PlateauBump {
    double half_support = 0.0;
    double plateau_half_width = 0.0;
    double ease = 0.15;       // fraction of the shoulder used by each easing
    double peak_slope = 0.0;  // max |derivative|

    double value(double x) const {
        const double a = std::fabs(x);
        if (a <= plateau_half_width) return 1.0;
        if (a >= half_support) return 0.0;
        const double L = half_support - plateau_half_width;
        const double rL = ease * L;
        const double tau = a - plateau_half_width;
        double drop;
        if (tau <= rL)
            drop = peak_slope * rL * smoothstep5_int(tau / rL);
        else if (tau <= L - rL)
            drop = peak_slope * (0.5 * rL + (tau - rL));
        else
            drop = 1.0 - peak_slope * rL * smoothstep5_int((L - tau) / rL);
        return 1.0 - drop;
    }

    double derivative(double x) const {
        const double a = std::fabs(x);
        if (a <= plateau_half_width || a >= half_support) return 0.0;
        const double L = half_support - plateau_half_width;
        const double rL = ease * L;
        const double tau = a - plateau_half_width;
        double d;
        if (tau <= rL)
            d = -peak_slope * smoothstep5(tau / rL);
        else if (tau <= L - rL)
            d = -peak_slope;
        else
            d = -peak_slope * smoothstep5((L - tau) / rL);
        return x < 0.0 ? -d : d;
    }
};

inline PlateauBump build_beta(double half_support, double plateau_half_width) {
    if (!(half_support > 0.0 && plateau_half_width > 0.0 &&
          plateau_half_width < half_support))
        throw std::invalid_argument("build_beta: need 0 < plateau < half_support");
    PlateauBump b;
    b.half_support = half_support;
    b.plateau_half_width = plateau_half_width;
    const double L = half_support - plateau_half_width;
    b.peak_slope = 1.0 / (L * (1.0 - b.ease));
    const double bound = 3.0 / (2.0 * half_support);
    if (!(b.peak_slope < bound)) {
        std::ostringstream os;
        os << "build_beta: plateau too wide, peak slope " << b.peak_slope
           << " >= 3/l(I2) = " << bound;
        throw std::invalid_argument(os.str());
    }
    return b;
}

// ---------------------------------------------------------------------------
// validation

struct ValidationItem {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool pass() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
};

// Count sign changes of base*t + alpha(t) - t over the support at a given
// resolution; exact zeros on the grid act as crossings between neighbors.
inline int count_interior_fixed_points(const OddRamp& a, int samples_per_support) {
    const double H = a.half_support;
    int crossings = 0;
    int last = 0;
    for (int i = 0; i <= 2 * samples_per_support; ++i) {
        const double t = -H + H * double(i) / samples_per_support;
        const double g = a.value(t) + (a.base - 1.0) * t;
        const int s = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
        if (s != 0) {
            if (last != 0 && s != last) ++crossings;
            last = s;
        }
    }
    return crossings;
}

inline ValidationReport validate_profiles(const OddRamp& alpha, const PlateauBump& beta,
                                          double eps, double mu) {
    ValidationReport rep;
    const double l1 = 2.0 * alpha.half_support;
    const double l2 = 2.0 * beta.half_support;

    {
        ValidationItem it;
        it.name = "length_ratio";
        it.bound = 1e-12;
        const double want = (eps / (3.0 * mu)) * l2;
        it.measured = std::fabs(l1 - want) / std::max(l1, want);
        it.pass = it.measured <= it.bound;
        it.detail = "l(I1) = (eps/3mu) l(I2), relative";
        rep.items.push_back(it);
    }
    {
        ValidationItem it;
        it.name = "product_bound";
        double mb = 0.0;
        for (int i = 0; i <= 100000; ++i)
            mb = std::max(mb, std::fabs(beta.derivative(
                                  beta.half_support * (2.0 * i / 100000.0 - 1.0))));
        it.measured = alpha.max_abs * mb;
        it.bound = eps;
        it.pass = it.measured < it.bound;
        it.detail = "max|alpha| * max|beta'| < eps";
        rep.items.push_back(it);
    }
    {
        ValidationItem it;
        it.name = "alpha_slope_window";
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i <= 100000; ++i) {
            const double d = alpha.derivative(
                alpha.half_support * (2.0 * i / 100000.0 - 1.0));
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        it.measured = std::max(alpha.slope_lo - lo, hi - alpha.slope_hi);
        it.bound = 0.0;
        it.pass = lo > alpha.slope_lo && hi < alpha.slope_hi;
        it.detail = "sampled alpha' inside (" + std::to_string(alpha.slope_lo) + ", " +
                    std::to_string(alpha.slope_hi) + ")";
        rep.items.push_back(it);
    }
    {
        ValidationItem it;
        it.name = "beta_slope_bound";
        double mb = 0.0;
        for (int i = 0; i <= 100000; ++i)
            mb = std::max(mb, std::fabs(beta.derivative(
                                  beta.half_support * (2.0 * i / 100000.0 - 1.0))));
        it.measured = mb;
        it.bound = 3.0 / l2;
        it.pass = mb < it.bound;
        rep.items.push_back(it);
    }
    {
        ValidationItem it;
        it.name = "interior_fixed_points";
        it.measured = count_interior_fixed_points(alpha, 100000);
        it.bound = 3;
        it.pass = int(it.measured) == 3;
        it.detail = "sign changes of alpha(t) + (base-1) t over the support";
        rep.items.push_back(it);
    }
    return rep;
}

}  // namespace torusdyn
