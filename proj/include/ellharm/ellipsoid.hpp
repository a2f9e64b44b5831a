#pragma once

// Ellipsoidal coordinates (lambda, mu, nu) attached to a reference ellipsoid
// x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 with a > b > c > 0. The squared coordinates
// are the roots of x^2/t + y^2/(t - h^2) + z^2/(t - k^2) = 1, h^2 = a^2 - b^2,
// k^2 = a^2 - c^2, lying in (k^2, inf), (h^2, k^2) and (0, h^2).

#include "ellharm/error.hpp"
#include "ellharm/vec3.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace ellharm {

class EllipsoidalSystem {
public:
    EllipsoidalSystem(double a, double b, double c) : a_(a), b_(b), c_(c) {
        if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c)))
            throw InvalidArgument("semi-axes must be finite");
        if (!(c > 0)) throw InvalidArgument("semi-axis c must be positive");
        if (!(a > b)) throw InvalidArgument("semi-axes must satisfy a > b (a = b is a degenerate spheroid)");
        if (!(b > c)) throw InvalidArgument("semi-axes must satisfy b > c (b = c is a degenerate spheroid)");
        hSq_ = (a - b) * (a + b);
        kSq_ = (a - c) * (a + c);
        h_ = std::sqrt(hSq_);
        k_ = std::sqrt(kSq_);
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double hSq() const { return hSq_; }
    double kSq() const { return kSq_; }
    double h() const { return h_; }
    double k() const { return k_; }

    friend bool operator==(const EllipsoidalSystem&, const EllipsoidalSystem&) = default;

private:
    double a_, b_, c_;
    double hSq_ = 0, kSq_ = 0, h_ = 0, k_ = 0;
};

inline EllipsoidalSystem new_system(double a, double b, double c) { return {a, b, c}; }

/// Signed ellipsoidal coordinates; |lambda| >= k >= |mu| >= h >= |nu| >= 0.
struct EllipsoidalPoint {
    double lambda = 0.0;
    double mu = 0.0;
    double nu = 0.0;
};

/// sgn with sgn(0) = +1.
inline double sign_of(double v) { return v < 0 ? -1.0 : 1.0; }

namespace detail {

struct ConfocalCubic {
    double x2, y2, z2, hSq, kSq;

    // t(t-h2)(t-k2) - x^2 (t-h2)(t-k2) - y^2 t (t-k2) - z^2 t (t-h2), kept in
    // factored form so it stays accurate next to t = h2 and t = k2
    double value(double t) const {
        const double th = t - hSq, tk = t - kSq;
        return t * th * tk - x2 * th * tk - y2 * t * tk - z2 * t * th;
    }
    double slope(double t) const {
        const double th = t - hSq, tk = t - kSq;
        return th * tk + t * tk + t * th - x2 * (th + tk) - y2 * (t + tk) - z2 * (t + th);
    }
};

// Safeguarded Newton inside a bracket [lo, hi] with value(lo) <= 0 <= value(hi)
// (or the reverse, given by `increasing`).
inline double polish_root(const ConfocalCubic& f, double guess, double lo, double hi, bool increasing) {
    double t = std::clamp(guess, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double v = f.value(t);
        if (v == 0.0) return t;
        if ((v > 0) == increasing) hi = t;
        else lo = t;
        const double d = f.slope(t);
        double next = d != 0.0 ? t - v / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 2 * std::numeric_limits<double>::epsilon() * std::abs(t) || hi - lo <= 0) return next;
        t = next;
    }
    return t;
}

// Roots of the monic cubic t^3 + A t^2 + B t + C with three real roots,
// trigonometric form, descending order.
inline std::array<double, 3> trig_roots(double A, double B, double C) {
    const double p = B - A * A / 3.0;
    const double q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;
    const double shift = -A / 3.0;
    if (p >= 0.0) return {shift, shift, shift};
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    std::array<double, 3> r{};
    for (int i = 0; i < 3; ++i) r[i] = shift + m * std::cos(theta - 2.0 * std::numbers::pi * i / 3.0);
    std::sort(r.begin(), r.end(), std::greater<>());
    return r;
}

} // namespace detail

/// Squared coordinates (lambda^2, mu^2, nu^2) without signs or snapping.
inline std::array<double, 3> confocal_roots(const EllipsoidalSystem& sys, Vec3 r) {
    const double hSq = sys.hSq(), kSq = sys.kSq();
    const detail::ConfocalCubic f{r.x * r.x, r.y * r.y, r.z * r.z, hSq, kSq};
    const double rr = f.x2 + f.y2 + f.z2;
    const double A = -(hSq + kSq + rr);
    const double B = hSq * kSq + f.x2 * (hSq + kSq) + f.y2 * kSq + f.z2 * hSq;
    const double C = -f.x2 * hSq * kSq;
    const auto guess = detail::trig_roots(A, B, C);

    // value(k2) <= 0, value(h2) >= 0, value(0) <= 0
    std::array<double, 3> roots{};
    roots[0] = detail::polish_root(f, guess[0], kSq, kSq + hSq + rr, true);
    roots[1] = detail::polish_root(f, guess[1], hSq, kSq, false);
    roots[2] = detail::polish_root(f, guess[2], 0.0, hSq, true);
    // product of the roots is x^2 h^2 k^2; recovers nu^2 to full relative accuracy
    if (f.x2 > 0 && roots[0] > 0 && roots[1] > 0) {
        const double nu2 = f.x2 * hSq * kSq / (roots[0] * roots[1]);
        if (nu2 <= hSq) roots[2] = nu2;
    }
    return roots;
}

inline EllipsoidalPoint cart_to_ellipsoidal(const EllipsoidalSystem& sys, Vec3 r) {
    if (!(std::isfinite(r.x) && std::isfinite(r.y) && std::isfinite(r.z)))
        throw CoordinateError("Cartesian point must be finite");
    const double tol = 1e-12 * sys.a();
    const bool x0 = std::abs(r.x) < tol, y0 = std::abs(r.y) < tol, z0 = std::abs(r.z) < tol;
    if (y0 && z0 && (std::abs(std::abs(r.x) - sys.h()) < tol || std::abs(std::abs(r.x) - sys.k()) < tol)) {
        std::ostringstream os;
        os.precision(17);
        os << "point (" << r.x << ", " << r.y << ", " << r.z << ") lies on a focus of the ellipsoidal system";
        throw CoordinateError(os.str());
    }

    auto roots = confocal_roots(sys, r);
    const double hSq = sys.hSq(), kSq = sys.kSq();
    const double slack = 64 * std::numeric_limits<double>::epsilon();
    const bool ok = roots[0] >= kSq * (1 - slack) && roots[1] <= kSq * (1 + slack) &&
                    roots[1] >= hSq * (1 - slack) && roots[2] <= hSq * (1 + slack) && roots[2] >= 0;
    if (!ok) {
        const detail::ConfocalCubic f{r.x * r.x, r.y * r.y, r.z * r.z, hSq, kSq};
        std::ostringstream os;
        os.precision(17);
        os << "confocal root outside its bracket: roots (" << roots[0] << ", " << roots[1] << ", " << roots[2]
           << "), residuals (" << f.value(roots[0]) << ", " << f.value(roots[1]) << ", " << f.value(roots[2]) << ")";
        throw CoordinateError(os.str());
    }
    roots[0] = std::max(roots[0], kSq);
    roots[1] = std::clamp(roots[1], hSq, kSq);
    roots[2] = std::clamp(roots[2], 0.0, hSq);

    // points on a coordinate plane snap the matching coordinate to its bracket end
    bool snap_l = false, snap_m = false, snap_n = false;
    if (x0) {
        roots[2] = 0.0;
        snap_n = true;
    }
    if (y0) {
        if (std::abs(roots[1] - hSq) <= std::abs(roots[2] - hSq)) {
            roots[1] = hSq;
            snap_m = true;
        } else {
            roots[2] = hSq;
            snap_n = true;
        }
    }
    if (z0) {
        if (std::abs(roots[0] - kSq) <= std::abs(roots[1] - kSq)) {
            roots[0] = kSq;
            snap_l = true;
        } else {
            roots[1] = kSq;
            snap_m = true;
        }
    }

    const double sx = sign_of(r.x), sy = sign_of(r.y), sz = sign_of(r.z);
    EllipsoidalPoint p;
    p.lambda = (snap_l ? 1.0 : sx * sy * sz) * (snap_l ? sys.k() : std::sqrt(roots[0]));
    p.mu = (snap_m ? 1.0 : sx * sy) * (snap_m && roots[1] == hSq ? sys.h() : snap_m ? sys.k() : std::sqrt(roots[1]));
    p.nu = (snap_n ? 1.0 : sx * sz) * (snap_n && roots[2] == hSq ? sys.h() : std::sqrt(roots[2]));
    return p;
}

inline EllipsoidalPoint cart_to_ellipsoidal(const EllipsoidalSystem& sys, double x, double y, double z) {
    return cart_to_ellipsoidal(sys, Vec3{x, y, z});
}

inline Vec3 ellipsoidal_to_cart(const EllipsoidalSystem& sys, const EllipsoidalPoint& p) {
    const double h = sys.h(), k = sys.k();
    const double l = std::abs(p.lambda), m = std::abs(p.mu), n = std::abs(p.nu);
    const double slack = 1 + 64 * std::numeric_limits<double>::epsilon();
    if (!(std::isfinite(l) && std::isfinite(m) && std::isfinite(n)) || l * slack < k || m > k * slack ||
        m * slack < h || n > h * slack) {
        std::ostringstream os;
        os.precision(17);
        os << "ellipsoidal point (" << p.lambda << ", " << p.mu << ", " << p.nu
           << ") violates |lambda| >= k >= |mu| >= h >= |nu|";
        throw CoordinateError(os.str());
    }
    const double l_h = std::max(0.0, (l - h) * (l + h));
    const double l_k = std::max(0.0, (l - k) * (l + k));
    const double m_h = std::max(0.0, (m - h) * (m + h));
    const double k_m = std::max(0.0, (k - m) * (k + m));
    const double h_n = std::max(0.0, (h - n) * (h + n));
    const double k_n = std::max(0.0, (k - n) * (k + n));
    const double d = (k - h) * (k + h);

    const double ax = l * m * n / (h * k);
    const double ay = std::sqrt(l_h * m_h * h_n / (sys.hSq() * d));
    const double az = std::sqrt(l_k * k_m * k_n / (sys.kSq() * d));
    const double sl = sign_of(p.lambda), sm = sign_of(p.mu), sn = sign_of(p.nu);
    // inverse of sgn(lambda) = sx sy sz, sgn(mu) = sx sy, sgn(nu) = sx sz
    return {sl * sm * sn * ax, sl * sn * ay, sl * sm * az};
}

} // namespace ellharm
