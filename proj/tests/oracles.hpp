#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's quadrature, root finder or Lamé evaluation.

#include "ellharm/ellipsoid.hpp"
#include "ellharm/lame.hpp"
#include "ellharm/pcm.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using ellharm::EllipsoidalSystem;
using ellharm::LameHarmonic;
using ellharm::Vec3;

/// Root of f on [lo, hi] by plain bisection (f(lo), f(hi) of opposite sign).
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 400 && hi - lo > 0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// (lambda^2, mu^2, nu^2) by bisection of the expanded cubic on its three brackets.
inline std::array<double, 3> confocal_roots(const EllipsoidalSystem& sys, Vec3 r) {
    const double h2 = sys.hSq(), k2 = sys.kSq();
    const double x2 = r.x * r.x, y2 = r.y * r.y, z2 = r.z * r.z;
    auto cubic = [&](double t) {
        return t * (t - h2) * (t - k2) - x2 * (t - h2) * (t - k2) - y2 * t * (t - k2) - z2 * t * (t - h2);
    };
    return {bisect(cubic, k2, k2 + h2 + x2 + y2 + z2 + 1.0), bisect(cubic, h2, k2), bisect(cubic, 0.0, h2)};
}

/// Second-order jet: value and first two derivatives.
struct Jet {
    double v = 0, d1 = 0, d2 = 0;
};
inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator*(Jet a, Jet b) { return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2}; }
inline Jet operator*(double c, Jet a) { return {c * a.v, c * a.d1, c * a.d2}; }
inline Jet jet_sqrt(Jet a) {
    const double r = std::sqrt(a.v);
    const double d1 = a.d1 / (2 * r);
    return {r, d1, (a.d2 - 2 * d1 * d1) / (2 * r)};
}

/// E and its first two derivatives from the raw ansatz:
/// s^pow sqrt|s^2-h^2|^eb sqrt|s^2-k^2|^ec sum_j b_j (1 - s^2/h^2)^j, summed
/// naively term by term.
inline Jet lame_jet(const LameHarmonic& harm, double s) {
    const auto& sys = harm.sys;
    const Jet S{s, 1, 0};
    const Jet t = Jet{1, 0, 0} + (-1.0 / sys.hSq()) * (S * S);
    Jet poly{0, 0, 0}, tp{1, 0, 0};
    for (double b : harm.coeffs) {
        poly = poly + b * tp;
        tp = tp * t;
    }
    Jet pre{1, 0, 0};
    if (ellharm::class_power(harm.n, harm.cls) == 1) pre = S;
    auto factor = [&](double c2) {
        Jet d = S * S + Jet{-c2, 0, 0};
        if (d.v < 0) d = -1.0 * d;
        return jet_sqrt(d);
    };
    if (ellharm::has_h_factor(harm.cls)) pre = pre * factor(sys.hSq());
    if (ellharm::has_k_factor(harm.cls)) pre = pre * factor(sys.kSq());
    return pre * poly;
}

/// Lamé ODE residual relative to the size of its three terms.
inline double lame_residual(const LameHarmonic& harm, double s) {
    const auto& sys = harm.sys;
    const Jet e = lame_jet(harm, s);
    const double s2 = s * s;
    const double t1 = (s2 - sys.hSq()) * (s2 - sys.kSq()) * e.d2;
    const double t2 = s * (2 * s2 - sys.hSq() - sys.kSq()) * e.d1;
    const double t3 = (harm.sep_const - harm.n * (harm.n + 1.0) * s2) * e.v;
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(harm.sep_const * e.v) +
                         std::abs(harm.n * (harm.n + 1.0) * s2 * e.v);
    return scale > 0 ? std::abs(t1 + t2 + t3) / scale : 0.0;
}

/// Naive ansatz value (no Horner).
inline double lame_naive(const LameHarmonic& harm, double s) { return lame_jet(harm, s).v; }

/// Romberg integration of a smooth function on [lo, hi].
inline double romberg(const std::function<double(double)>& f, double lo, double hi, double rtol = 1e-14,
                      int max_k = 22) {
    std::vector<double> prev, cur;
    double hstep = hi - lo;
    prev.push_back(0.5 * hstep * (f(lo) + f(hi)));
    for (int k = 1; k <= max_k; ++k) {
        hstep *= 0.5;
        double s = 0;
        const long count = 1L << (k - 1);
        for (long i = 0; i < count; ++i) s += f(lo + (2 * i + 1) * hstep);
        cur.assign(k + 1, 0.0);
        cur[0] = 0.5 * prev[0] + hstep * s;
        double p4 = 4;
        for (int m = 1; m <= k; ++m, p4 *= 4) cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (p4 - 1);
        if (k > 4 && std::abs(cur[k] - prev[k - 1]) <= rtol * std::abs(cur[k])) return cur[k];
        prev = cur;
    }
    return prev.back();
}

/// I(lambda) = int_lambda^inf ds / (E^2 sqrt((s^2-h^2)(s^2-k^2))) with s = lambda/u,
/// by Romberg on u in [0, 1] (the integrand vanishes at u = 0 for n >= 1).
inline double exterior_integral(const LameHarmonic& harm, double lambda) {
    const auto& sys = harm.sys;
    auto f = [&](double u) {
        if (u == 0.0) return harm.n == 0 ? 1.0 / lambda : 0.0;
        const double s = lambda / u;
        const double e = lame_naive(harm, s);
        return lambda / (u * u) / (e * e * std::sqrt((s * s - sys.hSq()) * (s * s - sys.kSq())));
    };
    return romberg(f, 0.0, 1.0);
}

inline double coulomb(const std::vector<ellharm::PointCharge>& charges, Vec3 r) {
    double s = 0;
    for (const auto& c : charges) s += c.q / std::hypot(r.x - c.position.x, r.y - c.position.y, r.z - c.position.z);
    return s;
}

inline double relerr(double got, double want) { return std::abs(got - want) / std::abs(want); }

} // namespace oracle
