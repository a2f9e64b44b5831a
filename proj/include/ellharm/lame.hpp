#pragma once

// Lamé functions of the first kind E_n^p, their exterior companions
// F_n^p = (2n+1) E I, and solid ellipsoidal harmonics.
//
// Each of the 2n+1 functions of order n has the form
//
//   E(s) = s^alpha |s^2 - h^2|^(beta/2) |s^2 - k^2|^(gamma/2) P(t),
//   P(t) = sum_j b_j t^j,  t = 1 - s^2/h^2,
//
// with (beta, gamma) = (0,0), (1,0), (0,1), (1,1) for classes K, L, M, N and
// alpha in {0, 1} fixed by the parity of n. Substituting into Lamé's equation
//
//   (s^2-h^2)(s^2-k^2) E'' + s(2s^2-h^2-k^2) E' + (sep - n(n+1) s^2) E = 0
//
// and collecting powers of t gives a tridiagonal eigenproblem for (sep, b).

#include "ellharm/ellipsoid.hpp"
#include "ellharm/error.hpp"
#include "ellharm/quad.hpp"
#include "ellharm/tridiag.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

namespace ellharm {

enum class LameClass { K, L, M, N };

inline constexpr LameClass all_classes[] = {LameClass::K, LameClass::L, LameClass::M, LameClass::N};
inline constexpr int max_supported_order = 50;

inline char class_name(LameClass c) { return "KLMN"[static_cast<int>(c)]; }

inline bool has_h_factor(LameClass c) { return c == LameClass::L || c == LameClass::N; }
inline bool has_k_factor(LameClass c) { return c == LameClass::M || c == LameClass::N; }

/// Exponent of the bare s factor (0 or 1).
inline int class_power(int n, LameClass c) {
    const int r = n / 2;
    return (c == LameClass::K || c == LameClass::N) ? n - 2 * r : 1 - n + 2 * r;
}

/// Number of harmonics of order n in a class (the ansatz length).
inline int class_size(int n, LameClass c) {
    const int r = n / 2;
    switch (c) {
    case LameClass::K: return r + 1;
    case LameClass::L:
    case LameClass::M: return n - r;
    case LameClass::N: return r;
    }
    return 0;
}

struct LameHarmonic {
    EllipsoidalSystem sys;
    int n = 0;
    int p = 0;
    LameClass cls = LameClass::K;
    double sep_const = 0.0;
    std::vector<double> coeffs; ///< b_0..b_m in powers of t = 1 - s^2/h^2
};

struct HarmonicTable {
    EllipsoidalSystem sys;
    int n = 0;
    std::vector<LameHarmonic> harmonics; ///< classes K, L, M, N; ascending sep_const within a class
};

/// Separation-constant operator for one class. Its eigenvalues are the
/// separation constants; eigenvectors are the coefficients b_j.
inline TridiagonalMatrix class_matrix(const EllipsoidalSystem& sys, int n, LameClass cls) {
    if (n < 0) throw InvalidArgument("Lamé order must be nonnegative");
    const int size = class_size(n, cls);
    if (size <= 0)
        throw InvalidArgument(std::string("class ") + class_name(cls) + " has no harmonics of order " + std::to_string(n));

    // exponents of x = s^2 in the prefactor x^ea (x-h2)^eb (x-k2)^ec
    const double ea = 0.5 * class_power(n, cls);
    const double eb = has_h_factor(cls) ? 0.5 : 0.0;
    const double ec = has_k_factor(cls) ? 0.5 : 0.0;
    const double sum = ea + eb + ec;
    const double q = static_cast<double>(n) * (n + 1);
    const double hSq = sys.hSq();
    const double d = (sys.k() - sys.h()) * (sys.k() + sys.h());
    const double v1 = 8 * (ea * eb + ea * ec + eb * ec) + 4 * sum - q;
    const double v0 = -(sys.kSq() * (8 * ea * eb + 2 * ea + 2 * eb) + hSq * (8 * ea * ec + 2 * ea + 2 * ec));

    // operator A with A[t^j] = down(j) t^(j-1) + mid(j) t^j + up(j) t^(j+1); the
    // separation constant solves A b = -sep b
    auto down = [&](double j) { return j * d * (4 * j - 2 + 8 * eb); };
    auto mid = [&](double j) {
        return 4 * j * (j - 1) * (hSq - d) - (8 * ea + 2) * j * d + (8 * eb + 2) * j * (hSq - d) +
               (8 * ec + 2) * hSq * j + v1 * hSq + v0;
    };
    auto up = [&](double j) { return -hSq * (4 * j * (j - 1) + (8 * sum + 6) * j + v1); };

    TridiagonalMatrix m;
    m.diag.resize(size);
    m.upper.resize(size - 1);
    m.lower.resize(size - 1);
    for (int i = 0; i < size; ++i) m.diag[i] = -mid(i);
    for (int i = 0; i + 1 < size; ++i) {
        m.upper[i] = -down(i + 1);
        m.lower[i] = -up(i);
    }
    return m;
}

/// All 2n+1 harmonics of order n, coefficients scaled so the highest power of
/// s in the polynomial part has coefficient 1.
inline HarmonicTable solve_order(const EllipsoidalSystem& sys, int n) {
    if (n < 0 || n > max_supported_order)
        throw InvalidArgument("Lamé order " + std::to_string(n) + " outside supported range [0, " +
                              std::to_string(max_supported_order) + "]");
    HarmonicTable table{sys, n, {}};
    int p = 0;
    for (LameClass cls : all_classes) {
        const int size = class_size(n, cls);
        if (size == 0) continue;
        const auto matrix = class_matrix(sys, n, cls);
        std::vector<EigenPair> pairs;
        try {
            pairs = tridiagonal_eigenpairs(matrix);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string("eigen-solve failed for class ") + class_name(cls) + ", order " +
                                 std::to_string(n) + ": " + e.what());
        }
        const int m = size - 1;
        const double lead = std::pow(-sys.hSq(), m); // b_m giving a monic polynomial in s^2
        for (auto& pair : pairs) {
            const double top = pair.vector.back();
            if (top == 0.0 || !std::isfinite(top))
                throw NumericalError(std::string("degenerate eigenvector for class ") + class_name(cls) +
                                     ", order " + std::to_string(n));
            for (double& b : pair.vector) b *= lead / top;
            table.harmonics.push_back({sys, n, p++, cls, pair.value, std::move(pair.vector)});
        }
    }
    return table;
}

/// Process-wide memo of harmonic tables keyed by (a, b, c, n).
inline std::shared_ptr<const HarmonicTable> harmonic_table(const EllipsoidalSystem& sys, int n) {
    using Key = std::tuple<double, double, double, int>;
    static std::shared_mutex mutex;
    static std::map<Key, std::shared_ptr<const HarmonicTable>> cache;
    const Key key{sys.a(), sys.b(), sys.c(), n};
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto table = std::make_shared<const HarmonicTable>(solve_order(sys, n));
    std::unique_lock lock(mutex);
    return cache.try_emplace(key, std::move(table)).first->second;
}

namespace detail {

inline double t_of(const EllipsoidalSystem& sys, double s) {
    const double as = std::abs(s);
    return (sys.h() - as) * (sys.h() + as) / sys.hSq();
}

// P(t) and dP/dt by Horner
inline std::pair<double, double> poly_and_slope(const std::vector<double>& b, double t) {
    double p = 0.0, dp = 0.0;
    for (std::size_t j = b.size(); j-- > 0;) {
        dp = dp * t + p;
        p = p * t + b[j];
    }
    return {p, dp};
}

} // namespace detail

/// Polynomial part P(t(s)) alone, without the class prefactor.
inline double eval_polynomial(const LameHarmonic& harm, double s) {
    return detail::poly_and_slope(harm.coeffs, detail::t_of(harm.sys, s)).first;
}

/// Class prefactor s^alpha sqrt|s^2-h^2|^beta sqrt|s^2-k^2|^gamma (absolute-value branch).
inline double eval_prefactor(const LameHarmonic& harm, double s) {
    double f = class_power(harm.n, harm.cls) == 1 ? s : 1.0;
    const double as = std::abs(s);
    if (has_h_factor(harm.cls)) f *= std::sqrt(std::abs((as - harm.sys.h()) * (as + harm.sys.h())));
    if (has_k_factor(harm.cls)) f *= std::sqrt(std::abs((as - harm.sys.k()) * (as + harm.sys.k())));
    return f;
}

inline double eval_E(const LameHarmonic& harm, double s) { return eval_prefactor(harm, s) * eval_polynomial(harm, s); }

inline double eval_E_deriv(const LameHarmonic& harm, double s) {
    const auto& sys = harm.sys;
    const auto [poly, dpoly_dt] = detail::poly_and_slope(harm.coeffs, detail::t_of(sys, s));
    const double dpoly = dpoly_dt * (-2.0 * s / sys.hSq());

    const bool odd = class_power(harm.n, harm.cls) == 1;
    const double as = std::abs(s);
    double f = odd ? s : 1.0;
    double df = odd ? 1.0 : 0.0;
    auto times_root = [&](double c) {
        const double diff = (as - c) * (as + c);
        const double root = std::sqrt(std::abs(diff));
        if (root == 0.0)
            throw InvalidArgument("derivative of a Lamé class factor is unbounded at |s| = " + std::to_string(c));
        const double droot = (diff > 0 ? s : -s) / root;
        df = df * root + f * droot;
        f *= root;
    };
    if (has_h_factor(harm.cls)) times_root(sys.h());
    if (has_k_factor(harm.cls)) times_root(sys.k());
    return df * poly + f * dpoly;
}

/// E(s) / s^n for s > 0, evaluated from w = 1/s^2 so it stays finite as s -> inf.
inline double eval_E_scaled(const LameHarmonic& harm, double w) {
    const auto& b = harm.coeffs;
    const double tau = w - 1.0 / harm.sys.hSq();
    const std::size_t m = b.size() - 1;
    double acc = b[m];
    double wpow = 1.0;
    for (std::size_t j = m; j-- > 0;) {
        wpow *= w;
        acc = acc * tau + b[j] * wpow;
    }
    if (has_h_factor(harm.cls)) acc *= std::sqrt(std::abs(1.0 - harm.sys.hSq() * w));
    if (has_k_factor(harm.cls)) acc *= std::sqrt(std::abs(1.0 - harm.sys.kSq() * w));
    return acc;
}

struct ExteriorValue {
    double I = 0.0;       ///< I_n^p(|lambda|)
    double F = 0.0;       ///< (2n+1) E(lambda) I
    double dF = 0.0;      ///< dF/dlambda
    double E = 0.0;
    double dE = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

/// I_n^p(lambda) = int_lambda^inf ds / (E(s)^2 sqrt(s^2-k^2) sqrt(s^2-h^2)),
/// computed after s = lambda/u as lambda^-(2n+1) int_0^1 u^2n / (Ehat^2 ...) du.
inline quad::IntegrationResult integrate_I(const LameHarmonic& harm, double lambda, const quad::QuadOptions& opts = {}) {
    const double l = std::abs(lambda);
    if (!(l > harm.sys.k()))
        throw InvalidArgument("exterior Lamé functions need |lambda| > k (got " + std::to_string(lambda) + ")");
    const double hSq = harm.sys.hSq(), kSq = harm.sys.kSq();
    const int n = harm.n;
    auto integrand = [&](double u) {
        const double w = (u / l) * (u / l);
        const double e = eval_E_scaled(harm, w);
        return std::pow(u, 2 * n) / (e * e * std::sqrt((1.0 - hSq * w) * (1.0 - kSq * w)));
    };
    auto r = quad::integrate_adaptive(integrand, 0.0, 1.0, opts);
    const double scale = std::pow(l, -(2 * n + 1));
    r.value *= scale;
    r.error_estimate *= scale;
    return r;
}

inline double eval_I(const LameHarmonic& harm, double lambda, const quad::QuadOptions& opts = {}) {
    return integrate_I(harm, lambda, opts).value;
}

inline ExteriorValue eval_exterior(const LameHarmonic& harm, double lambda, const quad::QuadOptions& opts = {}) {
    const auto ir = integrate_I(harm, lambda, opts);
    ExteriorValue v;
    v.I = ir.value;
    v.evaluations = ir.evaluations;
    v.converged = ir.converged;
    v.E = eval_E(harm, lambda);
    v.dE = eval_E_deriv(harm, lambda);
    const double l = std::abs(lambda);
    const double root = std::sqrt((l - harm.sys.k()) * (l + harm.sys.k()) * (l - harm.sys.h()) * (l + harm.sys.h()));
    // dI/dlambda for lambda > 0; I depends on |lambda|
    const double dI = -std::copysign(1.0, lambda) / (v.E * v.E * root);
    const double twice = 2.0 * harm.n + 1.0;
    v.F = twice * v.E * v.I;
    v.dF = twice * (v.dE * v.I + v.E * dI);
    return v;
}

inline double eval_F(const LameHarmonic& harm, double lambda, const quad::QuadOptions& opts = {}) {
    return eval_exterior(harm, lambda, opts).F;
}

inline double eval_F_deriv(const LameHarmonic& harm, double lambda, const quad::QuadOptions& opts = {}) {
    return eval_exterior(harm, lambda, opts).dF;
}

/// Sign that turns the product of absolute-value class factors into the
/// signed Cartesian factors y (h-factor) and z (k-factor).
inline double solid_sign(LameClass cls, const EllipsoidalPoint& pt) {
    const double sl = sign_of(pt.lambda), sm = sign_of(pt.mu), sn = sign_of(pt.nu);
    double s = 1.0;
    if (has_h_factor(cls)) s *= sl * sn;
    if (has_k_factor(cls)) s *= sl * sm;
    return s;
}

/// Interior solid harmonic E(lambda) E(mu) E(nu).
inline double eval_solid_interior(const LameHarmonic& harm, const EllipsoidalPoint& pt) {
    return solid_sign(harm.cls, pt) * eval_E(harm, pt.lambda) * eval_E(harm, pt.mu) * eval_E(harm, pt.nu);
}

/// Exterior solid harmonic F(lambda) E(mu) E(nu); needs |lambda| > k.
inline double eval_solid_exterior(const LameHarmonic& harm, const EllipsoidalPoint& pt,
                                  const quad::QuadOptions& opts = {}) {
    return solid_sign(harm.cls, pt) * eval_F(harm, pt.lambda, opts) * eval_E(harm, pt.mu) * eval_E(harm, pt.nu);
}

} // namespace ellharm
