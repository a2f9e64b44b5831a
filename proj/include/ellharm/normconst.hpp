#pragma once

// Normalization constants gamma_n^p = 8 (I1 I2 - I3 I4) with
//
//   I1 = int_0^h E(nu)^2 / (sqrt(h^2-nu^2) sqrt(k^2-nu^2)) dnu,     I3 = same with nu^2
//   I2 = int_h^k mu^2 E(mu)^2 / (sqrt(mu^2-h^2) sqrt(k^2-mu^2)) dmu, I4 = same without mu^2
//
// I1, I3 are singular at nu = h and I2, I4 at both ends; the integrands take
// the quadrature's endpoint distances so those factors are formed without
// cancellation.

#include "ellharm/error.hpp"
#include "ellharm/lame.hpp"
#include "ellharm/quad.hpp"
#include "ellharm/summation.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <string>

namespace ellharm {

enum class Weighting { plain, squared };

using Integrand = std::function<double(const quad::Abscissa&)>;

/// Integrand of I1 (plain) or I3 (squared) on (0, h).
inline Integrand integrand_nu(const LameHarmonic& harm, Weighting kind) {
    return [&harm, kind](const quad::Abscissa& a) {
        const auto& sys = harm.sys;
        const double nu = a.x;
        const double e = eval_E(harm, nu);
        const double h_nu = a.to_hi * (sys.h() + nu); // h^2 - nu^2
        const double k_nu = (sys.k() - nu) * (sys.k() + nu);
        const double v = e * e / std::sqrt(h_nu * k_nu);
        return kind == Weighting::squared ? nu * nu * v : v;
    };
}

/// Integrand of I2 (squared) or I4 (plain) on (h, k).
inline Integrand integrand_mu(const LameHarmonic& harm, Weighting kind) {
    return [&harm, kind](const quad::Abscissa& a) {
        const auto& sys = harm.sys;
        const double mu = a.x;
        const double e = eval_E(harm, mu);
        const double mu_h = a.to_lo * (mu + sys.h()); // mu^2 - h^2
        const double k_mu = a.to_hi * (sys.k() + mu); // k^2 - mu^2
        const double v = e * e / std::sqrt(mu_h * k_mu);
        return kind == Weighting::squared ? mu * mu * v : v;
    };
}

struct NormResult {
    double gamma = 0.0;
    std::array<double, 4> parts{}; ///< I1, I2, I3, I4
    std::size_t evaluations = 0;
    quad::Transform scheme = quad::Transform::tanh_sinh;
    bool converged = true;
};

inline double assemble_gamma(const std::array<double, 4>& parts) {
    return 8.0 * (parts[0] * parts[1] - parts[2] * parts[3]);
}

/// gamma_n^p by adaptive quadrature of the four one-dimensional parts.
inline NormResult gamma(const LameHarmonic& harm, const quad::QuadOptions& opts) {
    const auto& sys = harm.sys;
    struct Part {
        const char* name;
        Integrand f;
        double lo, hi;
    };
    const std::array<Part, 4> parts{{
        {"I1", integrand_nu(harm, Weighting::plain), 0.0, sys.h()},
        {"I2", integrand_mu(harm, Weighting::squared), sys.h(), sys.k()},
        {"I3", integrand_nu(harm, Weighting::squared), 0.0, sys.h()},
        {"I4", integrand_mu(harm, Weighting::plain), sys.h(), sys.k()},
    }};
    NormResult out;
    out.scheme = opts.transform;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        quad::IntegrationResult r;
        try {
            r = quad::integrate_adaptive(parts[i].f, parts[i].lo, parts[i].hi, opts);
        } catch (const QuadratureError& e) {
            throw QuadratureError(std::string("normalization part ") + parts[i].name + " of (n=" +
                                      std::to_string(harm.n) + ", p=" + std::to_string(harm.p) + "): " + e.what(),
                                  e.abscissa());
        }
        out.parts[i] = r.value;
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
    }
    out.gamma = assemble_gamma(out.parts);
    return out;
}

inline NormResult gamma(const LameHarmonic& harm, quad::Transform scheme, double tol) {
    quad::QuadOptions opts;
    opts.transform = scheme;
    opts.tolerance = tol;
    return gamma(harm, opts);
}

/// gamma_n^p from the four parts, each a fixed rule at one level (no adaptivity).
inline NormResult gamma_fixed(const LameHarmonic& harm, const quad::QuadratureRule& rule) {
    const auto& sys = harm.sys;
    NormResult out;
    out.scheme = rule.transform;
    const auto i1 = quad::integrate_fixed(integrand_nu(harm, Weighting::plain), rule, 0.0, sys.h());
    const auto i2 = quad::integrate_fixed(integrand_mu(harm, Weighting::squared), rule, sys.h(), sys.k());
    const auto i3 = quad::integrate_fixed(integrand_nu(harm, Weighting::squared), rule, 0.0, sys.h());
    const auto i4 = quad::integrate_fixed(integrand_mu(harm, Weighting::plain), rule, sys.h(), sys.k());
    out.parts = {i1.value, i2.value, i3.value, i4.value};
    out.evaluations = i1.evaluations + i2.evaluations + i3.evaluations + i4.evaluations;
    out.gamma = assemble_gamma(out.parts);
    return out;
}

/// Direct tensor-product tanh-sinh evaluation of the surface integral
///
///   8 int_{nu} int_{h}^{k} (E(mu)E(nu))^2 (mu^2-nu^2) / (sqrt((mu^2-h^2)(k^2-mu^2)) sqrt((h^2-nu^2)(k^2-nu^2)))
///
/// over nu in (0, h), or (-h, 0) when `negative_nu` is set. Used to
/// cross-check the four-integral decomposition; the double sum never
/// factorizes into products of one-dimensional sums.
inline double gamma_oracle_2d(const LameHarmonic& harm, int level = 7, bool negative_nu = false) {
    if (harm.n > 8) throw InvalidArgument("2-D normalization oracle is limited to n <= 8");
    const auto& sys = harm.sys;
    const auto rule = quad::build_rule(quad::Transform::tanh_sinh, level, 15);
    const double h = sys.h(), k = sys.k();

    struct Sample {
        double s, e2, w;
    };
    std::vector<Sample> mus, nus;
    for (const auto& node : rule.nodes) {
        const auto a = quad::detail::map_node(node, h, k);
        const double e = eval_E(harm, a.x);
        const double root = std::sqrt(a.to_lo * (a.x + h) * a.to_hi * (k + a.x));
        mus.push_back({a.x, e * e / root, rule.weight(node) * 0.5 * (k - h)});
    }
    const double nlo = negative_nu ? -h : 0.0, nhi = negative_nu ? 0.0 : h;
    for (const auto& node : rule.nodes) {
        const auto a = quad::detail::map_node(node, nlo, nhi);
        const double e = eval_E(harm, a.x);
        const double to_edge = negative_nu ? a.to_lo : a.to_hi; // h - |nu|
        const double root = std::sqrt(to_edge * (h + std::abs(a.x)) * (k - a.x) * (k + a.x));
        nus.push_back({a.x, e * e / root, rule.weight(node) * 0.5 * h});
    }
    CompensatedSum acc;
    for (const auto& m : mus) {
        CompensatedSum row;
        for (const auto& n : nus) row += n.w * n.e2 * (m.s - n.s) * (m.s + n.s);
        acc += m.w * m.e2 * row.value();
    }
    return 8.0 * acc.value();
}

} // namespace ellharm
