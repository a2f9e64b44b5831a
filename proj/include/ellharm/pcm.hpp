#pragma once

// Closed-form ellipsoidal solution of the mixed-dielectric Poisson problem:
// point charges inside an ellipsoidal cavity (permittivity eps_in) embedded in
// an infinite solvent (eps_out). Gaussian units, potentials q / (eps r).
//
//   inside:   Phi1 = sum_k q_k / (eps_in |r - r_k|) + sum B_n^p EE_n^p(r)
//   outside:  Phi2 = sum C_n^p FF_n^p(r)
//
// with EE = E(lambda)E(mu)E(nu), FF = F(lambda)E(mu)E(nu).

#include "ellharm/ellipsoid.hpp"
#include "ellharm/error.hpp"
#include "ellharm/lame.hpp"
#include "ellharm/normconst.hpp"
#include "ellharm/quad.hpp"
#include "ellharm/summation.hpp"
#include "ellharm/vec3.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace ellharm {

struct PointCharge {
    Vec3 position;
    double q = 0.0;
};

/// lambda(r) for a Cartesian point (unsigned).
inline double lambda_of(const EllipsoidalSystem& sys, Vec3 r) { return std::sqrt(confocal_roots(sys, r)[0]); }

class DielectricModel {
public:
    DielectricModel(EllipsoidalSystem sys, double eps_in, double eps_out, std::vector<PointCharge> charges)
        : sys_(sys), eps_in_(eps_in), eps_out_(eps_out), charges_(std::move(charges)) {
        if (!(eps_in > 0 && std::isfinite(eps_in))) throw InvalidArgument("eps_in must be positive");
        if (!(eps_out > 0 && std::isfinite(eps_out))) throw InvalidArgument("eps_out must be positive");
        for (std::size_t i = 0; i < charges_.size(); ++i) {
            const auto& c = charges_[i];
            if (!std::isfinite(c.q)) throw InvalidArgument("charge magnitude must be finite");
            if (!(lambda_of(sys_, c.position) < sys_.a()))
                throw InvalidArgument("charge " + std::to_string(i) + " is not strictly inside the cavity");
        }
    }

    const EllipsoidalSystem& sys() const { return sys_; }
    double eps_in() const { return eps_in_; }
    double eps_out() const { return eps_out_; }
    const std::vector<PointCharge>& charges() const { return charges_; }

private:
    EllipsoidalSystem sys_;
    double eps_in_, eps_out_;
    std::vector<PointCharge> charges_;
};

/// Per-order tables indexed [n][p].
using OrderTable = std::vector<std::vector<double>>;

/// Everything the expansion needs about one harmonic: gamma and values at the
/// reference surface lambda = a.
struct HarmonicData {
    LameHarmonic harm;
    NormResult norm;
    ExteriorValue at_a;
    std::size_t evaluations = 0;
};

using ExpansionBasis = std::vector<std::vector<HarmonicData>>;

inline std::vector<HarmonicData> basis_order(const HarmonicTable& table, const quad::QuadOptions& opts) {
    std::vector<HarmonicData> out;
    for (const auto& harm : table.harmonics) {
        HarmonicData d{harm, gamma(harm, opts), {}, 0};
        if (!(d.norm.gamma > 0))
            throw NumericalError("nonpositive normalization constant for (n=" + std::to_string(harm.n) +
                                 ", p=" + std::to_string(harm.p) + ")");
        d.at_a = eval_exterior(harm, table.sys.a(), opts);
        d.evaluations = d.norm.evaluations + d.at_a.evaluations;
        out.push_back(std::move(d));
    }
    return out;
}

inline ExpansionBasis build_basis(const EllipsoidalSystem& sys, int order_max, const quad::QuadOptions& opts = {}) {
    if (order_max < 0) throw InvalidArgument("truncation order must be nonnegative");
    ExpansionBasis basis;
    for (int n = 0; n <= order_max; ++n) basis.push_back(basis_order(*harmonic_table(sys, n), opts));
    return basis;
}

inline ExpansionBasis build_basis(const std::vector<HarmonicTable>& tables, const quad::QuadOptions& opts = {}) {
    ExpansionBasis basis;
    for (const auto& t : tables) basis.push_back(basis_order(t, opts));
    return basis;
}

/// G_n^p = sum_k q_k 4 pi / (2n+1) / gamma_n^p EE_n^p(r_k)
inline OrderTable coulomb_coeffs(const DielectricModel& model, const ExpansionBasis& basis) {
    std::vector<EllipsoidalPoint> pts;
    for (const auto& c : model.charges()) pts.push_back(cart_to_ellipsoidal(model.sys(), c.position));
    OrderTable g(basis.size());
    for (std::size_t n = 0; n < basis.size(); ++n) {
        for (const auto& d : basis[n]) {
            CompensatedSum acc;
            for (std::size_t k = 0; k < pts.size(); ++k)
                acc += model.charges()[k].q * eval_solid_interior(d.harm, pts[k]);
            g[n].push_back(4.0 * std::numbers::pi / (2.0 * static_cast<double>(n) + 1.0) / d.norm.gamma * acc.value());
        }
    }
    return g;
}

inline OrderTable coulomb_coeffs(const DielectricModel& model, int order_max, const quad::QuadOptions& opts = {}) {
    return coulomb_coeffs(model, build_basis(model.sys(), order_max, opts));
}

/// B_n^p = (e1 - e2)/(e1 e2) F(a)/E(a) (1 - (e1/e2) Etilde(a)/Ftilde(a))^-1 G_n^p
inline OrderTable reaction_coeffs(const DielectricModel& model, const ExpansionBasis& basis, const OrderTable& g) {
    const double e1 = model.eps_in(), e2 = model.eps_out();
    OrderTable b(basis.size());
    for (std::size_t n = 0; n < basis.size(); ++n) {
        for (std::size_t p = 0; p < basis[n].size(); ++p) {
            const auto& v = basis[n][p].at_a;
            if (v.E == 0.0 || v.F == 0.0 || v.dF == 0.0)
                throw NumericalError("degenerate surface values for (n=" + std::to_string(n) +
                                     ", p=" + std::to_string(p) + ")");
            const double e_tilde = v.dE / v.E;
            const double f_tilde = v.dF / v.F;
            const double denom = 1.0 - (e1 / e2) * e_tilde / f_tilde;
            if (denom == 0.0 || !std::isfinite(denom))
                throw NumericalError("degenerate reaction denominator for (n=" + std::to_string(n) +
                                     ", p=" + std::to_string(p) + ")");
            b[n].push_back((e1 - e2) / (e1 * e2) * (v.F / v.E) / denom * g[n][p]);
        }
    }
    return b;
}

/// C_n^p = G_n^p / e1 + B_n^p E(a)/F(a), continuity of the potential term by term.
inline OrderTable exterior_coeffs(const DielectricModel& model, const ExpansionBasis& basis, const OrderTable& g,
                                  const OrderTable& b) {
    OrderTable c(basis.size());
    for (std::size_t n = 0; n < basis.size(); ++n)
        for (std::size_t p = 0; p < basis[n].size(); ++p) {
            const auto& v = basis[n][p].at_a;
            c[n].push_back(g[n][p] / model.eps_in() + b[n][p] * v.E / v.F);
        }
    return c;
}

/// Coefficient tables for one model up to a truncation order, plus what is
/// needed to evaluate potentials from them.
struct ExpansionSet {
    DielectricModel model;
    quad::QuadOptions opts;
    int order_max = 0;
    ExpansionBasis basis;
    OrderTable G, B, C, gamma;
    std::vector<EllipsoidalPoint> charge_points;
    std::vector<std::size_t> evaluations; ///< quadrature evaluations spent on order n

    std::size_t evaluations_through(int order) const {
        std::size_t s = 0;
        for (int n = 0; n <= order && n <= order_max; ++n) s += evaluations[n];
        return s;
    }
};

inline ExpansionSet expand(const DielectricModel& model, ExpansionBasis basis, const quad::QuadOptions& opts = {}) {
    ExpansionSet set{model, opts, static_cast<int>(basis.size()) - 1, std::move(basis), {}, {}, {}, {}, {}, {}};
    set.G = coulomb_coeffs(model, set.basis);
    set.B = reaction_coeffs(model, set.basis, set.G);
    set.C = exterior_coeffs(model, set.basis, set.G, set.B);
    for (const auto& order : set.basis) {
        std::vector<double> g;
        std::size_t ev = 0;
        for (const auto& d : order) {
            g.push_back(d.norm.gamma);
            ev += d.evaluations;
        }
        set.gamma.push_back(std::move(g));
        set.evaluations.push_back(ev);
    }
    for (const auto& c : model.charges()) set.charge_points.push_back(cart_to_ellipsoidal(model.sys(), c.position));
    return set;
}

inline ExpansionSet expand(const DielectricModel& model, int order_max, const quad::QuadOptions& opts = {}) {
    return expand(model, build_basis(model.sys(), order_max, opts), opts);
}

namespace detail {
inline int clamp_order(const ExpansionSet& set, int order) {
    if (order < 0) return set.order_max;
    if (order > set.order_max)
        throw InvalidArgument("requested order " + std::to_string(order) + " exceeds expansion order " +
                              std::to_string(set.order_max));
    return order;
}
} // namespace detail

/// psi_reac(r) = sum B EE(r), truncated at `order` (-1 = all).
inline double reaction_potential(const ExpansionSet& set, const EllipsoidalPoint& pt, int order = -1) {
    order = detail::clamp_order(set, order);
    CompensatedSum acc;
    for (int n = 0; n <= order; ++n)
        for (std::size_t p = 0; p < set.basis[n].size(); ++p)
            acc += set.B[n][p] * eval_solid_interior(set.basis[n][p].harm, pt);
    return acc.value();
}

inline double reaction_potential(const ExpansionSet& set, Vec3 r, int order = -1) {
    return reaction_potential(set, cart_to_ellipsoidal(set.model.sys(), r), order);
}

/// Coulomb potential from its ellipsoidal expansion sum (G/eps_in) FF(r);
/// converges where lambda(r) exceeds lambda of every charge.
inline double coulomb_potential_expansion(const ExpansionSet& set, Vec3 r, int order = -1) {
    order = detail::clamp_order(set, order);
    const auto pt = cart_to_ellipsoidal(set.model.sys(), r);
    CompensatedSum acc;
    for (int n = 0; n <= order; ++n)
        for (std::size_t p = 0; p < set.basis[n].size(); ++p) {
            const auto& harm = set.basis[n][p].harm;
            const double f = eval_exterior(harm, pt.lambda, set.opts).F;
            acc += set.G[n][p] / set.model.eps_in() * solid_sign(harm.cls, pt) * f * eval_E(harm, pt.mu) *
                   eval_E(harm, pt.nu);
        }
    return acc.value();
}

/// Direct sum q_k / (eps |r - r_k|).
inline double coulomb_potential_direct(const std::vector<PointCharge>& charges, Vec3 r, double eps = 1.0) {
    CompensatedSum acc;
    for (const auto& c : charges) acc += c.q / distance(r, c.position);
    return acc.value() / eps;
}

/// How the Coulomb part of the interior potential is evaluated. The direct
/// sum is exact everywhere; the expansion form converges only for lambda(r)
/// above every charge and is the form that matches the exterior expansion
/// term by term on the reference surface.
enum class CoulombForm { direct, expansion };

inline double interior_potential(const ExpansionSet& set, Vec3 r, int order = -1,
                                 CoulombForm form = CoulombForm::direct) {
    const double coul = form == CoulombForm::direct ? coulomb_potential_direct(set.model.charges(), r, set.model.eps_in())
                                                    : coulomb_potential_expansion(set, r, order);
    return coul + reaction_potential(set, r, order);
}

inline double exterior_potential(const ExpansionSet& set, Vec3 r, int order = -1) {
    order = detail::clamp_order(set, order);
    const auto pt = cart_to_ellipsoidal(set.model.sys(), r);
    CompensatedSum acc;
    for (int n = 0; n <= order; ++n)
        for (std::size_t p = 0; p < set.basis[n].size(); ++p) {
            const auto& harm = set.basis[n][p].harm;
            const double f = eval_exterior(harm, pt.lambda, set.opts).F;
            acc += set.C[n][p] * solid_sign(harm.cls, pt) * f * eval_E(harm, pt.mu) * eval_E(harm, pt.nu);
        }
    return acc.value();
}

/// Normal (lambda) derivatives of both sides at a point on the reference
/// surface: eps_in dPhi1/dlambda (direct Coulomb gradient plus reaction
/// expansion) and eps_out dPhi2/dlambda.
struct SurfaceFlux {
    double inside = 0.0;
    double outside = 0.0;
};

inline SurfaceFlux surface_flux(const ExpansionSet& set, Vec3 r, int order = -1,
                                CoulombForm form = CoulombForm::direct) {
    order = detail::clamp_order(set, order);
    const auto& sys = set.model.sys();
    const auto pt = cart_to_ellipsoidal(sys, r);
    const double l = pt.lambda;
    const Vec3 dr{r.x / l, r.y * l / ((l - sys.h()) * (l + sys.h())), r.z * l / ((l - sys.k()) * (l + sys.k()))};

    CompensatedSum coul;
    for (const auto& c : set.model.charges()) {
        const Vec3 d = r - c.position;
        const double dist = norm(d);
        coul += -c.q * dot(d, dr) / (dist * dist * dist);
    }
    CompensatedSum reac, ext, coul_exp;
    for (int n = 0; n <= order; ++n)
        for (std::size_t p = 0; p < set.basis[n].size(); ++p) {
            const auto& harm = set.basis[n][p].harm;
            const double angular = solid_sign(harm.cls, pt) * eval_E(harm, pt.mu) * eval_E(harm, pt.nu);
            const auto v = eval_exterior(harm, l, set.opts);
            reac += set.B[n][p] * v.dE * angular;
            ext += set.C[n][p] * v.dF * angular;
            coul_exp += set.G[n][p] * v.dF * angular;
        }
    const double inside = form == CoulombForm::direct ? coul.value() : coul_exp.value();
    return {inside + set.model.eps_in() * reac.value(), set.model.eps_out() * ext.value()};
}

/// Solvation free energy 1/2 sum_k q_k psi_reac(r_k), truncated at `order`.
inline double solvation_energy(const ExpansionSet& set, int order = -1) {
    order = detail::clamp_order(set, order);
    CompensatedSum acc;
    for (std::size_t k = 0; k < set.charge_points.size(); ++k)
        acc += set.model.charges()[k].q * reaction_potential(set, set.charge_points[k], order);
    return 0.5 * acc.value();
}

inline double solvation_energy(const DielectricModel& model, int order_max, const quad::QuadOptions& opts = {}) {
    return solvation_energy(expand(model, order_max, opts));
}

/// Born ion: q^2 / (2R) (1/eps_out - 1/eps_in).
inline double born_energy(double q, double radius, double eps_in, double eps_out) {
    if (!(radius > 0)) throw InvalidArgument("Born radius must be positive");
    return q * q / (2.0 * radius) * (1.0 / eps_out - 1.0 / eps_in);
}

/// Real spherical multipole expansion of sum_k q_k / |r - r_k| about `center`,
/// built from Schmidt semi-normalized associated Legendre functions.
class SphericalMultipole {
public:
    SphericalMultipole(const std::vector<PointCharge>& charges, Vec3 center, int order_max)
        : center_(center), order_max_(order_max) {
        if (order_max < 0) throw InvalidArgument("truncation order must be nonnegative");
        const std::size_t count = static_cast<std::size_t>(order_max + 1) * (order_max + 1);
        cos_.assign(count, 0.0);
        sin_.assign(count, 0.0);
        std::vector<double> leg(count);
        for (const auto& c : charges) {
            const Vec3 d = c.position - center_;
            const double r = norm(d);
            brillouin_ = std::max(brillouin_, r);
            const auto [ct, st, phi] = angles(d);
            legendre(ct, st, leg);
            double rn = 1.0;
            for (int n = 0; n <= order_max_; ++n) {
                for (int m = 0; m <= n; ++m) {
                    cos_[idx(n, m)] += c.q * rn * leg[idx(n, m)] * std::cos(m * phi);
                    sin_[idx(n, m)] += c.q * rn * leg[idx(n, m)] * std::sin(m * phi);
                }
                rn *= r;
            }
        }
    }

    /// Brillouin radius: the smallest center-centered sphere holding every charge.
    double brillouin_radius() const { return brillouin_; }
    int order_max() const { return order_max_; }

    double operator()(Vec3 point, int order = -1) const {
        if (order < 0) order = order_max_;
        if (order > order_max_) throw InvalidArgument("requested order exceeds multipole order");
        const Vec3 d = point - center_;
        const double r = norm(d);
        const auto [ct, st, phi] = angles(d);
        std::vector<double> leg(static_cast<std::size_t>(order_max_ + 1) * (order_max_ + 1));
        legendre(ct, st, leg);
        CompensatedSum acc;
        double inv = 1.0 / r;
        for (int n = 0; n <= order; ++n) {
            double term = 0.0;
            for (int m = 0; m <= n; ++m)
                term += leg[idx(n, m)] * (cos_[idx(n, m)] * std::cos(m * phi) + sin_[idx(n, m)] * std::sin(m * phi));
            acc += term * inv;
            inv /= r;
        }
        return acc.value();
    }

private:
    std::size_t idx(int n, int m) const { return static_cast<std::size_t>(n) * (order_max_ + 1) + m; }

    static std::tuple<double, double, double> angles(Vec3 d) {
        const double r = norm(d);
        if (r == 0.0) return {1.0, 0.0, 0.0};
        const double rho = std::hypot(d.x, d.y);
        return {d.z / r, rho / r, std::atan2(d.y, d.x)};
    }

    // Schmidt semi-normalized P_n^m(cos theta), so that
    // P_n(cos gamma) = sum_m P_n^m(x) P_n^m(x') cos m(phi - phi')
    void legendre(double x, double s, std::vector<double>& out) const {
        const int N = order_max_;
        std::fill(out.begin(), out.end(), 0.0);
        double pmm = 1.0;
        for (int m = 0; m <= N; ++m) {
            if (m == 1) pmm = s;
            else if (m > 1) pmm *= std::sqrt((2.0 * m - 1.0) / (2.0 * m)) * s;
            out[idx(m, m)] = pmm;
            if (m + 1 <= N) out[idx(m + 1, m)] = std::sqrt(2.0 * m + 1.0) * x * pmm;
            for (int n = m + 2; n <= N; ++n) {
                const double a = (2.0 * n - 1.0) * x * out[idx(n - 1, m)];
                const double b = std::sqrt((n - 1.0) * (n - 1.0) - m * m) * out[idx(n - 2, m)];
                out[idx(n, m)] = (a - b) / std::sqrt(static_cast<double>(n) * n - static_cast<double>(m) * m);
            }
        }
    }

    Vec3 center_;
    int order_max_;
    double brillouin_ = 0.0;
    std::vector<double> cos_, sin_;
};

inline SphericalMultipole spherical_coulomb_expansion(const std::vector<PointCharge>& charges, Vec3 center,
                                                      int order_max) {
    return {charges, center, order_max};
}

} // namespace ellharm
