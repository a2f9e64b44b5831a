#pragma once

// Change-of-variable quadrature on finite intervals: the trapezoid rule applied
// after mapping (-1,1) onto the real line with a tanh-sinh, tanh or erf
// transform. Rules are nested across levels (step 2^-j) so an adaptive sweep
// only evaluates the integrand at newly introduced abscissae.

#include "ellharm/error.hpp"
#include "ellharm/summation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <vector>

namespace ellharm::quad {

enum class Transform { tanh_sinh, tanh, erf };

inline constexpr Transform all_transforms[] = {Transform::tanh_sinh, Transform::tanh, Transform::erf};

inline std::string_view to_string(Transform t) {
    switch (t) {
    case Transform::tanh_sinh: return "tanh-sinh";
    case Transform::tanh: return "tanh";
    case Transform::erf: return "erf";
    }
    return "?";
}

inline Transform parse_transform(std::string_view name) {
    if (name == "tanh-sinh" || name == "tanh_sinh" || name == "ts") return Transform::tanh_sinh;
    if (name == "tanh") return Transform::tanh;
    if (name == "erf") return Transform::erf;
    throw InvalidArgument("unknown quadrature scheme '" + std::string(name) + "'");
}

/// Value of the transform at parameter t. `dist` is 1 - |x| computed without
/// cancellation, `density` is psi'(t) (the weight before the step factor).
struct TransformPoint {
    double x;
    double dist;
    double density;
};

inline TransformPoint transform_point(Transform kind, double t) {
    constexpr double half_pi = std::numbers::pi / 2;
    switch (kind) {
    case Transform::tanh_sinh: {
        const double u = half_pi * std::sinh(t);
        const double au = std::abs(u);
        const double e = std::exp(-au);
        // cosh(u) = (1 + e^-2|u|) / (2 e^-|u|)
        const double sech = 2.0 * e / (1.0 + e * e);
        return {std::tanh(u), 2.0 * e * e / (1.0 + e * e), half_pi * std::cosh(t) * sech * sech};
    }
    case Transform::tanh: {
        const double e = std::exp(-std::abs(t));
        const double sech = 2.0 * e / (1.0 + e * e);
        return {std::tanh(t), 2.0 * e * e / (1.0 + e * e), sech * sech};
    }
    case Transform::erf:
        return {std::erf(t), std::erfc(std::abs(t)),
                2.0 / std::sqrt(std::numbers::pi) * std::exp(-t * t)};
    }
    return {0.0, 1.0, 0.0};
}

struct Node {
    std::int64_t index; ///< t = index * step
    int born;           ///< coarsest level whose node set contains this abscissa
    double x;
    double dist;        ///< 1 - |x|
    double density;     ///< psi'(t)
};

/// Precomputed abscissa/weight table for one transform at one level.
///
/// The node set is the union over levels i <= level of the abscissae whose
/// level-i weights exceed 10^-2p, plus the first one that does not. This keeps
/// the tables exactly nested; `cutoff` is this level's own truncation index N.
struct QuadratureRule {
    Transform transform{};
    int level = 0;
    int digits = 15;
    double step = 1.0;
    std::int64_t cutoff = 0;
    std::vector<Node> nodes; // ascending in t (and hence x)

    double weight(const Node& n) const { return step * n.density; }
    std::size_t size() const { return nodes.size(); }
};

inline constexpr std::size_t default_max_rule_nodes = std::size_t{1} << 22;

inline double weight_cutoff(int digits) { return std::pow(10.0, -2.0 * digits); }

/// Smallest k >= 0 with step * psi'(k * step) <= 10^-2p.
inline std::int64_t cutoff_index(Transform kind, int level, int digits, std::size_t max_nodes) {
    const double step = std::ldexp(1.0, -level);
    const double eps = weight_cutoff(digits);
    for (std::int64_t k = 0;; ++k) {
        if (static_cast<std::size_t>(2 * k + 1) > max_nodes)
            throw QuadratureError("quadrature rule for level " + std::to_string(level) +
                                  " exceeds the node ceiling of " + std::to_string(max_nodes));
        if (step * transform_point(kind, static_cast<double>(k) * step).density <= eps) return k;
    }
}

inline QuadratureRule build_rule(Transform kind, int level, int digits,
                                 std::size_t max_nodes = default_max_rule_nodes) {
    if (level < 0) throw InvalidArgument("quadrature level must be nonnegative");
    if (digits < 1) throw InvalidArgument("quadrature digits must be positive");
    if (level > 40) throw QuadratureError("quadrature level " + std::to_string(level) + " is too large");

    // reach[i] is level i's own extent expressed in finest-level index units
    std::vector<std::int64_t> reach(level + 1);
    std::int64_t extent = 0;
    for (int i = 0; i <= level; ++i) {
        reach[i] = cutoff_index(kind, i, digits, max_nodes) << (level - i);
        extent = std::max(extent, reach[i]);
    }
    if (static_cast<std::size_t>(2 * extent + 1) > max_nodes)
        throw QuadratureError("quadrature rule for level " + std::to_string(level) +
                              " exceeds the node ceiling of " + std::to_string(max_nodes));

    QuadratureRule rule;
    rule.transform = kind;
    rule.level = level;
    rule.digits = digits;
    rule.step = std::ldexp(1.0, -level);
    rule.cutoff = reach[level];

    std::vector<Node> positive;
    positive.reserve(static_cast<std::size_t>(extent) + 1);
    for (std::int64_t m = 0; m <= extent; ++m) {
        int coarsest = 0;
        if (m != 0) {
            int tz = 0;
            while (tz < level && ((m >> tz) & 1) == 0) ++tz;
            coarsest = level - tz;
        }
        int born = -1;
        for (int i = coarsest; i <= level; ++i) {
            if (m <= reach[i]) {
                born = i;
                break;
            }
        }
        if (born < 0) continue;
        const double t = static_cast<double>(m) * rule.step;
        const auto p = transform_point(kind, t);
        positive.push_back({m, born, p.x, p.dist, p.density});
    }

    rule.nodes.reserve(2 * positive.size() - 1);
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
        if (it->index == 0) continue;
        rule.nodes.push_back({-it->index, it->born, -it->x, it->dist, it->density});
    }
    for (const auto& n : positive) rule.nodes.push_back(n);
    return rule;
}

/// Process-wide cache of immutable rules, keyed by (transform, level, digits).
inline std::shared_ptr<const QuadratureRule> cached_rule(Transform kind, int level, int digits) {
    using Key = std::tuple<int, int, int>;
    static std::shared_mutex mutex;
    static std::map<Key, std::shared_ptr<const QuadratureRule>> cache;
    const Key key{static_cast<int>(kind), level, digits};
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const QuadratureRule>(build_rule(kind, level, digits));
    std::unique_lock lock(mutex);
    return cache.try_emplace(key, std::move(rule)).first->second;
}

/// Point handed to integrands: the abscissa and its distances to both
/// interval ends, the latter accurate even where x rounds onto an endpoint.
struct Abscissa {
    double x;
    double to_lo;
    double to_hi;
};

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    int levels_used = 0;
    bool converged = true;
};

struct QuadOptions {
    Transform transform = Transform::tanh_sinh;
    double tolerance = 1e-13; ///< relative to |value|
    int max_level = 12;
    int digits = 15;
};

namespace detail {

inline Abscissa map_node(const Node& n, double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    if (std::abs(n.x) <= 0.5) {
        const double mid = lo + half;
        return {mid + half * n.x, half * (1.0 + n.x), half * (1.0 - n.x)};
    }
    const double near = half * n.dist;
    const double far = half * (2.0 - n.dist);
    if (n.x > 0) return {hi - near, far, near};
    return {lo + near, near, far};
}

template <class F>
double call(F& f, const Abscissa& a) {
    if constexpr (std::is_invocable_v<F&, const Abscissa&>)
        return static_cast<double>(f(a));
    else
        return static_cast<double>(f(a.x));
}

template <class F>
double checked_call(F& f, const Abscissa& a) {
    const double v = call(f, a);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "integrand is not finite (" << v << ") at abscissa " << a.x
           << " (distance to ends " << a.to_lo << ", " << a.to_hi << ")";
        throw QuadratureError(os.str(), a.x);
    }
    return v;
}

inline void check_interval(double lo, double hi) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
        throw InvalidArgument("integration interval must be finite with lo < hi");
}

} // namespace detail

/// Truncated trapezoid sum of a single rule; no error estimate.
template <class F>
IntegrationResult integrate_fixed(F&& f, const QuadratureRule& rule, double lo, double hi) {
    detail::check_interval(lo, hi);
    CompensatedSum acc;
    for (const auto& n : rule.nodes) acc += detail::checked_call(f, detail::map_node(n, lo, hi)) * n.density;
    IntegrationResult r;
    r.value = (0.5 * (hi - lo) * rule.step) * acc.value();
    r.error_estimate = 0.0;
    r.evaluations = rule.nodes.size();
    r.levels_used = 1;
    return r;
}

/// Error estimate from the last three level sums (prev2 = S_{j-2},
/// prev = S_{j-1}, curr = S_j).
///
/// Bailey's digit-doubling rule, evaluated on relative differences, is
/// floored by the geometric extrapolation d1^2/d0 of the last two level
/// differences and capped at the last difference |d1|.
inline double estimate_error(double prev, double curr, std::optional<double> prev2 = std::nullopt) {
    const double d1 = std::abs(curr - prev);
    if (d1 == 0.0) return 0.0;
    if (!prev2 || !std::isfinite(*prev2)) return d1;
    const double d0 = std::abs(prev - *prev2);
    const double scale = std::abs(curr);
    if (d0 == 0.0 || scale == 0.0) return d1;

    const double l1 = std::log10(d1 / scale);
    const double l2 = std::log10(std::abs(curr - *prev2) / scale);
    const double l3 = std::log10(std::numeric_limits<double>::epsilon());
    double bailey = d1;
    if (std::isfinite(l2) && l2 < 0.0) {
        const double e = std::min(0.0, std::max({l1 * l1 / l2, 2.0 * l1, l3}));
        bailey = std::pow(10.0, e) * scale;
    }
    const double geometric = d1 * d1 / d0;
    return std::min(d1, std::max(bailey, geometric));
}

/// Adaptive nested integration: level j = 0, 1, ... halves the step and only
/// evaluates f at the abscissae new to that level. The level sum is always
/// formed exactly as `integrate_fixed` would form it, so the final value is
/// bitwise identical to the fixed rule at `levels_used - 1`.
template <class F>
IntegrationResult integrate_adaptive(F&& f, double lo, double hi, const QuadOptions& opts = {}) {
    detail::check_interval(lo, hi);
    if (!(opts.tolerance > 0)) throw InvalidArgument("tolerance must be positive");
    if (opts.max_level < 0) throw InvalidArgument("max_level must be nonnegative");
    const auto rule = cached_rule(opts.transform, opts.max_level, opts.digits);
    const auto& nodes = rule->nodes;

    std::vector<double> values(nodes.size(), 0.0);
    IntegrationResult r;
    r.converged = false;
    std::vector<double> sums;
    const double half = 0.5 * (hi - lo);
    for (int j = 0; j <= opts.max_level; ++j) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].born != j) continue;
            values[i] = detail::checked_call(f, detail::map_node(nodes[i], lo, hi));
            ++r.evaluations;
        }
        CompensatedSum acc;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].born <= j) acc += values[i] * nodes[i].density;
        sums.push_back((half * std::ldexp(1.0, -j)) * acc.value());

        r.value = sums.back();
        r.levels_used = j + 1;
        if (j == 0) {
            r.error_estimate = std::abs(r.value);
            continue;
        }
        const auto prev2 = j >= 2 ? std::optional<double>(sums[j - 2]) : std::nullopt;
        r.error_estimate = estimate_error(sums[j - 1], sums[j], prev2);
        if (r.error_estimate == 0.0 || r.error_estimate <= opts.tolerance * std::abs(r.value)) {
            r.converged = true;
            break;
        }
    }
    return r;
}

} // namespace ellharm::quad
