#pragma once

// Experiment drivers shared by the command-line tool and the test suites.
// Each returns plain rows; the write_* functions emit CSV with a header row,
// 17 significant digits and LF line endings.
//
// Work is reported as integrand evaluation counts.

#include "ellharm/config.hpp"
#include "ellharm/ellipsoid.hpp"
#include "ellharm/lame.hpp"
#include "ellharm/normconst.hpp"
#include "ellharm/pcm.hpp"
#include "ellharm/quad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace ellharm::experiments {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) { line(header); }

    template <class... Ts>
    void row(const Ts&... fields) {
        std::vector<std::string> cells{cell(fields)...};
        line(cells);
    }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(std::string_view s) { return std::string(s); }
    static std::string cell(const char* s) { return s; }
    template <class T>
        requires std::is_integral_v<T>
    static std::string cell(T v) {
        return std::to_string(v);
    }

    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << '\n';
    }

    std::ostream& os_;
};

// ---- gamma ------------------------------------------------------------------

struct GammaRow {
    int n, p;
    double gamma;
    std::size_t evaluations;
};

inline std::vector<GammaRow> run_gamma(const EllipsoidalSystem& sys, int n, const quad::QuadOptions& opts) {
    std::vector<GammaRow> rows;
    for (const auto& harm : harmonic_table(sys, n)->harmonics) {
        const auto r = gamma(harm, opts);
        rows.push_back({n, harm.p, r.gamma, r.evaluations});
    }
    return rows;
}

inline void write_gamma_csv(const std::vector<GammaRow>& rows, std::ostream& os) {
    CsvWriter w(os, {"n", "p", "gamma", "evaluations"});
    for (const auto& r : rows) w.row(r.n, r.p, r.gamma, r.evaluations);
}

// ---- quad-compare -----------------------------------------------------------

struct QuadCompareRow {
    quad::Transform scheme;
    int level;
    std::size_t evaluations;
    double gamma;
    double abs_err;
    double rel_err;
};

inline constexpr int reference_level = 12;

/// gamma_n^p from fixed rules of each transform at each level, against the
/// level-12 tanh-sinh value.
inline std::vector<QuadCompareRow> run_quad_compare(const EllipsoidalSystem& sys, int n, int p,
                                                    const std::vector<int>& levels, int digits = 15) {
    const auto table = harmonic_table(sys, n);
    if (p < 0 || p >= static_cast<int>(table->harmonics.size()))
        throw InvalidArgument("harmonic index p=" + std::to_string(p) + " out of range for n=" + std::to_string(n));
    const auto& harm = table->harmonics[p];
    const double ref = gamma_fixed(harm, *quad::cached_rule(quad::Transform::tanh_sinh, reference_level, digits)).gamma;
    std::vector<QuadCompareRow> rows;
    for (auto scheme : quad::all_transforms)
        for (int level : levels) {
            const auto r = gamma_fixed(harm, *quad::cached_rule(scheme, level, digits));
            const double err = std::abs(r.gamma - ref);
            rows.push_back({scheme, level, r.evaluations, r.gamma, err, err / std::abs(ref)});
        }
    return rows;
}

inline void write_quad_compare_csv(const std::vector<QuadCompareRow>& rows, std::ostream& os) {
    CsvWriter w(os, {"scheme", "level", "evaluations", "gamma", "abs_err", "rel_err"});
    for (const auto& r : rows) w.row(quad::to_string(r.scheme), r.level, r.evaluations, r.gamma, r.abs_err, r.rel_err);
}

/// Smallest error a scheme reaches without exceeding `budget` evaluations;
/// infinity when even its coarsest rule costs more.
inline double best_error_within(const std::vector<QuadCompareRow>& rows, quad::Transform scheme, std::size_t budget) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
        if (r.scheme == scheme && r.evaluations <= budget) best = std::min(best, r.abs_err);
    return best;
}

/// Least-squares slope of log10(abs_err) against evaluations over the rows of
/// one scheme whose error lies above `floor`. NaN with fewer than two points.
inline double convergence_slope(const std::vector<QuadCompareRow>& rows, quad::Transform scheme, double floor) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
        if (r.scheme == scheme && r.abs_err > floor)
            pts.emplace_back(static_cast<double>(r.evaluations), std::log10(r.abs_err));
    if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxy / sxx;
}

// ---- born-limit -------------------------------------------------------------

struct BornRow {
    double delta, dg, born, abs_err;
};

/// Semi-axes (1 + d, 1 + d/5, 1 + d/10) with a unit charge at the origin.
inline EllipsoidalSystem near_sphere(double delta) {
    if (!(delta > 0)) throw InvalidArgument("delta must be positive");
    return {1 + delta, 1 + delta / 5, 1 + delta / 10};
}

inline std::vector<BornRow> run_born_limit(const std::vector<double>& deltas, double eps_in, double eps_out, int order,
                                           const quad::QuadOptions& opts = {}) {
    std::vector<BornRow> rows;
    const double born = born_energy(1.0, 1.0, eps_in, eps_out);
    for (double d : deltas) {
        const DielectricModel model(near_sphere(d), eps_in, eps_out, {{{0, 0, 0}, 1.0}});
        const double dg = solvation_energy(model, order, opts);
        rows.push_back({d, dg, born, std::abs(dg - born)});
    }
    return rows;
}

inline void write_born_csv(const std::vector<BornRow>& rows, std::ostream& os) {
    CsvWriter w(os, {"delta", "dg", "born", "abs_err"});
    for (const auto& r : rows) w.row(r.delta, r.dg, r.born, r.abs_err);
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

// ---- solvate ----------------------------------------------------------------

struct SolvateRow {
    int order;
    double dg;
    double abs_err; ///< against the highest requested order
    std::size_t evaluations;
};

/// One expansion to the largest order; each row is its partial sum.
inline std::vector<SolvateRow> run_solvate(const DielectricModel& model, std::vector<int> orders,
                                           const quad::QuadOptions& opts = {}) {
    if (orders.empty()) throw InvalidArgument("no truncation orders given");
    for (int o : orders)
        if (o < 0) throw InvalidArgument("truncation orders must be nonnegative");
    const int top = *std::max_element(orders.begin(), orders.end());
    const auto set = expand(model, top, opts);
    const double ref = solvation_energy(set, top);
    std::vector<SolvateRow> rows;
    for (int o : orders) {
        const double dg = solvation_energy(set, o);
        rows.push_back({o, dg, std::abs(dg - ref), set.evaluations_through(o)});
    }
    return rows;
}

inline void write_solvate_csv(const std::vector<SolvateRow>& rows, std::ostream& os) {
    CsvWriter w(os, {"order", "dg", "abs_err", "evaluations"});
    for (const auto& r : rows) w.row(r.order, r.dg, r.abs_err, r.evaluations);
}

// ---- expand-compare ---------------------------------------------------------

struct ExpandRow {
    int order;
    double direct, ell, sph;
    double ell_err, sph_err; ///< relative to the direct sum
};

/// A point at `fraction` of the charges' Brillouin radius (about the origin),
/// slightly off the z axis.
inline Vec3 brillouin_probe(const std::vector<PointCharge>& charges, double fraction) {
    double r = 0;
    for (const auto& c : charges) r = std::max(r, norm(c.position));
    const Vec3 dir{0.05, 0.05, 1.0};
    return (fraction * r / norm(dir)) * dir;
}

inline std::vector<ExpandRow> run_expand_compare(const DielectricModel& model, Vec3 point, std::vector<int> orders,
                                                 const quad::QuadOptions& opts = {}) {
    if (orders.empty()) throw InvalidArgument("no truncation orders given");
    for (int o : orders)
        if (o < 0) throw InvalidArgument("truncation orders must be nonnegative");
    if (!(lambda_of(model.sys(), point) > model.sys().a()))
        throw InvalidArgument("comparison point must lie outside the reference ellipsoid");
    const int top = *std::max_element(orders.begin(), orders.end());
    const auto set = expand(model, top, opts);
    const auto sph = spherical_coulomb_expansion(model.charges(), {0, 0, 0}, top);
    const double direct = coulomb_potential_direct(model.charges(), point, model.eps_in());
    std::vector<ExpandRow> rows;
    for (int o : orders) {
        const double ell = coulomb_potential_expansion(set, point, o);
        const double s = sph(point, o) / model.eps_in();
        rows.push_back({o, direct, ell, s, std::abs(ell - direct) / std::abs(direct),
                        std::abs(s - direct) / std::abs(direct)});
    }
    return rows;
}

inline void write_expand_csv(const std::vector<ExpandRow>& rows, std::ostream& os) {
    CsvWriter w(os, {"order", "direct", "ell", "sph", "ell_err", "sph_err"});
    for (const auto& r : rows) w.row(r.order, r.direct, r.ell, r.sph, r.ell_err, r.sph_err);
}

} // namespace ellharm::experiments
