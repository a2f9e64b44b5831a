// ellharm: command-line driver for the ellipsoidal-harmonic experiments.
// Every subcommand writes CSV to --out (default stdout).

#include "ellharm/ellharm.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ellharm;

struct Common {
    double tol = 1e-13;
    std::string scheme = "tanh-sinh";
    int digits = 15;
    int max_level = 12;
    std::string out;
    std::optional<std::uint64_t> seed;

    quad::QuadOptions quad_options() const {
        quad::QuadOptions o;
        o.transform = quad::parse_transform(scheme);
        o.tolerance = tol;
        o.digits = digits;
        o.max_level = max_level;
        return o;
    }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--tol", c.tol, "Relative quadrature tolerance")->check(CLI::PositiveNumber);
    app->add_option("--scheme", c.scheme, "Quadrature transform")
        ->check(CLI::IsMember({"tanh-sinh", "tanh", "erf"}));
    app->add_option("--digits", c.digits, "Weight cutoff digits (weights below 10^-2d are dropped)")
        ->check(CLI::Range(1, 30));
    app->add_option("--max-level", c.max_level, "Deepest quadrature level")->check(CLI::Range(0, 20));
    app->add_option("--out", c.out, "Output CSV path (default stdout)");
    app->add_option("--seed", c.seed, "Seed for generated charges");
}

template <class Fn>
void emit(const Common& c, Fn&& write) {
    if (c.out.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream os(c.out, std::ios::binary);
    if (!os) throw InvalidArgument("cannot open output file '" + c.out + "'");
    write(os);
    if (!os) throw Error("failed writing '" + c.out + "'");
}

std::vector<int> range_list(int lo, int hi) {
    std::vector<int> v(hi - lo + 1);
    std::iota(v.begin(), v.end(), lo);
    return v;
}

DielectricModel resolve_model(const std::string& config_path, const Common& c, int count) {
    ModelConfig cfg;
    if (!config_path.empty()) {
        cfg = load_config(config_path);
        if (c.seed) {
            if (!cfg.charges.empty()) throw InvalidArgument("--seed conflicts with explicit charges in the config");
            cfg.seed = c.seed;
        }
    } else {
        cfg.seed = c.seed.value_or(default_seed);
        cfg.count = count;
    }
    return cfg.model();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ellipsoidal harmonics, normalization constants and ellipsoidal PCM experiments"};
    app.require_subcommand(1);

    Common common;
    double a = 3, b = 2, c = 1;
    int n = 5, p = 0, order = 20, count = 5;
    std::vector<int> levels = range_list(0, 8), orders;
    std::vector<double> deltas{1e-1, 1e-2, 1e-3}, point;
    double eps_in = 1, eps_out = 80;
    std::string config;

    auto axes = [&](CLI::App* s) {
        s->add_option("--a", a, "Semi-axis a")->capture_default_str();
        s->add_option("--b", b, "Semi-axis b")->capture_default_str();
        s->add_option("--c", c, "Semi-axis c")->capture_default_str();
    };

    auto* g = app.add_subcommand("gamma", "Normalization constants of every harmonic of order n");
    axes(g);
    g->add_option("--n", n, "Order")->required()->check(CLI::Range(0, max_supported_order));
    add_common(g, common);

    auto* qc = app.add_subcommand("quad-compare", "Work-precision comparison of the three transforms on one gamma");
    axes(qc);
    qc->add_option("--n", n, "Order")->capture_default_str()->check(CLI::Range(0, max_supported_order));
    qc->add_option("--p", p, "Harmonic index (0-based)")->capture_default_str();
    qc->add_option("--levels", levels, "Fixed rule levels (budgets)")->delimiter(',');
    add_common(qc, common);

    auto* bl = app.add_subcommand("born-limit", "Near-spherical cavity against the Born ion");
    bl->add_option("--deltas", deltas, "Asphericity values")->delimiter(',');
    bl->add_option("--eps-in", eps_in, "Interior permittivity")->capture_default_str();
    bl->add_option("--eps-out", eps_out, "Exterior permittivity")->capture_default_str();
    bl->add_option("--order", order, "Truncation order")->capture_default_str()->check(CLI::Range(0, max_supported_order));
    add_common(bl, common);

    auto* sv = app.add_subcommand("solvate", "Solvation free energy against truncation order");
    sv->add_option("--config", config, "Model JSON (default: seeded five-charge (3,2,1) model)")->check(CLI::ExistingFile);
    sv->add_option("--orders", orders, "Truncation orders (default 0..25)")->delimiter(',');
    sv->add_option("--count", count, "Number of generated charges without --config")->capture_default_str();
    add_common(sv, common);

    auto* ec = app.add_subcommand("expand-compare", "Ellipsoidal vs spherical Coulomb expansion at one point");
    ec->add_option("--config", config, "Model JSON (default: seeded five-charge (3,2,1) model)")->check(CLI::ExistingFile);
    ec->add_option("--point", point, "Evaluation point x,y,z (default: 0.95 of the Brillouin radius)")
        ->delimiter(',')
        ->expected(3);
    ec->add_option("--orders", orders, "Truncation orders (default 0..25)")->delimiter(',');
    ec->add_option("--count", count, "Number of generated charges without --config")->capture_default_str();
    add_common(ec, common);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto opts = common.quad_options();
        if (*g) {
            const auto rows = experiments::run_gamma(EllipsoidalSystem(a, b, c), n, opts);
            emit(common, [&](std::ostream& os) { experiments::write_gamma_csv(rows, os); });
        } else if (*qc) {
            const auto rows = experiments::run_quad_compare(EllipsoidalSystem(a, b, c), n, p, levels, common.digits);
            emit(common, [&](std::ostream& os) { experiments::write_quad_compare_csv(rows, os); });
        } else if (*bl) {
            const auto rows = experiments::run_born_limit(deltas, eps_in, eps_out, order, opts);
            emit(common, [&](std::ostream& os) { experiments::write_born_csv(rows, os); });
        } else if (*sv) {
            const auto model = resolve_model(config, common, count);
            if (orders.empty()) orders = range_list(0, 25);
            const auto rows = experiments::run_solvate(model, orders, opts);
            emit(common, [&](std::ostream& os) { experiments::write_solvate_csv(rows, os); });
        } else if (*ec) {
            const auto model = resolve_model(config, common, count);
            if (orders.empty()) orders = range_list(0, 25);
            const Vec3 at = point.empty() ? experiments::brillouin_probe(model.charges(), 0.95)
                                          : Vec3{point[0], point[1], point[2]};
            const auto rows = experiments::run_expand_compare(model, at, orders, opts);
            emit(common, [&](std::ostream& os) { experiments::write_expand_csv(rows, os); });
        }
    } catch (const std::exception& e) {
        std::cerr << "ellharm: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
