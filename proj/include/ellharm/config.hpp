#pragma once

// JSON model configuration and seeded charge placement.
//
//   {"a": 3, "b": 2, "c": 1, "eps_in": 1, "eps_out": 80,
//    "charges": [{"x": 0, "y": 0, "z": 0, "q": 1}]}
//
// or, instead of "charges", "seed" and "count" for generated charges.

#include "ellharm/ellipsoid.hpp"
#include "ellharm/error.hpp"
#include "ellharm/pcm.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ellharm {

/// Default seed of the five-charge test configuration.
inline constexpr std::uint64_t default_seed = 1068;

/// Uniform double in [0, 1) from the top 53 bits; fixed across standard
/// libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// `count` charges uniform inside the ellipsoid scaled by `shrink`, by
/// rejection from the bounding box; charges alternate +1, -1, ...
inline std::vector<PointCharge> seeded_charges(const EllipsoidalSystem& sys, int count, std::uint64_t seed,
                                               double shrink = 0.8) {
    if (count < 0) throw InvalidArgument("charge count must be nonnegative");
    if (!(shrink > 0 && shrink < 1)) throw InvalidArgument("shrink factor must lie in (0, 1)");
    std::mt19937_64 gen(seed);
    const double a = shrink * sys.a(), b = shrink * sys.b(), c = shrink * sys.c();
    std::vector<PointCharge> out;
    while (static_cast<int>(out.size()) < count) {
        const double x = a * (2 * uniform01(gen) - 1);
        const double y = b * (2 * uniform01(gen) - 1);
        const double z = c * (2 * uniform01(gen) - 1);
        if (x * x / (a * a) + y * y / (b * b) + z * z / (c * c) >= 1.0) continue;
        out.push_back({{x, y, z}, out.size() % 2 == 0 ? 1.0 : -1.0});
    }
    return out;
}

struct ModelConfig {
    double a = 3, b = 2, c = 1;
    double eps_in = 1, eps_out = 80;
    std::vector<PointCharge> charges;
    std::optional<std::uint64_t> seed;
    std::optional<int> count;

    EllipsoidalSystem system() const { return {a, b, c}; }

    /// Explicit charges, or the seeded ones when seed/count are given.
    std::vector<PointCharge> resolved_charges() const {
        if (seed || count) return seeded_charges(system(), count.value_or(5), seed.value_or(default_seed));
        return charges;
    }

    DielectricModel model() const { return {system(), eps_in, eps_out, resolved_charges()}; }
};

inline ModelConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("model config must be a JSON object");
    ModelConfig cfg;
    auto number = [&](const char* key, double& out, bool required) {
        if (!j.contains(key)) {
            if (required) throw InvalidArgument(std::string("model config is missing '") + key + "'");
            return;
        }
        if (!j.at(key).is_number()) throw InvalidArgument(std::string("model config field '") + key + "' must be a number");
        out = j.at(key).get<double>();
    };
    number("a", cfg.a, true);
    number("b", cfg.b, true);
    number("c", cfg.c, true);
    number("eps_in", cfg.eps_in, true);
    number("eps_out", cfg.eps_out, true);

    const bool has_charges = j.contains("charges");
    const bool has_seeded = j.contains("seed") || j.contains("count");
    if (has_charges && has_seeded)
        throw InvalidArgument("model config: 'charges' and 'seed'/'count' are mutually exclusive");
    if (!has_charges && !has_seeded) throw InvalidArgument("model config needs 'charges' or 'seed'/'count'");
    if (has_charges) {
        if (!j.at("charges").is_array()) throw InvalidArgument("model config field 'charges' must be an array");
        for (const auto& ch : j.at("charges")) {
            for (const char* key : {"x", "y", "z", "q"})
                if (!ch.contains(key) || !ch.at(key).is_number())
                    throw InvalidArgument(std::string("charge entry needs numeric '") + key + "'");
            cfg.charges.push_back({{ch.at("x").get<double>(), ch.at("y").get<double>(), ch.at("z").get<double>()},
                                   ch.at("q").get<double>()});
        }
    } else {
        if (j.contains("seed")) {
            if (!j.at("seed").is_number_unsigned()) throw InvalidArgument("'seed' must be a nonnegative integer");
            cfg.seed = j.at("seed").get<std::uint64_t>();
        }
        if (j.contains("count")) {
            if (!j.at("count").is_number_integer()) throw InvalidArgument("'count' must be an integer");
            cfg.count = j.at("count").get<int>();
        }
    }
    return cfg;
}

inline ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open model config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument("model config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

} // namespace ellharm
