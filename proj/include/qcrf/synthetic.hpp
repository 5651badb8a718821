#ifndef QCRF_SYNTHETIC_HPP
#define QCRF_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"

namespace qcrf {

namespace detail {

// Deterministic transforms on top of mt19937 so that generated instances are
// identical across standard-library implementations.
inline double uniform01(std::mt19937& rng) {
    return (static_cast<double>(rng()) + 0.5) / 4294967296.0;
}

inline double gaussian(std::mt19937& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline int uniform_int(std::mt19937& rng, int bound) {
    return static_cast<int>(uniform01(rng) * bound) % bound;
}

}  // namespace detail

/// Seeded generator of desk-scale benchmark instances: a planted
/// piecewise-constant label map from Voronoi seeds, an intensity image that
/// follows the plants with additive noise, and unaries that prefer the
/// planted label by a per-site margin with per-entry Gaussian noise (shifted
/// so every pixel's cheapest label costs zero). margin_log_spread scatters
/// the site margins multiplicatively in [exp(-s), exp(s)] so that regions
/// contest the pairwise term at different smoothness scales.
struct SyntheticConfig {
    int width = 48;
    int height = 48;
    int num_labels = 2;
    int num_sites = 24;
    double margin = 1.0;
    double margin_log_spread = 0.0;
    double unary_noise = 0.3;
    double intensity_noise = 8.0;
    std::uint32_t seed = 1;
};

struct SyntheticInstance {
    GridImage image;
    Labeling planted;
    UnaryCosts unary;
};

inline SyntheticInstance make_instance(const SyntheticConfig& cfg) {
    detail::require(cfg.width > 0 && cfg.height > 0, "degenerate instance size");
    detail::require(cfg.num_labels >= 2, "need at least two labels");
    detail::require(cfg.num_sites >= 1, "need at least one site");
    std::mt19937 rng(cfg.seed);

    std::vector<double> site_x(cfg.num_sites), site_y(cfg.num_sites);
    std::vector<int> site_label(cfg.num_sites);
    std::vector<double> site_level(cfg.num_sites), site_margin(cfg.num_sites);
    for (int i = 0; i < cfg.num_sites; ++i) {
        site_x[i] = detail::uniform01(rng) * cfg.width;
        site_y[i] = detail::uniform01(rng) * cfg.height;
        site_label[i] = detail::uniform_int(rng, cfg.num_labels);
        site_level[i] = 30.0 + detail::uniform01(rng) * 195.0;
        site_margin[i] = cfg.margin * std::exp(cfg.margin_log_spread *
                                               (2.0 * detail::uniform01(rng) - 1.0));
    }

    const int n = cfg.width * cfg.height;
    SyntheticInstance inst;
    inst.image.width = cfg.width;
    inst.image.height = cfg.height;
    inst.image.intensities.resize(n);
    inst.planted.resize(n);
    std::vector<double> pixel_margin(n);
    for (int p = 0; p < n; ++p) {
        const double x = p % cfg.width, y = p / cfg.width;
        int nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < cfg.num_sites; ++i) {
            const double dx = x - site_x[i], dy = y - site_y[i];
            const double d2 = dx * dx + dy * dy;
            if (d2 < best) {
                best = d2;
                nearest = i;
            }
        }
        inst.planted[p] = site_label[nearest];
        pixel_margin[p] = site_margin[nearest];
        inst.image.intensities[p] = std::clamp(
            site_level[nearest] + cfg.intensity_noise * detail::gaussian(rng), 0.0, 255.0);
    }

    inst.unary.width = cfg.width;
    inst.unary.height = cfg.height;
    inst.unary.num_labels = cfg.num_labels;
    inst.unary.costs.resize(static_cast<std::size_t>(n) * cfg.num_labels);
    for (int p = 0; p < n; ++p) {
        double lo = std::numeric_limits<double>::infinity();
        for (int l = 0; l < cfg.num_labels; ++l) {
            const double cost = (l == inst.planted[p] ? 0.0 : pixel_margin[p]) +
                                cfg.unary_noise * detail::gaussian(rng);
            inst.unary.at(p, l) = cost;
            lo = std::min(lo, cost);
        }
        for (int l = 0; l < cfg.num_labels; ++l) inst.unary.at(p, l) -= lo;
    }
    return inst;
}

}  // namespace qcrf

#endif
