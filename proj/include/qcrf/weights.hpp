#ifndef QCRF_WEIGHTS_HPP
#define QCRF_WEIGHTS_HPP

#include <cmath>
#include <cstdio>
#include <ostream>

#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"

namespace qcrf {

/// Weight shared by all pixel pairs inside one superpixel. Higher variance
/// lets a superpixel break across labels more cheaply.
inline double internal_weight(double variance, const EnergyParams& params) {
    return params.smoothness * params.lambda1 *
           std::exp(-variance / (2.0 * params.beta1 * params.beta1));
}

/// Weight shared by all pixel pairs across two superpixels, from squared
/// centroid distance and squared mean-intensity difference. The same formula,
/// fed per-pixel position and intensity, is the Gaussian-edge model; the two
/// evaluators agree bit-for-bit in the one-pixel-per-superpixel limit.
inline double external_weight(double dist2, double mean_diff2, const EnergyParams& params) {
    return params.smoothness *
           (params.lambda1 * std::exp(-dist2 / (2.0 * params.beta2 * params.beta2)) +
            params.lambda2 * std::exp(-mean_diff2 / (2.0 * params.beta3 * params.beta3)));
}

/// Materialize the full m x m quantized weight table.
inline WeightTable build_weights(const SuperpixelPartition& partition,
                                 const EnergyParams& params) {
    detail::require(params.beta1 > 0.0 && params.beta2 > 0.0 && params.beta3 > 0.0,
                    "beta parameters must be positive");
    detail::require(params.lambda1 >= 0.0 && params.lambda2 >= 0.0 && params.smoothness >= 0.0,
                    "lambda and smoothness must be nonnegative");
    const int m = partition.count;
    WeightTable table = WeightTable::zeros(m);
    for (int s = 0; s < m; ++s) {
        table.set(s, s, internal_weight(partition.variances[s], params));
        for (int t = s + 1; t < m; ++t) {
            const double dx = partition.centroid_x[s] - partition.centroid_x[t];
            const double dy = partition.centroid_y[s] - partition.centroid_y[t];
            const double dmu = partition.means[s] - partition.means[t];
            table.set(s, t, external_weight(dx * dx + dy * dy, dmu * dmu, params));
        }
    }
    return table;
}

/// O(n^2) pixel-level Gaussian-edge Potts pairwise energy: the one-pixel-per-
/// superpixel limit of the quantized model, used for the model-comparison
/// study only. Refuses images above 10000 pixels.
inline double gaussian_pairwise_energy(const GridImage& image, const Labeling& labeling,
                                       const EnergyParams& params) {
    const int n = image.num_pixels();
    detail::require(n > 0, "empty image");
    detail::require(n <= 10000, "gaussian_pairwise_energy refuses images above 10000 pixels");
    detail::require(static_cast<int>(labeling.size()) == n,
                    "labeling size does not match image");
    detail::require(params.beta1 > 0.0 && params.beta2 > 0.0 && params.beta3 > 0.0,
                    "beta parameters must be positive");
    double energy = 0.0;
    for (int p = 0; p < n; ++p) {
        const double px = static_cast<double>(p % image.width);
        const double py = static_cast<double>(p / image.width);
        for (int q = p + 1; q < n; ++q) {
            if (labeling[p] == labeling[q]) continue;
            const double dx = px - static_cast<double>(q % image.width);
            const double dy = py - static_cast<double>(q / image.width);
            const double dmu = image.intensities[p] - image.intensities[q];
            energy += external_weight(dx * dx + dy * dy, dmu * dmu, params);
        }
    }
    return energy;
}

/// Percent relative difference of an energy from a reference energy.
inline double relative_difference(double e_quant, double e_gauss) {
    detail::require(e_gauss != 0.0, "relative_difference undefined for zero reference energy");
    return 100.0 * std::abs(e_quant - e_gauss) / e_gauss;
}

/// CSV dump, header "s,t,w", one row per ordered pair s <= t.
inline void write_weight_csv(const WeightTable& table, std::ostream& out) {
    out << "s,t,w\n";
    char buf[64];
    for (int s = 0; s < table.count; ++s)
        for (int t = s; t < table.count; ++t) {
            std::snprintf(buf, sizeof buf, "%.17g", table.at(s, t));
            out << s << ',' << t << ',' << buf << '\n';
        }
}

}  // namespace qcrf

#endif
