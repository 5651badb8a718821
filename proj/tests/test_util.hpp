#ifndef QCRF_TEST_UTIL_HPP
#define QCRF_TEST_UTIL_HPP

// Shared helpers for the test suite: seeded random instances and naive
// reference evaluators kept deliberately independent of the library's
// aggregated implementations.

#include <random>
#include <vector>

#include "qcrf/core.hpp"
#include "qcrf/superpix.hpp"
#include "qcrf/weights.hpp"

namespace testutil {

inline double uniform(std::mt19937& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng()) + 0.5) / 4294967296.0;
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform(rng, 0.0, hi - lo + 1.0)) % (hi - lo + 1);
}

struct TinyInstance {
    qcrf::GridImage image;
    qcrf::SuperpixelPartition partition;
    qcrf::WeightTable weights;
    qcrf::UnaryCosts unary;
};

// Random instance with the given pixel budget: random intensities, a random
// contiguous-index partition, a random symmetric nonnegative weight table and
// random unaries.
inline TinyInstance random_instance(std::mt19937& rng, int max_pixels, int num_labels,
                                    int max_superpixels, double unary_lo = -3.0,
                                    double unary_hi = 3.0, double weight_hi = 1.5) {
    TinyInstance inst;
    const int width = uniform_int(rng, 1, max_pixels);
    const int height = uniform_int(rng, 1, std::max(1, max_pixels / width));
    const int n = width * height;
    inst.image.width = width;
    inst.image.height = height;
    inst.image.intensities.resize(n);
    for (double& v : inst.image.intensities) v = uniform(rng, 0.0, 255.0);

    const int m = uniform_int(rng, 1, std::min(n, max_superpixels));
    std::vector<int> assignment(n);
    for (int p = 0; p < n; ++p) assignment[p] = p < m ? p : uniform_int(rng, 0, m - 1);
    inst.partition = qcrf::make_partition(inst.image, assignment);

    inst.weights = qcrf::WeightTable::zeros(m);
    for (int s = 0; s < m; ++s)
        for (int t = s; t < m; ++t) inst.weights.set(s, t, uniform(rng, 0.0, weight_hi));

    inst.unary.width = width;
    inst.unary.height = height;
    inst.unary.num_labels = num_labels;
    inst.unary.costs.resize(static_cast<std::size_t>(n) * num_labels);
    for (double& c : inst.unary.costs) c = uniform(rng, unary_lo, unary_hi);
    return inst;
}

// O(n^2) pairwise enumeration; the reference route for total_energy.
inline double naive_total_energy(const qcrf::Labeling& labeling,
                                 const qcrf::UnaryCosts& unary,
                                 const qcrf::SuperpixelPartition& partition,
                                 const qcrf::WeightTable& weights) {
    const int n = partition.num_pixels();
    double energy = 0.0;
    for (int p = 0; p < n; ++p) energy += unary.at(p, labeling[p]);
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q)
            if (labeling[p] != labeling[q])
                energy += weights.at(partition.assignment[p], partition.assignment[q]);
    return energy;
}

// Naive mean-field message passing: sum over every other pixel.
inline std::vector<double> naive_messages(const std::vector<double>& q, int n, int k,
                                          const qcrf::SuperpixelPartition& partition,
                                          const qcrf::WeightTable& weights) {
    std::vector<double> out(static_cast<std::size_t>(n) * k, 0.0);
    for (int p = 0; p < n; ++p)
        for (int r = 0; r < n; ++r) {
            if (r == p) continue;
            const double w = weights.at(partition.assignment[p], partition.assignment[r]);
            for (int l = 0; l < k; ++l)
                out[static_cast<std::size_t>(p) * k + l] +=
                    w * q[static_cast<std::size_t>(r) * k + l];
        }
    return out;
}

// The direct alpha-expansion energy of a binary move vector z, evaluated by
// pair enumeration from its published case table.
inline double h_expansion_energy(const std::vector<int>& z, const qcrf::Labeling& current,
                                 int alpha, const qcrf::UnaryCosts& unary,
                                 const qcrf::SuperpixelPartition& partition,
                                 const qcrf::WeightTable& weights,
                                 double infinite_cost) {
    const int n = partition.num_pixels();
    double energy = 0.0;
    for (int p = 0; p < n; ++p) {
        if (z[p] == 0)
            energy += unary.at(p, current[p]);
        else
            energy += current[p] == alpha ? infinite_cost : unary.at(p, alpha);
    }
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            const bool both_one = z[p] == 1 && z[q] == 1;
            const bool both_zero_same = z[p] == 0 && z[q] == 0 && current[p] == current[q];
            if (both_one || both_zero_same) continue;
            energy += weights.at(partition.assignment[p], partition.assignment[q]);
        }
    return energy;
}

// Recursive exhaustive minimum, an implementation route independent of the
// library's iterative enumerator.
inline void recursive_enumerate(const qcrf::UnaryCosts& unary,
                                const qcrf::SuperpixelPartition& partition,
                                const qcrf::WeightTable& weights, qcrf::Labeling& x, int p,
                                double& best, qcrf::Labeling& best_x) {
    const int n = partition.num_pixels();
    if (p == n) {
        const double e = naive_total_energy(x, unary, partition, weights);
        if (e < best) {
            best = e;
            best_x = x;
        }
        return;
    }
    for (int l = 0; l < unary.num_labels; ++l) {
        x[p] = l;
        recursive_enumerate(unary, partition, weights, x, p + 1, best, best_x);
    }
}

}  // namespace testutil

#endif
