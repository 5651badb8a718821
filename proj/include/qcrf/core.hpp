#ifndef QCRF_CORE_HPP
#define QCRF_CORE_HPP

#include <cstdint>
#include <vector>

#include "qcrf/errors.hpp"

namespace qcrf {

/// Single-channel image on a regular grid, intensities in [0, 255].
struct GridImage {
    int width = 0;
    int height = 0;
    std::vector<double> intensities;  // row-major, width * height entries

    int num_pixels() const { return width * height; }
    double at(int x, int y) const { return intensities[static_cast<std::size_t>(y) * width + x]; }
};

/// Model parameters. `smoothness` is the global multiplier applied to every
/// pairwise weight; it is the variable swept in the benchmarks.
struct EnergyParams {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double beta1 = 10.0;
    double beta2 = 50.0;
    double beta3 = 13.0;
    double smoothness = 1.0;
};

/// Per-pixel, per-label cost tensor f_p(l), row-major with label fastest.
struct UnaryCosts {
    int height = 0;
    int width = 0;
    int num_labels = 0;
    std::vector<double> costs;  // height * width * num_labels

    int num_pixels() const { return width * height; }
    double at(int pixel, int label) const {
        return costs[static_cast<std::size_t>(pixel) * num_labels + label];
    }
    double& at(int pixel, int label) {
        return costs[static_cast<std::size_t>(pixel) * num_labels + label];
    }
};

/// Per-pixel label assignment, row-major.
using Labeling = std::vector<int>;

/// Image tessellation with per-superpixel statistics. Partitions produced by
/// make_partition carry exact sample statistics of their members; partitions
/// produced by splitting inherit the parent's mean/variance/centroid so that
/// pixel-pair weights are unchanged by the split.
struct SuperpixelPartition {
    int width = 0;
    int height = 0;
    int count = 0;                      // m
    std::vector<int> assignment;        // per pixel, values in [0, count)
    std::vector<std::int64_t> sizes;    // n_s
    std::vector<double> means;          // mu_s
    std::vector<double> variances;      // sigma_s^2 (population)
    std::vector<double> centroid_x;     // d_s, pixel units
    std::vector<double> centroid_y;

    int num_pixels() const { return width * height; }
};

/// n_s^l: number of pixels of superpixel s currently holding label l.
struct LabelCountTable {
    int num_superpixels = 0;
    int num_labels = 0;
    std::vector<std::int64_t> counts;  // num_superpixels * num_labels

    std::int64_t at(int s, int l) const {
        return counts[static_cast<std::size_t>(s) * num_labels + l];
    }
    std::int64_t& at(int s, int l) {
        return counts[static_cast<std::size_t>(s) * num_labels + l];
    }
};

/// Symmetric m x m table of quantized edge weights. w(s,s) is the weight of
/// every pixel pair inside s; w(s,t) the weight of every pair across s and t.
struct WeightTable {
    int count = 0;
    std::vector<double> w;  // count * count, symmetric

    static WeightTable zeros(int m) {
        WeightTable t;
        t.count = m;
        t.w.assign(static_cast<std::size_t>(m) * m, 0.0);
        return t;
    }

    double at(int s, int t) const { return w[static_cast<std::size_t>(s) * count + t]; }
    void set(int s, int t, double value) {
        w[static_cast<std::size_t>(s) * count + t] = value;
        w[static_cast<std::size_t>(t) * count + s] = value;
    }
};

namespace detail {

inline void check_dims(const Labeling& labeling, const SuperpixelPartition& partition) {
    require(static_cast<std::int64_t>(labeling.size()) == partition.num_pixels(),
            "labeling size does not match partition dimensions");
}

inline void check_dims(const UnaryCosts& unary, const SuperpixelPartition& partition) {
    require(unary.width == partition.width && unary.height == partition.height,
            "unary tensor dimensions do not match partition");
    require(unary.num_labels >= 2, "unary tensor needs at least two labels");
    require(unary.costs.size() ==
                static_cast<std::size_t>(unary.num_pixels()) * unary.num_labels,
            "unary tensor storage size mismatch");
}

inline void check_weights(const WeightTable& weights, const SuperpixelPartition& partition) {
    require(weights.count == partition.count, "weight table size does not match partition");
}

}  // namespace detail

/// Tally n_s^l over the current labeling.
inline LabelCountTable count_labels(const Labeling& labeling,
                                    const SuperpixelPartition& partition, int num_labels) {
    detail::check_dims(labeling, partition);
    LabelCountTable table;
    table.num_superpixels = partition.count;
    table.num_labels = num_labels;
    table.counts.assign(static_cast<std::size_t>(partition.count) * num_labels, 0);
    const int n = partition.num_pixels();
    for (int p = 0; p < n; ++p) {
        const int l = labeling[p];
        detail::require(l >= 0 && l < num_labels, "label out of range in count_labels");
        ++table.at(partition.assignment[p], l);
    }
    return table;
}

/// Disagreeing pair counts derived from a label-count table. Internal pairs of
/// s: (n_s^2 - sum_l (n_s^l)^2) / 2. Cross pairs of (s,t): n_s n_t - sum_l n_s^l n_t^l.
inline std::int64_t internal_disagreements(const LabelCountTable& counts, int s,
                                           std::int64_t size_s) {
    std::int64_t same = 0;
    for (int l = 0; l < counts.num_labels; ++l) {
        const std::int64_t c = counts.at(s, l);
        same += c * c;
    }
    return (size_s * size_s - same) / 2;
}

inline std::int64_t cross_disagreements(const LabelCountTable& counts, int s, int t,
                                        std::int64_t size_s, std::int64_t size_t_) {
    std::int64_t same = 0;
    for (int l = 0; l < counts.num_labels; ++l) same += counts.at(s, l) * counts.at(t, l);
    return size_s * size_t_ - same;
}

/// Pairwise part of the energy, computed from aggregated label counts in
/// O(n k + m^2 k). Summation order is fixed: s ascending, then t > s.
inline double pairwise_energy(const LabelCountTable& counts,
                              const SuperpixelPartition& partition,
                              const WeightTable& weights) {
    detail::check_weights(weights, partition);
    double energy = 0.0;
    const int m = partition.count;
    for (int s = 0; s < m; ++s) {
        const std::int64_t internal = internal_disagreements(counts, s, partition.sizes[s]);
        if (internal != 0) energy += weights.at(s, s) * static_cast<double>(internal);
        for (int t = s + 1; t < m; ++t) {
            const std::int64_t cross =
                cross_disagreements(counts, s, t, partition.sizes[s], partition.sizes[t]);
            if (cross != 0) energy += weights.at(s, t) * static_cast<double>(cross);
        }
    }
    return energy;
}

inline double pairwise_energy(const Labeling& labeling, const SuperpixelPartition& partition,
                              const WeightTable& weights, int num_labels) {
    return pairwise_energy(count_labels(labeling, partition, num_labels), partition, weights);
}

/// Full Potts energy: sum_p f_p(x_p) + sum_{p<q} w_pq [x_p != x_q], with each
/// unordered pair counted once. Never enumerates pixel pairs.
inline double total_energy(const Labeling& labeling, const UnaryCosts& unary,
                           const SuperpixelPartition& partition, const WeightTable& weights) {
    detail::check_dims(labeling, partition);
    detail::check_dims(unary, partition);
    detail::check_weights(weights, partition);
    const int n = partition.num_pixels();
    double energy = 0.0;
    for (int p = 0; p < n; ++p) {
        const int l = labeling[p];
        detail::require(l >= 0 && l < unary.num_labels, "label out of range in total_energy");
        energy += unary.at(p, l);
    }
    energy += pairwise_energy(count_labels(labeling, partition, unary.num_labels), partition,
                              weights);
    return energy;
}

/// Member pixel ids per superpixel, ascending within each group.
inline std::vector<std::vector<int>> collect_members(const SuperpixelPartition& partition) {
    std::vector<std::vector<int>> members(partition.count);
    for (int s = 0; s < partition.count; ++s)
        members[s].reserve(static_cast<std::size_t>(partition.sizes[s]));
    const int n = partition.num_pixels();
    for (int p = 0; p < n; ++p) members[partition.assignment[p]].push_back(p);
    return members;
}

}  // namespace qcrf

#endif
