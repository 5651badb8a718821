#ifndef QCRF_ORACLE_HPP
#define QCRF_ORACLE_HPP

#include <limits>
#include <utility>
#include <vector>

#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"
#include "qcrf/maxflow.hpp"

namespace qcrf {

struct OracleResult {
    Labeling labeling;
    double energy = 0.0;
};

/// Exact binary optimum via a pixel-level graph cut with one Potts term per
/// pixel pair. O(n^2) terms; refuses images above 6000 pixels.
inline OracleResult exact_binary(const UnaryCosts& unary,
                                 const SuperpixelPartition& partition,
                                 const WeightTable& weights) {
    detail::require(unary.num_labels == 2, "exact_binary requires exactly two labels");
    detail::check_dims(unary, partition);
    detail::check_weights(weights, partition);
    const int n = partition.num_pixels();
    detail::require(n <= 6000, "exact_binary refuses instances above 6000 pixels");

    BinaryPairwiseProblem problem(n);
    problem.pairwise.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int p = 0; p < n; ++p) problem.unaries[p] = {unary.at(p, 0), unary.at(p, 1)};
    for (int p = 0; p < n; ++p) {
        const int s = partition.assignment[p];
        for (int q = p + 1; q < n; ++q) {
            const double w = weights.at(s, partition.assignment[q]);
            if (w != 0.0) problem.add_potts(p, q, w);
        }
    }
    MinCutResult cut = min_cut(problem);
    OracleResult out;
    out.labeling = std::move(cut.assignment);
    out.energy = total_energy(out.labeling, unary, partition, weights);
    return out;
}

/// Exhaustive minimum over all k^n labelings, evaluated by naive pairwise
/// enumeration (independent of the aggregated evaluator). Ties go to the
/// lexicographically smallest labeling. Refuses when k^n > 2^24.
inline OracleResult enumerate_optimum(const UnaryCosts& unary,
                                      const SuperpixelPartition& partition,
                                      const WeightTable& weights) {
    detail::check_dims(unary, partition);
    detail::check_weights(weights, partition);
    const int n = partition.num_pixels();
    const int k = unary.num_labels;
    double combos = 1.0;
    for (int p = 0; p < n; ++p) {
        combos *= k;
        detail::require(combos <= 16777216.0, "enumeration refuses more than 2^24 labelings");
    }

    // Flat list of pairs with nonzero weight.
    struct Pair {
        int p, q;
        double w;
    };
    std::vector<Pair> pairs;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            const double w = weights.at(partition.assignment[p], partition.assignment[q]);
            if (w != 0.0) pairs.push_back({p, q, w});
        }

    Labeling x(n, 0);
    OracleResult best;
    best.labeling = x;
    best.energy = std::numeric_limits<double>::infinity();
    while (true) {
        double energy = 0.0;
        for (int p = 0; p < n; ++p) energy += unary.at(p, x[p]);
        for (const Pair& pr : pairs)
            if (x[pr.p] != x[pr.q]) energy += pr.w;
        if (energy < best.energy) {
            best.energy = energy;
            best.labeling = x;
        }
        int pos = n - 1;
        while (pos >= 0 && x[pos] == k - 1) x[pos--] = 0;
        if (pos < 0) break;
        ++x[pos];
    }
    return best;
}

}  // namespace qcrf

#endif
