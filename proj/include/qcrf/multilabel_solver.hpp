#ifndef QCRF_MULTILABEL_SOLVER_HPP
#define QCRF_MULTILABEL_SOLVER_HPP

#include <utility>
#include <vector>

#include "qcrf/binary_solver.hpp"
#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"
#include "qcrf/superpix.hpp"

namespace qcrf {

/// An alpha-expansion move expressed as a binary Full-CRF of the form the
/// binary solver accepts: label-homogeneous split superpixels, pairwise
/// weights halved across current-label boundaries, and unaries that repay
/// the halving. d-energy + offset equals the direct expansion energy for
/// every binary vector.
struct ExpansionEnergy {
    UnaryCosts d;        // two labels; d(1) carries the infinity sentinel where frozen
    SplitResult split;   // children are homogeneous in the current labeling
    WeightTable v;       // pairwise table over the split superpixels
    double offset = 0.0;
};

inline ExpansionEnergy build_expansion_energy(const Labeling& current, int alpha,
                                              const UnaryCosts& unary,
                                              const SuperpixelPartition& partition,
                                              const WeightTable& weights) {
    detail::require(alpha >= 0 && alpha < unary.num_labels, "alpha out of label range");
    detail::check_dims(current, partition);
    detail::check_dims(unary, partition);
    detail::check_weights(weights, partition);

    ExpansionEnergy out;
    out.split = split_by_labeling(partition, current);
    const SuperpixelPartition& child = out.split.partition;
    const int mc = child.count;

    out.v = WeightTable::zeros(mc);
    for (int a = 0; a < mc; ++a)
        for (int b = a; b < mc; ++b) {
            const double w = weights.at(out.split.parent[a], out.split.parent[b]);
            out.v.set(a, b, out.split.label[a] == out.split.label[b] ? w : 0.5 * w);
        }

    // Per-child pairwise repayment: half the original weight to every pixel
    // whose current label differs, aggregated over whole children.
    std::vector<double> repay(mc, 0.0);
    for (int a = 0; a < mc; ++a) {
        double sum = 0.0;
        for (int b = 0; b < mc; ++b) {
            if (out.split.label[b] == out.split.label[a]) continue;
            sum += out.v.at(a, b) * static_cast<double>(child.sizes[b]);
        }
        repay[a] = sum;
    }

    const int n = partition.num_pixels();
    out.d.width = unary.width;
    out.d.height = unary.height;
    out.d.num_labels = 2;
    out.d.costs.resize(static_cast<std::size_t>(n) * 2);
    for (int p = 0; p < n; ++p) {
        const int c = child.assignment[p];
        out.d.at(p, 0) = unary.at(p, current[p]) + repay[c];
        out.d.at(p, 1) = current[p] == alpha ? kInfiniteCost : unary.at(p, alpha);
    }
    out.offset = 0.0;  // the conversion is exact
    return out;
}

struct MultilabelSolverConfig {
    int max_outer_sweeps = 5;
    BinarySolverConfig inner{/*max_sweeps=*/2, /*record_trace=*/false};
    bool record_trace = true;
};

struct MultilabelSolveResult {
    Labeling labeling;
    double energy = 0.0;
    std::vector<double> trace;  // total energy after every accepted expansion
};

/// Nested expansion: each outer alpha move is converted with
/// build_expansion_energy and minimized by the superpixel-domain binary
/// machinery; a move is kept only if the true total energy decreases.
inline MultilabelSolveResult solve_multilabel(const UnaryCosts& unary,
                                              const SuperpixelPartition& partition,
                                              const WeightTable& weights,
                                              const MultilabelSolverConfig& config = {}) {
    detail::check_dims(unary, partition);
    detail::check_weights(weights, partition);
    const int n = partition.num_pixels();
    const int k = unary.num_labels;

    MultilabelSolveResult result;
    Labeling& x = result.labeling;
    x.assign(n, 0);
    for (int p = 0; p < n; ++p) {
        int best = 0;
        for (int l = 1; l < k; ++l)
            if (unary.at(p, l) < unary.at(p, best)) best = l;
        x[p] = best;
    }
    double energy = total_energy(x, unary, partition, weights);
    if (config.record_trace) result.trace.push_back(energy);

    Labeling candidate(n);
    for (int sweep = 0; sweep < config.max_outer_sweeps; ++sweep) {
        bool improved = false;
        for (int alpha = 0; alpha < k; ++alpha) {
            const ExpansionEnergy ee = build_expansion_energy(x, alpha, unary, partition,
                                                              weights);
            const SuperpixelPartition& child = ee.split.partition;
            const int mc = child.count;

            // Frozen children (already labeled alpha) are pinned to y = 0;
            // their sentinel unaries never enter the arithmetic. The h-form
            // charges w_pq when a pixel switches to alpha next to a frozen
            // alpha pixel although the true move cost is zero; that charge
            // is constant per switching pixel, so cancel it from the
            // label-1 costs and let the inner solver minimize the true
            // expansion energy. The accepted move is still re-checked
            // against the full energy.
            std::vector<double> alpha_adjacent(mc, 0.0);
            for (int c = 0; c < mc; ++c) {
                if (ee.split.label[c] == alpha) continue;
                double sum = 0.0;
                for (int b = 0; b < mc; ++b)
                    if (ee.split.label[b] == alpha)
                        sum += weights.at(ee.split.parent[c], ee.split.parent[b]) *
                               static_cast<double>(child.sizes[b]);
                alpha_adjacent[c] = sum;
            }
            std::vector<double> label1(n);
            std::vector<int> lo(mc, 0), hi(mc);
            for (int c = 0; c < mc; ++c)
                hi[c] = ee.split.label[c] == alpha ? 0 : static_cast<int>(child.sizes[c]);
            for (int p = 0; p < n; ++p)
                label1[p] = x[p] == alpha
                                ? 0.0
                                : ee.d.at(p, 1) - ee.d.at(p, 0) -
                                      alpha_adjacent[child.assignment[p]];

            const detail::SuperDomainResult move = detail::minimize_superpixel_energy(
                label1, child, ee.v, std::move(lo), std::move(hi), config.inner, nullptr,
                0.0);

            bool any = false;
            for (int p = 0; p < n; ++p) {
                candidate[p] = move.labeling[p] ? alpha : x[p];
                any |= candidate[p] != x[p];
            }
            if (!any) continue;
            const double candidate_energy = total_energy(candidate, unary, partition,
                                                         weights);
            if (candidate_energy < energy) {
                x.swap(candidate);
                energy = candidate_energy;
                if (config.record_trace) result.trace.push_back(energy);
                improved = true;
            }
        }
        if (!improved) break;
    }
    result.energy = energy;
    return result;
}

}  // namespace qcrf

#endif
