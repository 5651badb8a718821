#ifndef QCRF_BASELINES_HPP
#define QCRF_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"

namespace qcrf {

struct IcmConfig {
    int max_iters = 100;
    bool record_trace = true;
};

/// One accepted ICM move: `index` is a pixel (pixel ICM) or a superpixel
/// (superpixel ICM), relabeled to `to` for a predicted energy change `delta`.
struct IcmMove {
    int index = 0;
    int to = 0;
    double delta = 0.0;
};

struct IcmResult {
    Labeling labeling;
    double energy = 0.0;
    std::vector<double> trace;  // initial energy, then after every accepted switch
    std::vector<IcmMove> moves;
};

/// Pixel-level ICM with label-count aggregation: the energy change of
/// switching one pixel is O(mk), one full pass O(nmk).
inline IcmResult icm_pixel(const UnaryCosts& unary, const SuperpixelPartition& partition,
                           const WeightTable& weights, const Labeling& init,
                           const IcmConfig& config = {}) {
    detail::check_dims(unary, partition);
    detail::check_dims(init, partition);
    detail::check_weights(weights, partition);
    const int n = partition.num_pixels();
    const int k = unary.num_labels;
    const int m = partition.count;

    IcmResult result;
    result.labeling = init;
    Labeling& x = result.labeling;
    LabelCountTable counts = count_labels(x, partition, k);
    double energy = total_energy(x, unary, partition, weights);
    if (config.record_trace) result.trace.push_back(energy);

    std::vector<double> cross(k);
    for (int iter = 0; iter < config.max_iters; ++iter) {
        bool changed = false;
        for (int p = 0; p < n; ++p) {
            const int s = partition.assignment[p];
            const int l = x[p];
            // cross[b] = sum over other superpixels of w^{st} n_t^b.
            std::fill(cross.begin(), cross.end(), 0.0);
            for (int t = 0; t < m; ++t) {
                if (t == s) continue;
                const double w = weights.at(s, t);
                if (w == 0.0) continue;
                for (int b = 0; b < k; ++b)
                    cross[b] += w * static_cast<double>(counts.at(t, b));
            }
            const double w_own = weights.at(s, s);
            int best = l;
            double best_delta = 0.0;
            for (int a = 0; a < k; ++a) {
                if (a == l) continue;
                const double delta =
                    unary.at(p, a) - unary.at(p, l) + (cross[l] - cross[a]) +
                    w_own * static_cast<double>(counts.at(s, l) - 1 - counts.at(s, a));
                if (delta < best_delta) {
                    best_delta = delta;
                    best = a;
                }
            }
            if (best != l) {
                --counts.at(s, l);
                ++counts.at(s, best);
                x[p] = best;
                energy += best_delta;
                if (config.record_trace) {
                    result.trace.push_back(energy);
                    result.moves.push_back({p, best, best_delta});
                }
                changed = true;
            }
        }
        if (!changed) break;
    }
    result.energy = total_energy(x, unary, partition, weights);
    return result;
}

namespace detail {

// Energy change of relabeling all pixels of superpixel s to label a, valid
// for heterogeneous current content. unary_gain[a] must hold
// sum_{p in P_s} f_p(a) and unary_now the current unary sum over P_s.
inline double superpixel_switch_delta(const LabelCountTable& counts,
                                      const SuperpixelPartition& partition,
                                      const WeightTable& weights, int s, int a,
                                      double unary_gain_a, double unary_now) {
    const int m = partition.count;
    double delta = unary_gain_a - unary_now;
    for (int t = 0; t < m; ++t) {
        if (t == s) continue;
        const double w = weights.at(s, t);
        if (w == 0.0) continue;
        const std::int64_t new_cross =
            (partition.sizes[t] - counts.at(t, a)) * partition.sizes[s];
        const std::int64_t old_cross =
            cross_disagreements(counts, s, t, partition.sizes[s], partition.sizes[t]);
        delta += w * static_cast<double>(new_cross - old_cross);
    }
    delta -= weights.at(s, s) *
             static_cast<double>(internal_disagreements(counts, s, partition.sizes[s]));
    return delta;
}

}  // namespace detail

/// Superpixel-level ICM: moves relabel a whole superpixel at once. Reduces
/// to the homogeneous-superpixel switching cost when every superpixel is
/// label-pure, and stays exact for mixed content.
inline IcmResult icm_superpixel(const UnaryCosts& unary, const SuperpixelPartition& partition,
                                const WeightTable& weights, const Labeling& init,
                                const IcmConfig& config = {}) {
    detail::check_dims(unary, partition);
    detail::check_dims(init, partition);
    detail::check_weights(weights, partition);
    const int k = unary.num_labels;
    const int m = partition.count;

    IcmResult result;
    result.labeling = init;
    Labeling& x = result.labeling;
    LabelCountTable counts = count_labels(x, partition, k);
    double energy = total_energy(x, unary, partition, weights);
    if (config.record_trace) result.trace.push_back(energy);

    const std::vector<std::vector<int>> members = collect_members(partition);
    std::vector<double> unary_sum(k);
    for (int iter = 0; iter < config.max_iters; ++iter) {
        bool changed = false;
        for (int s = 0; s < m; ++s) {
            std::fill(unary_sum.begin(), unary_sum.end(), 0.0);
            double unary_now = 0.0;
            for (int p : members[s]) {
                unary_now += unary.at(p, x[p]);
                for (int a = 0; a < k; ++a) unary_sum[a] += unary.at(p, a);
            }
            int best = -1;
            double best_delta = 0.0;
            for (int a = 0; a < k; ++a) {
                const double delta = detail::superpixel_switch_delta(
                    counts, partition, weights, s, a, unary_sum[a], unary_now);
                if (delta < best_delta) {
                    best_delta = delta;
                    best = a;
                }
            }
            if (best >= 0) {
                for (int a = 0; a < k; ++a) counts.at(s, a) = 0;
                counts.at(s, best) = partition.sizes[s];
                for (int p : members[s]) x[p] = best;
                energy += best_delta;
                if (config.record_trace) {
                    result.trace.push_back(energy);
                    result.moves.push_back({s, best, best_delta});
                }
                changed = true;
            }
        }
        if (!changed) break;
    }
    result.energy = total_energy(x, unary, partition, weights);
    return result;
}

struct MeanFieldConfig {
    int max_iters = 100;
    double tol = 1e-5;  // max-norm change of Q between iterations
};

/// Per-pixel marginal beliefs Q_p(l); every row sums to one.
struct MeanFieldState {
    int num_pixels = 0;
    int num_labels = 0;
    int iteration = 0;
    std::vector<double> q;  // num_pixels * num_labels, label fastest

    double at(int p, int l) const { return q[static_cast<std::size_t>(p) * num_labels + l]; }
    double& at(int p, int l) { return q[static_cast<std::size_t>(p) * num_labels + l]; }
};

struct MeanFieldResult {
    MeanFieldState state;
    Labeling labeling;
    double energy = 0.0;
};

/// Q_p(l) proportional to exp(-f_p(l)), row-normalized.
inline MeanFieldState mean_field_init(const UnaryCosts& unary) {
    MeanFieldState state;
    state.num_pixels = unary.num_pixels();
    state.num_labels = unary.num_labels;
    state.q.resize(static_cast<std::size_t>(state.num_pixels) * state.num_labels);
    for (int p = 0; p < state.num_pixels; ++p) {
        double lo = unary.at(p, 0);
        for (int l = 1; l < state.num_labels; ++l) lo = std::min(lo, unary.at(p, l));
        double norm = 0.0;
        for (int l = 0; l < state.num_labels; ++l) {
            const double e = std::exp(-(unary.at(p, l) - lo));
            state.at(p, l) = e;
            norm += e;
        }
        for (int l = 0; l < state.num_labels; ++l) state.at(p, l) /= norm;
    }
    return state;
}

/// Accelerated message passing: the expected disagreement mass
/// sum_{q != p} w_pq Q_q(l) for every pixel and label, computed through
/// per-superpixel belief sums in O(nk + m^2 k) instead of O(n^2 k).
inline std::vector<double> mean_field_messages(const MeanFieldState& state,
                                               const SuperpixelPartition& partition,
                                               const WeightTable& weights) {
    detail::check_weights(weights, partition);
    detail::require(state.num_pixels == partition.num_pixels(),
                    "mean-field state does not match partition");
    const int n = state.num_pixels;
    const int k = state.num_labels;
    const int m = partition.count;

    std::vector<double> belief_sum(static_cast<std::size_t>(m) * k, 0.0);
    for (int p = 0; p < n; ++p) {
        const int s = partition.assignment[p];
        for (int l = 0; l < k; ++l)
            belief_sum[static_cast<std::size_t>(s) * k + l] += state.at(p, l);
    }
    std::vector<double> external(static_cast<std::size_t>(m) * k, 0.0);
    for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) {
            if (t == s) continue;
            const double w = weights.at(s, t);
            if (w == 0.0) continue;
            for (int l = 0; l < k; ++l)
                external[static_cast<std::size_t>(s) * k + l] +=
                    w * belief_sum[static_cast<std::size_t>(t) * k + l];
        }
    std::vector<double> messages(static_cast<std::size_t>(n) * k);
    for (int p = 0; p < n; ++p) {
        const int s = partition.assignment[p];
        const double w_own = weights.at(s, s);
        for (int l = 0; l < k; ++l)
            messages[static_cast<std::size_t>(p) * k + l] =
                external[static_cast<std::size_t>(s) * k + l] +
                w_own * belief_sum[static_cast<std::size_t>(s) * k + l] -
                w_own * state.at(p, l);
    }
    return messages;
}

/// Synchronous mean-field inference; every update in one iteration reads the
/// previous iterate. Stops when the max-norm change drops below tol.
inline MeanFieldResult mean_field(const UnaryCosts& unary,
                                  const SuperpixelPartition& partition,
                                  const WeightTable& weights,
                                  const MeanFieldConfig& config = {}) {
    detail::check_dims(unary, partition);
    detail::check_weights(weights, partition);
    const int n = partition.num_pixels();
    const int k = unary.num_labels;

    MeanFieldResult result;
    result.state = mean_field_init(unary);
    MeanFieldState& state = result.state;

    std::vector<double> next(state.q.size());
    std::vector<double> exponent(k);
    for (int iter = 1; iter <= config.max_iters; ++iter) {
        const std::vector<double> messages = mean_field_messages(state, partition, weights);
        double max_change = 0.0;
        for (int p = 0; p < n; ++p) {
            const double* msg = &messages[static_cast<std::size_t>(p) * k];
            double row_total = 0.0;
            for (int l = 0; l < k; ++l) row_total += msg[l];
            // Compatibility transform leaves the mass of the other labels;
            // the local update exponentiates with max-subtraction.
            double hi = -std::numeric_limits<double>::infinity();
            for (int l = 0; l < k; ++l) {
                exponent[l] = -unary.at(p, l) - (row_total - msg[l]);
                hi = std::max(hi, exponent[l]);
            }
            double norm = 0.0;
            double* row = &next[static_cast<std::size_t>(p) * k];
            for (int l = 0; l < k; ++l) {
                row[l] = std::exp(exponent[l] - hi);
                norm += row[l];
            }
            for (int l = 0; l < k; ++l) {
                row[l] /= norm;
                max_change = std::max(max_change, std::abs(row[l] - state.at(p, l)));
            }
        }
        state.q.swap(next);
        state.iteration = iter;
        if (max_change < config.tol) break;
    }

    result.labeling.assign(n, 0);
    for (int p = 0; p < n; ++p) {
        int best = 0;
        for (int l = 1; l < k; ++l)
            if (state.at(p, l) > state.at(p, best)) best = l;
        result.labeling[p] = best;
    }
    result.energy = total_energy(result.labeling, unary, partition, weights);
    return result;
}

}  // namespace qcrf

#endif
