#ifndef QCRF_BINARY_SOLVER_HPP
#define QCRF_BINARY_SOLVER_HPP

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"
#include "qcrf/maxflow.hpp"

namespace qcrf {

/// Superpixel-domain label assignment: y_s pixels of superpixel s carry
/// binary label 1, the rest label 0.
using SuperLabeling = std::vector<int>;

/// The binary pixel problem transformed to the superpixel domain. Each
/// superpixel s ranges over labels lo_s..hi_s (normally 0..n_s); its pixels
/// are pre-sorted by ascending label-1 cost with prefix sums so that unary
/// evaluation is O(1).
struct SuperpixelProblem {
    int count = 0;
    std::vector<std::int64_t> sizes;
    std::vector<int> lo, hi;
    std::vector<std::vector<int>> order;      // pixel ids, ascending label-1 cost
    std::vector<std::vector<double>> prefix;  // prefix[s][k] = sum of k smallest costs
    const WeightTable* weights = nullptr;
    int max_label = 0;

    bool feasible(int s, int label) const { return label >= lo[s] && label <= hi[s]; }
};

struct BinarySolverConfig {
    int max_sweeps = 4;        // one sweep = forward pass + reverse pass over L*
    bool record_trace = true;
};

struct BinarySolveResult {
    Labeling labeling;
    double energy = 0.0;
    std::vector<double> trace;          // energy after every accepted move
    SuperLabeling superpixel_labels;    // final y in the forward formulation
};

/// Shift unaries so that f_p(0) = 0 everywhere; the returned offset restores
/// the original scale: original energy = normalized energy + offset.
inline std::pair<UnaryCosts, double> normalize_unaries(const UnaryCosts& unary) {
    detail::require(unary.num_labels == 2, "normalize_unaries requires exactly two labels");
    UnaryCosts out = unary;
    double offset = 0.0;
    const int n = unary.num_pixels();
    for (int p = 0; p < n; ++p) {
        const double f0 = unary.at(p, 0);
        offset += f0;
        out.at(p, 0) = 0.0;
        out.at(p, 1) = unary.at(p, 1) - f0;
    }
    return {std::move(out), offset};
}

/// Build the superpixel-domain problem from per-pixel label-1 costs.
/// lo/hi may clamp the feasible range (used when some superpixels are frozen).
inline SuperpixelProblem build_superpixel_problem(const std::vector<double>& label1_costs,
                                                  const SuperpixelPartition& partition,
                                                  const WeightTable& weights,
                                                  std::vector<int> lo, std::vector<int> hi) {
    detail::check_weights(weights, partition);
    detail::require(static_cast<int>(label1_costs.size()) == partition.num_pixels(),
                    "label-1 cost vector size mismatch");
    SuperpixelProblem prob;
    prob.count = partition.count;
    prob.sizes = partition.sizes;
    prob.lo = std::move(lo);
    prob.hi = std::move(hi);
    prob.weights = &weights;
    prob.order = collect_members(partition);
    prob.prefix.resize(prob.count);
    for (int s = 0; s < prob.count; ++s) {
        auto& pixels = prob.order[s];
        std::stable_sort(pixels.begin(), pixels.end(), [&](int a, int b) {
            return label1_costs[a] < label1_costs[b];  // ties keep pixel-index order
        });
        auto& sums = prob.prefix[s];
        sums.resize(pixels.size() + 1);
        sums[0] = 0.0;
        for (std::size_t k = 0; k < pixels.size(); ++k)
            sums[k + 1] = sums[k] + label1_costs[pixels[k]];
        detail::check_invariant(prob.lo[s] >= 0 && prob.lo[s] <= prob.hi[s] &&
                                    prob.hi[s] <= static_cast<int>(pixels.size()),
                                "bad superpixel label range");
        prob.max_label = std::max(prob.max_label, prob.hi[s]);
    }
    return prob;
}

inline SuperpixelProblem build_superpixel_problem(const std::vector<double>& label1_costs,
                                                  const SuperpixelPartition& partition,
                                                  const WeightTable& weights) {
    std::vector<int> lo(partition.count, 0), hi(partition.count);
    for (int s = 0; s < partition.count; ++s) hi[s] = static_cast<int>(partition.sizes[s]);
    return build_superpixel_problem(label1_costs, partition, weights, std::move(lo),
                                    std::move(hi));
}

namespace detail {

// Unchecked evaluation helpers; the expansion construction feeds labels that
// may lie outside the feasible range for configurations it then excludes.
inline double sp_unary(const SuperpixelProblem& prob, int s, int ys) {
    const double n = static_cast<double>(prob.sizes[s]);
    return prob.weights->at(s, s) * static_cast<double>(ys) * (n - ys) + prob.prefix[s][ys];
}

inline double sp_pairwise(const SuperpixelProblem& prob, int s, int t, int ys, int yt) {
    const double ns = static_cast<double>(prob.sizes[s]);
    const double nt = static_cast<double>(prob.sizes[t]);
    return prob.weights->at(s, t) * (ys * (nt - yt) + yt * (ns - ys));
}

}  // namespace detail

/// Unary cost of assigning label y_s to superpixel s: the internal pairwise
/// mass w_ss * y_s (n_s - y_s) plus the y_s cheapest label-1 unaries.
inline double superpixel_unary_cost(const SuperpixelProblem& prob, int s, int ys) {
    detail::require(ys >= 0 && ys <= static_cast<int>(prob.sizes[s]),
                    "superpixel label out of range");
    return detail::sp_unary(prob, s, ys);
}

/// Cross cost between superpixels s and t: the number of disagreeing pixel
/// pairs, y_s (n_t - y_t) + y_t (n_s - y_s), times their shared edge weight.
inline double superpixel_pairwise_cost(const SuperpixelProblem& prob, int s, int t, int ys,
                                       int yt) {
    detail::require(s != t, "pairwise cost needs distinct superpixels");
    detail::require(ys >= 0 && ys <= static_cast<int>(prob.sizes[s]) && yt >= 0 &&
                        yt <= static_cast<int>(prob.sizes[t]),
                    "superpixel label out of range");
    return detail::sp_pairwise(prob, s, t, ys, yt);
}

/// Full superpixel-domain energy of an assignment y.
inline double superlabel_energy(const SuperpixelProblem& prob, const SuperLabeling& y) {
    detail::require(static_cast<int>(y.size()) == prob.count, "superlabeling size mismatch");
    double energy = 0.0;
    for (int s = 0; s < prob.count; ++s) {
        energy += superpixel_unary_cost(prob, s, y[s]);
        for (int t = s + 1; t < prob.count; ++t) {
            if (prob.weights->at(s, t) == 0.0) continue;
            energy += detail::sp_pairwise(prob, s, t, y[s], y[t]);
        }
    }
    return energy;
}

/// Pixel labeling represented by y: within each superpixel the y_s pixels of
/// smallest label-1 cost take label 1, the rest label 0.
inline Labeling reconstruct_labeling(const SuperpixelProblem& prob, const SuperLabeling& y,
                                     int num_pixels) {
    detail::require(static_cast<int>(y.size()) == prob.count, "superlabeling size mismatch");
    Labeling labeling(num_pixels, 0);
    for (int s = 0; s < prob.count; ++s) {
        detail::require(y[s] >= 0 && y[s] <= static_cast<int>(prob.sizes[s]),
                        "superpixel label out of range");
        for (int k = 0; k < y[s]; ++k) labeling[prob.order[s][k]] = 1;
    }
    return labeling;
}

namespace detail {

// One pass of expansion moves over alpha in L*. The min-cut solves the
// truncated subproblem; because truncation can distort it badly when many
// labels straddle alpha, the singleton switches and the full switch to
// alpha (also expansion moves) are probed directly, and the best candidate
// by true energy is accepted when it improves.
template <typename TraceFn>
inline bool expansion_pass(const SuperpixelProblem& prob, SuperLabeling& y, double& g_cur,
                           TraceFn&& on_accept) {
    const int m = prob.count;
    bool any = false;
    SuperLabeling y_new(m), y_best(m);
    for (int alpha = 0; alpha <= prob.max_label; ++alpha) {
        BinaryPairwiseProblem bp(m);
        for (int s = 0; s < m; ++s) {
            const double keep = sp_unary(prob, s, y[s]);
            const double take =
                prob.feasible(s, alpha) ? sp_unary(prob, s, alpha) : kInfiniteCost;
            bp.unaries[s] = {keep, take};
        }
        for (int s = 0; s < m; ++s)
            for (int t = s + 1; t < m; ++t) {
                if (prob.weights->at(s, t) == 0.0) continue;
                double e00 = sp_pairwise(prob, s, t, y[s], y[t]);
                const double e01 = sp_pairwise(prob, s, t, y[s], alpha);
                const double e10 = sp_pairwise(prob, s, t, alpha, y[t]);
                const double e11 = sp_pairwise(prob, s, t, alpha, alpha);
                if (e00 + e11 > e01 + e10) e00 = e01 + e10 - e11;  // truncation
                bp.add_term(s, t, e00, e01, e10, e11);
            }

        double g_best = g_cur;
        bool have_move = false;

        const MinCutResult cut = min_cut(bp);
        bool changed = false;
        for (int s = 0; s < m; ++s) {
            y_new[s] = cut.assignment[s] ? alpha : y[s];
            changed |= y_new[s] != y[s];
        }
        if (changed) {
            const double g_new = superlabel_energy(prob, y_new);
            if (g_new < g_best) {
                g_best = g_new;
                y_best = y_new;
                have_move = true;
            }
        }

        // Greedy switch-set probe: grow the set of superpixels taking alpha
        // one at a time by the smallest incremental true delta, keeping the
        // best prefix. Running the chain to the full set lets it cross small
        // barriers that the truncated cut cannot, at O(m^2) per alpha.
        std::vector<double> delta(m, 0.0);
        std::vector<char> can_switch(m, 0);
        int num_switchable = 0;
        for (int s = 0; s < m; ++s) {
            if (!prob.feasible(s, alpha) || y[s] == alpha) continue;
            double d = sp_unary(prob, s, alpha) - sp_unary(prob, s, y[s]);
            for (int t = 0; t < m; ++t) {
                if (t == s || prob.weights->at(s, t) == 0.0) continue;
                d += sp_pairwise(prob, s, t, alpha, y[t]) -
                     sp_pairwise(prob, s, t, y[s], y[t]);
            }
            delta[s] = d;
            can_switch[s] = 1;
            ++num_switchable;
        }
        if (num_switchable > 0) {
            std::vector<int> chain;
            chain.reserve(num_switchable);
            double running = 0.0, best_running = 0.0;
            int best_prefix = 0;
            for (int step = 0; step < num_switchable; ++step) {
                int u = -1;
                for (int s = 0; s < m; ++s)
                    if (can_switch[s] && (u < 0 || delta[s] < delta[u])) u = s;
                running += delta[u];
                can_switch[u] = 0;
                chain.push_back(u);
                if (running < best_running) {
                    best_running = running;
                    best_prefix = static_cast<int>(chain.size());
                }
                for (int r = 0; r < m; ++r) {
                    if (!can_switch[r] || prob.weights->at(r, u) == 0.0) continue;
                    delta[r] += sp_pairwise(prob, r, u, alpha, alpha) +
                                sp_pairwise(prob, r, u, y[r], y[u]) -
                                sp_pairwise(prob, r, u, alpha, y[u]) -
                                sp_pairwise(prob, r, u, y[r], alpha);
                }
            }
            if (best_prefix > 0 && g_cur + best_running < g_best) {
                y_new = y;
                for (int i = 0; i < best_prefix; ++i) y_new[chain[i]] = alpha;
                const double g_chain = superlabel_energy(prob, y_new);  // exact
                if (g_chain < g_best) {
                    g_best = g_chain;
                    y_best = y_new;
                    have_move = true;
                }
            }
        }

        if (have_move && g_best < g_cur) {
            y = y_best;
            g_cur = g_best;
            on_accept(g_cur);
            any = true;
        }
    }
    return any;
}

struct SuperDomainResult {
    SuperLabeling y;
    double g_energy = 0.0;
    Labeling labeling;
};

// Expansion with alternating forward and reverse passes. The reverse pass
// swaps the roles of the binary labels: y'_s = n_s - y_s with negated
// label-1 costs, which leaves the represented pixel energy unchanged up to
// the constant sum of all label-1 costs.
inline SuperDomainResult minimize_superpixel_energy(const std::vector<double>& label1_costs,
                                                    const SuperpixelPartition& partition,
                                                    const WeightTable& weights,
                                                    std::vector<int> lo, std::vector<int> hi,
                                                    const BinarySolverConfig& config,
                                                    std::vector<double>* trace,
                                                    double trace_offset) {
    const int m = partition.count;
    const SuperpixelProblem forward =
        build_superpixel_problem(label1_costs, partition, weights, lo, hi);

    std::vector<double> negated(label1_costs.size());
    for (std::size_t p = 0; p < label1_costs.size(); ++p) negated[p] = -label1_costs[p];
    const double reverse_offset =
        std::accumulate(label1_costs.begin(), label1_costs.end(), 0.0);
    std::vector<int> rlo(m), rhi(m);
    for (int s = 0; s < m; ++s) {
        rlo[s] = static_cast<int>(partition.sizes[s]) - hi[s];
        rhi[s] = static_cast<int>(partition.sizes[s]) - lo[s];
    }
    const SuperpixelProblem reverse =
        build_superpixel_problem(negated, partition, weights, rlo, rhi);

    SuperLabeling y(m);
    for (int s = 0; s < m; ++s) {
        int prefer = 0;
        for (int pix : forward.order[s])
            if (label1_costs[pix] < 0.0) ++prefer;
        y[s] = std::clamp(prefer, forward.lo[s], forward.hi[s]);
    }
    double g_cur = superlabel_energy(forward, y);
    if (trace && config.record_trace) trace->push_back(g_cur + trace_offset);

    const auto forward_hook = [&](double g) {
        if (trace && config.record_trace) trace->push_back(g + trace_offset);
    };
    const auto reverse_hook = [&](double g) {
        if (trace && config.record_trace)
            trace->push_back(g + reverse_offset + trace_offset);
    };

    SuperLabeling y_rev(m);
    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
        bool moved = expansion_pass(forward, y, g_cur, forward_hook);
        for (int s = 0; s < m; ++s) y_rev[s] = static_cast<int>(partition.sizes[s]) - y[s];
        double g_rev = superlabel_energy(reverse, y_rev);
        if (expansion_pass(reverse, y_rev, g_rev, reverse_hook)) {
            moved = true;
            for (int s = 0; s < m; ++s)
                y[s] = static_cast<int>(partition.sizes[s]) - y_rev[s];
            g_cur = g_rev + reverse_offset;
        }
        if (!moved) break;
    }

    SuperDomainResult out;
    out.y = std::move(y);
    out.g_energy = g_cur;
    out.labeling = reconstruct_labeling(forward, out.y, partition.num_pixels());
    return out;
}

}  // namespace detail

/// Approximate minimizer of the binary Full-CRF by expansion moves in the
/// superpixel domain, with reverse passes and submodularity truncation.
/// The reported energy and trace are in the original pixel-domain scale.
inline BinarySolveResult solve_binary(const UnaryCosts& unary,
                                      const SuperpixelPartition& partition,
                                      const WeightTable& weights,
                                      const BinarySolverConfig& config = {}) {
    detail::require(unary.num_labels == 2, "solve_binary requires exactly two labels");
    detail::check_dims(unary, partition);
    detail::check_weights(weights, partition);

    auto [normalized, offset] = normalize_unaries(unary);
    const int n = partition.num_pixels();
    std::vector<double> label1(n);
    for (int p = 0; p < n; ++p) label1[p] = normalized.at(p, 1);

    std::vector<int> lo(partition.count, 0), hi(partition.count);
    for (int s = 0; s < partition.count; ++s) hi[s] = static_cast<int>(partition.sizes[s]);

    BinarySolveResult result;
    detail::SuperDomainResult inner = detail::minimize_superpixel_energy(
        label1, partition, weights, std::move(lo), std::move(hi), config, &result.trace,
        offset);
    result.labeling = std::move(inner.labeling);
    result.superpixel_labels = std::move(inner.y);
    result.energy = total_energy(result.labeling, unary, partition, weights);
    return result;
}

}  // namespace qcrf

#endif
