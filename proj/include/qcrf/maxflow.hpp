#ifndef QCRF_MAXFLOW_HPP
#define QCRF_MAXFLOW_HPP

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

#include "qcrf/errors.hpp"

namespace qcrf {

/// Sentinel standing in for +infinity in energy terms. Large but finite so
/// that arithmetic stays IEEE-clean; adding two sentinels is a bug and is
/// asserted against.
constexpr double kInfiniteCost = 1e30;

namespace detail {
constexpr double kSentinelGuard = 1e29;   // anything above this counts as "infinite"
constexpr double kPairwiseLimit = 1e20;   // pairwise terms must stay well below the sentinel

inline double guarded_add(double a, double b) {
    check_invariant(!(a > kSentinelGuard && b > kSentinelGuard),
                    "two infinity sentinels added");
    return a + b;
}
}  // namespace detail

/// One binary pairwise term over variables i < j; e01 is the cost of
/// (x_i, x_j) = (0, 1).
struct PairwiseTerm {
    int i = 0;
    int j = 0;
    double e00 = 0, e01 = 0, e10 = 0, e11 = 0;
};

/// Carrier for a binary submodular energy: per-variable (cost0, cost1) plus
/// pairwise terms, at most one per unordered pair.
struct BinaryPairwiseProblem {
    int num_vars = 0;
    std::vector<std::pair<double, double>> unaries;
    std::vector<PairwiseTerm> pairwise;

    explicit BinaryPairwiseProblem(int n = 0) : num_vars(n), unaries(n, {0.0, 0.0}) {}

    void add_unary(int i, double cost0, double cost1) {
        unaries[i].first += cost0;
        unaries[i].second += cost1;
    }
    void add_term(int i, int j, double e00, double e01, double e10, double e11) {
        pairwise.push_back({i, j, e00, e01, e10, e11});
    }
    void add_potts(int i, int j, double weight) { add_term(i, j, 0.0, weight, weight, 0.0); }
};

/// Energy of an assignment, evaluated directly from the problem terms.
inline double evaluate(const BinaryPairwiseProblem& problem, const std::vector<int>& x) {
    double energy = 0.0;
    for (int i = 0; i < problem.num_vars; ++i)
        energy += x[i] ? problem.unaries[i].second : problem.unaries[i].first;
    for (const PairwiseTerm& t : problem.pairwise) {
        const int a = x[t.i], b = x[t.j];
        energy += a ? (b ? t.e11 : t.e10) : (b ? t.e01 : t.e00);
    }
    return energy;
}

struct MinCutResult {
    std::vector<int> assignment;
    double energy = 0.0;
};

namespace detail {

// Boykov-Kolmogorov max-flow: augmenting paths with search-tree reuse.
// Label 0 is the source side; ties between minimizers resolve toward it.
class FlowGraph {
  public:
    explicit FlowGraph(int num_nodes)
        : first_(num_nodes, kNone),
          parent_arc_(num_nodes, kNone),
          ts_(num_nodes, 0),
          dist_(num_nodes, 0),
          tr_cap_(num_nodes, 0.0),
          in_sink_tree_(num_nodes, 0),
          in_active_(num_nodes, 0),
          n_(num_nodes) {}

    void reserve_arcs(std::size_t count) {
        head_.reserve(2 * count);
        next_.reserve(2 * count);
        rcap_.reserve(2 * count);
    }

    // tr_cap > 0: residual capacity from source to i; < 0: from i to sink.
    void add_tweights(int i, double cap_source, double cap_sink) {
        tr_cap_[i] = guarded_add(tr_cap_[i], cap_source - cap_sink);
    }

    void add_edge(int i, int j, double cap) {
        const int a = static_cast<int>(head_.size());
        head_.push_back(j);
        next_.push_back(first_[i]);
        rcap_.push_back(cap);
        first_[i] = a;
        head_.push_back(i);
        next_.push_back(first_[j]);
        rcap_.push_back(0.0);
        first_[j] = a + 1;
    }

    double max_flow() {
        for (int i = 0; i < n_; ++i) {
            if (tr_cap_[i] != 0) {
                parent_arc_[i] = kTerminal;
                in_sink_tree_[i] = tr_cap_[i] < 0 ? 1 : 0;
                dist_[i] = 1;
                push_active(i);
            }
        }
        // One augmentation per growth scan; the timestamp advances with every
        // scan so path marks never outlive the adoption round they belong to.
        int current = kNoNode;
        for (;;) {
            int i = current;
            if (i != kNoNode && parent_arc_[i] == kNone) i = kNoNode;
            while (i == kNoNode && !active_.empty()) {
                i = pop_active();
                if (parent_arc_[i] == kNone) i = kNoNode;
            }
            if (i == kNoNode) break;
            const bool sink_side = in_sink_tree_[i] != 0;
            int connect = kNone;
            for (int a = first_[i]; a != kNone; a = next_[a]) {
                const double res = sink_side ? rcap_[a ^ 1] : rcap_[a];
                if (res <= 0) continue;
                const int j = head_[a];
                if (parent_arc_[j] == kNone) {
                    in_sink_tree_[j] = sink_side ? 1 : 0;
                    parent_arc_[j] = a ^ 1;
                    ts_[j] = ts_[i];
                    dist_[j] = dist_[i] + 1;
                    push_active(j);
                } else if ((in_sink_tree_[j] != 0) != sink_side) {
                    connect = sink_side ? (a ^ 1) : a;
                    break;
                } else if (ts_[j] <= ts_[i] && dist_[j] > dist_[i] + 1) {
                    // Heuristic re-parent: shorter path to the root.
                    parent_arc_[j] = a ^ 1;
                    ts_[j] = ts_[i];
                    dist_[j] = dist_[i] + 1;
                }
            }
            ++time_;
            if (connect != kNone) {
                current = i;  // stay on this node; it may find more paths
                augment(connect);
                adopt_orphans();
            } else {
                current = kNoNode;
            }
        }
        return flow_;
    }

    // After max_flow: true iff the node can still reach the sink, i.e. it is
    // on the sink side of the (source-maximal) minimum cut.
    std::vector<int> sink_side_labels() const {
        std::vector<int> label(n_, 0);
        std::vector<int> stack;
        for (int i = 0; i < n_; ++i)
            if (tr_cap_[i] < 0) {
                label[i] = 1;
                stack.push_back(i);
            }
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int a = first_[v]; a != kNone; a = next_[a]) {
                // rcap_[a^1] > 0 means the arc head->v has residual capacity,
                // so head can reach the sink through v.
                const int j = head_[a];
                if (!label[j] && rcap_[a ^ 1] > 0) {
                    label[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        return label;
    }

  private:
    static constexpr int kNone = -1;    // arc sentinel
    static constexpr int kNoNode = -1;  // node sentinel
    static constexpr int kTerminal = -2;
    static constexpr int kOrphan = -3;

    void push_active(int i) {
        if (!in_active_[i]) {
            in_active_[i] = 1;
            active_.push_back(i);
        }
    }
    int pop_active() {
        const int i = active_.front();
        active_.pop_front();
        in_active_[i] = 0;
        return i;
    }

    // ca: connecting arc from the source tree into the sink tree.
    void augment(int ca) {
        double bottleneck = rcap_[ca];
        for (int u = head_[ca ^ 1];; u = head_[parent_arc_[u]]) {
            const int pa = parent_arc_[u];
            if (pa == kTerminal) {
                bottleneck = std::min(bottleneck, tr_cap_[u]);
                break;
            }
            bottleneck = std::min(bottleneck, rcap_[pa ^ 1]);
        }
        for (int v = head_[ca];; v = head_[parent_arc_[v]]) {
            const int pa = parent_arc_[v];
            if (pa == kTerminal) {
                bottleneck = std::min(bottleneck, -tr_cap_[v]);
                break;
            }
            bottleneck = std::min(bottleneck, rcap_[pa]);
        }

        rcap_[ca] -= bottleneck;
        rcap_[ca ^ 1] += bottleneck;
        for (int u = head_[ca ^ 1];;) {
            const int pa = parent_arc_[u];
            if (pa == kTerminal) {
                tr_cap_[u] -= bottleneck;
                if (tr_cap_[u] <= 0) {
                    tr_cap_[u] = 0;
                    make_orphan_front(u);
                }
                break;
            }
            rcap_[pa] += bottleneck;
            rcap_[pa ^ 1] -= bottleneck;
            if (rcap_[pa ^ 1] <= 0) {
                rcap_[pa ^ 1] = 0;
                make_orphan_front(u);
            }
            u = head_[pa];
        }
        for (int v = head_[ca];;) {
            const int pa = parent_arc_[v];
            if (pa == kTerminal) {
                tr_cap_[v] += bottleneck;
                if (tr_cap_[v] >= 0) {
                    tr_cap_[v] = 0;
                    make_orphan_front(v);
                }
                break;
            }
            rcap_[pa] -= bottleneck;
            rcap_[pa ^ 1] += bottleneck;
            if (rcap_[pa] <= 0) {
                rcap_[pa] = 0;
                make_orphan_front(v);
            }
            v = head_[pa];
        }
        flow_ += bottleneck;
    }

    void make_orphan_front(int i) {
        parent_arc_[i] = kOrphan;
        orphans_.push_front(i);
    }
    void make_orphan_back(int i) {
        parent_arc_[i] = kOrphan;
        orphans_.push_back(i);
    }

    // Distance from j to its tree terminal, following real parent pointers.
    // Returns -1 if the chain dangles at an orphan or free node. Timestamp
    // marks cache verified distances within the current adoption round; the
    // step bound turns any would-be pointer cycle into a hard failure
    // instead of a hang.
    int rooted_distance(int j) {
        int d = 0;
        int u = j;
        for (;;) {
            if (ts_[u] == time_) {
                d += dist_[u];
                break;
            }
            const int pa = parent_arc_[u];
            ++d;
            if (pa == kTerminal) {
                ts_[u] = time_;
                dist_[u] = 1;
                break;
            }
            if (pa == kOrphan || pa == kNone) return -1;
            check_invariant(d <= n_, "parent chain longer than node count");
            u = head_[pa];
        }
        // Record verified distances along the walked prefix.
        int left = d;
        for (int w = j; ts_[w] != time_; w = head_[parent_arc_[w]]) {
            ts_[w] = time_;
            dist_[w] = left--;
        }
        return d;
    }

    void adopt_orphans() {
        while (!orphans_.empty()) {
            const int i = orphans_.front();
            orphans_.pop_front();
            const bool sink_side = in_sink_tree_[i] != 0;
            // Look for a new parent in the same tree, reachable from a
            // terminal, preferring the shortest rooted path.
            int best_arc = kNone;
            int best_dist = std::numeric_limits<int>::max();
            for (int a = first_[i]; a != kNone; a = next_[a]) {
                const double res = sink_side ? rcap_[a] : rcap_[a ^ 1];
                if (res <= 0) continue;
                const int j = head_[a];
                if ((in_sink_tree_[j] != 0) != sink_side || parent_arc_[j] == kNone) continue;
                const int d = rooted_distance(j);
                if (d >= 0 && d < best_dist) {
                    best_arc = a;
                    best_dist = d;
                }
            }
            if (best_arc != kNone) {
                parent_arc_[i] = best_arc;
                ts_[i] = time_;
                dist_[i] = best_dist + 1;
                continue;
            }
            // No parent: the node leaves its tree; neighbors that pointed at
            // it become orphans and potential growers become active again.
            ts_[i] = 0;
            for (int a = first_[i]; a != kNone; a = next_[a]) {
                const int j = head_[a];
                if ((in_sink_tree_[j] != 0) != sink_side || parent_arc_[j] == kNone) continue;
                const double res = sink_side ? rcap_[a] : rcap_[a ^ 1];
                if (res > 0) push_active(j);
                const int pa = parent_arc_[j];
                if (pa != kTerminal && pa != kOrphan && head_[pa] == i) make_orphan_back(j);
            }
            parent_arc_[i] = kNone;
        }
    }

    std::vector<int> first_;
    std::vector<int> head_, next_;
    std::vector<double> rcap_;
    std::vector<int> parent_arc_;
    std::vector<int> ts_, dist_;
    std::vector<double> tr_cap_;
    std::vector<char> in_sink_tree_, in_active_;
    std::deque<int> active_, orphans_;
    double flow_ = 0.0;
    int time_ = 0;
    int n_ = 0;
};

// FIFO push-relabel with an explicit source and sink, a gap heuristic and
// BFS-initialized heights. Augmenting-path engines pay one augmentation per
// saturated arc, which is ruinous on the dense pixel-level oracle graphs
// where minimum cuts cross millions of tiny-capacity arcs; push-relabel
// saturates each arc with a single O(1) push. The source-maximal minimum cut
// is unique, so both engines return identical assignments.
class PreflowGraph {
  public:
    explicit PreflowGraph(int num_nodes)
        : n_(num_nodes),
          source_(num_nodes),
          sink_(num_nodes + 1),
          total_(num_nodes + 2),
          first_(num_nodes + 2, kNone),
          tr_cap_(num_nodes, 0.0) {}

    void reserve_arcs(std::size_t count) {
        head_.reserve(2 * (count + n_));
        next_.reserve(2 * (count + n_));
        rcap_.reserve(2 * (count + n_));
    }

    void add_tweights(int i, double cap_source, double cap_sink) {
        tr_cap_[i] = guarded_add(tr_cap_[i], cap_source - cap_sink);
    }

    void add_edge(int i, int j, double cap) {
        const int a = static_cast<int>(head_.size());
        head_.push_back(j);
        next_.push_back(first_[i]);
        rcap_.push_back(cap);
        first_[i] = a;
        head_.push_back(i);
        next_.push_back(first_[j]);
        rcap_.push_back(0.0);
        first_[j] = a + 1;
    }

    void max_flow() {
        for (int i = 0; i < n_; ++i) {
            if (tr_cap_[i] > 0)
                add_edge(source_, i, tr_cap_[i]);
            else if (tr_cap_[i] < 0)
                add_edge(i, sink_, -tr_cap_[i]);
        }
        excess_.assign(total_, 0.0);
        height_.assign(total_, 0);
        cur_arc_ = first_;
        in_queue_.assign(total_, 0);
        height_count_.assign(2 * total_ + 1, 0);

        // BFS heights: distance to the sink through residual arcs.
        std::deque<int> bfs{sink_};
        std::vector<char> seen(total_, 0);
        seen[sink_] = 1;
        while (!bfs.empty()) {
            const int v = bfs.front();
            bfs.pop_front();
            for (int a = first_[v]; a != kNone; a = next_[a]) {
                const int j = head_[a];
                if (!seen[j] && rcap_[a ^ 1] > 0) {
                    seen[j] = 1;
                    height_[j] = height_[v] + 1;
                    bfs.push_back(j);
                }
            }
        }
        for (int v = 0; v < total_; ++v)
            if (!seen[v]) height_[v] = total_;
        height_[source_] = total_;
        for (int v = 0; v < total_; ++v) ++height_count_[height_[v]];

        for (int a = first_[source_]; a != kNone; a = next_[a]) {
            const double cap = rcap_[a];
            if (cap <= 0) continue;
            rcap_[a] = 0;
            rcap_[a ^ 1] += cap;
            excess_[head_[a]] += cap;
            enqueue(head_[a]);
        }
        while (!queue_.empty()) {
            const int u = queue_.front();
            queue_.pop_front();
            in_queue_[u] = 0;
            discharge(u);
        }
    }

    std::vector<int> sink_side_labels() const {
        std::vector<int> label(n_, 0);
        std::vector<char> reach(total_, 0);
        std::vector<int> stack{sink_};
        reach[sink_] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int a = first_[v]; a != kNone; a = next_[a]) {
                const int j = head_[a];
                if (!reach[j] && rcap_[a ^ 1] > 0) {
                    reach[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        for (int i = 0; i < n_; ++i) label[i] = reach[i];
        return label;
    }

  private:
    static constexpr int kNone = -1;

    void enqueue(int u) {
        if (u == source_ || u == sink_ || in_queue_[u]) return;
        in_queue_[u] = 1;
        queue_.push_back(u);
    }

    void discharge(int u) {
        while (excess_[u] > 0) {
            if (cur_arc_[u] == kNone) {
                relabel(u);
                if (height_[u] >= 2 * total_) break;
                cur_arc_[u] = first_[u];
                continue;
            }
            const int a = cur_arc_[u];
            const int v = head_[a];
            if (rcap_[a] > 0 && height_[u] == height_[v] + 1) {
                const double delta = std::min(excess_[u], rcap_[a]);
                rcap_[a] -= delta;
                rcap_[a ^ 1] += delta;
                excess_[u] -= delta;
                if (v != source_ && v != sink_) {
                    excess_[v] += delta;
                    enqueue(v);
                }
            } else {
                cur_arc_[u] = next_[a];
            }
        }
    }

    void relabel(int u) {
        const int old = height_[u];
        int lowest = 2 * total_;
        for (int a = first_[u]; a != kNone; a = next_[a])
            if (rcap_[a] > 0) lowest = std::min(lowest, height_[head_[a]] + 1);
        --height_count_[old];
        height_[u] = lowest;
        if (lowest <= 2 * total_) ++height_count_[std::min(lowest, 2 * total_)];
        // Gap heuristic: an emptied level below total_ strands everything
        // above it on the sink side; lift those nodes past the gap.
        if (height_count_[old] == 0 && old < total_) {
            for (int v = 0; v < total_; ++v) {
                if (v == source_) continue;
                if (height_[v] > old && height_[v] < total_) {
                    --height_count_[height_[v]];
                    height_[v] = total_ + 1;
                    ++height_count_[height_[v]];
                }
            }
        }
    }

    int n_, source_, sink_, total_;
    std::vector<int> first_;
    std::vector<int> head_, next_;
    std::vector<double> rcap_;
    std::vector<double> tr_cap_;
    std::vector<double> excess_;
    std::vector<int> height_, cur_arc_;
    std::vector<int> height_count_;
    std::vector<char> in_queue_;
    std::deque<int> queue_;
};

enum class MinCutEngine { auto_select, augmenting_paths, push_relabel };

template <typename Graph>
inline MinCutResult run_min_cut(const BinaryPairwiseProblem& problem) {
    const int n = problem.num_vars;
    Graph graph(n);
    graph.reserve_arcs(problem.pairwise.size());
    std::vector<double> extra1(n, 0.0);  // label-1 cost picked up from pairwise terms

    // Duplicate-pair detection, bit per unordered pair (skipped for very
    // large variable counts where the bitmap would dominate memory).
    std::vector<std::uint64_t> seen;
    const bool track_pairs = n <= 16384;
    if (track_pairs && !problem.pairwise.empty())
        seen.assign((static_cast<std::size_t>(n) * n + 63) / 64, 0);

    for (const PairwiseTerm& t : problem.pairwise) {
        require(t.i >= 0 && t.i < t.j && t.j < n, "pairwise term needs 0 <= i < j < n");
        require(std::abs(t.e00) < kPairwiseLimit && std::abs(t.e01) < kPairwiseLimit &&
                    std::abs(t.e10) < kPairwiseLimit && std::abs(t.e11) < kPairwiseLimit,
                "pairwise term magnitude out of range");
        if (track_pairs) {
            const std::size_t key = static_cast<std::size_t>(t.i) * n + t.j;
            require(!(seen[key >> 6] & (1ull << (key & 63))),
                    "duplicate pairwise term for a variable pair");
            seen[key >> 6] |= 1ull << (key & 63);
        }
        double beta = (t.e01 + t.e10) - (t.e00 + t.e11);
        if (beta < 0) {
            const double scale = std::max({1.0, std::abs(t.e00), std::abs(t.e01),
                                           std::abs(t.e10), std::abs(t.e11)});
            require(beta >= -1e-9 * scale, "non-submodular pairwise term");
            beta = 0.0;  // rounding noise from exact truncation upstream
        }
        // theta(x_i, x_j) = e00 + (e10 - e00) x_i + (e11 - e10) x_j
        //                 + beta [x_i = 0, x_j = 1]
        extra1[t.i] += t.e10 - t.e00;
        extra1[t.j] += t.e11 - t.e10;
        if (beta > 0) graph.add_edge(t.i, t.j, beta);
    }
    for (int i = 0; i < n; ++i) {
        const double cost0 = problem.unaries[i].first;
        const double cost1 = guarded_add(problem.unaries[i].second, extra1[i]);
        // The cut pays cost1 if i ends on the sink side, cost0 otherwise.
        graph.add_tweights(i, cost1, cost0);
    }

    graph.max_flow();
    MinCutResult result;
    result.assignment = graph.sink_side_labels();
    result.energy = evaluate(problem, result.assignment);
    return result;
}

}  // namespace detail

/// Exact minimizer of a submodular binary pairwise energy via min-cut.
/// Ties between minimizers resolve toward label 0 (the source side).
/// Non-submodular terms are rejected; truncation is the caller's job.
/// Small graphs run Boykov-Kolmogorov search-tree reuse; very dense graphs
/// (the pixel-level oracle) run push-relabel. Both return the identical
/// source-maximal optimum.
inline MinCutResult min_cut(const BinaryPairwiseProblem& problem,
                            detail::MinCutEngine engine = detail::MinCutEngine::auto_select) {
    const int n = problem.num_vars;
    detail::require(n >= 1, "min_cut needs at least one variable");
    detail::require(static_cast<int>(problem.unaries.size()) == n,
                    "unary list size mismatch");
    for (int i = 0; i < n; ++i) {
        const auto [c0, c1] = problem.unaries[i];
        detail::require(std::isfinite(c0) && std::isfinite(c1), "non-finite unary cost");
        detail::require(c0 < detail::kSentinelGuard || c1 < detail::kSentinelGuard,
                        "variable with both unaries infinite: infeasible");
    }
    if (engine == detail::MinCutEngine::auto_select)
        engine = problem.pairwise.size() > 200000 ? detail::MinCutEngine::push_relabel
                                                  : detail::MinCutEngine::augmenting_paths;
    return engine == detail::MinCutEngine::push_relabel
               ? detail::run_min_cut<detail::PreflowGraph>(problem)
               : detail::run_min_cut<detail::FlowGraph>(problem);
}

}  // namespace qcrf

#endif

