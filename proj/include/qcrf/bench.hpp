#ifndef QCRF_BENCH_HPP
#define QCRF_BENCH_HPP

#include <chrono>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "qcrf/baselines.hpp"
#include "qcrf/binary_solver.hpp"
#include "qcrf/core.hpp"
#include "qcrf/errors.hpp"
#include "qcrf/multilabel_solver.hpp"
#include "qcrf/oracle.hpp"
#include "qcrf/superpix.hpp"
#include "qcrf/synthetic.hpp"
#include "qcrf/weights.hpp"

namespace qcrf {

enum class Method { expansion, meanfield, icm, spicm, exact };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::expansion: return "expansion";
        case Method::meanfield: return "meanfield";
        case Method::icm: return "icm";
        case Method::spicm: return "spicm";
        case Method::exact: return "exact";
    }
    return "?";
}

inline Method method_from_string(const std::string& name) {
    if (name == "expansion") return Method::expansion;
    if (name == "meanfield") return Method::meanfield;
    if (name == "icm") return Method::icm;
    if (name == "spicm") return Method::spicm;
    if (name == "exact") return Method::exact;
    throw input_error("unknown method: " + name);
}

struct SolverConfigs {
    BinarySolverConfig binary;
    MultilabelSolverConfig multilabel;
    IcmConfig icm;
    MeanFieldConfig meanfield;
};

inline Labeling argmin_labeling(const UnaryCosts& unary) {
    Labeling x(unary.num_pixels());
    for (int p = 0; p < unary.num_pixels(); ++p) {
        int best = 0;
        for (int l = 1; l < unary.num_labels; ++l)
            if (unary.at(p, l) < unary.at(p, best)) best = l;
        x[p] = best;
    }
    return x;
}

struct MethodOutcome {
    Labeling labeling;
    double energy = 0.0;
};

/// Uniform entry point used by the CLI and the sweeps. ICM variants start
/// from the per-pixel unary argmin.
inline MethodOutcome run_method(Method method, const UnaryCosts& unary,
                                const SuperpixelPartition& partition,
                                const WeightTable& weights,
                                const SolverConfigs& configs = {}) {
    switch (method) {
        case Method::expansion:
            if (unary.num_labels == 2) {
                BinarySolveResult r = solve_binary(unary, partition, weights, configs.binary);
                return {std::move(r.labeling), r.energy};
            } else {
                MultilabelSolveResult r =
                    solve_multilabel(unary, partition, weights, configs.multilabel);
                return {std::move(r.labeling), r.energy};
            }
        case Method::meanfield: {
            MeanFieldResult r = mean_field(unary, partition, weights, configs.meanfield);
            return {std::move(r.labeling), r.energy};
        }
        case Method::icm: {
            IcmResult r =
                icm_pixel(unary, partition, weights, argmin_labeling(unary), configs.icm);
            return {std::move(r.labeling), r.energy};
        }
        case Method::spicm: {
            IcmResult r = icm_superpixel(unary, partition, weights, argmin_labeling(unary),
                                         configs.icm);
            return {std::move(r.labeling), r.energy};
        }
        case Method::exact: {
            OracleResult r = exact_binary(unary, partition, weights);
            return {std::move(r.labeling), r.energy};
        }
    }
    throw input_error("unknown method");
}

struct BenchCell {
    std::string instance;
    Method method = Method::expansion;
    double lambda = 0.0;
    bool ok = true;
    double energy = 0.0;
    double gap = 0.0;
    double seconds = 0.0;
};

struct SweepConfig {
    int instances = 10;
    std::vector<double> lambdas{0.1, 0.3, 0.5, 1.0, 2.0};
    SyntheticConfig synthetic;
    int superpixel_target = 20;
    double compactness = 10.0;
    EnergyParams params;  // smoothness is replaced by each lambda
    std::vector<Method> methods{Method::expansion, Method::meanfield, Method::spicm};
    SolverConfigs configs;
};

inline double energy_gap(double energy, double reference) {
    if (energy == reference) return 0.0;
    if (reference == 0.0) return std::numeric_limits<double>::infinity();
    return (energy - reference) / reference;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/// Binary sweep: gap of every method against the exact pixel-level graph cut.
inline std::vector<BenchCell> run_binary_sweep(const SweepConfig& cfg) {
    detail::require(cfg.synthetic.num_labels == 2, "binary sweep needs two labels");
    std::vector<BenchCell> cells;
    for (int i = 0; i < cfg.instances; ++i) {
        SyntheticConfig synth = cfg.synthetic;
        synth.seed = cfg.synthetic.seed + static_cast<std::uint32_t>(i);
        const SyntheticInstance inst = make_instance(synth);
        const SuperpixelPartition partition =
            slic_partition(inst.image, cfg.superpixel_target, cfg.compactness);
        const std::string name = "synthetic-" + std::to_string(i);
        for (double lambda : cfg.lambdas) {
            EnergyParams params = cfg.params;
            params.smoothness = lambda;
            const WeightTable weights = build_weights(partition, params);
            const double reference =
                exact_binary(inst.unary, partition, weights).energy;
            for (Method method : cfg.methods) {
                BenchCell cell;
                cell.instance = name;
                cell.method = method;
                cell.lambda = lambda;
                const auto start = std::chrono::steady_clock::now();
                try {
                    const MethodOutcome out =
                        run_method(method, inst.unary, partition, weights, cfg.configs);
                    cell.seconds = detail::seconds_since(start);
                    cell.energy = out.energy;
                    cell.gap = energy_gap(out.energy, reference);
                } catch (const std::exception&) {
                    cell.ok = false;
                }
                cells.push_back(cell);
            }
        }
    }
    return cells;
}

/// Multi-label sweep: no exact optimum is available, so gaps are measured
/// against the best energy any method found on that cell.
inline std::vector<BenchCell> run_multilabel_sweep(const SweepConfig& cfg) {
    std::vector<BenchCell> cells;
    for (int i = 0; i < cfg.instances; ++i) {
        SyntheticConfig synth = cfg.synthetic;
        synth.seed = cfg.synthetic.seed + static_cast<std::uint32_t>(i);
        const SyntheticInstance inst = make_instance(synth);
        const SuperpixelPartition partition =
            slic_partition(inst.image, cfg.superpixel_target, cfg.compactness);
        const std::string name = "synthetic-" + std::to_string(i);
        for (double lambda : cfg.lambdas) {
            EnergyParams params = cfg.params;
            params.smoothness = lambda;
            const WeightTable weights = build_weights(partition, params);
            std::vector<BenchCell> group;
            double best = std::numeric_limits<double>::infinity();
            for (Method method : cfg.methods) {
                BenchCell cell;
                cell.instance = name;
                cell.method = method;
                cell.lambda = lambda;
                const auto start = std::chrono::steady_clock::now();
                try {
                    const MethodOutcome out =
                        run_method(method, inst.unary, partition, weights, cfg.configs);
                    cell.seconds = detail::seconds_since(start);
                    cell.energy = out.energy;
                    best = std::min(best, out.energy);
                } catch (const std::exception&) {
                    cell.ok = false;
                }
                group.push_back(cell);
            }
            for (BenchCell& cell : group) {
                if (cell.ok) cell.gap = energy_gap(cell.energy, best);
                cells.push_back(cell);
            }
        }
    }
    return cells;
}

inline void write_bench_csv(const std::vector<BenchCell>& cells, std::ostream& out) {
    out << "instance,method,lambda,energy,gap,wall_time_seconds\n";
    char buf[128];
    for (const BenchCell& cell : cells) {
        out << cell.instance << ',' << to_string(cell.method) << ',';
        std::snprintf(buf, sizeof buf, "%.17g", cell.lambda);
        out << buf << ',';
        if (cell.ok) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.6f", cell.energy, cell.gap,
                          cell.seconds);
            out << buf << '\n';
        } else {
            out << "error,error,error\n";
        }
    }
}

struct ModelConvergencePoint {
    int superpixels = 0;
    double quantized = 0.0;
    double gaussian = 0.0;
    double relative_percent = 0.0;
};

/// Quantized-vs-Gaussian pairwise energy of a fixed labeling across a range
/// of superpixel counts. At one superpixel per pixel the two models coincide
/// exactly.
inline std::vector<ModelConvergencePoint> model_convergence(
    const GridImage& image, const Labeling& labeling,
    const std::vector<int>& superpixel_counts, const EnergyParams& params,
    double compactness = 10.0) {
    const double gaussian = gaussian_pairwise_energy(image, labeling, params);
    int num_labels = 2;
    for (int l : labeling) num_labels = std::max(num_labels, l + 1);

    std::vector<ModelConvergencePoint> points;
    for (int count : superpixel_counts) {
        const SuperpixelPartition partition =
            count >= image.num_pixels() ? singleton_partition(image)
                                        : slic_partition(image, count, compactness);
        const WeightTable weights = build_weights(partition, params);
        ModelConvergencePoint point;
        point.superpixels = partition.count;
        point.quantized = pairwise_energy(labeling, partition, weights, num_labels);
        point.gaussian = gaussian;
        point.relative_percent = relative_difference(point.quantized, gaussian);
        points.push_back(point);
    }
    return points;
}

}  // namespace qcrf

#endif
