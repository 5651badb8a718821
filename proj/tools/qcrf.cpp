// Command-line front end: superpixel generation, weight dumps, inference,
// benchmark sweeps and IOU evaluation over the binary file formats.
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcrf/qcrf.hpp"

namespace {

struct ParamFlags {
    qcrf::EnergyParams params;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda1", params.lambda1, "spatial kernel weight");
        cmd->add_option("--lambda2", params.lambda2, "intensity kernel weight");
        cmd->add_option("--beta1", params.beta1, "internal variance bandwidth");
        cmd->add_option("--beta2", params.beta2, "centroid distance bandwidth");
        cmd->add_option("--beta3", params.beta3, "mean intensity bandwidth");
        cmd->add_option("--smoothness", params.smoothness,
                        "global multiplier on all pairwise weights");
    }
};

double now_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> parse_lambdas(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(std::stod(csv.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty()) throw qcrf::input_error("empty lambda list");
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw qcrf::input_error("cannot open output file: " + path);
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Inference for fully connected Potts CRFs with superpixel-quantized edges"};
    app.require_subcommand(1);
    app.set_config("--config", "", "declarative config file; command-line flags win");

    // ---- superpix ----
    auto* sp = app.add_subcommand("superpix", "compute a SLIC superpixel map");
    std::string sp_image, sp_out;
    int sp_count = 200;
    double sp_compact = 10.0;
    sp->add_option("--image", sp_image, "input P5 PGM image")->required();
    sp->add_option("--count", sp_count, "target superpixel count");
    sp->add_option("--compactness", sp_compact, "SLIC compactness");
    sp->add_option("--out", sp_out, "output superpixel map")->required();

    // ---- weights ----
    auto* wt = app.add_subcommand("weights", "build and dump the quantized weight table");
    std::string wt_image, wt_map, wt_out;
    ParamFlags wt_params;
    wt->add_option("--image", wt_image, "input P5 PGM image")->required();
    wt->add_option("--superpixels", wt_map, "superpixel map file")->required();
    wt->add_option("--out", wt_out, "output CSV (s,t,w)")->required();
    wt_params.attach(wt);

    // ---- solve ----
    auto* sv = app.add_subcommand("solve", "run inference on a unary tensor");
    std::string sv_method = "expansion", sv_unary, sv_map, sv_image, sv_out, sv_trace,
                sv_dumpq;
    ParamFlags sv_params;
    int sv_max_sweeps = 4, sv_max_outer = 5, sv_max_iters = 100;
    double sv_tol = 1e-5;
    sv->add_option("--method", sv_method, "expansion|meanfield|icm|spicm|exact")
        ->check(CLI::IsMember({"expansion", "meanfield", "icm", "spicm", "exact"}));
    sv->add_option("--unary", sv_unary, "unary tensor file")->required();
    sv->add_option("--superpixels", sv_map, "superpixel map file")->required();
    sv->add_option("--image", sv_image, "P5 PGM image (superpixel statistics)")->required();
    sv->add_option("--out", sv_out, "output labeling (P5 PGM)")->required();
    sv->add_option("--trace", sv_trace, "optional CSV of accepted-move energies");
    sv->add_option("--dump-q", sv_dumpq, "dump mean-field beliefs in the unary format");
    sv->add_option("--max-sweeps", sv_max_sweeps, "expansion sweeps (binary)");
    sv->add_option("--max-outer-sweeps", sv_max_outer, "outer sweeps (multi-label)");
    sv->add_option("--max-iters", sv_max_iters, "ICM / mean-field iteration cap");
    sv->add_option("--tol", sv_tol, "mean-field convergence tolerance");
    sv_params.attach(sv);

    // ---- bench ----
    auto* bn = app.add_subcommand("bench", "benchmark sweeps on seeded synthetic instances");
    std::string bn_suite = "binary", bn_out, bn_lambdas = "0.1,0.3,0.5,1,2",
                bn_counts = "50,150,500";
    ParamFlags bn_params;
    qcrf::SweepConfig bn_cfg;
    bn->add_option("--suite", bn_suite, "binary|multilabel|model")
        ->check(CLI::IsMember({"binary", "multilabel", "model"}));
    bn->add_option("--out", bn_out, "output CSV")->required();
    bn->add_option("--instances", bn_cfg.instances, "number of synthetic instances");
    bn->add_option("--width", bn_cfg.synthetic.width, "instance width");
    bn->add_option("--height", bn_cfg.synthetic.height, "instance height");
    bn->add_option("--labels", bn_cfg.synthetic.num_labels, "label count");
    bn->add_option("--sites", bn_cfg.synthetic.num_sites, "Voronoi sites");
    bn->add_option("--margin", bn_cfg.synthetic.margin, "unary margin");
    bn->add_option("--noise", bn_cfg.synthetic.unary_noise, "unary noise sigma");
    bn->add_option("--seed", bn_cfg.synthetic.seed, "base seed");
    bn->add_option("--superpixels", bn_cfg.superpixel_target, "superpixels per instance");
    bn->add_option("--compactness", bn_cfg.compactness, "SLIC compactness");
    bn->add_option("--lambdas", bn_lambdas, "comma-separated smoothness values");
    bn->add_option("--counts", bn_counts,
                   "comma-separated superpixel counts (model suite)");
    bn_params.attach(bn);

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "intersection-over-union of two labelings");
    std::string ev_pred, ev_gt;
    int ev_labels = 0, ev_ignore = -1;
    ev->add_option("--pred", ev_pred, "predicted labeling (P5 PGM)")->required();
    ev->add_option("--gt", ev_gt, "ground-truth labeling (P5 PGM)")->required();
    ev->add_option("--labels", ev_labels, "class count (default: from PGM maxval)");
    ev->add_option("--ignore", ev_ignore, "ground-truth label excluded from scoring");

    CLI11_PARSE(app, argc, argv);

    if (sp->parsed()) {
        const qcrf::GridImage image = qcrf::read_image_pgm(sp_image);
        const qcrf::SuperpixelPartition part =
            qcrf::slic_partition(image, sp_count, sp_compact);
        qcrf::write_superpixel_map(part, sp_out);
        std::printf("superpixels=%d\n", part.count);
        return 0;
    }

    if (wt->parsed()) {
        const qcrf::GridImage image = qcrf::read_image_pgm(wt_image);
        const qcrf::SuperpixelMap map = qcrf::read_superpixel_map(wt_map);
        if (map.width != image.width || map.height != image.height)
            throw qcrf::input_error("superpixel map dimensions do not match image");
        const qcrf::SuperpixelPartition part = qcrf::make_partition(image, map.assignment);
        const qcrf::WeightTable table = qcrf::build_weights(part, wt_params.params);
        auto out = open_out(wt_out);
        qcrf::write_weight_csv(table, out);
        std::printf("superpixels=%d entries=%d\n", part.count,
                    part.count * (part.count + 1) / 2);
        return 0;
    }

    if (sv->parsed()) {
        const qcrf::GridImage image = qcrf::read_image_pgm(sv_image);
        const qcrf::UnaryCosts unary = qcrf::read_unary(sv_unary);
        const qcrf::SuperpixelMap map = qcrf::read_superpixel_map(sv_map);
        if (map.width != image.width || map.height != image.height ||
            unary.width != image.width || unary.height != image.height)
            throw qcrf::input_error("input dimensions do not agree");
        const qcrf::SuperpixelPartition part = qcrf::make_partition(image, map.assignment);
        const qcrf::WeightTable weights = qcrf::build_weights(part, sv_params.params);

        qcrf::SolverConfigs configs;
        configs.binary.max_sweeps = sv_max_sweeps;
        configs.multilabel.max_outer_sweeps = sv_max_outer;
        configs.icm.max_iters = sv_max_iters;
        configs.meanfield.max_iters = sv_max_iters;
        configs.meanfield.tol = sv_tol;

        const qcrf::Method method = qcrf::method_from_string(sv_method);
        const auto start = std::chrono::steady_clock::now();

        qcrf::Labeling labeling;
        double energy = 0.0;
        std::vector<double> trace;
        if (method == qcrf::Method::expansion && unary.num_labels == 2) {
            qcrf::BinarySolveResult r = qcrf::solve_binary(unary, part, weights,
                                                           configs.binary);
            labeling = std::move(r.labeling);
            energy = r.energy;
            trace = std::move(r.trace);
        } else if (method == qcrf::Method::expansion) {
            qcrf::MultilabelSolveResult r =
                qcrf::solve_multilabel(unary, part, weights, configs.multilabel);
            labeling = std::move(r.labeling);
            energy = r.energy;
            trace = std::move(r.trace);
        } else if (method == qcrf::Method::meanfield) {
            qcrf::MeanFieldResult r = qcrf::mean_field(unary, part, weights,
                                                       configs.meanfield);
            labeling = std::move(r.labeling);
            energy = r.energy;
            if (!sv_dumpq.empty()) {
                qcrf::UnaryCosts q;
                q.width = unary.width;
                q.height = unary.height;
                q.num_labels = unary.num_labels;
                q.costs = r.state.q;
                qcrf::write_unary(q, sv_dumpq);
            }
        } else {
            qcrf::MethodOutcome out =
                qcrf::run_method(method, unary, part, weights, configs);
            labeling = std::move(out.labeling);
            energy = out.energy;
        }
        const double seconds = now_seconds(start);

        qcrf::write_labeling_pgm(labeling, unary.width, unary.height, unary.num_labels,
                                 sv_out);
        if (!sv_trace.empty()) {
            auto out = open_out(sv_trace);
            out << "move,energy\n";
            char buf[64];
            for (std::size_t i = 0; i < trace.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, trace[i]);
                out << buf;
            }
        }
        std::printf("method=%s energy=%.17g seconds=%.6f\n", sv_method.c_str(), energy,
                    seconds);
        return 0;
    }

    if (bn->parsed()) {
        bn_cfg.params = bn_params.params;
        bn_cfg.lambdas = parse_lambdas(bn_lambdas);
        auto out = open_out(bn_out);
        if (bn_suite == "model") {
            const qcrf::SyntheticInstance inst = qcrf::make_instance(bn_cfg.synthetic);
            std::vector<int> counts;
            for (double v : parse_lambdas(bn_counts)) counts.push_back(static_cast<int>(v));
            counts.push_back(inst.image.num_pixels());
            const auto points = qcrf::model_convergence(inst.image, inst.planted, counts,
                                                        bn_cfg.params, bn_cfg.compactness);
            out << "superpixels,quantized,gaussian,relative_percent\n";
            char buf[128];
            for (const auto& pt : points) {
                std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", pt.superpixels,
                              pt.quantized, pt.gaussian, pt.relative_percent);
                out << buf;
            }
            std::printf("points=%zu\n", points.size());
            return 0;
        }
        const std::vector<qcrf::BenchCell> cells = bn_suite == "binary"
                                                       ? qcrf::run_binary_sweep(bn_cfg)
                                                       : qcrf::run_multilabel_sweep(bn_cfg);
        qcrf::write_bench_csv(cells, out);
        std::printf("cells=%zu\n", cells.size());
        return 0;
    }

    if (ev->parsed()) {
        const qcrf::LabelingFile pred = qcrf::read_labeling_pgm(ev_pred);
        const qcrf::LabelingFile gt = qcrf::read_labeling_pgm(ev_gt);
        if (pred.width != gt.width || pred.height != gt.height)
            throw qcrf::input_error("labeling dimensions do not agree");
        const int k = ev_labels > 0 ? ev_labels
                                    : std::max(pred.num_labels, gt.num_labels);
        const qcrf::IouResult iou = qcrf::eval_iou(pred.labeling, gt.labeling, k, ev_ignore);
        for (int l = 0; l < k; ++l)
            if (iou.present[l]) std::printf("class %d iou %.6f\n", l, iou.per_class[l]);
        std::printf("mean_iou %.6f\n", iou.mean);
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const qcrf::input_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const qcrf::internal_error& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}
