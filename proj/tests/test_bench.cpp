#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "qcrf/bench.hpp"
#include "qcrf/metrics.hpp"
#include "test_util.hpp"

using namespace qcrf;

TEST_CASE("IOU of identical labelings is one for every present class", "[bench]") {
    const Labeling x{0, 1, 2, 1, 0};
    const IouResult r = eval_iou(x, x, 4);
    REQUIRE(r.present[0]);
    REQUIRE(r.present[1]);
    REQUIRE(r.present[2]);
    REQUIRE_FALSE(r.present[3]);  // absent from both, excluded from the mean
    for (int l = 0; l < 3; ++l) REQUIRE(r.per_class[l] == 1.0);
    REQUIRE(r.mean == 1.0);
}

TEST_CASE("disjoint masks score zero", "[bench]") {
    const Labeling pred{1, 1, 0, 0};
    const Labeling gt{0, 0, 1, 1};
    const IouResult r = eval_iou(pred, gt, 2);
    REQUIRE(r.per_class[0] == 0.0);
    REQUIRE(r.per_class[1] == 0.0);
    REQUIRE(r.mean == 0.0);
}

TEST_CASE("half-overlapping masks score one third", "[bench]") {
    // intersection a = 2, union 3a = 6
    const Labeling pred{1, 1, 1, 1, 0, 0, 0, 0};
    const Labeling gt{0, 0, 1, 1, 1, 1, 0, 0};
    const IouResult r = eval_iou(pred, gt, 2);
    REQUIRE(r.per_class[1] == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("ignore label removes pixels from both intersection and union", "[bench]") {
    const Labeling pred{0, 1, 1, 0};
    const Labeling gt{0, 255, 255, 1};
    const IouResult r = eval_iou(pred, gt, 2, 255);
    // evaluated pixels: 0 (0/0 match) and 3 (pred 0, gt 1)
    REQUIRE(r.per_class[0] == Catch::Approx(0.5));
    REQUIRE(r.per_class[1] == 0.0);
    REQUIRE_THROWS_AS(eval_iou(pred, {0, 1}, 2), input_error);
}

TEST_CASE("synthetic instances are seed-deterministic", "[bench]") {
    SyntheticConfig cfg;
    cfg.width = 16;
    cfg.height = 12;
    cfg.seed = 9;
    const SyntheticInstance a = make_instance(cfg);
    const SyntheticInstance b = make_instance(cfg);
    REQUIRE(a.image.intensities == b.image.intensities);
    REQUIRE(a.planted == b.planted);
    REQUIRE(a.unary.costs == b.unary.costs);
    cfg.seed = 10;
    const SyntheticInstance c = make_instance(cfg);
    REQUIRE(a.unary.costs != c.unary.costs);
    for (int p = 0; p < a.unary.num_pixels(); ++p)
        REQUIRE(std::min(a.unary.at(p, 0), a.unary.at(p, 1)) == 0.0);
}

TEST_CASE("binary sweep covers every cell exactly once", "[bench]") {
    SweepConfig cfg;
    cfg.instances = 2;
    cfg.lambdas = {0.0, 0.4};
    cfg.synthetic.width = 18;
    cfg.synthetic.height = 18;
    cfg.synthetic.margin = 20.0;
    cfg.synthetic.unary_noise = 6.0;
    cfg.synthetic.num_sites = 8;
    cfg.superpixel_target = 6;
    cfg.params.beta2 = 10.0;
    cfg.methods = {Method::expansion, Method::meanfield, Method::spicm};

    const std::vector<BenchCell> cells = run_binary_sweep(cfg);
    REQUIRE(cells.size() == 2 * 2 * 3);
    std::map<std::tuple<std::string, std::string, double>, int> seen;
    for (const BenchCell& cell : cells) {
        ++seen[{cell.instance, to_string(cell.method), cell.lambda}];
        REQUIRE(cell.ok);
        if (cell.lambda == 0.0) REQUIRE(cell.gap == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(cell.gap >= -1e-12);
    }
    for (const auto& [key, count] : seen) REQUIRE(count == 1);

    std::ostringstream csv;
    write_bench_csv(cells, csv);
    const std::string text = csv.str();
    REQUIRE(text.rfind("instance,method,lambda,energy,gap,wall_time_seconds\n", 0) == 0);
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 1 + 12);
}

TEST_CASE("multilabel sweep measures gaps against the best finisher", "[bench]") {
    SweepConfig cfg;
    cfg.instances = 1;
    cfg.lambdas = {0.2};
    cfg.synthetic.width = 16;
    cfg.synthetic.height = 16;
    cfg.synthetic.num_labels = 3;
    cfg.synthetic.margin = 20.0;
    cfg.synthetic.num_sites = 8;
    cfg.superpixel_target = 6;
    cfg.params.beta2 = 10.0;
    cfg.methods = {Method::expansion, Method::meanfield, Method::spicm};
    const std::vector<BenchCell> cells = run_multilabel_sweep(cfg);
    REQUIRE(cells.size() == 3);
    double best = std::numeric_limits<double>::infinity();
    for (const BenchCell& cell : cells) best = std::min(best, cell.energy);
    bool someone_is_best = false;
    for (const BenchCell& cell : cells) {
        REQUIRE(cell.gap >= 0.0);
        if (cell.gap == 0.0) someone_is_best = true;
        REQUIRE(cell.energy >= best);
    }
    REQUIRE(someone_is_best);
}

TEST_CASE("method failures are recorded as error cells", "[bench]") {
    SweepConfig cfg;
    cfg.instances = 1;
    cfg.lambdas = {0.1};
    cfg.synthetic.width = 80;  // 6400 pixels: beyond the exact oracle guard
    cfg.synthetic.height = 80;
    cfg.synthetic.num_labels = 3;
    cfg.superpixel_target = 10;
    cfg.methods = {Method::exact, Method::spicm};
    const std::vector<BenchCell> cells = run_multilabel_sweep(cfg);
    REQUIRE(cells.size() == 2);
    REQUIRE_FALSE(cells[0].ok);  // exact refuses k != 2
    REQUIRE(cells[1].ok);

    std::ostringstream csv;
    write_bench_csv(cells, csv);
    REQUIRE(csv.str().find("error,error,error") != std::string::npos);
}

TEST_CASE("model convergence hits exact zero at one superpixel per pixel", "[bench]") {
    SyntheticConfig cfg;
    cfg.width = 24;
    cfg.height = 24;
    cfg.seed = 3;
    const SyntheticInstance inst = make_instance(cfg);
    EnergyParams params;
    params.beta2 = 8.0;
    const auto points = model_convergence(inst.image, inst.planted,
                                          {12, 60, inst.image.num_pixels()}, params);
    REQUIRE(points.size() == 3);
    REQUIRE(points.back().superpixels == inst.image.num_pixels());
    REQUIRE(points.back().relative_percent == 0.0);
    REQUIRE(points.front().relative_percent >= points.back().relative_percent);
}

TEST_CASE("method name round-trip", "[bench]") {
    for (Method m : {Method::expansion, Method::meanfield, Method::icm, Method::spicm,
                     Method::exact})
        REQUIRE(method_from_string(to_string(m)) == m);
    REQUIRE_THROWS_AS(method_from_string("gradient_descent"), input_error);
}
