#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qcrf/multilabel_solver.hpp"
#include "qcrf/oracle.hpp"
#include "test_util.hpp"

using namespace qcrf;

namespace {

// d-energy of a binary vector z, evaluated through the aggregated machinery
// the solver itself uses.
double d_energy(const ExpansionEnergy& ee, const std::vector<int>& z) {
    return total_energy(z, ee.d, ee.split.partition, ee.v);
}

}  // namespace

TEST_CASE("expansion energy on a constant labeling keeps the weights", "[multilabel_solver]") {
    std::mt19937 rng(41);
    auto inst = testutil::random_instance(rng, 12, 3, 4);
    const Labeling x(inst.partition.num_pixels(), 1);
    const ExpansionEnergy ee =
        build_expansion_energy(x, 0, inst.unary, inst.partition, inst.weights);
    REQUIRE(ee.split.partition.count == inst.partition.count);
    for (int a = 0; a < ee.v.count; ++a)
        for (int b = 0; b < ee.v.count; ++b)
            REQUIRE(ee.v.at(a, b) ==
                    inst.weights.at(ee.split.parent[a], ee.split.parent[b]));
    for (int p = 0; p < inst.partition.num_pixels(); ++p) {
        REQUIRE(ee.d.at(p, 0) == inst.unary.at(p, 1));
        REQUIRE(ee.d.at(p, 1) == inst.unary.at(p, 0));
    }
}

TEST_CASE("expanding the current label freezes every pixel", "[multilabel_solver]") {
    std::mt19937 rng(42);
    auto inst = testutil::random_instance(rng, 10, 3, 3);
    const Labeling x(inst.partition.num_pixels(), 2);
    const ExpansionEnergy ee =
        build_expansion_energy(x, 2, inst.unary, inst.partition, inst.weights);
    for (int p = 0; p < inst.partition.num_pixels(); ++p)
        REQUIRE(ee.d.at(p, 1) == kInfiniteCost);
}

TEST_CASE("d-energy equals the direct expansion energy for every move vector",
          "[multilabel_solver]") {
    std::mt19937 rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        auto inst = testutil::random_instance(rng, 10, 3, 4);
        const int n = inst.partition.num_pixels();
        Labeling x(n);
        for (int& v : x) v = testutil::uniform_int(rng, 0, 2);
        const int alpha = testutil::uniform_int(rng, 0, 2);
        const ExpansionEnergy ee =
            build_expansion_energy(x, alpha, inst.unary, inst.partition, inst.weights);

        std::vector<int> z(n);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            for (int p = 0; p < n; ++p) z[p] = (mask >> p) & 1;
            const double lhs = d_energy(ee, z) + ee.offset;
            const double rhs = testutil::h_expansion_energy(z, x, alpha, inst.unary,
                                                            inst.partition, inst.weights,
                                                            kInfiniteCost);
            REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-9).margin(1e-9));
        }
    }
}

TEST_CASE("alpha out of range is rejected", "[multilabel_solver]") {
    std::mt19937 rng(44);
    auto inst = testutil::random_instance(rng, 8, 3, 3);
    const Labeling x(inst.partition.num_pixels(), 0);
    REQUIRE_THROWS_AS(
        build_expansion_energy(x, 3, inst.unary, inst.partition, inst.weights),
        input_error);
}

TEST_CASE("dominant unaries with zero smoothness solve to the argmin",
          "[multilabel_solver]") {
    std::mt19937 rng(45);
    auto inst = testutil::random_instance(rng, 14, 4, 4);
    WeightTable zero = WeightTable::zeros(inst.partition.count);
    const MultilabelSolveResult r = solve_multilabel(inst.unary, inst.partition, zero);
    double expect = 0.0;
    for (int p = 0; p < inst.partition.num_pixels(); ++p) {
        double lo = inst.unary.at(p, 0);
        for (int l = 1; l < 4; ++l) lo = std::min(lo, inst.unary.at(p, l));
        expect += lo;
    }
    REQUIRE(r.energy == Catch::Approx(expect).margin(1e-9));
}

TEST_CASE("small multi-label instances reach the enumeration optimum",
          "[multilabel_solver]") {
    std::mt19937 rng(46);
    int optimal = 0;
    const int trials = 120;
    for (int trial = 0; trial < trials; ++trial) {
        auto inst = testutil::random_instance(rng, 10, 3, 4);
        const MultilabelSolveResult r =
            solve_multilabel(inst.unary, inst.partition, inst.weights);
        const OracleResult opt = enumerate_optimum(inst.unary, inst.partition, inst.weights);
        REQUIRE(r.energy >= opt.energy - 1e-9 * std::max(1.0, std::abs(opt.energy)));
        if (std::abs(r.energy - opt.energy) <= 1e-9 * std::max(1.0, std::abs(opt.energy)))
            ++optimal;
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            REQUIRE(r.trace[i] <= r.trace[i - 1] + 1e-12);
        REQUIRE(r.energy <= r.trace.front() + 1e-12);  // never above the argmin start
    }
    INFO("optimal in " << optimal << "/" << trials);
    REQUIRE(optimal >= static_cast<int>(0.9 * trials));
}

TEST_CASE("solving is deterministic and stable at convergence", "[multilabel_solver]") {
    std::mt19937 rng(47);
    auto inst = testutil::random_instance(rng, 16, 3, 5);
    const MultilabelSolveResult a = solve_multilabel(inst.unary, inst.partition, inst.weights);
    const MultilabelSolveResult b = solve_multilabel(inst.unary, inst.partition, inst.weights);
    REQUIRE(a.labeling == b.labeling);
    REQUIRE(a.energy == b.energy);

    MultilabelSolverConfig more;
    more.max_outer_sweeps = 12;
    const MultilabelSolveResult c =
        solve_multilabel(inst.unary, inst.partition, inst.weights, more);
    REQUIRE(c.energy <= a.energy + 1e-12);
}
