#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "qcrf/superpix.hpp"
#include "qcrf/weights.hpp"
#include "test_util.hpp"

using namespace qcrf;

namespace {

SuperpixelPartition two_superpixels(double mean0, double mean1, double var0 = 0.0) {
    GridImage image;
    image.width = 2;
    image.height = 1;
    image.intensities = {mean0, mean1};
    SuperpixelPartition part = make_partition(image, {0, 1});
    part.variances[0] = var0;
    return part;
}

}  // namespace

TEST_CASE("internal weight examples", "[weights]") {
    EnergyParams params;
    params.lambda1 = 1.0;
    params.smoothness = 1.0;
    REQUIRE(internal_weight(0.0, params) == 1.0);
    params.beta1 = 7.0;
    REQUIRE(internal_weight(params.beta1 * params.beta1, params) ==
            Catch::Approx(std::exp(-0.5)).epsilon(1e-12));
    REQUIRE(internal_weight(params.beta1 * params.beta1, params) ==
            Catch::Approx(0.60653).margin(1e-5));
}

TEST_CASE("external weight with coincident statistics is lambda1 + lambda2", "[weights]") {
    SuperpixelPartition part = two_superpixels(42.0, 42.0);
    part.centroid_x[1] = part.centroid_x[0];
    part.centroid_y[1] = part.centroid_y[0];
    EnergyParams params;
    const WeightTable table = build_weights(part, params);
    REQUIRE(table.at(0, 1) == Catch::Approx(2.0));
    REQUIRE(table.at(0, 1) == table.at(1, 0));
}

TEST_CASE("weights respond monotonically to statistics", "[weights]") {
    EnergyParams params;
    SECTION("internal weight strictly decreases in variance") {
        double prev = internal_weight(0.0, params);
        for (double var : {1.0, 5.0, 25.0, 100.0}) {
            const double cur = internal_weight(var, params);
            REQUIRE(cur < prev);
            prev = cur;
        }
    }
    SECTION("external weight never increases in distance or mean difference") {
        std::mt19937 rng(7);
        for (int trial = 0; trial < 200; ++trial) {
            const double d2 = testutil::uniform(rng, 0.0, 500.0);
            const double m2 = testutil::uniform(rng, 0.0, 500.0);
            const double bump = testutil::uniform(rng, 0.0, 100.0);
            REQUIRE(external_weight(d2 + bump, m2, params) <= external_weight(d2, m2, params));
            REQUIRE(external_weight(d2, m2 + bump, params) <= external_weight(d2, m2, params));
        }
    }
}

TEST_CASE("invalid parameters are rejected", "[weights]") {
    SuperpixelPartition part = two_superpixels(1.0, 2.0);
    EnergyParams params;
    params.beta2 = 0.0;
    REQUIRE_THROWS_AS(build_weights(part, params), input_error);
    params.beta2 = 50.0;
    params.lambda1 = -1.0;
    REQUIRE_THROWS_AS(build_weights(part, params), input_error);
}

TEST_CASE("gaussian pairwise energy basics", "[weights]") {
    EnergyParams params;
    GridImage image;
    image.width = 2;
    image.height = 1;
    image.intensities = {100.0, 130.0};

    SECTION("constant labeling costs nothing") {
        REQUIRE(gaussian_pairwise_energy(image, {1, 1}, params) == 0.0);
    }
    SECTION("a single disagreeing pair pays exactly its edge weight") {
        const double expected = external_weight(1.0, 30.0 * 30.0, params);
        REQUIRE(gaussian_pairwise_energy(image, {0, 1}, params) == expected);
    }
    SECTION("size guard") {
        GridImage big;
        big.width = 101;
        big.height = 100;
        big.intensities.assign(10100, 0.0);
        REQUIRE_THROWS_AS(gaussian_pairwise_energy(big, Labeling(10100, 0), params),
                          input_error);
    }
}

TEST_CASE("one-pixel superpixels reproduce the Gaussian model exactly", "[weights]") {
    std::mt19937 rng(8);
    EnergyParams params;
    params.beta2 = 9.0;
    params.smoothness = 1.3;
    for (int trial = 0; trial < 5; ++trial) {
        GridImage image;
        image.width = 7;
        image.height = 5;
        image.intensities.resize(35);
        for (double& v : image.intensities) v = testutil::uniform(rng, 0.0, 255.0);
        Labeling x(35);
        for (int& v : x) v = testutil::uniform_int(rng, 0, 2);

        const SuperpixelPartition singles = singleton_partition(image);
        const WeightTable table = build_weights(singles, params);
        const double quantized = pairwise_energy(x, singles, table, 3);
        const double gaussian = gaussian_pairwise_energy(image, x, params);
        REQUIRE(quantized == gaussian);  // bit-exact by construction
    }
}

TEST_CASE("smoothness scales the table and the pairwise energy linearly", "[weights]") {
    std::mt19937 rng(9);
    auto inst = testutil::random_instance(rng, 12, 2, 4);
    EnergyParams params;
    params.beta2 = 20.0;
    const WeightTable base = build_weights(inst.partition, params);
    params.smoothness = 3.0;
    const WeightTable scaled = build_weights(inst.partition, params);
    for (int s = 0; s < base.count; ++s)
        for (int t = 0; t < base.count; ++t)
            REQUIRE(scaled.at(s, t) == Catch::Approx(3.0 * base.at(s, t)).epsilon(1e-12));

    Labeling x(inst.partition.num_pixels());
    for (int& v : x) v = testutil::uniform_int(rng, 0, 1);
    REQUIRE(pairwise_energy(x, inst.partition, scaled, 2) ==
            Catch::Approx(3.0 * pairwise_energy(x, inst.partition, base, 2)));
}

TEST_CASE("relative difference", "[weights]") {
    REQUIRE(relative_difference(5.0, 5.0) == 0.0);
    REQUIRE(relative_difference(6.0, 5.0) == Catch::Approx(20.0));
    REQUIRE_THROWS_AS(relative_difference(1.0, 0.0), input_error);
}

TEST_CASE("weight table CSV dump", "[weights]") {
    WeightTable t = WeightTable::zeros(2);
    t.set(0, 0, 0.5);
    t.set(0, 1, 1.25);
    t.set(1, 1, 2.0);
    std::ostringstream out;
    write_weight_csv(t, out);
    REQUIRE(out.str() == "s,t,w\n0,0,0.5\n0,1,1.25\n1,1,2\n");
}
