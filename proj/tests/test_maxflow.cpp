#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qcrf/maxflow.hpp"
#include "test_util.hpp"

using namespace qcrf;

namespace {

BinaryPairwiseProblem random_problem(std::mt19937& rng, int max_vars,
                                     bool potts_only = false) {
    const int n = testutil::uniform_int(rng, 2, max_vars);
    BinaryPairwiseProblem p(n);
    for (int i = 0; i < n; ++i)
        p.unaries[i] = {testutil::uniform(rng, -5, 5), testutil::uniform(rng, -5, 5)};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (testutil::uniform_int(rng, 0, 2) == 0) continue;
            if (potts_only || testutil::uniform_int(rng, 0, 1) == 0) {
                p.add_potts(i, j, testutil::uniform(rng, 0, 4));
            } else {
                double e00 = testutil::uniform(rng, -3, 3);
                const double e01 = testutil::uniform(rng, -3, 3);
                const double e10 = testutil::uniform(rng, -3, 3);
                const double e11 = testutil::uniform(rng, -3, 3);
                const double violation = (e01 + e10) - (e00 + e11);
                if (violation < 0) e00 += violation;
                p.add_term(i, j, e00, e01, e10, e11);
            }
        }
    return p;
}

double brute_force_minimum(const BinaryPairwiseProblem& p) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> x(p.num_vars);
    for (unsigned mask = 0; mask < (1u << p.num_vars); ++mask) {
        for (int i = 0; i < p.num_vars; ++i) x[i] = (mask >> i) & 1;
        best = std::min(best, evaluate(p, x));
    }
    return best;
}

}  // namespace

TEST_CASE("no pairwise terms reduces to per-variable argmin", "[maxflow]") {
    BinaryPairwiseProblem p(3);
    p.unaries[0] = {1.0, 2.0};
    p.unaries[1] = {5.0, -1.0};
    p.unaries[2] = {0.0, 0.0};  // tie goes to label 0
    const MinCutResult r = min_cut(p);
    REQUIRE(r.assignment == std::vector<int>{0, 1, 0});
    REQUIRE(r.energy == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("strong Potts coupling forces agreement", "[maxflow]") {
    BinaryPairwiseProblem p(2);
    p.unaries[0] = {0.0, 5.0};
    p.unaries[1] = {5.0, 0.0};
    p.add_potts(0, 1, 100.0);
    const MinCutResult r = min_cut(p);
    REQUIRE(r.energy == Catch::Approx(5.0));
    REQUIRE(r.assignment[0] == r.assignment[1]);
    REQUIRE(r.assignment[0] == 0);  // tie resolves toward the source side
}

TEST_CASE("exact on random problems up to 16 variables", "[maxflow]") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        const BinaryPairwiseProblem p = random_problem(rng, 16);
        const MinCutResult r = min_cut(p);
        const double want = brute_force_minimum(p);
        REQUIRE(r.energy == Catch::Approx(want).margin(1e-8));
        REQUIRE(r.energy == Catch::Approx(evaluate(p, r.assignment)).margin(1e-12));
    }
}

TEST_CASE("both engines return the identical source-maximal optimum", "[maxflow]") {
    std::mt19937 rng(22);
    for (int trial = 0; trial < 500; ++trial) {
        const BinaryPairwiseProblem p = random_problem(rng, 14);
        const MinCutResult a = min_cut(p, detail::MinCutEngine::augmenting_paths);
        const MinCutResult b = min_cut(p, detail::MinCutEngine::push_relabel);
        REQUIRE(a.assignment == b.assignment);
        REQUIRE(a.energy == b.energy);
    }
}

TEST_CASE("returned energy is a lower bound over sampled assignments", "[maxflow]") {
    std::mt19937 rng(23);
    const BinaryPairwiseProblem p = random_problem(rng, 60);
    const MinCutResult r = min_cut(p);
    std::vector<int> x(p.num_vars);
    for (int sample = 0; sample < 1000; ++sample) {
        for (int& v : x) v = testutil::uniform_int(rng, 0, 1);
        REQUIRE(r.energy <= evaluate(p, x) + 1e-9);
    }
}

TEST_CASE("min_cut is deterministic", "[maxflow]") {
    std::mt19937 rng(24);
    const BinaryPairwiseProblem p = random_problem(rng, 40);
    const MinCutResult a = min_cut(p);
    const MinCutResult b = min_cut(p);
    REQUIRE(a.assignment == b.assignment);
    REQUIRE(a.energy == b.energy);
}

TEST_CASE("invalid problems are rejected", "[maxflow]") {
    SECTION("non-submodular term") {
        BinaryPairwiseProblem p(2);
        p.add_term(0, 1, 0.0, 1.0, 1.0, 3.0);  // e00 + e11 > e01 + e10
        REQUIRE_THROWS_AS(min_cut(p), input_error);
    }
    SECTION("both unaries infinite") {
        BinaryPairwiseProblem p(1);
        p.unaries[0] = {kInfiniteCost, kInfiniteCost};
        REQUIRE_THROWS_AS(min_cut(p), input_error);
    }
    SECTION("duplicate pair") {
        BinaryPairwiseProblem p(2);
        p.add_potts(0, 1, 1.0);
        p.add_potts(0, 1, 2.0);
        REQUIRE_THROWS_AS(min_cut(p), input_error);
    }
    SECTION("unordered pair indices") {
        BinaryPairwiseProblem p(2);
        p.add_term(1, 0, 0, 1, 1, 0);
        REQUIRE_THROWS_AS(min_cut(p), input_error);
    }
    SECTION("non-finite unary") {
        BinaryPairwiseProblem p(1);
        p.unaries[0] = {std::numeric_limits<double>::quiet_NaN(), 0.0};
        REQUIRE_THROWS_AS(min_cut(p), input_error);
    }
}

TEST_CASE("infinite sentinel forbids a label without breaking arithmetic", "[maxflow]") {
    BinaryPairwiseProblem p(2);
    p.unaries[0] = {10.0, kInfiniteCost};
    p.unaries[1] = {0.0, -20.0};
    p.add_potts(0, 1, 1.0);
    const MinCutResult r = min_cut(p);
    REQUIRE(r.assignment[0] == 0);
    REQUIRE(r.assignment[1] == 1);
    REQUIRE(r.energy == Catch::Approx(10.0 - 20.0 + 1.0));
}
