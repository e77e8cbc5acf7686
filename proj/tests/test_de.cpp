#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "mgseir/de.hpp"
#include "mgseir/parallel.hpp"

using namespace mgseir;

namespace {

double shifted_sphere(const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - (0.2 + 0.1 * static_cast<double>(i));
        s += d * d;
    }
    return s;
}

}  // namespace

TEST(DifferentialEvolution, FindsInteriorMinimum) {
    DeSettings cfg;
    cfg.population = 30;
    cfg.generations = 200;
    const DeResult r = differential_evolution(shifted_sphere, 5, cfg);
    EXPECT_LT(r.value, 1e-8);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.best[i], 0.2 + 0.1 * i, 1e-3);
    EXPECT_EQ(r.evaluations, 30u * 201u);
}

TEST(DifferentialEvolution, StaysInUnitBox) {
    DeSettings cfg;
    cfg.generations = 50;
    auto f = [](const std::vector<double>& x) {
        for (double v : x) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
        return -x[0] - x[1];
    };
    const DeResult r = differential_evolution(f, 2, cfg);
    EXPECT_EQ(r.best[0], 1.0);
    EXPECT_EQ(r.best[1], 1.0);
}

TEST(DifferentialEvolution, DeterministicAcrossWorkerCounts) {
    DeSettings a;
    a.generations = 40;
    a.workers = 1;
    DeSettings b = a;
    b.workers = 4;
    const DeResult ra = differential_evolution(shifted_sphere, 4, a);
    const DeResult rb = differential_evolution(shifted_sphere, 4, b);
    EXPECT_EQ(ra.best, rb.best);
    EXPECT_EQ(ra.value, rb.value);
}

TEST(DifferentialEvolution, SeedVectorIsNeverLost) {
    DeSettings cfg;
    cfg.generations = 0;
    const std::vector<std::vector<double>> seeds{{0.2, 0.3, 0.4}};
    const DeResult r = differential_evolution(shifted_sphere, 3, cfg, seeds);
    EXPECT_EQ(r.value, 0.0 + shifted_sphere(seeds[0]));
    EXPECT_NEAR(r.value, 0.0, 1e-30);
}

TEST(DifferentialEvolution, RejectsZeroDimension) {
    EXPECT_THROW(differential_evolution(shifted_sphere, 0, DeSettings{}), std::invalid_argument);
}

TEST(CoordinatePolish, ImprovesAndNeverWorsens) {
    std::vector<double> x{0.9, 0.9, 0.9};
    const double fx = shifted_sphere(x);
    const PolishResult r = coordinate_polish(shifted_sphere, x, fx);
    EXPECT_LT(r.value, 1e-7);
    EXPECT_LE(r.value, fx);
    EXPECT_EQ(r.value, shifted_sphere(r.best));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsWorkerException) {
    EXPECT_THROW(parallel_for(10, [](std::size_t i) { if (i == 7) throw std::runtime_error("boom"); }, 3),
                 std::runtime_error);
}
