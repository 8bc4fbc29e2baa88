// Timings for the inner solvers on sizes typical of the synthetic experiments.

#include <benchmark/benchmark.h>

#include <random>

#include "spadep/generators.hpp"
#include "spadep/mapping.hpp"
#include "spadep/simplex.hpp"
#include "spadep/spa.hpp"

using namespace spadep;

namespace {

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
    return m;
}

AffiliationSeries random_affiliations(Index k, Index t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> e(1.0);
    Matrix g(k, t);
    for (Index j = 0; j < t; ++j) {
        for (Index i = 0; i < k; ++i) g(i, j) = e(rng);
        g.col(j) /= g.col(j).sum();
    }
    return AffiliationSeries(g);
}

void BM_ProjectToSimplex(benchmark::State& state) {
    const auto n = static_cast<Index>(state.range(0));
    const Vector v = gaussian(n, 1, 1).col(0);
    Vector w(n);
    std::vector<double> scratch;
    for (auto _ : state) {
        w = v;
        project_to_simplex_inplace(w, scratch);
        benchmark::DoNotOptimize(w.data());
    }
}
BENCHMARK(BM_ProjectToSimplex)->Arg(3)->Arg(10)->Arg(100);

void BM_SolveGamma(benchmark::State& state) {
    const auto k = static_cast<Index>(state.range(0));
    const TimeSeriesMatrix data(gaussian(4, 1000, 2));
    const LandmarkSet landmarks(gaussian(4, k, 3));
    for (auto _ : state) benchmark::DoNotOptimize(solve_gamma(data, landmarks));
}
BENCHMARK(BM_SolveGamma)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_FitLambda(benchmark::State& state) {
    const auto k = static_cast<Index>(state.range(0));
    const auto x = random_affiliations(k, 1000, 4);
    const auto y = random_affiliations(k, 1000, 5);
    for (auto _ : state) benchmark::DoNotOptimize(fit_lambda(x, y, 1));
}
BENCHMARK(BM_FitLambda)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_FitSpa1Logistic(benchmark::State& state) {
    LogisticConfig lc;
    lc.length = 1800;
    const auto series = gen_logistic(lc);
    const TimeSeriesMatrix x(series.data().topRows(1));
    Spa1Config cfg;
    cfg.k = 10;
    cfg.restarts = 1;
    for (auto _ : state) benchmark::DoNotOptimize(fit_spa1(x, cfg));
}
BENCHMARK(BM_FitSpa1Logistic)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
