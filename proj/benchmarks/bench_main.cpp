#include <benchmark/benchmark.h>

#include <random>

#include <tec/advect.hpp>
#include <tec/correction.hpp>
#include <tec/shapes.hpp>

using namespace tec;

namespace {

std::vector<Point2> random_points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point2> p(n);
    for (auto& q : p) q = {u(rng), u(rng)};
    return p;
}

std::vector<EdgeCut> random_cuts(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<EdgeCut> out;
    while (out.size() < n) {
        EdgeCut e;
        switch (rng() % 4) {
            case 0:  // case 5
                e.c = Material::Liquid;
                e.R[0] = {u(rng), 1.0};
                e.R[2] = {u(rng), 1.0};
                break;
            case 1: {  // case 3
                const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
                e.R[0] = {std::min(a, b), std::max(a, b)};
                e.R[1] = {std::min(c, d), std::max(c, d)};
                break;
            }
            case 2: {  // case 6
                const double a = u(rng), b = u(rng);
                e.c = Material::Liquid;
                e.R[0] = {u(rng), 1.0};
                e.R[1] = {std::min(a, b), std::max(a, b)};
                e.R[2] = {u(rng), 1.0};
                break;
            }
            default: {  // case 4
                for (auto& r : e.R) {
                    const double a = u(rng), b = u(rng);
                    r = {std::min(a, b), std::max(a, b)};
                }
                break;
            }
        }
        if (std::abs(e.R[0][0] - e.R[0][1]) < 1e-3 || std::abs(e.R[1][0] - e.R[1][1]) < 1e-3) continue;
        out.push_back(e);
    }
    return out;
}

const Triangle kTri{Point2{0, 0}, Point2{1, 0}, Point2{0.3, 0.9}};

void BM_Orient2d(benchmark::State& state) {
    const auto p = random_points(1024, 1);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(orient2d(p[i & 1023], p[(i + 1) & 1023], p[(i + 2) & 1023]));
        ++i;
    }
}
BENCHMARK(BM_Orient2d);

void BM_Orient2dCollinear(benchmark::State& state) {
    const Point2 a{0.1, 0.1}, b{0.7, 0.7};
    const Point2 c{0.3, 0.3 + 1e-17};
    for (auto _ : state) benchmark::DoNotOptimize(orient2d(a, b, c));
}
BENCHMARK(BM_Orient2dCollinear);

void BM_ClipConvex(benchmark::State& state) {
    const ConvexPolygon tri{{0.0, 0.0}, {1.0, 0.0}, {0.2, 0.9}};
    const ConvexPolygon quad{{0.1, 0.1}, {0.9, 0.2}, {0.8, 0.8}, {0.2, 0.7}};
    for (auto _ : state) benchmark::DoNotOptimize(clip_convex(tri, quad));
}
BENCHMARK(BM_ClipConvex);

void BM_Reconstruct(benchmark::State& state) {
    const auto cuts = random_cuts(256, 2);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct(cuts[i++ & 255], kTri));
}
BENCHMARK(BM_Reconstruct);

void BM_AreaFractions(benchmark::State& state) {
    const auto cuts = random_cuts(256, 3);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(area_fractions(cuts[i++ & 255]));
}
BENCHMARK(BM_AreaFractions);

void BM_Correction(benchmark::State& state) {
    const auto cuts = random_cuts(256, 4);
    std::vector<double> targets;
    for (const auto& e : cuts) targets.push_back(0.98 * area_fractions(e).liquid);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(edge_cut_correction(cuts[i & 255], targets[i & 255]));
        ++i;
    }
}
BENCHMARK(BM_Correction);

void BM_AdvectStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto mesh = std::make_shared<const TriMesh>(build_lattice(n, Rect{}));
    const InterfaceState st = init_state(mesh, ShapeSpec{Circle{{0.5, 0.75}, 0.15}}, {4096, true, 1});
    const StepPlan plan = timestep(SingleVortex{8.0}, *mesh, 1.0, 8.0);
    AdvectOptions opts;
    opts.workers = 1;
    for (auto _ : state) benchmark::DoNotOptimize(advect_step(st, SingleVortex{8.0}, plan.dt, opts));
    state.counters["triangles"] = static_cast<double>(mesh->num_triangles());
}
BENCHMARK(BM_AdvectStep)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_InitState(benchmark::State& state) {
    const auto mesh = std::make_shared<const TriMesh>(build_lattice(128, Rect{}));
    const DensePolygon shape = polygonize(Circle{}, 4096);
    for (auto _ : state) benchmark::DoNotOptimize(init_state(mesh, shape, {4096, true, 1}));
}
BENCHMARK(BM_InitState)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
