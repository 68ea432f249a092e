#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <tec/shapes.hpp>

using namespace tec;
using std::numbers::pi;

namespace {

std::shared_ptr<const TriMesh> lattice(int n, Rect dom = {}) { return std::make_shared<const TriMesh>(build_lattice(n, dom)); }

}  // namespace

TEST_SUITE("shapes") {

TEST_CASE("polygonize examples") {
    const DensePolygon sq = polygonize(Circle{}, 4);
    CHECK(sq.num_vertices() == 4);
    CHECK(sq.area() == doctest::Approx(0.045));

    CHECK(std::abs(polygonize(Circle{}, 1000).area() - pi * 0.15 * 0.15) <= 1e-5);
    CHECK(std::abs(polygonize(zalesak_config_a(), 4096).area() - 0.7494) <= 2e-4);

    for (const ShapeSpec& s : {ShapeSpec{Circle{}}, ShapeSpec{Snake{}}, ShapeSpec{Heart{}}, ShapeSpec{zalesak_config_a()}}) {
        const DensePolygon p = polygonize(s, 2048);
        CHECK(p.area() > 0.0);
        if (const auto a = analytic_area(s)) CHECK(p.area() == doctest::Approx(*a).epsilon(1e-4));
    }
}

TEST_CASE("analytic areas") {
    CHECK(*analytic_area(Circle{{0, 0}, 2.0}) == doctest::Approx(4.0 * pi));
    CHECK(*analytic_area(Heart{{0, 0}, 1.0}) == doctest::Approx(180.0 * pi));
    CHECK_FALSE(analytic_area(Snake{}).has_value());
}

TEST_CASE("dense polygon containment") {
    const DensePolygon c = polygonize(Circle{}, 512);
    CHECK(c.contains({0.5, 0.5}));
    CHECK_FALSE(c.contains({0.1, 0.1}));
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.3, 0.7);
    for (int i = 0; i < 10000; ++i) {
        const Point2 p{u(rng), u(rng)};
        const double d = distance(p, {0.5, 0.5});
        if (std::abs(d - 0.15) < 1e-3) continue;
        REQUIRE(c.contains(p) == (d < 0.15));
    }
}

TEST_CASE("exact cell area examples") {
    const DensePolygon c = polygonize(Circle{}, 1000);
    const ConvexPolygon unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(exact_cell_area(c, unit) == doctest::Approx(c.area()).epsilon(1e-13));
    const ConvexPolygon quadrant{{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}};
    CHECK(exact_cell_area(c, quadrant) == doctest::Approx(c.area() / 4.0).epsilon(1e-6));
    const ConvexPolygon far{{2, 2}, {3, 2}, {3, 3}};
    CHECK(exact_cell_area(c, far) == 0.0);
    const ConvexPolygon inner{{0.45, 0.45}, {0.55, 0.45}, {0.5, 0.55}};
    CHECK(exact_cell_area(c, inner) == doctest::Approx(polygon_area(inner)));
}

TEST_CASE("cell areas sum to the shape area") {
    const auto m = lattice(13);
    const DensePolygon h = polygonize(Heart{}, 2048);
    double s = 0.0;
    for (std::size_t t = 0; t < m->num_triangles(); ++t) s += exact_cell_area(h, to_polygon(m->triangle(t)));
    CHECK(s == doctest::Approx(h.area()).epsilon(1e-12));
}

TEST_CASE("initialization with area correction matches cell areas") {
    const auto m = lattice(32);
    const DensePolygon c = polygonize(Circle{}, 4096);
    InitReport rep;
    const InterfaceState st = init_state(m, c, {4096, true, 1}, &rep);
    double worst = 0.0;
    std::size_t failed = 0;
    for (const auto& e : rep.events) failed += is_failure(e.kind) ? 1 : 0;
    CHECK(failed == 0);
    for (std::size_t t = 0; t < m->num_triangles(); ++t) {
        const double want = exact_cell_area(c, to_polygon(m->triangle(t)));
        worst = std::max(worst, std::abs(area_fractions(st.cuts[t]).liquid * m->area(t) - want));
    }
    CHECK(worst <= 1e-10);
    CHECK(total_liquid_area(st) == doctest::Approx(c.area()).epsilon(1e-10));
}

TEST_CASE("uncorrected initialization is close") {
    const auto m = lattice(64);
    const InterfaceState st = init_state(m, ShapeSpec{Circle{}}, {4096, false, 1});
    CHECK(std::abs(total_liquid_area(st) - pi * 0.0225) / (pi * 0.0225) < 1e-3);
}

TEST_CASE("full and empty shapes") {
    const auto m = lattice(8);
    const DensePolygon all({{Point2{-1, -1}, Point2{2, -1}, Point2{2, 2}, Point2{-1, 2}}});
    const InterfaceState full = init_state(m, all);
    for (const auto& e : full.cuts) CHECK(e == EdgeCut::pure(Material::Liquid));
    CHECK(total_liquid_area(full) == doctest::Approx(1.0));

    const DensePolygon away({{Point2{5, 5}, Point2{6, 5}, Point2{6, 6}}});
    const InterfaceState none = init_state(m, away);
    for (const auto& e : none.cuts) CHECK(e == EdgeCut::pure(Material::Air));
    CHECK(total_liquid_area(none) == 0.0);
}

TEST_CASE("bad shapes are rejected") {
    CHECK_THROWS_AS(polygonize(Circle{{0.5, 0.5}, -1.0}, 100), ShapeError);
    CHECK_THROWS_AS(polygonize(Circle{}, 2), ShapeError);
}

}  // TEST_SUITE
