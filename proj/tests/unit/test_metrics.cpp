#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <tec/metrics.hpp>

using namespace tec;
using std::numbers::pi;

namespace {

std::shared_ptr<const TriMesh> lattice(int n, Rect dom = {}) { return std::make_shared<const TriMesh>(build_lattice(n, dom)); }

std::vector<Point2> parabola(double a, double rot = 0.0) {
    std::vector<Point2> pts;
    for (int i = -3; i <= 3; ++i) {
        const double x = 0.03 * i, y = a * x * x;
        pts.push_back({x * std::cos(rot) - y * std::sin(rot), x * std::sin(rot) + y * std::cos(rot)});
    }
    return pts;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("shape error of a reconstruction against itself is small") {
    const auto m = lattice(64);
    const DensePolygon c = polygonize(Circle{}, 4096);
    const InterfaceState st = init_state(m, c, {4096, true, 1});
    // Only the sub-cell shape of the boundary differs.
    CHECK(shape_error(st, c) <= 5e-5);

    const InterfaceState empty = empty_state(m);
    CHECK(shape_error(empty, c) == doctest::Approx(c.area()).epsilon(1e-12));
}

TEST_CASE("shape error decreases with resolution") {
    const DensePolygon c = polygonize(Circle{}, 1000);
    const double e16 = shape_error(init_state(lattice(16), ShapeSpec{Circle{}}, {4096, false, 1}), c);
    const double e64 = shape_error(init_state(lattice(64), ShapeSpec{Circle{}}, {4096, false, 1}), c);
    CHECK(e64 < e16 / 4.0);
}

TEST_CASE("grouping") {
    const auto m = lattice(16);
    const DensePolygon c = polygonize(Circle{}, 1000);
    const InterfaceState st = init_state(m, c);
    std::vector<double> cells, tris;
    const double a = shape_error(st, c, Grouping::LatticeCells, &cells);
    const double b = shape_error(st, c, Grouping::Triangles, &tris);
    CHECK(cells.size() == 256);
    CHECK(tris.size() == 512);
    CHECK(a <= b + 1e-15);
    CHECK(shape_error(st, c) == a);
}

TEST_CASE("mass error arithmetic") {
    const auto m = lattice(4);
    InterfaceState st = empty_state(m);
    st.cuts[0] = EdgeCut::pure(Material::Liquid);
    const double A = m->area(0);
    CHECK(mass_error(st, A) == 0.0);
    CHECK(mass_error(st, 2.0 * A) == doctest::Approx(0.5));
    CHECK(mass_error(st, 0.5 * A) == doctest::Approx(1.0));
    CHECK_THROWS_AS(mass_error(st, 0.0), MetricsError);
}

TEST_CASE("relative error times the reference area is the shape error") {
    const auto m = lattice(32);
    const DensePolygon c = polygonize(Circle{}, 1000);
    const InterfaceState st = init_state(m, c, {4096, true, 1});
    const double A0 = total_liquid_area(st);
    const ErrorReport r = error_report(st, c, A0);
    CHECK(r.E_r * A0 == doctest::Approx(r.E_g).epsilon(1e-14));
    CHECK(r.E_m == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("convergence order examples") {
    const std::vector<std::pair<double, double>> second{{32, 4e-4}, {64, 1e-4}, {128, 2.5e-5}};
    const auto r = convergence_order(second);
    REQUIRE(r.orders.size() == 2);
    CHECK(*r.orders[0] == doctest::Approx(2.0));
    CHECK(*r.orders[1] == doctest::Approx(2.0));
    CHECK(*r.slope == doctest::Approx(2.0));

    const std::vector<std::pair<double, double>> first{{1, 0.1}, {2, 0.05}};
    CHECK(*convergence_order(first).orders[0] == doctest::Approx(1.0));

    const std::vector<std::pair<double, double>> single{{8, 0.1}};
    const auto s = convergence_order(single);
    CHECK(s.orders.empty());
    CHECK_FALSE(s.slope);

    const std::vector<std::pair<double, double>> zero{{8, 0.1}, {16, 0.0}};
    CHECK_FALSE(convergence_order(zero).orders[0]);
}

TEST_CASE("parabola fits") {
    for (double a : {0.5, 2.0, 10.0}) {
        const auto pts = parabola(a);
        FitFrame f;
        CHECK(fit_curvature(pts, {0, 0}, {0, 1}, &f) == doctest::Approx(2.0 * a));
        CHECK(f == FitFrame::XParabola);
        CHECK(fit_curvature(pts, {0, 0}, {0, -1}) == doctest::Approx(-2.0 * a));

        // Same curve turned by 90 degrees: the fit switches frame.
        const auto turned = parabola(a, pi / 2.0);
        CHECK(fit_curvature(turned, {0, 0}, {-1, 0}, &f) == doctest::Approx(2.0 * a));
        CHECK(f == FitFrame::YParabola);
    }
    const std::vector<Point2> line{{0, 0}, {0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}};
    CHECK(fit_curvature(line, {0.1, 0.1}, {0, 1}) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(fit_curvature(std::span<const Point2>(line.data(), 2), {0, 0}, {0, 1}), MetricsError);
}

TEST_CASE("circle curvature") {
    const InterfaceState st = init_state(lattice(64), ShapeSpec{Circle{}}, {4096, true, 1});
    const CurvatureResult r = curvature(st);
    CHECK(r.samples.size() > 50);
    double mean = 0.0;
    for (const auto& s : r.samples) mean += s.kappa;
    mean /= static_cast<double>(r.samples.size());
    CHECK(mean == doctest::Approx(1.0 / 0.15).epsilon(0.05));
    CHECK(curvature_error(r.samples, [](Point2) { return 1.0 / 0.15; }) < 1.0);
}

TEST_CASE("liquid components") {
    const auto m = lattice(64);
    CHECK(liquid_components(empty_state(m)) == 0);
    CHECK(liquid_components(init_state(m, ShapeSpec{Circle{}})) == 1);
    const DensePolygon two({polygonize(Circle{{0.25, 0.5}, 0.1}, 512).loops()[0],
                            polygonize(Circle{{0.75, 0.5}, 0.1}, 512).loops()[0]});
    CHECK(liquid_components(init_state(m, two)) == 2);
}

}  // TEST_SUITE
