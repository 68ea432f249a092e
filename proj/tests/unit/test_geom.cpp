#include <doctest.h>

#include <random>

#include <tec/geom.hpp>

#include "support.hpp"

using namespace tec;

TEST_SUITE("geom") {

TEST_CASE("orient2d basic signs") {
    CHECK(orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
    CHECK(orient2d({0, 0}, {1, 0}, {2, 0}) == 0);
    CHECK(orient2d({0, 0}, {0, 1}, {1, 0}) == -1);
}

TEST_CASE("orient2d is exact on nearly collinear input") {
    // c sits one ulp off the line through a and b; naive evaluation loses it.
    const Point2 a{0.5, 0.5};
    const Point2 b{12.0, 12.0};
    const Point2 c{24.0, std::nextafter(24.0, 25.0)};
    CHECK(orient2d(a, b, c) == 1);
    CHECK(orient2d(a, b, Point2{24.0, 24.0}) == 0);
    CHECK(orient2d(a, b, Point2{24.0, std::nextafter(24.0, 23.0)}) == -1);
}

TEST_CASE("orient2d antisymmetry on random triples") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
        // Every third point is forced onto the line ab to exercise the exact path.
        const Point2 c = i % 3 == 0 ? lerp(a, b, u(rng)) : Point2{u(rng), u(rng)};
        const int s = orient2d(a, b, c);
        REQUIRE(orient2d(b, a, c) == -s);
        REQUIRE(orient2d(a, c, b) == -s);
        REQUIRE(orient2d(c, b, a) == -s);
        REQUIRE(orient2d(b, c, a) == s);
    }
}

TEST_CASE("segment construction rejects degenerate input") {
    CHECK_THROWS_AS(Segment::checked({1, 1}, {1, 1}), GeometryError);
    CHECK_NOTHROW(Segment::checked({0, 0}, {1, 1}));
}

TEST_CASE("seg_seg_intersect examples") {
    const auto x = seg_seg_intersect({{0, 0}, {1, 1}}, {{0, 1}, {1, 0}});
    REQUIRE(x.kind == SegIntersection::Kind::Point);
    CHECK(x.t == doctest::Approx(0.5));
    CHECK(x.u == doctest::Approx(0.5));
    CHECK(x.p.x == doctest::Approx(0.5));
    CHECK(x.p.y == doctest::Approx(0.5));

    CHECK(seg_seg_intersect({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}).kind == SegIntersection::Kind::None);

    const auto o = seg_seg_intersect({{0, 0}, {2, 0}}, {{1, 0}, {3, 0}});
    REQUIRE(o.kind == SegIntersection::Kind::Overlap);
    const double lo = std::min(o.overlap.a.x, o.overlap.b.x);
    const double hi = std::max(o.overlap.a.x, o.overlap.b.x);
    CHECK(lo == 1.0);
    CHECK(hi == 2.0);
}

TEST_CASE("seg_seg_intersect point lies on both segments") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int points = 0;
    for (int i = 0; i < 20000; ++i) {
        const Segment s1({u(rng), u(rng)}, {u(rng), u(rng)});
        const Segment s2({u(rng), u(rng)}, {u(rng), u(rng)});
        const auto x = seg_seg_intersect(s1, s2);
        if (x.kind != SegIntersection::Kind::Point) continue;
        ++points;
        REQUIRE(x.t >= 0.0);
        REQUIRE(x.t <= 1.0);
        REQUIRE(x.u >= 0.0);
        REQUIRE(x.u <= 1.0);
        CHECK(distance(s1.at(x.t), x.p) < 1e-12);
        CHECK(distance(s2.at(x.u), x.p) < 1e-12);
    }
    CHECK(points > 1000);
}

TEST_CASE("polygon area and centroid") {
    CHECK(polygon_area(ConvexPolygon{{0, 0}, {1, 0}, {0, 1}}) == doctest::Approx(0.5));
    CHECK(polygon_area(ConvexPolygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}}) == doctest::Approx(1.0));
    // Case-3 liquid of R1=(0.2,0.6), R2=(0.3,0.8) on the unit triangle.
    CHECK(polygon_area(ConvexPolygon{{0.2, 0}, {0.6, 0}, {0.7, 0.3}, {0.2, 0.8}}) == doctest::Approx(0.26));

    const Point2 c1 = polygon_centroid(ConvexPolygon{{0, 0}, {1, 0}, {0, 1}});
    CHECK(c1.x == doctest::Approx(1.0 / 3.0));
    CHECK(c1.y == doctest::Approx(1.0 / 3.0));
    const Point2 c2 = polygon_centroid(ConvexPolygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(c2.x == doctest::Approx(0.5));
    CHECK(c2.y == doctest::Approx(0.5));
    const Point2 c3 = polygon_centroid(ConvexPolygon{{0, 0}, {2, 0}, {2, 1}, {0, 1}});
    CHECK(c3.x == doctest::Approx(1.0));
    CHECK(c3.y == doctest::Approx(0.5));
    CHECK_THROWS_AS(polygon_centroid(ConvexPolygon{{0, 0}, {1, 0}, {2, 0}}), GeometryError);
}

TEST_CASE("convex polygon validation") {
    CHECK_NOTHROW(ConvexPolygon::checked({{0, 0}, {1, 0}, {0, 1}}));
    CHECK_THROWS_AS(ConvexPolygon::checked({{0, 0}, {0, 1}, {1, 0}}), GeometryError);
    CHECK_THROWS_AS(ConvexPolygon::checked({{0, 0}, {1, 0}}), GeometryError);
    CHECK_THROWS_AS(ConvexPolygon::checked({{0, 0}, {1, 0}, {2, 0}}), GeometryError);
}

TEST_CASE("clip_convex examples") {
    const ConvexPolygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const ConvexPolygon shifted{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
    const auto a = clip_convex(sq, shifted);
    REQUIRE(a);
    CHECK(polygon_area(*a) == doctest::Approx(0.25));
    const auto self = clip_convex(sq, sq);
    REQUIRE(self);
    CHECK(polygon_area(*self) == doctest::Approx(1.0));
    const ConvexPolygon t1{{0, 0}, {1, 0}, {0, 1}};
    const ConvexPolygon t2{{2, 2}, {3, 2}, {2, 3}};
    CHECK_FALSE(clip_convex(t1, t2));
    // Touching along an edge has no area.
    const ConvexPolygon t3{{1, 0}, {1, 1}, {0, 1}};
    CHECK_FALSE(clip_convex(t1, t3));
}

namespace {

ConvexPolygon random_convex(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.141592653589793);
    std::uniform_real_distribution<double> rad(0.2, 1.0);
    std::uniform_real_distribution<double> off(-0.5, 0.5);
    const int n = 3 + static_cast<int>(rng() % 4);
    std::vector<double> th(n);
    for (auto& t : th) t = ang(rng);
    std::sort(th.begin(), th.end());
    const double r = rad(rng);
    const Point2 c{off(rng), off(rng)};
    PointList v;
    for (double t : th) v.push_back(c + r * Point2{std::cos(t), std::sin(t)});
    return ConvexPolygon(v);
}

// Brute-force half-plane intersection, one edge of q at a time.
double halfplane_oracle(const ConvexPolygon& p, const ConvexPolygon& q) {
    std::vector<Point2> cur(p.begin(), p.end());
    for (std::size_t i = 0; i < q.size() && !cur.empty(); ++i) {
        const Point2 a = q[i], b = q[(i + 1) % q.size()];
        std::vector<Point2> next;
        for (std::size_t k = 0; k < cur.size(); ++k) {
            const Point2 s = cur[k], e = cur[(k + 1) % cur.size()];
            const double ds = orient2d_fast(a, b, s), de = orient2d_fast(a, b, e);
            if (ds >= 0) next.push_back(s);
            if ((ds >= 0) != (de >= 0)) next.push_back(lerp(s, e, ds / (ds - de)));
        }
        cur = std::move(next);
    }
    return cur.size() < 3 ? 0.0 : signed_area(cur);
}

}  // namespace

TEST_CASE("clip_convex properties on random polygons") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5000; ++i) {
        const ConvexPolygon p = random_convex(rng), q = random_convex(rng);
        const auto pq = clip_convex(p, q);
        const auto qp = clip_convex(q, p);
        const double apq = pq ? polygon_area(*pq) : 0.0;
        const double aqp = qp ? polygon_area(*qp) : 0.0;
        CHECK(apq <= std::min(polygon_area(p), polygon_area(q)) + 1e-15);
        CHECK(apq == doctest::Approx(aqp).epsilon(1e-12).scale(1.0));
        CHECK(apq == doctest::Approx(halfplane_oracle(p, q)).epsilon(1e-12).scale(1.0));
        const double rest = polygon_area(p) - apq;
        CHECK(rest >= -1e-15);
        CHECK(apq + rest == doctest::Approx(polygon_area(p)).epsilon(1e-14));
    }
}

TEST_CASE("point_in_convex examples") {
    const ConvexPolygon t{{0, 0}, {1, 0}, {0, 1}};
    CHECK(point_in_convex({0.1, 0.1}, t) == Location::Inside);
    CHECK(point_in_convex({0.5, 0}, t) == Location::Boundary);
    CHECK(point_in_convex({1, 1}, t) == Location::Outside);
}

TEST_CASE("point_in_convex agrees with a winding-number oracle") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 100000; ++i) {
        const ConvexPolygon p = random_convex(rng);
        const Point2 q{u(rng), u(rng)};
        // Winding number by summing signed angle increments.
        double w = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const Point2 a = p[k] - q, b = p[(k + 1) % p.size()] - q;
            w += std::atan2(cross(a, b), dot(a, b));
        }
        const bool inside = std::abs(w) > 3.14;
        const Location loc = point_in_convex(q, p);
        if (loc == Location::Boundary) continue;
        REQUIRE((loc == Location::Inside) == inside);
    }
}

TEST_CASE("clip_halfplane keeps the left side") {
    const std::array<Point2, 4> sq{Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}};
    const auto left = clip_halfplane(sq, {0.25, 0}, {0.25, 1});
    CHECK(signed_area({left.data(), left.size()}) == doctest::Approx(0.25));
}

TEST_CASE("polygon moments") {
    const std::array<Point2, 4> sq{Point2{0, 0}, Point2{2, 0}, Point2{2, 1}, Point2{0, 1}};
    const Moments m = polygon_moments(sq);
    CHECK(m.area == doctest::Approx(2.0));
    CHECK(m.first.x == doctest::Approx(2.0));
    CHECK(m.first.y == doctest::Approx(1.0));
}

}  // TEST_SUITE
