#include <doctest.h>

#include <cstring>
#include <random>

#include <tec/edgecut.hpp>

#include "support.hpp"

using namespace tec;
using test::kUnit;

namespace {

EdgeCut make(Material c, CutRows R, std::optional<Barycentric> vt = std::nullopt) {
    EdgeCut e;
    e.c = c;
    e.R = R;
    e.vt = vt;
    return e;
}

constexpr auto Air = Material::Air;
constexpr auto Liq = Material::Liquid;

}  // namespace

TEST_SUITE("edgecut") {

TEST_CASE("cut_point") {
    const Point2 p = cut_point(kUnit, 0, 0.3);
    CHECK(p.x == doctest::Approx(0.3));
    CHECK(p.y == 0.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(cut_point(kUnit, i, 0.0) == kUnit[i]);
        CHECK(cut_point(kUnit, i, 1.0) == kUnit[(i + 1) % 3]);
    }
}

TEST_CASE("vertex materials follow parity") {
    using A = std::array<Material, 3>;
    CHECK(vertex_materials(make(Air, {{{0.3, 1}, {0.5, 1}, {0, 1}}})) == A{Air, Liq, Air});
    CHECK(vertex_materials(EdgeCut::pure(Air)) == A{Air, Air, Air});
    CHECK(vertex_materials(make(Liq, {{{0.7, 1}, {0, 1}, {0.4, 1}}})) == A{Liq, Air, Air});
    CHECK_THROWS_AS(vertex_materials(make(Air, {{{0.3, 1}, {0, 1}, {0, 1}}})), InvalidEdgeCut);
}

TEST_CASE("classify examples") {
    CHECK(classify(make(Air, {{{0.2, 0.6}, {0, 1}, {0, 1}}}, Barycentric{0.3, 0.3})) == CanonicalForm{2, false, 0});
    CHECK(classify(make(Liq, {{{0.7, 1}, {0, 1}, {0.4, 1}}})) == CanonicalForm{5, false, 0});
    CHECK(classify(make(Air, {{{0, 1}, {0.2, 0.6}, {0.3, 0.8}}})) == CanonicalForm{3, false, 1});
    CHECK(classify(EdgeCut::pure(Air)) == CanonicalForm{1, false, 0});
    CHECK(classify(EdgeCut::pure(Liq)) == CanonicalForm{1, true, 0});
    // Single cuts on all three edges are parity-odd.
    CHECK_THROWS_AS(classify(make(Air, {{{0.5, 1}, {0.5, 1}, {0.5, 1}}})), InvalidEdgeCut);
}

TEST_CASE("single-cut rows are stored as (r, 1)") {
    CHECK(normalized_row(std::array<double, 1>{0.4}) == std::array<double, 2>{0.4, 1.0});
    const EdgeCut e = normalized(make(Air, {{{0.0, 0.4}, {0.5, 1e-12}, {0, 1}}}));
    CHECK(e.R[0] == std::array<double, 2>{0.4, 1.0});
    CHECK(e.R[1] == std::array<double, 2>{0.5, 1.0});
    CHECK(snap_cut(5e-10) == 0.0);
    CHECK(snap_cut(1.0 - 5e-10) == 1.0);
    CHECK(snap_cut(0.5) == 0.5);
}

TEST_CASE("reconstruct examples") {
    const auto fig3 = reconstruct(make(Air, {{{0.3, 1}, {0.5, 1}, {0, 1}}}), kUnit);
    REQUIRE(fig3.liquid.size() == 1);
    const PolygonList want{ConvexPolygon{{0.3, 0}, {1, 0}, {0.5, 0.5}}};
    CHECK(test::symmetric_difference(fig3.liquid, want) < 1e-15);

    const auto empty = reconstruct(EdgeCut::pure(Air), kUnit);
    CHECK(empty.liquid.empty());
    CHECK(test::total_area(empty.air) == doctest::Approx(0.5));

    const auto full = reconstruct(EdgeCut::pure(Liq), kUnit);
    CHECK(full.air.empty());
    CHECK(test::total_area(full.liquid) == doctest::Approx(0.5));

    const auto c3 = reconstruct(make(Air, {{{0.2, 0.6}, {0.3, 0.8}, {0, 1}}}), kUnit);
    const PolygonList quad{ConvexPolygon{{0.2, 0}, {0.6, 0}, {0.7, 0.3}, {0.2, 0.8}}};
    CHECK(test::symmetric_difference(c3.liquid, quad) < 1e-15);
    CHECK(test::total_area(c3.liquid) == doctest::Approx(0.26));

    CHECK_THROWS_AS(reconstruct(make(Air, {{{0.2, 0.6}, {0, 1}, {0, 1}}}), kUnit), InvalidEdgeCut);
}

TEST_CASE("area fraction examples") {
    const AreaFractions f1 = area_fractions(EdgeCut::pure(Air));
    CHECK(f1.air == 1.0);
    CHECK(f1.liquid == 0.0);
    CHECK(area_fractions(make(Liq, {{{0.7, 1}, {0, 1}, {0.4, 1}}})).liquid == doctest::Approx(0.42));
    CHECK(area_fractions(make(Air, {{{0.2, 0.6}, {0.3, 0.8}, {0, 1}}})).liquid == doctest::Approx(0.52));
    // Case 2: the interior vertex weight on v3 scales the base.
    CHECK(area_fractions(make(Air, {{{0.2, 0.6}, {0, 1}, {0, 1}}}, Barycentric{0.3, 0.5})).liquid ==
          doctest::Approx(0.5 * 0.4));
}

TEST_CASE("area fractions match shoelace of the reconstruction") {
    std::mt19937_64 rng(11);
    for (int k = 1; k <= 6; ++k) {
        for (int i = 0; i < 5000; ++i) {
            const EdgeCut e = test::random_cut(rng, k);
            const Triangle t = i % 2 ? kUnit : test::random_triangle(rng);
            const auto reg = reconstruct(e, t);
            const double tri = triangle_area(t);
            const AreaFractions f = area_fractions(e);
            REQUIRE(std::abs(f.liquid - test::total_area(reg.liquid) / tri) <= 1e-12);
            REQUIRE(std::abs(f.air - test::total_area(reg.air) / tri) <= 1e-12);
            REQUIRE(f.air + f.liquid == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("material swap and rotation equivariance") {
    std::mt19937_64 rng(12);
    for (int k = 1; k <= 6; ++k) {
        for (int i = 0; i < 2000; ++i) {
            const EdgeCut e = test::random_cut(rng, k);
            const Triangle t = test::random_triangle(rng);
            const auto a = reconstruct(e, t);
            const auto b = reconstruct(swapped(e), t);
            REQUIRE(test::symmetric_difference(a.liquid, b.air) <= 1e-12);
            REQUIRE(test::symmetric_difference(a.air, b.liquid) <= 1e-12);

            const CanonicalForm cf = classify(e);
            for (int r = 0; r < 3; ++r) {
                const EdgeCut er = rotated(e, r);
                const CanonicalForm cr = classify(er);
                REQUIRE(cr.case_id == cf.case_id);
                REQUIRE(cr.swap == cf.swap);
                // Cases 1 and 4 look the same from every vertex.
                if (cf.case_id != 1 && cf.case_id != 4) REQUIRE((cr.rot + r) % 3 == cf.rot);
                const Triangle tr{t[r], t[(r + 1) % 3], t[(r + 2) % 3]};
                REQUIRE(test::symmetric_difference(reconstruct(er, tr).liquid, a.liquid) <= 1e-12);
            }
        }
    }
}

TEST_CASE("air decomposition piece counts") {
    std::mt19937_64 rng(13);
    const std::array<std::size_t, 7> air_pieces{0, 1, 4, 2, 3, 1, 2};
    for (int k = 1; k <= 6; ++k) {
        const auto reg = reconstruct(test::canonical_cut(rng, k), kUnit);
        CHECK(reg.air.size() == air_pieces[k]);
        for (const auto& p : reg.air) CHECK_NOTHROW(ConvexPolygon::checked(p.vertices()));
        for (const auto& p : reg.liquid) CHECK_NOTHROW(ConvexPolygon::checked(p.vertices()));
    }
}

TEST_CASE("interior segments") {
    std::mt19937_64 rng(14);
    const std::array<std::size_t, 7> counts{0, 0, 2, 2, 3, 1, 2};
    for (int k = 1; k <= 6; ++k)
        for (int i = 0; i < 50; ++i) CHECK(interior_segments(test::random_cut(rng, k), kUnit).size() == counts[k]);

    const auto c3 = interior_segments(make(Air, {{{0.2, 0.6}, {0.3, 0.8}, {0, 1}}}), kUnit);
    REQUIRE(c3.size() == 2);
    const Point2 r11 = cut_point(kUnit, 0, 0.2), r12 = cut_point(kUnit, 0, 0.6);
    const Point2 r21 = cut_point(kUnit, 1, 0.3), r22 = cut_point(kUnit, 1, 0.8);
    auto has = [&](Point2 a, Point2 b) {
        for (const auto& s : c3)
            if (distance(s.seg.a, a) < 1e-15 && distance(s.seg.b, b) < 1e-15) return true;
        return false;
    };
    CHECK(has(r12, r21));
    CHECK(has(r22, r11));

    const auto c5 = interior_segments(make(Liq, {{{0.7, 1}, {0, 1}, {0.4, 1}}}), kUnit);
    REQUIRE(c5.size() == 1);
    CHECK(distance(c5[0].seg.a, {0.7, 0}) < 1e-15);
    CHECK(distance(c5[0].seg.b, {0, 0.6}) < 1e-15);
    CHECK(orient2d(c5[0].seg.a, c5[0].seg.b, {0, 0}) == 1);
}

TEST_CASE("liquid lies left of every interior segment") {
    std::mt19937_64 rng(15);
    for (int k = 2; k <= 6; ++k) {
        for (int i = 0; i < 500; ++i) {
            const EdgeCut e = test::random_cut(rng, k);
            const Triangle t = test::random_triangle(rng);
            const auto reg = reconstruct(e, t);
            for (const auto& s : interior_segments(e, t)) {
                const Point2 mid = lerp(s.seg.a, s.seg.b, 0.5);
                const Point2 d = s.seg.direction();
                const Point2 left = mid + 1e-7 * Point2{-d.y, d.x};
                bool in = false;
                for (const auto& p : reg.liquid) in = in || point_in_convex(left, p) == Location::Inside;
                REQUIRE(in);
            }
        }
    }
}

TEST_CASE("material_at examples") {
    const EdgeCut c5 = make(Liq, {{{0.7, 1}, {0, 1}, {0.4, 1}}});
    CHECK(material_at(c5, kUnit, {0.1, 0.1}) == Liq);
    CHECK(material_at(c5, kUnit, {0.5, 0.4}) == Air);
    CHECK(material_at(c5, kUnit, {0.35, 0.3}) == Liq);  // on the segment
}

TEST_CASE("material_at agrees with point-in-polygon over the liquid") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 1; k <= 6; ++k) {
        for (int i = 0; i < 40; ++i) {
            const EdgeCut e = test::random_cut(rng, k);
            const Triangle t = test::random_triangle(rng);
            const CutGeometry g = analyze(e, t);
            for (int j = 0; j < 500; ++j) {
                double a = u(rng), b = u(rng);
                if (a + b > 1.0) {
                    a = 1.0 - a;
                    b = 1.0 - b;
                }
                const Point2 p = from_barycentric(t, {a, b});
                bool in = false, edge = false;
                for (const auto& poly : g.regions.liquid) {
                    const Location l = point_in_convex(p, poly);
                    in = in || l == Location::Inside;
                    edge = edge || l == Location::Boundary;
                }
                if (edge && !in) continue;
                REQUIRE(material_at(g, p) == (in ? Liq : Air));
            }
        }
    }
}

TEST_CASE("pack examples") {
    const EdgeCut fig3 = make(Air, {{{0.3, 1}, {0.5, 1}, {0, 1}}});
    const PackedCut p = pack(fig3);
    CHECK(p == PackedCut{0.3, 1, 0.5, 1, 0, 1});
    CHECK_FALSE(std::signbit(p[0]));

    EdgeCut liq = fig3;
    liq.c = Liq;
    const PackedCut q = pack(liq);
    CHECK(q[0] == -0.3);
    CHECK(unpack(q) == liq);

    const EdgeCut c2 = make(Air, {{{0.25, 0.75}, {0, 1}, {0, 1}}}, Barycentric{0.3, 0.4});
    const PackedCut r = pack(c2);
    CHECK(r[2] == doctest::Approx(2.3));
    CHECK(r[3] == doctest::Approx(2.4));

    // A pure-liquid cut keeps its material in the sign bit of zero.
    const PackedCut z = pack(EdgeCut::pure(Liq));
    CHECK(std::signbit(z[0]));
    CHECK(unpack(z) == EdgeCut::pure(Liq));
}

TEST_CASE("pack round trip is the identity") {
    std::mt19937_64 rng(17);
    for (int k = 1; k <= 6; ++k) {
        for (int i = 0; i < 2000; ++i) {
            const EdgeCut e = test::random_cut(rng, k);
            const PackedCut p = pack(e);
            const EdgeCut back = unpack(p);
            REQUIRE(back.c == e.c);
            REQUIRE(back.R == e.R);
            REQUIRE(back.vt.has_value() == e.vt.has_value());
            if (e.vt) {
                // Offsetting by 2 rounds; the barycentric pair must survive within that rounding.
                CHECK(std::abs(back.vt->u - e.vt->u) <= 4e-16);
                CHECK(std::abs(back.vt->v - e.vt->v) <= 4e-16);
                CHECK(pack(back) == p);
            }
        }
    }
}

TEST_CASE("unpack rejects malformed records") {
    CHECK_THROWS_AS(unpack(PackedCut{1.5, 1, 0, 1, 0, 1}), FormatError);
    CHECK_THROWS_AS(unpack(PackedCut{0.6, 0.4, 0, 1, 0, 1}), FormatError);
    CHECK_THROWS_AS(unpack(PackedCut{0.3, 1, 0, 1, 0, 1}), FormatError);  // odd parity
    CHECK_THROWS_AS(unpack(PackedCut{std::nan(""), 1, 0, 1, 0, 1}), FormatError);
    CHECK_THROWS_AS(unpack(PackedCut{0.25, 0.75, 2.7, 2.6, 0, 1}), FormatError);  // w < 0
}

}  // TEST_SUITE
