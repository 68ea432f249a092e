#pragma once

#include <random>

#include <tec/edgecut.hpp>
#include <tec/geom.hpp>

namespace tec::test {

inline const Triangle kUnit{Point2{0, 0}, Point2{1, 0}, Point2{0, 1}};

// Uniform cut parameter well inside the valid band.
inline double cut_param(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(1e-3, 1.0 - 1e-3)(rng); }

inline std::array<double, 2> two_cuts(std::mt19937_64& rng) {
    double a = cut_param(rng), b = cut_param(rng);
    while (std::abs(a - b) < 1e-3) b = cut_param(rng);
    return {std::min(a, b), std::max(a, b)};
}

// A random cut in the canonical frame of the given case.
inline EdgeCut canonical_cut(std::mt19937_64& rng, int case_id) {
    EdgeCut e;
    switch (case_id) {
        case 1: break;
        case 2: {
            e.R[0] = two_cuts(rng);
            std::uniform_real_distribution<double> u(0.02, 0.96);
            double a, b;
            do {
                a = u(rng);
                b = u(rng);
            } while (a + b > 0.98);
            e.vt = Barycentric{a, b};
            break;
        }
        case 3:
            e.R[0] = two_cuts(rng);
            e.R[1] = two_cuts(rng);
            break;
        case 4:
            e.R[0] = two_cuts(rng);
            e.R[1] = two_cuts(rng);
            e.R[2] = two_cuts(rng);
            break;
        case 5:
            e.c = Material::Liquid;
            e.R[0] = {cut_param(rng), 1.0};
            e.R[2] = {cut_param(rng), 1.0};
            break;
        case 6:
            e.c = Material::Liquid;
            e.R[0] = {cut_param(rng), 1.0};
            e.R[1] = two_cuts(rng);
            e.R[2] = {cut_param(rng), 1.0};
            break;
    }
    return e;
}

// Canonical cut with a random rotation and material swap applied.
inline EdgeCut random_cut(std::mt19937_64& rng, int case_id) {
    EdgeCut e = canonical_cut(rng, case_id);
    e = rotated(e, static_cast<int>(rng() % 3));
    if (rng() % 2) e = swapped(e);
    return e;
}

inline Triangle random_triangle(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Triangle t{Point2{u(rng), u(rng)}, Point2{u(rng), u(rng)}, Point2{u(rng), u(rng)}};
        const double a = orient2d_fast(t[0], t[1], t[2]);
        if (std::abs(a) < 0.05) continue;
        if (a < 0) std::swap(t[1], t[2]);
        return t;
    }
}

inline double total_area(const PolygonList& pieces) {
    double a = 0.0;
    for (const auto& p : pieces) a += polygon_area(p);
    return a;
}

// Area of the symmetric difference of two unions of interior-disjoint convex pieces.
inline double symmetric_difference(const PolygonList& a, const PolygonList& b) {
    double inter = 0.0;
    for (const auto& p : a)
        for (const auto& q : b)
            if (const auto c = clip_convex(p, q)) inter += polygon_area(*c);
    return total_area(a) + total_area(b) - 2.0 * inter;
}

}  // namespace tec::test
