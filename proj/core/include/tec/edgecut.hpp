#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <boost/container/small_vector.hpp>

#include "tec/geom.hpp"

namespace tec {

class InvalidEdgeCut : public std::runtime_error {
public:
    explicit InvalidEdgeCut(const std::string& what) : std::runtime_error(what) {}
};

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

enum class Material : std::uint8_t { Air = 0, Liquid = 1 };

inline Material flip(Material m) { return m == Material::Air ? Material::Liquid : Material::Air; }
inline Material flip_if(Material m, bool f) { return f ? flip(m) : m; }

inline constexpr double kCutEps = 1e-9;

inline bool is_valid_cut(double r) { return r > kCutEps && r < 1.0 - kCutEps; }

// Pushes parameters inside the validity band onto 0 / 1.
inline double snap_cut(double r) {
    if (!(r > kCutEps)) return 0.0;
    if (!(r < 1.0 - kCutEps)) return 1.0;
    return r;
}

// Interior vertex of case 2 as barycentric weights of v2 (u) and v3 (v).
struct Barycentric {
    double u = 0.0;
    double v = 0.0;
    double w() const { return 1.0 - u - v; }
    friend bool operator==(const Barycentric&, const Barycentric&) = default;
};

inline Point2 from_barycentric(const Triangle& t, Barycentric b) {
    return {b.w() * t[0].x + b.u * t[1].x + b.v * t[2].x, b.w() * t[0].y + b.u * t[1].y + b.v * t[2].y};
}
Barycentric to_barycentric(const Triangle& t, Point2 p);

using CutRows = std::array<std::array<double, 2>, 3>;

struct EdgeCut {
    Material c = Material::Air;
    CutRows R{{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}};
    std::optional<Barycentric> vt;

    friend bool operator==(const EdgeCut&, const EdgeCut&) = default;

    static EdgeCut pure(Material m) {
        EdgeCut e;
        e.c = m;
        return e;
    }
};

// Rewrites each row in the canonical storage form: (0,1) for no cut, (r,1)
// for a single cut, (r1,r2) sorted for two.
EdgeCut normalized(EdgeCut e);
std::array<double, 2> normalized_row(std::span<const double> valid_cuts);

using CutCount = std::array<int, 3>;
CutCount cut_count(const EdgeCut& e);
int row_count(const std::array<double, 2>& row);

// The i-th valid cut of a row (i < row_count).
double row_cut(const std::array<double, 2>& row, int i);

std::array<Material, 3> vertex_materials(const EdgeCut& e);

struct CanonicalForm {
    int case_id = 1;
    bool swap = false;
    int rot = 0;
    friend bool operator==(const CanonicalForm&, const CanonicalForm&) = default;
};

CanonicalForm classify(const EdgeCut& e);

// Relabels vertices so new vertex j is old vertex j+k.
EdgeCut rotated(const EdgeCut& e, int k);
// Exchanges the roles of liquid and air.
EdgeCut swapped(const EdgeCut& e);

Point2 cut_point(const Triangle& t, int edge, double r);

using PolygonList = boost::container::small_vector<ConvexPolygon, 4>;

struct MaterialRegions {
    PolygonList liquid;
    PolygonList air;
};

MaterialRegions reconstruct(const EdgeCut& e, const Triangle& t);

struct AreaFractions {
    double air = 1.0;
    double liquid = 0.0;
};

AreaFractions area_fractions(const EdgeCut& e);

// Interior segment with the edges carrying its endpoints (-1 for the case-2
// interior vertex).
struct InteriorSegment {
    Segment seg;
    std::array<int, 2> edge{-1, -1};
};

using SegmentList = boost::container::small_vector<InteriorSegment, 3>;

// Liquid lies on the left of every returned segment.
SegmentList interior_segments(const EdgeCut& e, const Triangle& t);

// Everything needed for repeated material queries within one triangle.
struct CutGeometry {
    CanonicalForm form;
    SegmentList segments;
    MaterialRegions regions;

    bool pure() const { return form.case_id == 1; }
    Material pure_material() const { return form.swap ? Material::Liquid : Material::Air; }
};

CutGeometry analyze(const EdgeCut& e, const Triangle& t);

Material material_at(const CutGeometry& g, Point2 p);
Material material_at(const EdgeCut& e, const Triangle& t, Point2 p);

using PackedCut = std::array<double, 6>;
PackedCut pack(const EdgeCut& e);
EdgeCut unpack(std::span<const double, 6> v);

}  // namespace tec
