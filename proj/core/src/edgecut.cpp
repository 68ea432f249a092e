#include "tec/edgecut.hpp"

#include <algorithm>
#include <cmath>

namespace tec {

Barycentric to_barycentric(const Triangle& t, Point2 p) {
    const double d = orient2d_fast(t[0], t[1], t[2]);
    return {orient2d_fast(t[0], p, t[2]) / d, orient2d_fast(t[0], t[1], p) / d};
}

int row_count(const std::array<double, 2>& row) {
    return static_cast<int>(is_valid_cut(row[0])) + static_cast<int>(is_valid_cut(row[1]));
}

double row_cut(const std::array<double, 2>& row, int i) {
    if (is_valid_cut(row[0])) return i == 0 ? row[0] : row[1];
    return row[1];
}

std::array<double, 2> normalized_row(std::span<const double> cuts) {
    if (cuts.empty()) return {0.0, 1.0};
    if (cuts.size() == 1) return {cuts[0], 1.0};
    return {std::min(cuts[0], cuts[1]), std::max(cuts[0], cuts[1])};
}

EdgeCut normalized(EdgeCut e) {
    for (auto& row : e.R) {
        boost::container::small_vector<double, 2> v;
        for (double r : row)
            if (is_valid_cut(r)) v.push_back(r);
        row = normalized_row({v.data(), v.size()});
    }
    return e;
}

CutCount cut_count(const EdgeCut& e) { return {row_count(e.R[0]), row_count(e.R[1]), row_count(e.R[2])}; }

std::array<Material, 3> vertex_materials(const EdgeCut& e) {
    const CutCount t = cut_count(e);
    if ((t[0] + t[1] + t[2]) % 2 != 0) throw InvalidEdgeCut("odd total cut count");
    const Material m1 = e.c;
    const Material m2 = flip_if(m1, t[0] % 2 == 1);
    const Material m3 = flip_if(m2, t[1] % 2 == 1);
    return {m1, m2, m3};
}

namespace {

int match_case(Material c, const CutCount& t) {
    if (c == Material::Air) {
        if (t == CutCount{0, 0, 0}) return 1;
        if (t == CutCount{2, 0, 0}) return 2;
        if (t == CutCount{2, 2, 0}) return 3;
        if (t == CutCount{2, 2, 2}) return 4;
    } else {
        if (t == CutCount{1, 0, 1}) return 5;
        if (t == CutCount{1, 2, 1}) return 6;
    }
    return 0;
}

// Canonical view of an edge cut under a (swap, rot) transform.
struct Frame {
    const EdgeCut& e;
    const Triangle& tri;
    int rot;

    Point2 w(int j) const { return tri[(j + rot) % 3]; }
    int edge(int i) const { return (i + rot) % 3; }
    const std::array<double, 2>& row(int i) const { return e.R[edge(i)]; }
    double cut(int i, int k) const { return row_cut(row(i), k); }
    Point2 r(int i, int k) const { return cut_point(tri, edge(i), cut(i, k)); }
    // Barycentric weight of canonical vertex j.
    double bary(int j) const {
        const Barycentric b = *e.vt;
        const std::array<double, 3> bw{b.w(), b.u, b.v};
        return bw[(j + rot) % 3];
    }
};

}  // namespace

CanonicalForm classify(const EdgeCut& e) {
    const auto chi = vertex_materials(e);
    const CutCount t = cut_count(e);
    for (bool swap : {false, true}) {
        for (int rot = 0; rot < 3; ++rot) {
            const Material c = flip_if(chi[rot], swap);
            const CutCount tr{t[rot], t[(rot + 1) % 3], t[(rot + 2) % 3]};
            if (const int id = match_case(c, tr)) return {id, swap, rot};
        }
    }
    throw InvalidEdgeCut("cut pattern matches no basic case");
}

EdgeCut rotated(const EdgeCut& e, int k) {
    k = ((k % 3) + 3) % 3;
    const auto chi = vertex_materials(e);
    EdgeCut out;
    out.c = chi[k];
    for (int i = 0; i < 3; ++i) out.R[i] = e.R[(i + k) % 3];
    if (e.vt) {
        const std::array<double, 3> b{e.vt->w(), e.vt->u, e.vt->v};
        out.vt = Barycentric{b[(k + 1) % 3], b[(k + 2) % 3]};
    }
    return out;
}

EdgeCut swapped(const EdgeCut& e) {
    EdgeCut out = e;
    out.c = flip(e.c);
    return out;
}

Point2 cut_point(const Triangle& t, int edge, double r) {
    const Point2 a = t[edge];
    const Point2 b = t[(edge + 1) % 3];
    if (r == 0.0) return a;
    if (r == 1.0) return b;
    return {(1.0 - r) * a.x + r * b.x, (1.0 - r) * a.y + r * b.y};
}

namespace {

void require_vt(const EdgeCut& e) {
    if (!e.vt) throw InvalidEdgeCut("case 2 requires an interior vertex");
}

// Regions in the canonical frame; swap exchanges the lists afterwards.
MaterialRegions canonical_regions(const Frame& f, int case_id) {
    MaterialRegions m;
    auto& L = m.liquid;
    auto& A = m.air;
    switch (case_id) {
        case 1:
            A.push_back(ConvexPolygon{f.w(0), f.w(1), f.w(2)});
            break;
        case 2: {
            const Point2 vt = from_barycentric(f.tri, *f.e.vt);
            const Point2 r11 = f.r(0, 0), r12 = f.r(0, 1);
            L.push_back(ConvexPolygon{r11, r12, vt});
            A.push_back(ConvexPolygon{vt, r12, f.w(1)});
            A.push_back(ConvexPolygon{vt, f.w(1), f.w(2)});
            A.push_back(ConvexPolygon{vt, f.w(2), f.w(0)});
            A.push_back(ConvexPolygon{vt, f.w(0), r11});
            break;
        }
        case 3: {
            const Point2 r11 = f.r(0, 0), r12 = f.r(0, 1), r21 = f.r(1, 0), r22 = f.r(1, 1);
            L.push_back(ConvexPolygon{r11, r12, r21, r22});
            A.push_back(ConvexPolygon{r12, f.w(1), r21});
            A.push_back(ConvexPolygon{f.w(0), r11, r22, f.w(2)});
            break;
        }
        case 4: {
            const Point2 r11 = f.r(0, 0), r12 = f.r(0, 1), r21 = f.r(1, 0), r22 = f.r(1, 1);
            const Point2 r31 = f.r(2, 0), r32 = f.r(2, 1);
            L.push_back(ConvexPolygon{r11, r12, r21, r22, r31, r32});
            A.push_back(ConvexPolygon{f.w(0), r11, r32});
            A.push_back(ConvexPolygon{r12, f.w(1), r21});
            A.push_back(ConvexPolygon{r22, f.w(2), r31});
            break;
        }
        case 5: {
            const Point2 r11 = f.r(0, 0), r31 = f.r(2, 0);
            L.push_back(ConvexPolygon{f.w(0), r11, r31});
            A.push_back(ConvexPolygon{r11, f.w(1), f.w(2), r31});
            break;
        }
        case 6: {
            const Point2 r11 = f.r(0, 0), r21 = f.r(1, 0), r22 = f.r(1, 1), r31 = f.r(2, 0);
            L.push_back(ConvexPolygon{f.w(0), r11, r21, r22, r31});
            A.push_back(ConvexPolygon{r11, f.w(1), r21});
            A.push_back(ConvexPolygon{r22, f.w(2), r31});
            break;
        }
        default:
            break;
    }
    return m;
}

SegmentList canonical_segments(const Frame& f, int case_id) {
    SegmentList s;
    auto add = [&](Point2 a, int ea, Point2 b, int eb) {
        s.push_back({Segment(a, b), {ea < 0 ? -1 : f.edge(ea), eb < 0 ? -1 : f.edge(eb)}});
    };
    switch (case_id) {
        case 2: {
            const Point2 vt = from_barycentric(f.tri, *f.e.vt);
            add(f.r(0, 1), 0, vt, -1);
            add(vt, -1, f.r(0, 0), 0);
            break;
        }
        case 3:
            add(f.r(0, 1), 0, f.r(1, 0), 1);
            add(f.r(1, 1), 1, f.r(0, 0), 0);
            break;
        case 4:
            add(f.r(0, 1), 0, f.r(1, 0), 1);
            add(f.r(1, 1), 1, f.r(2, 0), 2);
            add(f.r(2, 1), 2, f.r(0, 0), 0);
            break;
        case 5:
            add(f.r(0, 0), 0, f.r(2, 0), 2);
            break;
        case 6:
            add(f.r(0, 0), 0, f.r(1, 0), 1);
            add(f.r(1, 1), 1, f.r(2, 0), 2);
            break;
        default:
            break;
    }
    return s;
}

}  // namespace

MaterialRegions reconstruct(const EdgeCut& e, const Triangle& t) {
    const CanonicalForm cf = classify(e);
    if (cf.case_id == 2) require_vt(e);
    MaterialRegions m = canonical_regions(Frame{e, t, cf.rot}, cf.case_id);
    if (cf.swap) std::swap(m.liquid, m.air);
    return m;
}

AreaFractions area_fractions(const EdgeCut& e) {
    const CanonicalForm cf = classify(e);
    const Triangle dummy{};
    const Frame f{e, dummy, cf.rot};
    double f1 = 0.0;
    switch (cf.case_id) {
        case 1:
            f1 = 0.0;
            break;
        case 2:
            require_vt(e);
            f1 = f.bary(2) * (f.cut(0, 1) - f.cut(0, 0));
            break;
        case 3:
            f1 = (1.0 - f.cut(0, 0)) * f.cut(1, 1) - (1.0 - f.cut(0, 1)) * f.cut(1, 0);
            break;
        case 4: {
            const double f0 = f.cut(0, 0) * (1.0 - f.cut(2, 1)) + (1.0 - f.cut(0, 1)) * f.cut(1, 0) +
                              (1.0 - f.cut(1, 1)) * f.cut(2, 0);
            f1 = 1.0 - f0;
            break;
        }
        case 5:
            f1 = f.cut(0, 0) * (1.0 - f.cut(2, 0));
            break;
        case 6: {
            const double f0 = (1.0 - f.cut(0, 0)) * f.cut(1, 0) + (1.0 - f.cut(1, 1)) * f.cut(2, 0);
            f1 = 1.0 - f0;
            break;
        }
        default:
            break;
    }
    if (cf.swap) f1 = 1.0 - f1;
    return {1.0 - f1, f1};
}

SegmentList interior_segments(const EdgeCut& e, const Triangle& t) {
    const CanonicalForm cf = classify(e);
    if (cf.case_id == 2) require_vt(e);
    SegmentList s = canonical_segments(Frame{e, t, cf.rot}, cf.case_id);
    if (cf.swap) {
        for (auto& is : s) {
            is.seg = is.seg.reversed();
            std::swap(is.edge[0], is.edge[1]);
        }
    }
    return s;
}

CutGeometry analyze(const EdgeCut& e, const Triangle& t) {
    CutGeometry g;
    g.form = classify(e);
    if (g.form.case_id == 2) require_vt(e);
    const Frame f{e, t, g.form.rot};
    g.segments = canonical_segments(f, g.form.case_id);
    g.regions = canonical_regions(f, g.form.case_id);
    if (g.form.swap) {
        for (auto& is : g.segments) {
            is.seg = is.seg.reversed();
            std::swap(is.edge[0], is.edge[1]);
        }
        std::swap(g.regions.liquid, g.regions.air);
    }
    return g;
}

Material material_at(const CutGeometry& g, Point2 p) {
    if (g.pure()) return g.pure_material();
    if (!g.form.swap) {
        for (const auto& s : g.segments)
            if (orient2d(s.seg.a, s.seg.b, p) < 0) return Material::Air;
        return Material::Liquid;
    }
    for (const auto& s : g.segments)
        if (orient2d(s.seg.a, s.seg.b, p) >= 0) return Material::Liquid;
    return Material::Air;
}

Material material_at(const EdgeCut& e, const Triangle& t, Point2 p) {
    const CanonicalForm cf = classify(e);
    if (cf.case_id == 1) return cf.swap ? Material::Liquid : Material::Air;
    CutGeometry g;
    g.form = cf;
    g.segments = interior_segments(e, t);
    return material_at(g, p);
}

namespace {

int vt_row(const EdgeCut& e) {
    // Row 2 unless row 2 carries the double cut, then row 3.
    return row_count(e.R[1]) == 2 ? 2 : 1;
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

PackedCut pack(const EdgeCut& e) {
    PackedCut out{e.R[0][0], e.R[0][1], e.R[1][0], e.R[1][1], e.R[2][0], e.R[2][1]};
    if (e.vt) {
        const int row = vt_row(e);
        out[2 * row] = e.vt->u + 2.0;
        out[2 * row + 1] = e.vt->v + 2.0;
    }
    out[0] = std::copysign(out[0], e.c == Material::Liquid ? -1.0 : 1.0);
    return out;
}

EdgeCut unpack(std::span<const double, 6> v) {
    for (double x : v)
        if (!std::isfinite(x)) throw FormatError("non-finite packed value");
    EdgeCut e;
    e.c = std::signbit(v[0]) ? Material::Liquid : Material::Air;
    std::array<double, 6> r{std::abs(v[0]), v[1], v[2], v[3], v[4], v[5]};
    int bary_row = -1;
    for (int i = 0; i < 3; ++i) {
        const double a = r[2 * i], b = r[2 * i + 1];
        if (a >= 2.0 || b >= 2.0) {
            if (i == 0 || bary_row >= 0 || !(a > 2.0 && a < 3.0 && b > 2.0 && b < 3.0))
                throw FormatError("packed interior vertex out of range");
            bary_row = i;
            e.vt = Barycentric{a - 2.0, b - 2.0};
            if (!(e.vt->w() > 0.0)) throw FormatError("packed interior vertex outside triangle");
            e.R[i] = {0.0, 1.0};
            continue;
        }
        if (!in_unit(a) || !in_unit(b) || a > b) throw FormatError("packed cut out of range");
        e.R[i] = {a, b};
    }
    CanonicalForm cf;
    try {
        cf = classify(e);
    } catch (const InvalidEdgeCut& ex) {
        throw FormatError(std::string("packed record: ") + ex.what());
    }
    if ((cf.case_id == 2) != e.vt.has_value()) throw FormatError("interior vertex present iff case 2");
    if (e.vt && vt_row(e) != bary_row) throw FormatError("interior vertex stored in the wrong row");
    return e;
}

}  // namespace tec
