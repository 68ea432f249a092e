#include "tec/advect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tec/parallel.hpp"

namespace tec {

namespace {

// Fraction mismatch above which a triangle counts as failed.
constexpr double kFailTol = 1e-12;

using CandList = boost::container::small_vector<std::uint32_t, 64>;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_double(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1p-53; }

bool strictly_inside(const Triangle& t, Point2 p) {
    return orient2d(t[0], t[1], p) > 0 && orient2d(t[1], t[2], p) > 0 && orient2d(t[2], t[0], p) > 0;
}

double point_segment_distance2(Point2 p, const Segment& s) {
    const Point2 d = s.direction();
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? dot(p - s.a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Point2 q = s.at(t) - p;
    return dot(q, q);
}

}  // namespace

InterfaceState empty_state(std::shared_ptr<const TriMesh> mesh) {
    InterfaceState s;
    s.cuts.assign(mesh->num_triangles(), EdgeCut{});
    s.mesh = std::move(mesh);
    return s;
}

double total_liquid_area(const InterfaceState& state) {
    // Neumaier summation keeps the total reproducible to ~1 ulp.
    double sum = 0.0, comp = 0.0;
    for (std::size_t t = 0; t < state.cuts.size(); ++t) {
        const double a = area_fractions(state.cuts[t]).liquid * state.mesh->area(t);
        const double s = sum + a;
        comp += std::abs(sum) >= std::abs(a) ? (sum - s) + a : (a - s) + sum;
        sum = s;
    }
    return sum + comp;
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::DegeneratePreimage: return "degenerate_preimage";
        case EventKind::ParityRepair: return "parity_repair";
        case EventKind::ParityFallback: return "parity_fallback";
        case EventKind::VertexLineIntersection: return "vertex_line_intersection";
        case EventKind::VertexFarthest: return "vertex_farthest";
        case EventKind::VertexAbsent: return "vertex_absent";
        case EventKind::CorrectionUnreachable: return "correction_unreachable";
        case EventKind::Unrepresentable: return "unrepresentable";
        case EventKind::TargetClamped: return "target_clamped";
        case EventKind::SubResolution: return "sub_resolution";
        case EventKind::PreviousCut: return "previous_cut";
    }
    return "unknown";
}

bool is_failure(EventKind k) {
    switch (k) {
        case EventKind::DegeneratePreimage:
        case EventKind::CorrectionUnreachable:
        case EventKind::Unrepresentable:
        case EventKind::TargetClamped:
            return true;
        default:
            return false;
    }
}

std::size_t StepReport::count(EventKind k) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [k](const StepEvent& e) { return e.kind == k; }));
}

std::optional<double> StepReport::off_target_area(const TriMesh& mesh) const {
    double s = 0.0;
    for (const auto& e : events) {
        switch (e.kind) {
            case EventKind::DegeneratePreimage:
                return std::nullopt;
            case EventKind::CorrectionUnreachable:
            case EventKind::Unrepresentable:
            case EventKind::TargetClamped:
                s += (e.b - e.a) * mesh.area(static_cast<std::size_t>(e.triangle));
                break;
            default:
                break;
        }
    }
    return s;
}

std::size_t StepReport::failed_triangles() const {
    std::size_t n = 0;
    std::int32_t last = -1;
    for (const auto& e : events) {
        if (!is_failure(e.kind) || e.triangle == last) continue;
        last = e.triangle;
        ++n;
    }
    return n;
}

InterfaceIndex::InterfaceIndex(const InterfaceState& state, unsigned workers) : state_(&state) {
    const TriMesh& m = *state.mesh;
    const std::size_t n = m.num_triangles();
    if (state.cuts.size() != n) throw std::invalid_argument("state has wrong number of cuts");
    kind_.resize(n);
    slot_.assign(n, 0);
    std::vector<std::uint32_t> mixed;
    for (std::size_t t = 0; t < n; ++t) {
        const CutCount c = cut_count(state.cuts[t]);
        if (c[0] + c[1] + c[2] == 0) {
            kind_[t] = state.cuts[t].c == Material::Liquid ? Kind::Liquid : Kind::Air;
        } else {
            kind_[t] = Kind::Mixed;
            slot_[t] = static_cast<std::uint32_t>(mixed.size());
            mixed.push_back(static_cast<std::uint32_t>(t));
        }
    }
    geom_.resize(mixed.size());
    parallel_for(mixed.size(), workers, [&](std::size_t i) {
        const std::uint32_t t = mixed[i];
        geom_[i] = analyze(state.cuts[t], m.triangle(t));
    });
}

Material InterfaceIndex::material_at(std::size_t t, Point2 p) const {
    switch (kind_[t]) {
        case Kind::Air: return Material::Air;
        case Kind::Liquid: return Material::Liquid;
        default: return tec::material_at(geom_[slot_[t]], p);
    }
}

Material InterfaceIndex::material_query(Point2 p, std::optional<std::int32_t> hint) const {
    const LocateResult r = locate(mesh(), p, hint);
    if (r.outside()) return Material::Air;
    return material_at(static_cast<std::size_t>(r.triangle), p);
}

InterfaceIndex::HitList InterfaceIndex::raw_hits(const Segment& e, std::span<const std::uint32_t> candidates) const {
    HitList hits;
    const TriMesh& m = mesh();
    const BBox eb = BBox::of(std::array<Point2, 2>{e.a, e.b});
    boost::container::small_vector<std::uint32_t, 96> edge_ids;
    for (std::uint32_t c : candidates) {
        if (!m.triangle_box(c).overlaps(eb)) continue;
        for (std::uint32_t id : m.triangle_edges(c)) {
            const MeshEdge& me = m.edges()[id];
            const Kind ka = kind_[me.tris[0]];
            const Kind kb = me.boundary() ? Kind::Air : kind_[me.tris[1]];
            if (ka != kb || ka == Kind::Mixed) edge_ids.push_back(id);
        }
        if (kind_[c] != Kind::Mixed) continue;
        for (const auto& s : geom_[slot_[c]].segments) {
            if (const auto t = crossing_param(e, s.seg)) hits.push_back({*t, e.at(*t), s.seg});
        }
    }
    std::sort(edge_ids.begin(), edge_ids.end());
    edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
    const auto& verts = m.vertices();
    for (std::uint32_t id : edge_ids) {
        const MeshEdge& me = m.edges()[id];
        const Kind ka = kind_[me.tris[0]];
        const Kind kb = me.boundary() ? Kind::Air : kind_[me.tris[1]];
        if (ka == kb && ka != Kind::Mixed) continue;
        const Segment seg(verts[me.v0], verts[me.v1]);
        const auto t = crossing_param(e, seg);
        if (!t) continue;
        const Point2 p = e.at(*t);
        const Material m0 = material_at(static_cast<std::size_t>(me.tris[0]), p);
        const Material m1 = me.boundary() ? Material::Air : material_at(static_cast<std::size_t>(me.tris[1]), p);
        if (m0 == m1) continue;
        // Generating line: nearest interior segment on the liquid side, else the edge.
        const std::int32_t liquid_side = m0 == Material::Liquid ? me.tris[0] : me.tris[1];
        Segment gen = seg;
        if (kind_[liquid_side] == Kind::Mixed) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : geom_[slot_[liquid_side]].segments) {
                const double d = point_segment_distance2(p, s.seg);
                if (d < best) {
                    best = d;
                    gen = s.seg;
                }
            }
        }
        hits.push_back({*t, p, gen});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.t < b.t; });
    return hits;
}

double InterfaceIndex::clip_liquid(const ConvexPolygon& region, std::span<const std::uint32_t> candidates,
                                   PolygonList* out) const {
    const TriMesh& m = mesh();
    double area = 0.0;
    auto take = [&](const ConvexPolygon& piece) {
        if (auto c = clip_convex(region, piece)) {
            area += polygon_area(*c);
            if (out) out->push_back(std::move(*c));
        }
    };
    for (std::uint32_t c : candidates) {
        if (kind_[c] == Kind::Air) continue;
        if (kind_[c] == Kind::Liquid) {
            take(to_polygon(m.triangle(c)));
        } else {
            for (const auto& piece : geom_[slot_[c]].regions.liquid) take(piece);
        }
    }
    return area;
}

InterfaceIndex::HitList parity_filter(InterfaceIndex::HitList hits, Material a, Material b) {
    InterfaceIndex::HitList out;
    if (a == b) {
        if (hits.size() >= 2) {
            out.push_back(hits.front());
            out.push_back(hits.back());
        }
    } else if (!hits.empty()) {
        out.push_back(hits.front());
    }
    return out;
}

Point2 perturbation(std::uint64_t seed, std::int64_t step, std::uint32_t vertex, double scale) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(step));
    h = splitmix64(h ^ vertex);
    const double r = scale * std::sqrt(unit_double(h));
    const double th = 2.0 * std::numbers::pi * unit_double(splitmix64(h));
    return {r * std::cos(th), r * std::sin(th)};
}

namespace {

// Perturbation of mesh vertex v, turned inward on the bounding box so that
// boundary pre-images stay on the mesh under tangential flows.
Point2 vertex_offset(const TriMesh& mesh, std::uint32_t v, std::uint64_t seed, std::int64_t step, double scale) {
    Point2 d = perturbation(seed, step, v, scale);
    const Point2 p = mesh.vertices()[v];
    const BBox& b = mesh.bounds();
    if (p.x == b.xmin) d.x = std::abs(d.x);
    if (p.x == b.xmax) d.x = -std::abs(d.x);
    if (p.y == b.ymin) d.y = std::abs(d.y);
    if (p.y == b.ymax) d.y = -std::abs(d.y);
    return d;
}

}  // namespace

Triangle preimage_triangle(const TriMesh& mesh, std::size_t tri, const VelocityField& field, double t, double dt,
                           std::uint64_t seed, std::int64_t step, double perturbation_scale) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    Triangle out;
    const double scale = perturbation_scale * mesh.char_length();
    for (int i = 0; i < 3; ++i) {
        const std::uint32_t v = mesh.triangles()[tri][i];
        const Point2 p = mesh.vertices()[v] + vertex_offset(mesh, v, seed, step, scale);
        out[i] = rk4_trace(field, p, t, -dt);
    }
    return out;
}

Material material_query(const InterfaceState& state, Point2 p) { return InterfaceIndex(state).material_query(p); }

std::vector<std::pair<double, Point2>> edge_cuts_on_segment(const InterfaceState& state, const Segment& e) {
    const InterfaceIndex idx(state);
    CandList cands;
    state.mesh->candidates(BBox::of(std::array<Point2, 2>{e.a, e.b}), cands);
    auto hits = idx.raw_hits(e, {cands.data(), cands.size()});
    hits = parity_filter(std::move(hits), idx.material_query(e.a), idx.material_query(e.b));
    std::vector<std::pair<double, Point2>> out;
    for (const auto& h : hits) out.emplace_back(h.t, h.p);
    return out;
}

std::optional<AdditionalVertex> find_additional_vertex(const AdditionalVertexInput& in, const VelocityField& field,
                                                       double t, double dt) {
    const Triangle& tri = in.tri;
    boost::container::small_vector<Point2, 32> traced;
    Moments total;
    for (const auto& piece : in.pieces) {
        PointList q;
        for (const Point2& v : piece) q.push_back(rk4_trace(field, v, t, dt));
        const Moments m = polygon_moments({q.data(), q.size()});
        total.area += m.area;
        total.first = total.first + m.first;
        traced.insert(traced.end(), q.begin(), q.end());
    }
    if (in.liquid_outside) {
        const Moments whole = polygon_moments(tri);
        total.area = whole.area - total.area;
        total.first = whole.first - total.first;
    }
    if (total.area > 0.0) {
        const Point2 xc{total.first.x / total.area, total.first.y / total.area};
        const Point2 cand = 3.0 * xc - in.r1 - in.r2;
        if (strictly_inside(tri, cand)) return AdditionalVertex{cand, VertexSource::Centroid};
    }
    if (in.line1 && in.line2) {
        const Point2 d1 = in.line1->direction();
        const Point2 d2 = in.line2->direction();
        const double den = cross(d1, d2);
        if (den != 0.0 && std::isfinite(den)) {
            const double s = cross(in.line2->a - in.line1->a, d2) / den;
            const Point2 q = rk4_trace(field, in.line1->a + s * d1, t, dt);
            if (strictly_inside(tri, q)) return AdditionalVertex{q, VertexSource::LineIntersection};
        }
    }
    const Point2 a = tri[in.edge];
    const Point2 b = tri[(in.edge + 1) % 3];
    std::optional<AdditionalVertex> best;
    double best_d = -1.0;
    for (const Point2& v : traced) {
        if (!strictly_inside(tri, v)) continue;
        const double d = orient2d_fast(a, b, v);
        if (d > best_d) {
            best_d = d;
            best = AdditionalVertex{v, VertexSource::Farthest};
        }
    }
    return best;
}

namespace {

// Pre-images of mesh vertices for one step.
struct VertexImages {
    std::vector<Point2> plain;      // unperturbed, for areas
    std::vector<Point2> perturbed;  // for topology
    std::vector<Point2> shifted;    // perturbed Eulerian positions
    std::vector<Material> material;  // material at the perturbed pre-image
};

struct StepContext {
    const InterfaceIndex& index;
    const TriMesh& mesh;
    const VelocityField& field;
    double t0;
    double dt;
    const VertexImages& img;
};

struct EdgeHitRef {
    double r;          // projected parameter on the Eulerian edge (triangle direction)
    double pre_t;      // parameter on the pre-image edge (canonical direction)
    Segment generator;
};

using EventSink = std::vector<StepEvent>;

void add_event(EventSink& sink, std::size_t tri, EventKind k, double a = 0.0, double b = 0.0) {
    sink.push_back({static_cast<std::int32_t>(tri), k, a, b});
}

struct TriangleWork {
    CandList cands;
    PolygonList pieces;
};

using EdgeRow = boost::container::small_vector<EdgeHitRef, 2>;

// Cuts of one Eulerian edge lo -> hi (lo < hi by vertex id, so both
// neighbours see identical values): hits on its pre-image, traced forward
// and projected.
EdgeRow canonical_edge_cuts(const StepContext& ctx, std::uint32_t lo, std::uint32_t hi,
                            std::span<const std::uint32_t> cands) {
    const Segment pre(ctx.img.perturbed[lo], ctx.img.perturbed[hi]);
    auto hits = ctx.index.raw_hits(pre, cands);
    hits = parity_filter(std::move(hits), ctx.img.material[lo], ctx.img.material[hi]);

    // Project onto the perturbed Eulerian edge, whose exact pre-image the hits
    // were measured on, then keep the cut strictly inside the valid band so
    // the edge parity agrees with the endpoint materials.
    const Point2 a = ctx.img.shifted[lo];
    const Point2 b = ctx.img.shifted[hi];
    const Point2 d = b - a;
    const double len2 = dot(d, d);
    EdgeRow out;
    for (const auto& h : hits) {
        const Point2 q = rk4_trace(ctx.field, h.p, ctx.t0, ctx.dt);
        const double r = std::clamp(dot(q - a, d) / len2, 2.0 * kCutEps, 1.0 - 2.0 * kCutEps);
        out.push_back({r, h.t, h.generator});
    }
    std::sort(out.begin(), out.end(), [](const EdgeHitRef& x, const EdgeHitRef& y) { return x.r < y.r; });
    // Two cuts squeezed onto the same value bound no area.
    if (out.size() == 2 && !(out[0].r < out[1].r)) out.clear();
    return out;
}

EdgeRow canonical_edge_cuts(const StepContext& ctx, std::uint32_t lo, std::uint32_t hi, CandList& cands) {
    ctx.mesh.candidates(BBox::of(std::array<Point2, 2>{ctx.img.perturbed[lo], ctx.img.perturbed[hi]}), cands);
    return canonical_edge_cuts(ctx, lo, hi, {cands.data(), cands.size()});
}

// Row of triangle edge va -> vb from the canonical row.
EdgeRow oriented(EdgeRow row, std::uint32_t va, std::uint32_t vb) {
    if (va < vb) return row;
    std::reverse(row.begin(), row.end());
    for (auto& h : row) h.r = 1.0 - h.r;
    return row;
}

struct AlgOneResult {
    EdgeCut cut;
    std::array<EdgeRow, 3> rows;
};

// rows: canonical cuts of the triangle's three edges.
AlgOneResult advect_cuts(const StepContext& ctx, std::size_t k, const std::array<const EdgeRow*, 3>& rows,
                         EventSink& events) {
    const auto& tv = ctx.mesh.triangles()[k];
    AlgOneResult res;
    for (int i = 0; i < 3; ++i) res.rows[i] = oriented(*rows[i], tv[i], tv[(i + 1) % 3]);

    int total = 0;
    for (const auto& r : res.rows) total += static_cast<int>(r.size());
    if (total % 2 != 0) {
        // Drop the cut whose pre-image crossing sits closest to an edge end.
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < static_cast<int>(res.rows[i].size()); ++j) {
                const double t = res.rows[i][j].pre_t;
                const double conf = std::min(t, 1.0 - t);
                if (conf < best) {
                    best = conf;
                    bi = i;
                    bj = j;
                }
            }
        }
        res.rows[bi].erase(res.rows[bi].begin() + bj);
        add_event(events, k, EventKind::ParityRepair, best);
    }
    res.cut.c = ctx.img.material[tv[0]];
    for (int i = 0; i < 3; ++i) {
        boost::container::small_vector<double, 2> v;
        for (const auto& h : res.rows[i]) v.push_back(h.r);
        res.cut.R[i] = normalized_row({v.data(), v.size()});
    }
    return res;
}

}  // namespace

EdgeCut correct_to_fraction(const EdgeCut& e, double target, std::size_t tri, std::vector<StepEvent>& events) {
    EdgeCut E = e;
    bool failed = false;
    const double f1 = area_fractions(E).liquid;
    if (f1 != target) {
        const Correction corr = edge_cut_correction(E, target);
        if (corr.status == CorrectionStatus::Corrected) {
            E = corr.cut;
        } else if (corr.status == CorrectionStatus::Unreachable) {
            // A near-pure target is met better by the pure state.
            if (target <= kFailTol && target < std::abs(f1 - target)) {
                E = EdgeCut::pure(Material::Air);
            } else if (1.0 - target <= kFailTol && 1.0 - target < std::abs(f1 - target)) {
                E = EdgeCut::pure(Material::Liquid);
            } else if (std::abs(f1 - target) > kFailTol) {
                const bool pure_cut = classify(E).case_id == 1;
                add_event(events, tri, pure_cut ? EventKind::Unrepresentable : EventKind::CorrectionUnreachable,
                          target, f1);
                failed = true;
            }
        }
    }
    if (!failed) {
        const double fin = area_fractions(E).liquid;
        if (std::abs(fin - target) > kFailTol) add_event(events, tri, EventKind::Unrepresentable, target, fin);
    }
    return E;
}

namespace {

EdgeCut process_triangle(const StepContext& ctx, std::size_t k, const EdgeCut& prev,
                         const std::vector<EdgeRow>& edge_rows, TriangleWork& work, EventSink& events) {
    const TriMesh& mesh = ctx.mesh;
    const auto& tv = mesh.triangles()[k];
    const Triangle T = mesh.triangle(k);
    const Triangle Tp{ctx.img.perturbed[tv[0]], ctx.img.perturbed[tv[1]], ctx.img.perturbed[tv[2]]};
    const Triangle T0{ctx.img.plain[tv[0]], ctx.img.plain[tv[1]], ctx.img.plain[tv[2]]};
    if (orient2d(Tp[0], Tp[1], Tp[2]) <= 0 || orient2d(T0[0], T0[1], T0[2]) <= 0) {
        add_event(events, k, EventKind::DegeneratePreimage);
        return prev;
    }

    BBox box = BBox::of(Tp);
    for (const Point2& p : T0) box.expand(p);
    mesh.candidates(box, work.cands);
    const bool all_air = std::all_of(work.cands.begin(), work.cands.end(), [&](std::uint32_t c) {
        return ctx.index.kind(c) == InterfaceIndex::Kind::Air;
    });
    if (all_air) return EdgeCut::pure(Material::Air);

    work.pieces.clear();
    const double area = ctx.index.clip_liquid(to_polygon(T0), {work.cands.data(), work.cands.size()}, &work.pieces);
    const double tarea = mesh.area(k);
    const double fstar = area / tarea;

    const auto& te = mesh.triangle_edges(k);
    AlgOneResult alg = advect_cuts(ctx, k, {&edge_rows[te[0]], &edge_rows[te[1]], &edge_rows[te[2]]}, events);
    EdgeCut E = alg.cut;
    CanonicalForm cf;
    bool cleared = false;  // cuts dropped by a fallback rather than by the advection itself
    try {
        cf = classify(E);
    } catch (const InvalidEdgeCut&) {
        add_event(events, k, EventKind::ParityFallback);
        cleared = true;
        E = EdgeCut::pure(E.c);
        cf = classify(E);
    }

    if (cf.case_id == 2) {
        const int e1 = cf.rot;
        const auto& row = alg.rows[e1];
        AdditionalVertexInput in;
        in.tri = T;
        in.edge = e1;
        in.r1 = cut_point(T, e1, E.R[e1][0]);
        in.r2 = cut_point(T, e1, E.R[e1][1]);
        in.pieces = {work.pieces.data(), work.pieces.size()};
        in.liquid_outside = cf.swap;
        if (row.size() == 2) {
            in.line1 = row[0].generator;
            in.line2 = row[1].generator;
        }
        std::optional<Barycentric> vt;
        if (const auto av = find_additional_vertex(in, ctx.field, ctx.t0, ctx.dt)) {
            const Barycentric b = to_barycentric(T, av->p);
            if (b.u > 0.0 && b.v > 0.0 && b.w() > 0.0) {
                vt = b;
                if (av->source == VertexSource::LineIntersection) add_event(events, k, EventKind::VertexLineIntersection);
                if (av->source == VertexSource::Farthest) add_event(events, k, EventKind::VertexFarthest);
            }
        }
        if (vt) {
            E.vt = vt;
        } else {
            add_event(events, k, EventKind::VertexAbsent);
            cleared = true;
            E = EdgeCut::pure(E.c);
            cf = classify(E);
        }
    }

    const double target = std::clamp(fstar, 0.0, 1.0);
    if (std::abs(fstar - target) > kFailTol) add_event(events, k, EventKind::TargetClamped, fstar, target);

    // Cleared cuts cannot carry a mixed target; the previous cut of the
    // triangle usually can.
    if (cleared && target > kFailTol && 1.0 - target > kFailTol && classify(prev).case_id != 1) {
        const Correction c = edge_cut_correction(prev, target);
        if (c.status != CorrectionStatus::Unreachable) {
            add_event(events, k, EventKind::PreviousCut, target, area_fractions(c.cut).liquid);
            return c.cut;
        }
    }
    return correct_to_fraction(E, target, k, events);
}

// Triangles whose pre-image can reach a material interface within `reach`.
std::vector<std::uint8_t> narrow_band(const InterfaceIndex& idx, double reach) {
    using Kind = InterfaceIndex::Kind;
    const TriMesh& m = idx.mesh();
    const int nx = m.bucket_nx(), ny = m.bucket_ny();
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(nx) * ny, 0);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        bool interface = idx.kind(t) == Kind::Mixed;
        if (!interface && idx.kind(t) == Kind::Liquid) {
            for (int i = 0; i < 3 && !interface; ++i) {
                const std::int32_t nb = m.neighbor(t, i);
                interface = nb == kNoTriangle || idx.kind(static_cast<std::size_t>(nb)) != Kind::Liquid;
            }
        }
        if (!interface) continue;
        const auto& r = m.triangle_buckets(t);
        for (int iy = r[1]; iy <= r[3]; ++iy)
            for (int ix = r[0]; ix <= r[2]; ++ix) mark[static_cast<std::size_t>(iy) * nx + ix] = 1;
    }
    // Dilate, then answer rectangle queries with a summed-area table.
    const int rx = static_cast<int>(std::ceil(reach / m.bucket_hx())) + 1;
    const int ry = static_cast<int>(std::ceil(reach / m.bucket_hy())) + 1;
    std::vector<int> sat(static_cast<std::size_t>(nx + 1) * (ny + 1), 0);
    auto at = [&](int x, int y) -> int& { return sat[static_cast<std::size_t>(y) * (nx + 1) + x]; };
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x)
            at(x + 1, y + 1) = mark[static_cast<std::size_t>(y) * nx + x] + at(x, y + 1) + at(x + 1, y) - at(x, y);
    auto any = [&](int x0, int y0, int x1, int y1) {
        x0 = std::max(x0, 0);
        y0 = std::max(y0, 0);
        x1 = std::min(x1, nx - 1);
        y1 = std::min(y1, ny - 1);
        if (x0 > x1 || y0 > y1) return false;
        return at(x1 + 1, y1 + 1) - at(x0, y1 + 1) - at(x1 + 1, y0) + at(x0, y0) > 0;
    };
    std::vector<std::uint8_t> active(m.num_triangles(), 0);
    for (std::size_t t = 0; t < m.num_triangles(); ++t) {
        const auto& r = m.triangle_buckets(t);
        active[t] = any(r[0] - rx, r[1] - ry, r[2] + rx, r[3] + ry) ? 1 : 0;
    }
    return active;
}

void trace_vertex(const StepContext& ctx, VertexImages& img, std::uint32_t v, bool topology, std::uint64_t seed,
                  std::int64_t step, double scale) {
    const Point2 p = ctx.mesh.vertices()[v];
    const double t1 = ctx.t0 + ctx.dt;
    img.plain[v] = rk4_trace(ctx.field, p, t1, -ctx.dt);
    if (topology) {
        img.shifted[v] = p + vertex_offset(ctx.mesh, v, seed, step, scale);
        img.perturbed[v] = rk4_trace(ctx.field, img.shifted[v], t1, -ctx.dt);
        // Near the domain boundary the offset can push the pre-image off the
        // mesh; the unperturbed point then decides the material.
        const bool off = locate(ctx.mesh, img.perturbed[v]).outside();
        img.material[v] = ctx.index.material_query(off ? img.plain[v] : img.perturbed[v]);
    }
}

}  // namespace

EdgeCut advect_simple(const InterfaceState& state, std::size_t tri, const VelocityField& field, double dt,
                      std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const TriMesh& mesh = *state.mesh;
    const InterfaceIndex index(state);
    VertexImages img;
    img.plain.resize(mesh.num_vertices());
    img.perturbed.resize(mesh.num_vertices());
    img.shifted.resize(mesh.num_vertices());
    img.material.resize(mesh.num_vertices());
    const StepContext ctx{index, mesh, field, state.time, dt, img};
    const double scale = 1e-6 * mesh.char_length();
    for (std::uint32_t v : mesh.triangles()[tri]) trace_vertex(ctx, img, v, true, seed, state.step, scale);
    const auto& tv = mesh.triangles()[tri];
    CandList cands;
    std::array<EdgeRow, 3> rows;
    for (int i = 0; i < 3; ++i) {
        const std::uint32_t a = tv[i], b = tv[(i + 1) % 3];
        rows[i] = canonical_edge_cuts(ctx, std::min(a, b), std::max(a, b), cands);
    }
    EventSink sink;
    return advect_cuts(ctx, tri, {&rows[0], &rows[1], &rows[2]}, sink).cut;
}

StepResult advect_step(const InterfaceState& state, const VelocityField& field, double dt, const AdvectOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const TriMesh& mesh = *state.mesh;
    const std::size_t nt = mesh.num_triangles();
    const unsigned workers = resolve_workers(opts.workers);
    const InterfaceIndex index(state, workers);
    const double scale = opts.perturbation * mesh.char_length();

    std::vector<std::uint8_t> active(nt, 1);
    const double umax = max_speed(field, mesh.bounds());
    if (opts.narrow_band && std::isfinite(umax) && umax >= 0.0) {
        active = narrow_band(index, 1.05 * umax * dt + 2.0 * scale + 1e-12);
    }

    // 0: untouched, 1: area only, 2: area and topology.
    std::vector<std::uint8_t> need(mesh.num_vertices(), 0);
    for (std::size_t t = 0; t < nt; ++t) {
        std::uint8_t level = active[t] ? 2 : (index.kind(t) == InterfaceIndex::Kind::Liquid ? 1 : 0);
        for (std::uint32_t v : mesh.triangles()[t]) need[v] = std::max(need[v], level);
    }
    VertexImages img;
    img.plain.resize(mesh.num_vertices());
    img.perturbed.resize(mesh.num_vertices());
    img.shifted.resize(mesh.num_vertices());
    img.material.assign(mesh.num_vertices(), Material::Air);
    const StepContext ctx{index, mesh, field, state.time, dt, img};
    parallel_for(mesh.num_vertices(), workers, [&](std::size_t v) {
        if (need[v]) trace_vertex(ctx, img, static_cast<std::uint32_t>(v), need[v] == 2, opts.seed, state.step, scale);
    });

    // Cuts of every edge of an active triangle, shared by its neighbours.
    std::vector<std::uint8_t> edge_needed(mesh.num_edges(), 0);
    for (std::size_t t = 0; t < nt; ++t)
        if (active[t])
            for (std::uint32_t id : mesh.triangle_edges(t)) edge_needed[id] = 1;
    std::vector<EdgeRow> edge_rows(mesh.num_edges());
    const std::size_t ne = mesh.num_edges();
    parallel_chunks(ne, std::max<std::size_t>(1, std::min<std::size_t>(ne, 16 * workers)), workers,
                    [&](std::size_t, std::size_t b, std::size_t e) {
                        CandList cands;
                        for (std::size_t id = b; id < e; ++id) {
                            if (!edge_needed[id]) continue;
                            const MeshEdge& me = mesh.edges()[id];
                            edge_rows[id] = canonical_edge_cuts(ctx, std::min(me.v0, me.v1), std::max(me.v0, me.v1), cands);
                        }
                    });

    StepResult out;
    out.state.mesh = state.mesh;
    out.state.time = state.time + dt;
    out.state.step = state.step + 1;
    out.state.cuts.resize(nt);
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(nt, 16 * workers));
    std::vector<EventSink> sinks(chunks);
    parallel_chunks(nt, chunks, workers, [&](std::size_t chunk, std::size_t b, std::size_t e) {
        TriangleWork work;
        EventSink& sink = sinks[chunk];
        for (std::size_t k = b; k < e; ++k) {
            const EdgeCut& prev = state.cuts[k];
            if (active[k]) {
                out.state.cuts[k] = process_triangle(ctx, k, prev, edge_rows, work, sink);
                continue;
            }
            out.state.cuts[k] = prev;
            if (index.kind(k) == InterfaceIndex::Kind::Liquid) {
                const auto& tv = mesh.triangles()[k];
                const double a = triangle_area({img.plain[tv[0]], img.plain[tv[1]], img.plain[tv[2]]});
                const double f = a / mesh.area(k);
                if (std::abs(f - 1.0) > kFailTol) add_event(sink, k, EventKind::Unrepresentable, f, 1.0);
            }
        }
    });
    for (auto& s : sinks) out.report.events.insert(out.report.events.end(), s.begin(), s.end());
    out.report.active_triangles = static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
    return out;
}

}  // namespace tec
