#include "tec/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tec/parallel.hpp"

namespace tec {

namespace {

constexpr double kPi = std::numbers::pi;

void orient_ccw(std::vector<Point2>& loop) {
    if (signed_area(loop) < 0.0) std::reverse(loop.begin(), loop.end());
}

std::vector<Point2> circle_loop(const Circle& c, int n) {
    if (!(c.radius > 0.0)) throw ShapeError("circle radius must be positive");
    if (n < 3) throw ShapeError("circle needs at least 3 vertices");
    std::vector<Point2> loop(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * kPi * k / n;
        loop[k] = {c.center.x + c.radius * std::cos(th), c.center.y + c.radius * std::sin(th)};
    }
    return loop;
}

std::vector<Point2> heart_loop(const Heart& h, int n) {
    if (!(h.scale > 0.0)) throw ShapeError("heart scale must be positive");
    if (n < 8) throw ShapeError("heart needs at least 8 vertices");
    std::vector<Point2> loop(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double th = -kPi + 2.0 * kPi * k / n;
        const double s = std::sin(th);
        loop[k] = {16.0 * s * s * s * h.scale + h.offset.x,
                   (13.0 * std::cos(th) - 5.0 * std::cos(2 * th) - 2.0 * std::cos(3 * th) - std::cos(4 * th)) * h.scale +
                       h.offset.y};
    }
    orient_ccw(loop);
    return loop;
}

std::vector<std::vector<Point2>> snake_loops(const Snake& s, int n) {
    if (!(s.x1 > s.x0)) throw ShapeError("snake needs x1 > x0");
    if (!(s.frequency > 0.0)) throw ShapeError("snake frequency must be positive");
    if (n < 8) throw ShapeError("snake needs at least 8 vertices");
    auto upper = [&](double x) { return s.baseline + s.amplitude * std::sin(s.frequency * x); };
    auto lower = [&](double x) { return s.lower_baseline + s.lower_amplitude * std::sin(s.frequency * x); };
    auto diff = [&](double x) { return upper(x) - lower(x); };

    // Lobe boundaries: the ends plus every sign change of the curve gap.
    const int fine = 8192;
    const double width = s.x1 - s.x0;
    std::vector<double> cuts{s.x0};
    auto tiny = [&](double v) { return std::abs(v) <= 1e-14 * (1.0 + std::abs(s.amplitude) + std::abs(s.lower_amplitude)); };
    double xa = s.x0, da = diff(xa);
    for (int k = 1; k <= fine; ++k) {
        const double xb = s.x0 + width * k / fine;
        const double db = diff(xb);
        if (tiny(db)) {
            if (k < fine && xb - cuts.back() > 0.0) cuts.push_back(xb);
        } else if (!tiny(da) && (da > 0.0) != (db > 0.0)) {
            double lo = xa, hi = xb;
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                ((diff(mid) > 0.0) == (da > 0.0) ? lo : hi) = mid;
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        xa = xb;
        da = db;
    }
    if (s.x1 > cuts.back()) cuts.push_back(s.x1);

    std::vector<std::vector<Point2>> loops;
    const int per_curve = std::max(4, n / 2);
    for (std::size_t l = 0; l + 1 < cuts.size(); ++l) {
        const double a = cuts[l], b = cuts[l + 1];
        const double mid = 0.5 * (a + b);
        if (tiny(diff(mid))) continue;
        const int m = std::max(4, static_cast<int>(std::lround(per_curve * (b - a) / width)));
        const bool up_on_top = diff(mid) > 0.0;
        auto top = [&](double x) { return up_on_top ? upper(x) : lower(x); };
        auto bot = [&](double x) { return up_on_top ? lower(x) : upper(x); };
        std::vector<Point2> loop;
        // Bottom curve left to right, then top curve right to left. A shared
        // endpoint (curves touching) is emitted once.
        for (int k = 0; k <= m; ++k) {
            const double x = k == m ? b : a + (b - a) * k / m;
            loop.push_back({x, bot(x)});
        }
        for (int k = m; k >= 0; --k) {
            const double x = k == m ? b : a + (b - a) * k / m;
            const Point2 p{x, top(x)};
            if ((k == m || k == 0) && std::abs(p.y - bot(x)) <= 1e-14) continue;
            loop.push_back(p);
        }
        orient_ccw(loop);
        loops.push_back(std::move(loop));
    }
    return loops;
}

std::vector<Point2> notched_loop(const NotchedDisk& d, int n) {
    const double R = d.radius, s = d.slot_width, r = d.bridge;
    if (!(R > 0.0 && s > 0.0 && r > 0.0)) throw ShapeError("notched disk parameters must be positive");
    if (!(s < 2.0 * R)) throw ShapeError("slot wider than the disk");
    const double half = 0.5 * s;
    const double yb = d.center.y - std::sqrt(R * R - half * half);
    const double ytop = d.center.y + R - r;
    if (!(ytop > yb && r < 2.0 * R)) throw ShapeError("bridge inconsistent with slot geometry");
    if (n < 8) throw ShapeError("notched disk needs at least 8 vertices");
    const double th0 = std::atan2(yb - d.center.y, half);
    const double th1 = std::atan2(yb - d.center.y, -half) + 2.0 * kPi;
    const int arc = n - 2;
    std::vector<Point2> loop;
    loop.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < arc; ++j) {
        if (j == 0) {
            loop.push_back({d.center.x + half, yb});
        } else if (j == arc - 1) {
            loop.push_back({d.center.x - half, yb});
        } else {
            const double th = th0 + (th1 - th0) * j / (arc - 1);
            loop.push_back({d.center.x + R * std::cos(th), d.center.y + R * std::sin(th)});
        }
    }
    loop.push_back({d.center.x - half, ytop});
    loop.push_back({d.center.x + half, ytop});
    return loop;
}

}  // namespace

NotchedDisk zalesak_config_a() { return {{2.0, 2.75}, 0.5, 0.06, 0.4}; }
NotchedDisk zalesak_config_b() { return {{0.0, 0.25}, 0.15, 0.05, 0.05}; }

std::optional<double> analytic_area(const ShapeSpec& shape) {
    if (const auto* c = std::get_if<Circle>(&shape)) return kPi * c->radius * c->radius;
    if (const auto* h = std::get_if<Heart>(&shape)) return 180.0 * kPi * h->scale * h->scale;
    if (const auto* d = std::get_if<NotchedDisk>(&shape)) {
        const double R = d->radius, a = 0.5 * d->slot_width;
        const double slot = d->slot_width * (R - d->bridge) + a * std::sqrt(R * R - a * a) + R * R * std::asin(a / R);
        return kPi * R * R - slot;
    }
    return std::nullopt;
}

DensePolygon::DensePolygon(std::vector<std::vector<Point2>> loops) : loops_(std::move(loops)) {
    std::erase_if(loops_, [](const std::vector<Point2>& l) { return l.size() < 3; });
    bool first = true;
    for (const auto& l : loops_) {
        for (const Point2& p : l) {
            if (first) {
                bounds_ = BBox{p.x, p.y, p.x, p.y};
                first = false;
            } else {
                bounds_.expand(p);
            }
        }
    }
    build_slabs();
}

std::size_t DensePolygon::num_vertices() const {
    std::size_t n = 0;
    for (const auto& l : loops_) n += l.size();
    return n;
}

double DensePolygon::area() const {
    double a = 0.0;
    for (const auto& l : loops_) a += signed_area(l);
    return a;
}

void DensePolygon::build_slabs() {
    const std::size_t ne = num_vertices();
    if (ne == 0) return;
    const std::size_t nslab = std::max<std::size_t>(1, ne / 4);
    slab_y0_ = bounds_.ymin;
    slab_h_ = std::max((bounds_.ymax - bounds_.ymin) / static_cast<double>(nslab), 1e-300);
    auto slab = [&](double y) {
        const double f = std::floor((y - slab_y0_) / slab_h_);
        return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(nslab - 1)));
    };
    std::vector<std::uint32_t> count(nslab + 1, 0);
    auto each_edge = [&](auto&& fn) {
        for (const auto& l : loops_)
            for (std::size_t i = 0; i < l.size(); ++i) fn(l[i], l[(i + 1) % l.size()]);
    };
    each_edge([&](Point2 a, Point2 b) {
        for (std::size_t k = slab(std::min(a.y, b.y)); k <= slab(std::max(a.y, b.y)); ++k) ++count[k + 1];
    });
    for (std::size_t k = 0; k < nslab; ++k) count[k + 1] += count[k];
    slab_start_ = count;
    slab_edges_.resize(count[nslab]);
    each_edge([&](Point2 a, Point2 b) {
        for (std::size_t k = slab(std::min(a.y, b.y)); k <= slab(std::max(a.y, b.y)); ++k)
            slab_edges_[count[k]++] = {a, b};
    });
}

bool DensePolygon::contains(Point2 p) const {
    if (loops_.empty() || !bounds_.contains(p)) return false;
    const std::size_t nslab = slab_start_.size() - 1;
    const double f = std::floor((p.y - slab_y0_) / slab_h_);
    const auto k = static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(nslab - 1)));
    bool inside = false;
    for (std::uint32_t i = slab_start_[k]; i < slab_start_[k + 1]; ++i) {
        const auto& e = slab_edges_[i];
        if ((e.a.y > p.y) == (e.b.y > p.y)) continue;
        const double x = e.a.x + (p.y - e.a.y) * (e.b.x - e.a.x) / (e.b.y - e.a.y);
        if (p.x < x) inside = !inside;
    }
    return inside;
}

DensePolygon polygonize(const ShapeSpec& shape, int n) {
    return std::visit(
        [n](const auto& s) -> DensePolygon {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Circle>) return DensePolygon({circle_loop(s, n)});
            if constexpr (std::is_same_v<S, Heart>) return DensePolygon({heart_loop(s, n)});
            if constexpr (std::is_same_v<S, Snake>) return DensePolygon(snake_loops(s, n));
            if constexpr (std::is_same_v<S, NotchedDisk>) return DensePolygon({notched_loop(s, n)});
        },
        shape);
}

double exact_cell_area(const DensePolygon& shape, const ConvexPolygon& region) {
    const BBox rb = BBox::of(region.span());
    if (!rb.overlaps(shape.bounds())) return 0.0;
    const auto rv = region.span();
    double total = 0.0;
    std::vector<Point2> cur, next;
    for (const auto& loop : shape.loops()) {
        cur.assign(loop.begin(), loop.end());
        for (std::size_t i = 0; i < rv.size() && !cur.empty(); ++i) {
            const Point2 a = rv[i], b = rv[(i + 1) % rv.size()];
            next.clear();
            // Sutherland-Hodgman against the left side of a->b.
            for (std::size_t j = 0; j < cur.size(); ++j) {
                const Point2 p = cur[j], q = cur[(j + 1) % cur.size()];
                const double sp = orient2d_fast(a, b, p);
                const double sq = orient2d_fast(a, b, q);
                if (sp >= 0.0) next.push_back(p);
                if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) next.push_back(lerp(p, q, sp / (sp - sq)));
            }
            cur.swap(next);
        }
        if (cur.size() >= 3) total += signed_area(cur);
    }
    return std::max(0.0, total);
}

BoundaryIndex::BoundaryIndex(const DensePolygon& shape, const TriMesh& mesh) : shape_(&shape), mesh_(&mesh) {
    const std::size_t nb = static_cast<std::size_t>(mesh.bucket_nx()) * mesh.bucket_ny();
    std::vector<std::uint32_t> count(nb + 1, 0);
    auto each = [&](auto&& fn) {
        for (std::uint32_t l = 0; l < shape.loops().size(); ++l) {
            for (std::uint32_t i = 0; i < shape.loops()[l].size(); ++i) {
                const Segment s = segment({l, i});
                const BBox b = BBox::of(std::array<Point2, 2>{s.a, s.b});
                if (!b.overlaps(mesh.bounds())) continue;
                const auto [x0, y0, x1, y1] = mesh.bucket_range(b);
                for (int iy = y0; iy <= y1; ++iy)
                    for (int ix = x0; ix <= x1; ++ix) fn(static_cast<std::size_t>(iy) * mesh.bucket_nx() + ix, EdgeRef{l, i});
            }
        }
    };
    each([&](std::size_t k, EdgeRef) { ++count[k + 1]; });
    for (std::size_t k = 0; k < nb; ++k) count[k + 1] += count[k];
    start_ = count;
    items_.resize(count[nb]);
    each([&](std::size_t k, EdgeRef e) { items_[count[k]++] = e; });
}

Segment BoundaryIndex::segment(EdgeRef e) const {
    const auto& l = shape_->loops()[e.loop];
    return Segment(l[e.index], l[(e.index + 1) % l.size()]);
}

namespace {

using RefList = boost::container::small_vector<BoundaryIndex::EdgeRef, 32>;
using ParamList = boost::container::small_vector<double, 4>;

bool strictly_inside(const Triangle& t, Point2 p) {
    return orient2d(t[0], t[1], p) > 0 && orient2d(t[1], t[2], p) > 0 && orient2d(t[2], t[0], p) > 0;
}

}  // namespace

InterfaceState init_state(std::shared_ptr<const TriMesh> mesh_ptr, const DensePolygon& shape, const InitOptions& opts,
                          InitReport* report) {
    InterfaceState state = empty_state(mesh_ptr);
    if (shape.empty()) return state;
    const TriMesh& mesh = *mesh_ptr;
    const unsigned workers = resolve_workers(opts.workers);
    const BoundaryIndex bidx(shape, mesh);

    // Boundary crossings of every mesh edge, low vertex to high.
    std::vector<ParamList> edge_hits(mesh.num_edges());
    std::vector<std::uint8_t> sub_res(mesh.num_edges(), 0);
    parallel_for(mesh.num_edges(), workers, [&](std::size_t id) {
        const MeshEdge& me = mesh.edges()[id];
        const Segment e(mesh.vertices()[me.v0], mesh.vertices()[me.v1]);
        RefList refs;
        bidx.query(BBox::of(std::array<Point2, 2>{e.a, e.b}), refs);
        if (refs.empty()) return;
        ParamList ts;
        for (const auto& r : refs)
            if (const auto t = crossing_param(e, bidx.segment(r))) ts.push_back(*t);
        std::sort(ts.begin(), ts.end());
        // A boundary touching the edge at one point yields a pair of equal hits.
        ParamList kept;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (i + 1 < ts.size() && ts[i + 1] == ts[i]) {
                ++i;
                continue;
            }
            if (is_valid_cut(ts[i])) kept.push_back(ts[i]);
        }
        if (kept.size() > 2) sub_res[id] = 1;
        edge_hits[id] = std::move(kept);
    });

    const std::size_t nt = mesh.num_triangles();
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(nt, 16 * workers));
    std::vector<std::vector<StepEvent>> sinks(chunks);
    parallel_chunks(nt, chunks, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& events = sinks[chunk];
        RefList refs;
        for (std::size_t k = begin; k < end; ++k) {
            auto event = [&](EventKind kind, double a = 0.0, double b = 0.0) {
                events.push_back({static_cast<std::int32_t>(k), kind, a, b});
            };
            const Triangle T = mesh.triangle(k);
            const Point2 centroid = (1.0 / 3.0) * (T[0] + T[1] + T[2]);
            bidx.query(BBox::of(T), refs);
            if (refs.empty()) {
                state.cuts[k] = EdgeCut::pure(shape.contains(centroid) ? Material::Liquid : Material::Air);
                continue;
            }
            // Corner materials sampled just inside the triangle, so a boundary
            // running through a vertex or along an edge is seen from this side.
            std::array<Material, 3> chi;
            for (int i = 0; i < 3; ++i)
                chi[i] = shape.contains(T[i] + 1e-7 * (centroid - T[i])) ? Material::Liquid : Material::Air;

            const auto& tv = mesh.triangles()[k];
            const auto& te = mesh.triangle_edges(k);
            std::array<ParamList, 3> rows;
            bool sub = false;
            for (int i = 0; i < 3; ++i) {
                const bool flipped = tv[i] > tv[(i + 1) % 3];
                ParamList r;
                for (double t : edge_hits[te[i]]) r.push_back(flipped ? 1.0 - t : t);
                std::sort(r.begin(), r.end());
                sub = sub || sub_res[te[i]];
                if (chi[i] == chi[(i + 1) % 3]) {
                    if (r.size() >= 2) rows[i] = {r.front(), r.back()};
                } else if (!r.empty()) {
                    rows[i] = {r.front()};
                }
            }
            if (sub) event(EventKind::SubResolution);
            std::size_t total = rows[0].size() + rows[1].size() + rows[2].size();
            if (total % 2 != 0) {
                // Drop the cut closest to an edge end.
                int bi = 0, bj = 0;
                double best = 2.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < static_cast<int>(rows[i].size()); ++j) {
                        const double c = std::min(rows[i][j], 1.0 - rows[i][j]);
                        if (c < best) {
                            best = c;
                            bi = i;
                            bj = j;
                        }
                    }
                rows[bi].erase(rows[bi].begin() + bj);
                event(EventKind::ParityRepair, best);
            }
            EdgeCut E;
            E.c = chi[0];
            for (int i = 0; i < 3; ++i) E.R[i] = normalized_row({rows[i].data(), rows[i].size()});
            CanonicalForm cf;
            try {
                cf = classify(E);
            } catch (const InvalidEdgeCut&) {
                event(EventKind::ParityFallback);
                E = EdgeCut::pure(E.c);
                cf = classify(E);
            }
            if (cf.case_id == 2) {
                const int e1 = cf.rot;
                const Point2 a = T[e1], b = T[(e1 + 1) % 3];
                std::optional<Point2> best;
                double best_d = -1.0;
                for (const auto& r : refs) {
                    const Point2 v = bidx.segment(r).a;
                    if (!strictly_inside(T, v)) continue;
                    const double d = orient2d_fast(a, b, v);
                    if (d > best_d) {
                        best_d = d;
                        best = v;
                    }
                }
                std::optional<Barycentric> vt;
                if (best) {
                    const Barycentric bc = to_barycentric(T, *best);
                    if (bc.u > 0.0 && bc.v > 0.0 && bc.w() > 0.0) vt = bc;
                }
                if (vt) {
                    E.vt = vt;
                } else {
                    event(EventKind::VertexAbsent);
                    E = EdgeCut::pure(E.c);
                }
            }
            if (opts.area_correct) {
                const double target = std::clamp(exact_cell_area(shape, to_polygon(T)) / mesh.area(k), 0.0, 1.0);
                E = correct_to_fraction(E, target, k, events);
            }
            state.cuts[k] = E;
        }
    });
    if (report) {
        report->events.clear();
        for (auto& s : sinks) report->events.insert(report->events.end(), s.begin(), s.end());
        report->sub_resolution_edges = static_cast<std::size_t>(std::count(sub_res.begin(), sub_res.end(), 1));
    }
    return state;
}

InterfaceState init_state(std::shared_ptr<const TriMesh> mesh, const ShapeSpec& shape, const InitOptions& opts,
                          InitReport* report) {
    return init_state(std::move(mesh), polygonize(shape, opts.n_dense), opts, report);
}

}  // namespace tec
