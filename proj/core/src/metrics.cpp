#include "tec/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "tec/parallel.hpp"

namespace tec {

namespace {

double truth_area(const DensePolygon& truth, const BoundaryIndex& bidx, const TriMesh& mesh, std::size_t t) {
    const Triangle T = mesh.triangle(t);
    boost::container::small_vector<BoundaryIndex::EdgeRef, 32> refs;
    bidx.query(BBox::of(T), refs);
    if (refs.empty()) {
        const Point2 c = (1.0 / 3.0) * (T[0] + T[1] + T[2]);
        return truth.contains(c) ? mesh.area(t) : 0.0;
    }
    return exact_cell_area(truth, to_polygon(T));
}

}  // namespace

double shape_error(const InterfaceState& state, const DensePolygon& truth, Grouping grouping,
                   std::vector<double>* per_group) {
    const TriMesh& mesh = *state.mesh;
    if (state.cuts.size() != mesh.num_triangles()) throw MetricsError("state does not match its mesh");
    if (!truth.empty()) {
        const BBox& m = mesh.bounds();
        const BBox& s = truth.bounds();
        const double tol = 1e-9 * std::max(m.xmax - m.xmin, m.ymax - m.ymin);
        if (s.xmin < m.xmin - tol || s.ymin < m.ymin - tol || s.xmax > m.xmax + tol || s.ymax > m.ymax + tol)
            throw MetricsError("truth shape extends outside the mesh domain");
    }
    if (grouping == Grouping::Auto) grouping = mesh.lattice_n() ? Grouping::LatticeCells : Grouping::Triangles;
    if (grouping == Grouping::LatticeCells && !mesh.lattice_n()) throw MetricsError("cell grouping needs a lattice mesh");

    const BoundaryIndex bidx(truth, mesh);
    const std::size_t per = grouping == Grouping::LatticeCells ? 2 : 1;
    const std::size_t ng = mesh.num_triangles() / per;
    std::vector<double> err(ng, 0.0);
    parallel_for(ng, resolve_workers(), [&](std::size_t g) {
        double a = 0.0, approx = 0.0;
        for (std::size_t t = g * per; t < (g + 1) * per; ++t) {
            a += truth.empty() ? 0.0 : truth_area(truth, bidx, mesh, t);
            approx += area_fractions(state.cuts[t]).liquid * mesh.area(t);
        }
        err[g] = std::abs(a - approx);
    });
    const double total = std::accumulate(err.begin(), err.end(), 0.0);
    if (per_group) *per_group = std::move(err);
    return total;
}

double mass_error(const InterfaceState& state, double A0) {
    if (!(A0 > 0.0)) throw MetricsError("reference area must be positive");
    return std::abs((A0 - total_liquid_area(state)) / A0);
}

ErrorReport error_report(const InterfaceState& state, const DensePolygon& truth, double A0, Grouping grouping) {
    ErrorReport r;
    r.E_g = shape_error(state, truth, grouping, &r.per_group);
    r.E_r = r.E_g / A0;
    r.E_m = mass_error(state, A0);
    return r;
}

ConvergenceResult convergence_order(std::span<const std::pair<double, double>> levels) {
    if (levels.size() < 2) return {};
    ConvergenceResult out;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const auto [n0, e0] = levels[i - 1];
        const auto [n1, e1] = levels[i];
        if (e0 > 0.0 && e1 > 0.0 && n1 > n0 && n0 > 0.0)
            out.orders.push_back(std::log2(e0 / e1) / std::log2(n1 / n0));
        else
            out.orders.push_back(std::nullopt);
    }
    // Least squares on (log2 n, log2 e) over levels with positive error.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& [n, e] : levels) {
        if (!(e > 0.0 && n > 0.0)) continue;
        const double x = std::log2(n), y = std::log2(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    const double den = m * sxx - sx * sx;
    if (m >= 2 && den > 0.0) out.slope = -(m * sxy - sx * sy) / den;
    return out;
}

double fit_curvature(std::span<const Point2> pts, Point2 at, Point2 liquid_normal, FitFrame* frame) {
    if (pts.size() < 3) throw MetricsError("curvature fit needs 3 points");
    double xmin = pts[0].x, xmax = xmin, ymin = pts[0].y, ymax = ymin;
    for (const Point2& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const bool yframe = ymax - ymin > xmax - xmin;
    if (frame) *frame = yframe ? FitFrame::YParabola : FitFrame::XParabola;
    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point2 d = pts[static_cast<std::size_t>(i)] - at;
        const double s = yframe ? d.y : d.x;
        const double v = yframe ? d.x : d.y;
        A(i, 0) = s * s;
        A(i, 1) = s;
        A(i, 2) = 1.0;
        rhs(i) = v;
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(rhs);
    const double a = c(0), b = c(1);
    const double mag = std::abs(2.0 * a) / std::pow(1.0 + b * b, 1.5);
    // The curve bends toward +v when a > 0; convex liquid lies on that side.
    const double toward = yframe ? liquid_normal.x : liquid_normal.y;
    return (a >= 0.0) == (toward >= 0.0) ? mag : -mag;
}

CurvatureResult curvature(const InterfaceState& state) {
    const TriMesh& mesh = *state.mesh;
    const InterfaceIndex idx(state, resolve_workers());
    struct Seg {
        std::size_t tri;
        int index;
    };
    std::vector<Seg> segs;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        if (idx.kind(t) != InterfaceIndex::Kind::Mixed) continue;
        const auto& g = idx.geometry(t);
        for (int i = 0; i < static_cast<int>(g.segments.size()); ++i) segs.push_back({t, i});
    }
    std::vector<std::optional<CurvatureSample>> out(segs.size());
    parallel_for(segs.size(), resolve_workers(), [&](std::size_t k) {
        const auto [t, si] = segs[k];
        const auto& own = idx.geometry(t).segments;
        const InteriorSegment& s = own[static_cast<std::size_t>(si)];
        const Point2 mid = lerp(s.seg.a, s.seg.b, 0.5);
        const double h = std::max(distance(s.seg.a, s.seg.b), 1e-300);
        boost::container::small_vector<Point2, 8> pts{s.seg.a, s.seg.b};

        auto nearest = [&](std::span<const InteriorSegment> list, const InteriorSegment* skip) -> const InteriorSegment* {
            const InteriorSegment* best = nullptr;
            double bd = std::numeric_limits<double>::infinity();
            for (const auto& o : list) {
                if (&o == skip) continue;
                const double d = distance(lerp(o.seg.a, o.seg.b, 0.5), mid);
                if (d < bd) {
                    bd = d;
                    best = &o;
                }
            }
            return best;
        };
        for (int end = 0; end < 2; ++end) {
            const int e = s.edge[end];
            const InteriorSegment* pick = nullptr;
            if (e < 0) {
                // Endpoint at an interior vertex: the neighbour lies in this triangle.
                pick = nearest({own.data(), own.size()}, &s);
            } else {
                const std::int32_t nb = mesh.neighbor(t, e);
                if (nb == kNoTriangle || idx.kind(static_cast<std::size_t>(nb)) != InterfaceIndex::Kind::Mixed) continue;
                const auto& list = idx.geometry(static_cast<std::size_t>(nb)).segments;
                pick = nearest({list.data(), list.size()}, nullptr);
            }
            if (pick) {
                pts.push_back(pick->seg.a);
                pts.push_back(pick->seg.b);
            }
        }
        // Distinct points only; neighbours share cut points up to rounding.
        boost::container::small_vector<Point2, 8> uniq;
        for (const Point2& p : pts) {
            const bool dup = std::any_of(uniq.begin(), uniq.end(), [&](Point2 q) { return distance(p, q) <= 1e-9 * h; });
            if (!dup) uniq.push_back(p);
        }
        if (uniq.size() < 3) return;
        const Point2 d = s.seg.direction();
        const Point2 normal{-d.y, d.x};
        CurvatureSample cs;
        cs.triangle = t;
        cs.segment = si;
        cs.midpoint = mid;
        cs.kappa = fit_curvature({uniq.data(), uniq.size()}, mid, normal, &cs.frame);
        out[k] = cs;
    });
    CurvatureResult res;
    for (auto& o : out) {
        if (o)
            res.samples.push_back(*o);
        else
            ++res.skipped;
    }
    return res;
}

double curvature_error(std::span<const CurvatureSample> samples, const std::function<double(Point2)>& truth) {
    double worst = 0.0;
    for (const auto& s : samples) {
        const double k = truth(s.midpoint);
        if (k == 0.0) throw MetricsError("relative curvature error undefined for zero curvature");
        worst = std::max(worst, std::abs(s.kappa - k) / std::abs(k));
    }
    return worst;
}

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// True when some edge of p and some edge of q overlap along a positive length.
bool share_boundary(const ConvexPolygon& p, const ConvexPolygon& q, double tol) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Point2 a = p[i], b = p[(i + 1) % p.size()];
        const Point2 d = b - a;
        const double len = norm(d);
        if (len <= tol) continue;
        const Point2 u = (1.0 / len) * d;
        for (std::size_t j = 0; j < q.size(); ++j) {
            const Point2 c = q[j], e = q[(j + 1) % q.size()];
            if (std::abs(cross(u, c - a)) > tol || std::abs(cross(u, e - a)) > tol) continue;
            const double s0 = dot(u, c - a), s1 = dot(u, e - a);
            const double lo = std::max(0.0, std::min(s0, s1));
            const double hi = std::min(len, std::max(s0, s1));
            if (hi - lo > tol) return true;
        }
    }
    return false;
}

}  // namespace

std::size_t liquid_components(const InterfaceState& state) {
    const TriMesh& mesh = *state.mesh;
    const InterfaceIndex idx(state, resolve_workers());
    std::vector<std::size_t> first(mesh.num_triangles() + 1, 0);
    std::vector<ConvexPolygon> pieces;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        first[t] = pieces.size();
        if (idx.kind(t) == InterfaceIndex::Kind::Liquid) {
            pieces.push_back(to_polygon(mesh.triangle(t)));
        } else if (idx.kind(t) == InterfaceIndex::Kind::Mixed) {
            for (const auto& p : idx.geometry(t).regions.liquid) pieces.push_back(p);
        }
    }
    first[mesh.num_triangles()] = pieces.size();
    const double tol = 1e-9 * mesh.char_length();
    DisjointSets ds(pieces.size());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        for (std::size_t i = first[t]; i < first[t + 1]; ++i) {
            for (std::size_t j = i + 1; j < first[t + 1]; ++j)
                if (share_boundary(pieces[i], pieces[j], tol)) ds.unite(i, j);
            for (int e = 0; e < 3; ++e) {
                const std::int32_t nb = mesh.neighbor(t, e);
                if (nb == kNoTriangle || static_cast<std::size_t>(nb) < t) continue;
                for (std::size_t j = first[nb]; j < first[nb + 1]; ++j)
                    if (share_boundary(pieces[i], pieces[j], tol)) ds.unite(i, j);
            }
        }
    }
    std::size_t n = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) n += ds.find(i) == i ? 1 : 0;
    return n;
}

}  // namespace tec
