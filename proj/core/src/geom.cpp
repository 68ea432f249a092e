#include "tec/geom.hpp"

#include <algorithm>
#include <limits>

namespace tec {

namespace {

constexpr double kEps = 0x1p-53;
constexpr double kCcwErrBound = (3.0 + 16.0 * kEps) * kEps;

inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double bv = s - a;
    const double av = s - bv;
    e = (a - av) + (b - bv);
}

inline void split(double a, double& hi, double& lo) {
    constexpr double kSplitter = 134217729.0;  // 2^27 + 1
    const double c = kSplitter * a;
    const double big = c - a;
    hi = c - big;
    lo = a - hi;
}

// Dekker's product: p + e == a * b exactly.
inline void two_product(double a, double b, double& p, double& e) {
    p = a * b;
    double ahi, alo, bhi, blo;
    split(a, ahi, alo);
    split(b, bhi, blo);
    const double err1 = p - ahi * bhi;
    const double err2 = err1 - alo * bhi;
    const double err3 = err2 - ahi * blo;
    e = alo * blo - err3;
}

// det = ax*by - ax*cy - cx*by - ay*bx + ay*cx + cy*bx, summed as an exact
// nonoverlapping expansion; the top nonzero component carries the sign.
int orient2d_exact(Point2 a, Point2 b, Point2 c) {
    std::array<double, 12> terms{};
    two_product(a.x, b.y, terms[0], terms[1]);
    two_product(-a.x, c.y, terms[2], terms[3]);
    two_product(-c.x, b.y, terms[4], terms[5]);
    two_product(-a.y, b.x, terms[6], terms[7]);
    two_product(a.y, c.x, terms[8], terms[9]);
    two_product(c.y, b.x, terms[10], terms[11]);

    std::array<double, 12> e{};
    std::size_t n = 0;
    for (double term : terms) {
        double q = term;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0, h = 0.0;
            two_sum(q, e[i], s, h);
            e[i] = h;
            q = s;
        }
        e[n++] = q;
    }
    for (std::size_t i = n; i-- > 0;) {
        if (e[i] != 0.0) return e[i] > 0.0 ? 1 : -1;
    }
    return 0;
}

inline int sign_nonneg(int o) { return o >= 0 ? 1 : -1; }

}  // namespace

int orient2d(Point2 a, Point2 b, Point2 c) {
    const double left = (a.x - c.x) * (b.y - c.y);
    const double right = (a.y - c.y) * (b.x - c.x);
    const double det = left - right;
    const double bound = kCcwErrBound * (std::abs(left) + std::abs(right));
    if (det > bound) return 1;
    if (-det > bound) return -1;
    if (left == 0.0 && right == 0.0) return 0;
    return orient2d_exact(a, b, c);
}

Segment Segment::checked(Point2 a, Point2 b) {
    if (a == b) throw GeometryError("degenerate segment");
    if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(b.x) || !std::isfinite(b.y))
        throw GeometryError("non-finite segment endpoint");
    return {a, b};
}

SegIntersection seg_seg_intersect(const Segment& s1, const Segment& s2) {
    SegIntersection r;
    const int o1 = orient2d(s1.a, s1.b, s2.a);
    const int o2 = orient2d(s1.a, s1.b, s2.b);

    if (o1 == 0 && o2 == 0) {
        // Collinear: compare along the dominant axis of s1, exactly.
        const Point2 d = s1.direction();
        const bool use_x = std::abs(d.x) >= std::abs(d.y);
        auto key = [&](Point2 p) { return use_x ? p.x : p.y; };
        const double sign = (use_x ? d.x : d.y) > 0 ? 1.0 : -1.0;
        auto k = [&](Point2 p) { return sign * key(p); };

        Point2 lo1 = s1.a, hi1 = s1.b;
        Point2 lo2 = s2.a, hi2 = s2.b;
        if (k(lo2) > k(hi2)) std::swap(lo2, hi2);
        const Point2 lo = k(lo1) >= k(lo2) ? lo1 : lo2;
        const Point2 hi = k(hi1) <= k(hi2) ? hi1 : hi2;
        if (k(lo) > k(hi)) return r;
        const double len = key(s1.b) - key(s1.a);
        auto param1 = [&](Point2 p) { return std::clamp((key(p) - key(s1.a)) / len, 0.0, 1.0); };
        const Point2 d2 = s2.direction();
        const bool use_x2 = std::abs(d2.x) >= std::abs(d2.y);
        auto param2 = [&](Point2 p) {
            const double den = use_x2 ? d2.x : d2.y;
            const double num = use_x2 ? p.x - s2.a.x : p.y - s2.a.y;
            return std::clamp(num / den, 0.0, 1.0);
        };
        if (k(lo) == k(hi)) {
            r.kind = SegIntersection::Kind::Point;
            r.p = lo;
            r.t = param1(lo);
            r.u = param2(lo);
            return r;
        }
        r.kind = SegIntersection::Kind::Overlap;
        r.overlap = Segment(lo, hi);
        r.t = param1(lo);
        r.u = param2(lo);
        return r;
    }

    if (o1 * o2 > 0) return r;
    const int o3 = orient2d(s2.a, s2.b, s1.a);
    const int o4 = orient2d(s2.a, s2.b, s1.b);
    if (o3 * o4 > 0) return r;

    r.kind = SegIntersection::Kind::Point;
    const Point2 d1 = s1.direction();
    const Point2 d2 = s2.direction();
    const double den = cross(d1, d2);
    const Point2 w = s2.a - s1.a;
    if (o1 == 0) {
        r.p = s2.a;
        r.u = 0.0;
        r.t = std::clamp(dot(w, d1) / dot(d1, d1), 0.0, 1.0);
    } else if (o2 == 0) {
        r.p = s2.b;
        r.u = 1.0;
        r.t = std::clamp(dot(s2.b - s1.a, d1) / dot(d1, d1), 0.0, 1.0);
    } else if (o3 == 0) {
        r.p = s1.a;
        r.t = 0.0;
        r.u = std::clamp(dot(s1.a - s2.a, d2) / dot(d2, d2), 0.0, 1.0);
    } else if (o4 == 0) {
        r.p = s1.b;
        r.t = 1.0;
        r.u = std::clamp(dot(s1.b - s2.a, d2) / dot(d2, d2), 0.0, 1.0);
    } else {
        r.t = std::clamp(cross(w, d2) / den, 0.0, 1.0);
        r.u = std::clamp(cross(w, d1) / den, 0.0, 1.0);
        r.p = s1.at(r.t);
    }
    return r;
}

std::optional<double> crossing_param(const Segment& e, const Segment& s) {
    const int sa = sign_nonneg(orient2d(e.a, e.b, s.a));
    const int sb = sign_nonneg(orient2d(e.a, e.b, s.b));
    if (sa == sb) return std::nullopt;
    const int oa = orient2d(s.a, s.b, e.a);
    const int ob = orient2d(s.a, s.b, e.b);
    if (oa * ob > 0) return std::nullopt;
    if (oa == 0) return 0.0;
    if (ob == 0) return 1.0;
    const double da = orient2d_fast(s.a, s.b, e.a);
    const double db = orient2d_fast(s.a, s.b, e.b);
    return std::clamp(da / (da - db), 0.0, 1.0);
}

ConvexPolygon ConvexPolygon::checked(PointList v) {
    const std::size_t n = v.size();
    if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
    bool any_positive = false;
    for (std::size_t i = 0; i < n; ++i) {
        const int o = orient2d(v[i], v[(i + 1) % n], v[(i + 2) % n]);
        if (o < 0) throw GeometryError("polygon is not convex CCW");
        any_positive = any_positive || o > 0;
    }
    if (!any_positive) throw GeometryError("polygon is degenerate");
    return ConvexPolygon(std::move(v));
}

double signed_area(std::span<const Point2> loop) {
    const std::size_t n = loop.size();
    if (n < 3) return 0.0;
    const Point2 o = loop[0];
    double a2 = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) a2 += cross(loop[i] - o, loop[i + 1] - o);
    return 0.5 * a2;
}

Moments polygon_moments(std::span<const Point2> loop) {
    Moments m;
    const std::size_t n = loop.size();
    if (n < 3) return m;
    const Point2 o = loop[0];
    double a2 = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Point2 p = loop[i] - o;
        const Point2 q = loop[i + 1] - o;
        const double c = cross(p, q);
        a2 += c;
        mx += (p.x + q.x) * c;
        my += (p.y + q.y) * c;
    }
    m.area = 0.5 * a2;
    m.first = {mx / 6.0 + o.x * m.area, my / 6.0 + o.y * m.area};
    return m;
}

double polygon_area(const ConvexPolygon& p) { return signed_area(p.span()); }

Point2 polygon_centroid(const ConvexPolygon& p) {
    const Moments m = polygon_moments(p.span());
    if (!(m.area != 0.0)) throw GeometryError("centroid of zero-area polygon");
    return {m.first.x / m.area, m.first.y / m.area};
}

PointList clip_halfplane(std::span<const Point2> p, Point2 a, Point2 b) {
    PointList out;
    const std::size_t n = p.size();
    if (n == 0) return out;
    boost::container::small_vector<int, 8> side(n);
    bool all_in = true, all_out = true;
    for (std::size_t i = 0; i < n; ++i) {
        side[i] = orient2d(a, b, p[i]);
        all_in = all_in && side[i] >= 0;
        all_out = all_out && side[i] < 0;
    }
    if (all_in) return PointList(p.begin(), p.end());
    if (all_out) return out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        if (side[i] >= 0) out.push_back(p[i]);
        if ((side[i] > 0 && side[j] < 0) || (side[i] < 0 && side[j] > 0)) {
            const double di = orient2d_fast(a, b, p[i]);
            const double dj = orient2d_fast(a, b, p[j]);
            double t = di / (di - dj);
            if (!(t >= 0.0)) t = 0.0;
            if (t > 1.0) t = 1.0;
            out.push_back(lerp(p[i], p[j], t));
        }
    }
    return out;
}

std::optional<ConvexPolygon> clip_convex(const ConvexPolygon& p, const ConvexPolygon& q) {
    if (p.size() < 3 || q.size() < 3) return std::nullopt;
    if (!BBox::of(p.span()).overlaps(BBox::of(q.span()))) return std::nullopt;
    PointList cur = p.vertices();
    const std::size_t m = q.size();
    for (std::size_t i = 0; i < m && cur.size() >= 3; ++i) {
        cur = clip_halfplane({cur.data(), cur.size()}, q[i], q[(i + 1) % m]);
    }
    // Drop repeated vertices.
    PointList clean;
    for (const Point2& v : cur) {
        if (clean.empty() || !(clean.back() == v)) clean.push_back(v);
    }
    while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
    if (clean.size() < 3) return std::nullopt;
    bool any_positive = false;
    for (std::size_t i = 1; i + 1 < clean.size() && !any_positive; ++i) {
        any_positive = orient2d(clean[0], clean[i], clean[i + 1]) > 0;
    }
    if (!any_positive) return std::nullopt;
    if (!(signed_area({clean.data(), clean.size()}) > 0.0)) return std::nullopt;
    return ConvexPolygon(std::move(clean));
}

Location point_in_convex(Point2 p, const ConvexPolygon& poly) {
    const std::size_t n = poly.size();
    bool on_edge = false;
    for (std::size_t i = 0; i < n; ++i) {
        const int o = orient2d(poly[i], poly[(i + 1) % n], p);
        if (o < 0) return Location::Outside;
        if (o == 0) on_edge = true;
    }
    return on_edge ? Location::Boundary : Location::Inside;
}

BBox BBox::of(std::span<const Point2> pts) {
    BBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point2& p : pts) b.expand(p);
    return b;
}

void BBox::expand(Point2 p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
}

}  // namespace tec
