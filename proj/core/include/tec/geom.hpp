#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <boost/container/small_vector.hpp>

namespace tec {

class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
constexpr Point2 lerp(Point2 a, Point2 b, double t) { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }

// Exact sign of the doubled signed area of abc.
int orient2d(Point2 a, Point2 b, Point2 c);

// Floating-point doubled signed area (no exactness guarantee).
inline double orient2d_fast(Point2 a, Point2 b, Point2 c) {
    return (a.x - c.x) * (b.y - c.y) - (a.y - c.y) * (b.x - c.x);
}

struct Segment {
    Point2 a;
    Point2 b;

    Segment() = default;
    Segment(Point2 a_, Point2 b_) : a(a_), b(b_) {}

    // Rejects zero-length segments.
    static Segment checked(Point2 a, Point2 b);

    Point2 at(double t) const { return lerp(a, b, t); }
    Point2 direction() const { return b - a; }
    Segment reversed() const { return {b, a}; }
};

struct SegIntersection {
    enum class Kind { None, Point, Overlap };
    Kind kind = Kind::None;
    double t = 0.0;  // parameter on the first segment
    double u = 0.0;  // parameter on the second segment
    Point2 p;
    Segment overlap;
};

SegIntersection seg_seg_intersect(const Segment& s1, const Segment& s2);

// Crossing of a query segment e by an interface segment s, with the half-open
// convention that an endpoint of s lying on the line of e counts as being on
// its left. Returns the parameter along e, or nothing.
std::optional<double> crossing_param(const Segment& e, const Segment& s);

using PointList = boost::container::small_vector<Point2, 8>;

class ConvexPolygon {
public:
    ConvexPolygon() = default;
    explicit ConvexPolygon(PointList v) : v_(std::move(v)) {}
    ConvexPolygon(std::initializer_list<Point2> v) : v_(v) {}

    // Validates the convex CCW invariant.
    static ConvexPolygon checked(PointList v);

    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }
    const Point2& operator[](std::size_t i) const { return v_[i]; }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }
    const PointList& vertices() const { return v_; }
    std::span<const Point2> span() const { return {v_.data(), v_.size()}; }

private:
    PointList v_;
};

// Signed shoelace area of an arbitrary vertex loop.
double signed_area(std::span<const Point2> loop);

// Area and first moment (integral of x, y over the region).
struct Moments {
    double area = 0.0;
    Point2 first;
};
Moments polygon_moments(std::span<const Point2> loop);

double polygon_area(const ConvexPolygon& p);
Point2 polygon_centroid(const ConvexPolygon& p);

// Intersection of two convex polygons, empty when the overlap has no area.
std::optional<ConvexPolygon> clip_convex(const ConvexPolygon& p, const ConvexPolygon& q);

// Area of p inside the closed left half-plane of the directed line a->b.
PointList clip_halfplane(std::span<const Point2> p, Point2 a, Point2 b);

enum class Location { Inside, Boundary, Outside };
Location point_in_convex(Point2 p, const ConvexPolygon& poly);

struct BBox {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    static BBox of(std::span<const Point2> pts);
    void expand(Point2 p);
    bool overlaps(const BBox& o) const {
        return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
    }
    bool contains(Point2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
};

using Triangle = std::array<Point2, 3>;

inline double triangle_area(const Triangle& t) { return 0.5 * orient2d_fast(t[0], t[1], t[2]); }
inline ConvexPolygon to_polygon(const Triangle& t) { return ConvexPolygon{t[0], t[1], t[2]}; }

}  // namespace tec
