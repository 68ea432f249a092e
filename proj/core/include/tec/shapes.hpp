#pragma once

#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tec/advect.hpp"
#include "tec/geom.hpp"
#include "tec/mesh.hpp"

namespace tec {

class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

struct Circle {
    Point2 center{0.5, 0.5};
    double radius = 0.15;
};

// Region between y = baseline + amplitude*sin(frequency*x) and
// y = lower_baseline + lower_amplitude*sin(frequency*x) over [x0, x1].
struct Snake {
    double amplitude = 0.3;
    double frequency = 2.0 * std::numbers::pi;
    double baseline = 0.5;
    double lower_amplitude = 0.0;
    double lower_baseline = 0.5;
    double x0 = 0.0;
    double x1 = 1.0;
};

// x = 16 sin^3(th) * scale + offset.x
// y = (13cos th - 5cos 2th - 2cos 3th - cos 4th) * scale + offset.y
struct Heart {
    Point2 offset{0.52, 0.55};
    double scale = 1.0 / 40.0;
};

// Disk with a vertical slot of width slot_width cut up from the bottom to
// y = center.y + radius - bridge.
struct NotchedDisk {
    Point2 center{2.0, 2.75};
    double radius = 0.5;
    double slot_width = 0.06;
    double bridge = 0.4;
};

using ShapeSpec = std::variant<Circle, Snake, Heart, NotchedDisk>;

NotchedDisk zalesak_config_a();
NotchedDisk zalesak_config_b();

// Closed form area where one exists (circle, heart, notched disk).
std::optional<double> analytic_area(const ShapeSpec& shape);

// One or more CCW loops; the region is their even-odd union.
class DensePolygon {
public:
    DensePolygon() = default;
    explicit DensePolygon(std::vector<std::vector<Point2>> loops);

    const std::vector<std::vector<Point2>>& loops() const { return loops_; }
    std::size_t num_vertices() const;
    double area() const;
    const BBox& bounds() const { return bounds_; }
    bool empty() const { return loops_.empty(); }

    // Even-odd point test; points on the boundary may go either way.
    bool contains(Point2 p) const;

private:
    struct SlabEdge {
        Point2 a, b;
    };
    void build_slabs();

    std::vector<std::vector<Point2>> loops_;
    BBox bounds_;
    double slab_y0_ = 0.0, slab_h_ = 1.0;
    std::vector<std::uint32_t> slab_start_;
    std::vector<SlabEdge> slab_edges_;
};

DensePolygon polygonize(const ShapeSpec& shape, int n);

// Area of shape ∩ region, clipping each loop by the region's half-planes.
double exact_cell_area(const DensePolygon& shape, const ConvexPolygon& region);

// Boundary edges of a dense polygon binned on a mesh's bucket grid.
class BoundaryIndex {
public:
    BoundaryIndex(const DensePolygon& shape, const TriMesh& mesh);

    struct EdgeRef {
        std::uint32_t loop;
        std::uint32_t index;  // edge from vertex index to index+1
    };

    // Boundary edges whose boxes overlap box, ascending by (loop, index).
    template <class Out>
    void query(const BBox& box, Out& out) const;

    Segment segment(EdgeRef e) const;
    const DensePolygon& shape() const { return *shape_; }

private:
    const DensePolygon* shape_;
    const TriMesh* mesh_;
    std::vector<std::uint32_t> start_;
    std::vector<EdgeRef> items_;
};

template <class Out>
void BoundaryIndex::query(const BBox& box, Out& out) const {
    out.clear();
    if (!box.overlaps(shape_->bounds())) return;
    const auto [x0, y0, x1, y1] = mesh_->bucket_range(box);
    const int nx = mesh_->bucket_nx();
    for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
            const std::size_t k = static_cast<std::size_t>(iy) * nx + ix;
            for (std::uint32_t i = start_[k]; i < start_[k + 1]; ++i) {
                const EdgeRef e = items_[i];
                const Segment s = segment(e);
                if (BBox::of(std::array<Point2, 2>{s.a, s.b}).overlaps(box)) out.push_back(e);
            }
        }
    }
    auto key = [](const EdgeRef& e) { return (static_cast<std::uint64_t>(e.loop) << 32) | e.index; };
    std::sort(out.begin(), out.end(), [&](const EdgeRef& a, const EdgeRef& b) { return key(a) < key(b); });
    out.erase(std::unique(out.begin(), out.end(), [&](const EdgeRef& a, const EdgeRef& b) { return key(a) == key(b); }),
              out.end());
}

struct InitOptions {
    int n_dense = 4096;
    bool area_correct = false;
    unsigned workers = 0;
};

struct InitReport {
    std::vector<StepEvent> events;
    std::size_t sub_resolution_edges = 0;
};

InterfaceState init_state(std::shared_ptr<const TriMesh> mesh, const DensePolygon& shape, const InitOptions& opts = {},
                          InitReport* report = nullptr);
InterfaceState init_state(std::shared_ptr<const TriMesh> mesh, const ShapeSpec& shape, const InitOptions& opts = {},
                          InitReport* report = nullptr);

}  // namespace tec
