#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tec/geom.hpp"

namespace tec {

class MeshError : public std::runtime_error {
public:
    explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
};

inline constexpr std::int32_t kNoTriangle = -1;

struct MeshEdge {
    std::uint32_t v0 = 0;  // lower vertex index
    std::uint32_t v1 = 0;
    std::array<std::int32_t, 2> tris{kNoTriangle, kNoTriangle};

    bool boundary() const { return tris[1] == kNoTriangle; }
};

class TriMesh {
public:
    TriMesh(std::vector<Point2> vertices, std::vector<std::array<std::uint32_t, 3>> triangles,
            std::optional<int> lattice_n = std::nullopt, std::optional<double> char_length = std::nullopt);

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    const std::vector<Point2>& vertices() const { return vertices_; }
    const std::vector<std::array<std::uint32_t, 3>>& triangles() const { return triangles_; }
    const std::vector<MeshEdge>& edges() const { return edges_; }

    Triangle triangle(std::size_t t) const {
        const auto& v = triangles_[t];
        return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
    }
    double area(std::size_t t) const { return areas_[t]; }
    const BBox& triangle_box(std::size_t t) const { return boxes_[t]; }
    // Edge i of a triangle runs from its vertex i to vertex i+1.
    const std::array<std::uint32_t, 3>& triangle_edges(std::size_t t) const { return tri_edges_[t]; }
    std::int32_t neighbor(std::size_t t, int i) const;

    double char_length() const { return char_length_; }
    std::optional<int> lattice_n() const { return lattice_n_; }
    const BBox& bounds() const { return bounds_; }

    // Triangles whose bounding boxes overlap the query box, ascending ids.
    template <class Out>
    void candidates(const BBox& box, Out& out) const;

    // Bucket grid access (used for narrow-band bookkeeping).
    int bucket_nx() const { return nbx_; }
    int bucket_ny() const { return nby_; }
    double bucket_hx() const { return hx_; }
    double bucket_hy() const { return hy_; }
    std::array<int, 2> bucket_of(Point2 p) const;
    std::array<int, 4> bucket_range(const BBox& box) const;
    std::span<const std::uint32_t> bucket(int ix, int iy) const {
        const std::size_t k = static_cast<std::size_t>(iy) * nbx_ + ix;
        return {bucket_items_.data() + bucket_start_[k], bucket_start_[k + 1] - bucket_start_[k]};
    }
    const std::array<int, 4>& triangle_buckets(std::size_t t) const { return tri_buckets_[t]; }

private:
    void build_edges();
    void build_buckets();

    std::vector<Point2> vertices_;
    std::vector<std::array<std::uint32_t, 3>> triangles_;
    std::vector<MeshEdge> edges_;
    std::vector<std::array<std::uint32_t, 3>> tri_edges_;
    std::vector<double> areas_;
    std::vector<BBox> boxes_;
    std::optional<int> lattice_n_;
    double char_length_ = 0.0;
    BBox bounds_;

    int nbx_ = 1, nby_ = 1;
    double hx_ = 1.0, hy_ = 1.0;
    std::vector<std::uint32_t> bucket_start_;
    std::vector<std::uint32_t> bucket_items_;
    std::vector<std::array<int, 4>> tri_buckets_;
};

template <class Out>
void TriMesh::candidates(const BBox& box, Out& out) const {
    out.clear();
    if (!box.overlaps(bounds_)) return;
    const auto [x0, y0, x1, y1] = bucket_range(box);
    for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
            for (std::uint32_t t : bucket(ix, iy)) {
                // Report each triangle once: from the first bucket it shares with the box.
                const auto& tb = tri_buckets_[t];
                if (std::max(tb[0], x0) != ix || std::max(tb[1], y0) != iy) continue;
                if (boxes_[t].overlaps(box)) out.push_back(t);
            }
        }
    }
    std::sort(out.begin(), out.end());
}

// n x n cells, each split along the lower-left to upper-right diagonal into a
// lower-right triangle (id 2k) and an upper-left triangle (id 2k+1), where
// k = j*n + i for cell column i, row j.
TriMesh build_lattice(int n, const Rect& domain);

// Parses Triangle-style .node / .ele text.
TriMesh import_mesh(std::string_view node_text, std::string_view ele_text);
TriMesh load_mesh(const std::filesystem::path& node_file, const std::filesystem::path& ele_file);

struct LocateResult {
    std::int32_t triangle = kNoTriangle;
    bool outside() const { return triangle == kNoTriangle; }
};

LocateResult locate(const TriMesh& mesh, Point2 p, std::optional<std::int32_t> hint = std::nullopt);

}  // namespace tec
