#include "tec/mesh.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace tec {

TriMesh::TriMesh(std::vector<Point2> vertices, std::vector<std::array<std::uint32_t, 3>> triangles,
                 std::optional<int> lattice_n, std::optional<double> char_length)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), lattice_n_(lattice_n) {
    if (triangles_.empty()) throw MeshError("mesh has no triangles");
    areas_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        auto& tri = triangles_[t];
        for (auto v : tri) {
            if (v >= vertices_.size()) throw MeshError("triangle " + std::to_string(t) + ": index out of range");
        }
        const int o = orient2d(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
        if (o == 0) throw MeshError("triangle " + std::to_string(t) + ": degenerate");
        if (o < 0) std::swap(tri[1], tri[2]);
        areas_[t] = triangle_area(triangle(t));
    }
    bounds_ = BBox::of(vertices_);
    build_edges();
    if (char_length) {
        char_length_ = *char_length;
    } else {
        char_length_ = std::numeric_limits<double>::infinity();
        for (const auto& e : edges_) char_length_ = std::min(char_length_, distance(vertices_[e.v0], vertices_[e.v1]));
    }
    build_buckets();
}

void TriMesh::build_edges() {
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    index.reserve(triangles_.size() * 2);
    tri_edges_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        for (int i = 0; i < 3; ++i) {
            std::uint32_t a = triangles_[t][i];
            std::uint32_t b = triangles_[t][(i + 1) % 3];
            if (a > b) std::swap(a, b);
            const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
            auto [it, fresh] = index.try_emplace(key, static_cast<std::uint32_t>(edges_.size()));
            if (fresh) {
                MeshEdge e;
                e.v0 = a;
                e.v1 = b;
                e.tris[0] = static_cast<std::int32_t>(t);
                edges_.push_back(e);
            } else {
                MeshEdge& e = edges_[it->second];
                if (e.tris[1] != kNoTriangle) throw MeshError("edge shared by more than two triangles");
                e.tris[1] = static_cast<std::int32_t>(t);
            }
            tri_edges_[t][i] = it->second;
        }
    }
}

std::int32_t TriMesh::neighbor(std::size_t t, int i) const {
    const MeshEdge& e = edges_[tri_edges_[t][i]];
    return e.tris[0] == static_cast<std::int32_t>(t) ? e.tris[1] : e.tris[0];
}

void TriMesh::build_buckets() {
    const double w = bounds_.xmax - bounds_.xmin;
    const double h = bounds_.ymax - bounds_.ymin;
    const double target = std::sqrt(2.0 * w * h / static_cast<double>(triangles_.size()));
    nbx_ = std::max(1, static_cast<int>(std::ceil(w / target - 1e-9)));
    nby_ = std::max(1, static_cast<int>(std::ceil(h / target - 1e-9)));
    hx_ = w / nbx_;
    hy_ = h / nby_;

    tri_buckets_.resize(triangles_.size());
    boxes_.resize(triangles_.size());
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(nbx_) * nby_ + 1, 0);
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        boxes_[t] = BBox::of(triangle(t));
        tri_buckets_[t] = bucket_range(boxes_[t]);
        const auto& r = tri_buckets_[t];
        for (int iy = r[1]; iy <= r[3]; ++iy)
            for (int ix = r[0]; ix <= r[2]; ++ix) ++counts[static_cast<std::size_t>(iy) * nbx_ + ix + 1];
    }
    for (std::size_t k = 1; k < counts.size(); ++k) counts[k] += counts[k - 1];
    bucket_start_ = counts;
    bucket_items_.resize(counts.back());
    std::vector<std::uint32_t> fill(counts.begin(), counts.end() - 1);
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& r = tri_buckets_[t];
        for (int iy = r[1]; iy <= r[3]; ++iy)
            for (int ix = r[0]; ix <= r[2]; ++ix)
                bucket_items_[fill[static_cast<std::size_t>(iy) * nbx_ + ix]++] = static_cast<std::uint32_t>(t);
    }
}

std::array<int, 2> TriMesh::bucket_of(Point2 p) const {
    const int ix = static_cast<int>(std::floor((p.x - bounds_.xmin) / hx_));
    const int iy = static_cast<int>(std::floor((p.y - bounds_.ymin) / hy_));
    return {std::clamp(ix, 0, nbx_ - 1), std::clamp(iy, 0, nby_ - 1)};
}

std::array<int, 4> TriMesh::bucket_range(const BBox& box) const {
    const auto lo = bucket_of({box.xmin, box.ymin});
    const auto hi = bucket_of({box.xmax, box.ymax});
    return {lo[0], lo[1], hi[0], hi[1]};
}

TriMesh build_lattice(int n, const Rect& domain) {
    if (n < 1) throw MeshError("lattice size must be positive");
    if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) throw MeshError("empty domain");
    const auto nn = static_cast<std::uint32_t>(n);
    std::vector<Point2> verts;
    verts.reserve(static_cast<std::size_t>(nn + 1) * (nn + 1));
    for (std::uint32_t j = 0; j <= nn; ++j) {
        // Exact endpoints; interior coordinates as xmin + i*w/n.
        const double y = j == nn ? domain.ymax : domain.ymin + domain.height() * j / n;
        for (std::uint32_t i = 0; i <= nn; ++i) {
            const double x = i == nn ? domain.xmax : domain.xmin + domain.width() * i / n;
            verts.push_back({x, y});
        }
    }
    std::vector<std::array<std::uint32_t, 3>> tris;
    tris.reserve(2 * static_cast<std::size_t>(nn) * nn);
    for (std::uint32_t j = 0; j < nn; ++j) {
        for (std::uint32_t i = 0; i < nn; ++i) {
            const std::uint32_t a = j * (nn + 1) + i;
            const std::uint32_t b = a + 1;
            const std::uint32_t d = a + nn + 1;
            const std::uint32_t c = d + 1;
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
        }
    }
    return TriMesh(std::move(verts), std::move(tris), n, domain.width() / n);
}

namespace {

struct LineReader {
    std::string_view text;
    std::size_t pos = 0;
    int line_no = 0;

    // Next non-empty line with comments stripped.
    bool next(std::string_view& out) {
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
            if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
            out = line;
            return true;
        }
        return false;
    }
};

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == ',')) ++i;
        std::size_t j = i;
        while (j < line.size() && !(line[j] == ' ' || line[j] == '\t' || line[j] == '\r' || line[j] == ',')) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

[[noreturn]] void parse_fail(const char* file, int line, const std::string& msg) {
    throw MeshError(std::string(file) + " line " + std::to_string(line) + ": " + msg);
}

template <class T>
T parse_num(std::string_view tok, const char* file, int line) {
    T v{};
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        parse_fail(file, line, "malformed number '" + std::string(tok) + "'");
    return v;
}

}  // namespace

TriMesh import_mesh(std::string_view node_text, std::string_view ele_text) {
    LineReader nodes{node_text};
    std::string_view line;
    if (!nodes.next(line)) parse_fail(".node", nodes.line_no, "missing header");
    auto head = tokens(line);
    if (head.empty()) parse_fail(".node", nodes.line_no, "malformed header");
    const long nv = parse_num<long>(head[0], ".node", nodes.line_no);
    if (nv < 3) parse_fail(".node", nodes.line_no, "malformed header: need at least 3 vertices");
    if (head.size() > 1 && parse_num<int>(head[1], ".node", nodes.line_no) != 2)
        parse_fail(".node", nodes.line_no, "malformed header: dimension must be 2");

    std::vector<Point2> verts(static_cast<std::size_t>(nv));
    long base = 0;
    for (long k = 0; k < nv; ++k) {
        if (!nodes.next(line)) parse_fail(".node", nodes.line_no, "unexpected end of file");
        auto tk = tokens(line);
        if (tk.size() < 3) parse_fail(".node", nodes.line_no, "expected index x y");
        const long idx = parse_num<long>(tk[0], ".node", nodes.line_no);
        if (k == 0) {
            if (idx != 0 && idx != 1) parse_fail(".node", nodes.line_no, "first index must be 0 or 1");
            base = idx;
        }
        if (idx - base != k) parse_fail(".node", nodes.line_no, "index out of sequence");
        verts[static_cast<std::size_t>(k)] = {parse_num<double>(tk[1], ".node", nodes.line_no),
                                             parse_num<double>(tk[2], ".node", nodes.line_no)};
    }

    LineReader eles{ele_text};
    if (!eles.next(line)) parse_fail(".ele", eles.line_no, "missing header");
    head = tokens(line);
    if (head.empty()) parse_fail(".ele", eles.line_no, "malformed header");
    const long nt = parse_num<long>(head[0], ".ele", eles.line_no);
    if (nt < 1) parse_fail(".ele", eles.line_no, "malformed header: no triangles");
    if (head.size() > 1) {
        const int per = parse_num<int>(head[1], ".ele", eles.line_no);
        if (per != 3 && per != 6) parse_fail(".ele", eles.line_no, "malformed header: nodes per triangle");
    }
    std::vector<std::array<std::uint32_t, 3>> tris(static_cast<std::size_t>(nt));
    for (long k = 0; k < nt; ++k) {
        if (!eles.next(line)) parse_fail(".ele", eles.line_no, "unexpected end of file");
        auto tk = tokens(line);
        if (tk.size() < 4) parse_fail(".ele", eles.line_no, "expected index v1 v2 v3");
        for (int i = 0; i < 3; ++i) {
            const long v = parse_num<long>(tk[1 + i], ".ele", eles.line_no) - base;
            if (v < 0 || v >= nv) parse_fail(".ele", eles.line_no, "index out of range");
            tris[static_cast<std::size_t>(k)][i] = static_cast<std::uint32_t>(v);
        }
        const auto& t = tris[static_cast<std::size_t>(k)];
        if (orient2d(verts[t[0]], verts[t[1]], verts[t[2]]) == 0)
            parse_fail(".ele", eles.line_no, "degenerate triangle");
    }
    return TriMesh(std::move(verts), std::move(tris));
}

TriMesh load_mesh(const std::filesystem::path& node_file, const std::filesystem::path& ele_file) {
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw MeshError("cannot open " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    return import_mesh(slurp(node_file), slurp(ele_file));
}

LocateResult locate(const TriMesh& mesh, Point2 p, std::optional<std::int32_t> hint) {
    auto inside = [&](std::size_t t, bool strict) {
        const Triangle tri = mesh.triangle(t);
        for (int i = 0; i < 3; ++i) {
            const int o = orient2d(tri[i], tri[(i + 1) % 3], p);
            if (o < 0 || (strict && o == 0)) return false;
        }
        return true;
    };
    if (hint && *hint >= 0 && static_cast<std::size_t>(*hint) < mesh.num_triangles() &&
        inside(static_cast<std::size_t>(*hint), true))
        return {*hint};
    if (!mesh.bounds().contains(p)) return {};
    const auto [ix, iy] = mesh.bucket_of(p);
    for (std::uint32_t t : mesh.bucket(ix, iy)) {
        if (inside(t, false)) return {static_cast<std::int32_t>(t)};
    }
    return {};
}

}  // namespace tec
