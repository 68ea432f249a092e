#include "tec/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

namespace tec {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& out, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    unsigned char b[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw StateFormatError("truncated state file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

void write_state(std::ostream& out, const InterfaceState& state) {
    out.write("TEC2", 4);
    put_le<std::uint32_t>(out, kStateVersion);
    put_le<std::uint64_t>(out, state.cuts.size());
    for (const EdgeCut& e : state.cuts)
        for (double v : pack(e)) put_le<double>(out, v);
    if (!out) throw std::runtime_error("failed writing state");
}

void write_state(const std::filesystem::path& file, const InterfaceState& state) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    write_state(out, state);
}

std::vector<EdgeCut> read_cuts(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "TEC2", 4) != 0) throw StateFormatError("bad magic");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kStateVersion) throw StateFormatError(fmt::format("unsupported version {}", version));
    const auto n = get_le<std::uint64_t>(in);
    std::vector<EdgeCut> cuts;
    cuts.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
    for (std::uint64_t i = 0; i < n; ++i) {
        std::array<double, 6> v;
        for (double& x : v) x = get_le<double>(in);
        try {
            cuts.push_back(unpack(v));
        } catch (const std::exception& e) {
            throw StateFormatError(fmt::format("record {}: {}", i, e.what()));
        }
    }
    return cuts;
}

InterfaceState read_state(const std::filesystem::path& file, std::shared_ptr<const TriMesh> mesh) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    InterfaceState s;
    s.cuts = read_cuts(in);
    if (s.cuts.size() != mesh->num_triangles()) throw StateFormatError("triangle count does not match the mesh");
    s.mesh = std::move(mesh);
    return s;
}

void write_svg(std::ostream& out, const InterfaceState& state, const SvgOptions& opts) {
    const TriMesh& mesh = *state.mesh;
    const BBox& b = mesh.bounds();
    const double w = b.xmax - b.xmin, h = b.ymax - b.ymin;
    const double s = opts.width_px / w;
    auto X = [&](Point2 p) { return (p.x - b.xmin) * s; };
    auto Y = [&](Point2 p) { return (b.ymax - p.y) * s; };
    auto poly = [&](auto&& pts, const char* style) {
        out << "<polygon points=\"";
        for (const Point2& p : pts) out << fmt::format("{:.4f},{:.4f} ", X(p), Y(p));
        out << "\" " << style << "/>\n";
    };
    out << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.4f} {:.4f}\">\n",
        w * s, h * s, w * s, h * s);
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const InterfaceIndex idx(state);
    if (opts.fill) {
        for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
            if (idx.kind(t) == InterfaceIndex::Kind::Liquid) {
                poly(mesh.triangle(t), "fill=\"#9ecae1\" stroke=\"#9ecae1\" stroke-width=\"0.3\"");
            } else if (idx.kind(t) == InterfaceIndex::Kind::Mixed) {
                for (const auto& p : idx.geometry(t).regions.liquid)
                    poly(p, "fill=\"#9ecae1\" stroke=\"#9ecae1\" stroke-width=\"0.3\"");
            }
        }
    }
    if (opts.wireframe) {
        for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
            poly(mesh.triangle(t), "fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"");
    }
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        if (idx.kind(t) != InterfaceIndex::Kind::Mixed) continue;
        for (const auto& is : idx.geometry(t).segments)
            out << fmt::format("<line x1=\"{:.4f}\" y1=\"{:.4f}\" x2=\"{:.4f}\" y2=\"{:.4f}\" stroke=\"#d62728\" "
                               "stroke-width=\"1.2\"/>\n",
                               X(is.seg.a), Y(is.seg.a), X(is.seg.b), Y(is.seg.b));
    }
    out << "</svg>\n";
}

void write_svg(const std::filesystem::path& file, const InterfaceState& state, const SvgOptions& opts) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    write_svg(out, state, opts);
}

}  // namespace tec
