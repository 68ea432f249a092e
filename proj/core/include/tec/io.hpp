#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tec/advect.hpp"

namespace tec {

class StateFormatError : public std::runtime_error {
public:
    explicit StateFormatError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::uint32_t kStateVersion = 1;

// "TEC2", u32 version, u64 triangle count, then six little-endian doubles per
// triangle in the packed layout.
void write_state(std::ostream& out, const InterfaceState& state);
void write_state(const std::filesystem::path& file, const InterfaceState& state);
std::vector<EdgeCut> read_cuts(std::istream& in);
InterfaceState read_state(const std::filesystem::path& file, std::shared_ptr<const TriMesh> mesh);

struct SvgOptions {
    double width_px = 800.0;
    bool wireframe = false;
    bool fill = true;
};

void write_svg(std::ostream& out, const InterfaceState& state, const SvgOptions& opts = {});
void write_svg(const std::filesystem::path& file, const InterfaceState& state, const SvgOptions& opts = {});

}  // namespace tec
