#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <tec/metrics.hpp>
#include <tec/shapes.hpp>

namespace tec::cli {

enum class Command { StaticRecon, Vortex, Zalesak, Deform, Convergence };

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& s);

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct RunConfig {
    Command command = Command::StaticRecon;

    // Mesh source: a lattice resolution or a .node/.ele pair.
    std::optional<int> n;
    std::filesystem::path node_file, ele_file;

    double cr = 1.0;
    std::string shape = "circle";  // circle | snake | heart | notched (static-recon)
    char zalesak_config = 'A';
    double deform_radius = 0.15;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    int dense = 4096;        // vertices of the polygonized shape used for initialization
    int truth_dense = 1000;  // vertices of the polygonized shape used for E_g
    std::optional<bool> init_area_correct;  // default: on for dynamic tests
    std::optional<std::vector<double>> snapshots;  // fractions of T

    std::filesystem::path out_dir = ".";
    bool write_files = true;

    // convergence only
    Command sweep = Command::StaticRecon;
    std::vector<int> levels;        // lattice n, or refinement levels l with mesh_pattern
    std::string mesh_pattern;       // "{}" replaced by the level, ".node"/".ele" appended
};

// Throws ConfigError.
void validate(const RunConfig& cfg);

struct MetricsRow {
    std::int64_t step = 0;
    double time = 0.0;
    double E_m = 0.0;
    std::optional<double> E_g, E_r;
    std::size_t failed_triangles = 0;
};

struct Snapshot {
    double fraction = 0.0;
    std::int64_t step = 0;
    double time = 0.0;
};

struct RunResult {
    std::vector<MetricsRow> rows;
    std::vector<Snapshot> snapshots;
    InterfaceState final_state;
    double A0 = 0.0;
    ErrorReport initial, final;
    std::optional<double> E_kappa;  // static circle only
    // Largest |dA|/A0 over steps that reported no failed triangle.
    double max_clean_mass_jump = 0.0;
    std::size_t clean_steps = 0;
    // Largest |dA - off-target area|/A0, i.e. the jump with failed triangles'
    // shortfall excluded, over steps where that shortfall is known.
    double max_accounted_mass_jump = 0.0;
    std::size_t accounted_steps = 0;
    std::size_t steps = 0;
    double seconds = 0.0;
};

using SnapshotHook = std::function<void(const InterfaceState&, const Snapshot&)>;

RunResult run(const RunConfig& cfg, const SnapshotHook& hook = {});

struct SweepLevel {
    int level = 0;
    double resolution = 0.0;
    double error = 0.0;  // E_g (E_r for zalesak)
    std::optional<double> E_kappa;
    std::optional<double> order;
    double seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepLevel> levels;
    std::optional<double> slope;
};

SweepResult convergence(const RunConfig& cfg);

void write_metrics_csv(const std::filesystem::path& file, const std::vector<MetricsRow>& rows);
void write_convergence_csv(const std::filesystem::path& file, const SweepResult& sweep);
void write_manifest(const std::filesystem::path& file, const RunConfig& cfg);

}  // namespace tec::cli
