#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "runner.hpp"

namespace {

using tec::cli::Command;
using tec::cli::RunConfig;

void add_common(CLI::App* sub, RunConfig& cfg, std::vector<std::string>& mesh) {
    sub->add_option("--n", cfg.n, "Lattice resolution (n x n cells)");
    sub->add_option("--mesh", mesh, "Triangle .node and .ele files")->expected(2);
    sub->add_option("--cr", cfg.cr, "Courant number")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Perturbation seed")->capture_default_str();
    sub->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--dense", cfg.dense, "Vertices of the polygonized shape")->capture_default_str();
    sub->add_option("--truth-dense", cfg.truth_dense, "Vertices of the shape used for E_g")->capture_default_str();
    sub->add_option("--workers", cfg.workers, "Worker threads (0: TEC_WORKERS or hardware)");
    sub->add_option("--snapshots", cfg.snapshots, "Snapshot times as fractions of T")->delimiter(',');
    sub->add_option("--init-area-correct", cfg.init_area_correct,
                    "Correct initial fractions to exact cell areas (default: on for dynamic tests)");
}

void print_run(const RunConfig& cfg, const tec::cli::RunResult& r) {
    const auto& f = r.final;
    fmt::print("{}: steps={} E_g={:.6e} E_r={:.6e} E_m={:.6e} time={:.2f}s\n", tec::cli::to_string(cfg.command),
               r.steps, f.E_g, f.E_r, f.E_m, r.seconds);
    if (r.E_kappa) fmt::print("E_kappa={:.6e}\n", *r.E_kappa);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Triangle edge cut interface tracking benchmarks"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<std::string> mesh;
    std::string zconfig = "A";
    std::string sweep_test = "static-recon";

    auto* stat = app.add_subcommand("static-recon", "Initialize a shape and measure reconstruction error");
    add_common(stat, cfg, mesh);
    stat->add_option("--shape", cfg.shape, "circle | snake | heart | notched")->capture_default_str();

    auto* vortex = app.add_subcommand("vortex", "Single vortex, T = 8");
    add_common(vortex, cfg, mesh);

    auto* zalesak = app.add_subcommand("zalesak", "Zalesak's disk, one revolution");
    add_common(zalesak, cfg, mesh);
    zalesak->add_option("--config", zconfig, "A ([0,4]^2) or B ([-0.5,0.5]^2)")->capture_default_str();

    auto* deform = app.add_subcommand("deform", "4 x 4 vortex deformation, T = 2");
    add_common(deform, cfg, mesh);
    deform->add_option("--radius", cfg.deform_radius, "Initial circle radius")->capture_default_str();

    auto* conv = app.add_subcommand("convergence", "Error and order over resolution levels");
    conv->add_option("--test", sweep_test, "static-recon | vortex | zalesak | deform")->capture_default_str();
    conv->add_option("--levels", cfg.levels, "Lattice n values, or levels l with --mesh-pattern")
        ->delimiter(',')
        ->required();
    conv->add_option("--mesh-pattern", cfg.mesh_pattern, "Mesh stem with {} for the level, e.g. meshes/sq_l{}");
    conv->add_option("--shape", cfg.shape, "Shape for static-recon sweeps")->capture_default_str();
    conv->add_option("--config", zconfig, "Zalesak configuration")->capture_default_str();
    conv->add_option("--radius", cfg.deform_radius, "Deformation circle radius")->capture_default_str();
    conv->add_option("--cr", cfg.cr, "Courant number")->capture_default_str();
    conv->add_option("--seed", cfg.seed, "Perturbation seed")->capture_default_str();
    conv->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    conv->add_option("--dense", cfg.dense, "Vertices of the polygonized shape")->capture_default_str();
    conv->add_option("--truth-dense", cfg.truth_dense, "Vertices of the shape used for E_g")->capture_default_str();
    conv->add_option("--workers", cfg.workers, "Worker threads");
    conv->add_option("--init-area-correct", cfg.init_area_correct, "Correct initial fractions");

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.command = *tec::cli::parse_command(app.get_subcommands().front()->get_name());
        if (zconfig.size() != 1) throw tec::cli::ConfigError("--config must be A or B");
        cfg.zalesak_config = zconfig[0];
        if (!mesh.empty()) {
            cfg.node_file = mesh[0];
            cfg.ele_file = mesh[1];
        }
        std::filesystem::create_directories(cfg.out_dir);

        if (cfg.command == Command::Convergence) {
            const auto t = tec::cli::parse_command(sweep_test);
            if (!t) throw tec::cli::ConfigError("unknown --test '" + sweep_test + "'");
            cfg.sweep = *t;
            const auto sweep = tec::cli::convergence(cfg);
            tec::cli::write_convergence_csv(cfg.out_dir / "convergence.csv", sweep);
            tec::cli::write_manifest(cfg.out_dir / "manifest.json", cfg);
            for (const auto& l : sweep.levels) {
                fmt::print("level {:>4}  error {:.6e}", l.level, l.error);
                if (l.order) fmt::print("  order {:.3f}", *l.order);
                if (l.E_kappa) fmt::print("  E_kappa {:.4e}", *l.E_kappa);
                fmt::print("  ({:.2f}s)\n", l.seconds);
            }
            if (sweep.slope) fmt::print("slope {:.3f}\n", *sweep.slope);
            return 0;
        }

        tec::cli::validate(cfg);
        tec::cli::write_manifest(cfg.out_dir / "manifest.json", cfg);
        const auto result = tec::cli::run(cfg);
        tec::cli::write_metrics_csv(cfg.out_dir / "metrics.csv", result.rows);
        print_run(cfg, result);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "tec: %s\n", e.what());
        return 1;
    }
    return 0;
}
