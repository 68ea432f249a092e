#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>
#include <fmt/os.h>
#include <nlohmann/json.hpp>

#include <tec/io.hpp>

namespace tec::cli {

namespace {

struct Benchmark {
    ShapeSpec shape;
    VelocityField field = ZeroField{};
    double period = 0.0;
    Rect domain;
};

ShapeSpec static_shape(const std::string& name) {
    if (name == "circle") return Circle{};
    if (name == "snake") return Snake{};
    if (name == "heart") return Heart{};
    if (name == "notched") return NotchedDisk{{0.5, 0.5}, 0.3, 0.06, 0.2};
    throw ConfigError("unknown shape '" + name + "' (circle, snake, heart, notched)");
}

Benchmark benchmark_for(const RunConfig& cfg, Command c) {
    Benchmark b;
    switch (c) {
        case Command::StaticRecon:
            b.shape = static_shape(cfg.shape);
            break;
        case Command::Vortex:
            b.shape = Circle{{0.5, 0.75}, 0.15};
            b.field = SingleVortex{8.0};
            b.period = 8.0;
            break;
        case Command::Deform:
            b.shape = Circle{{0.5, 0.5}, cfg.deform_radius};
            b.field = Deformation{2.0, 4};
            b.period = 2.0;
            break;
        case Command::Zalesak:
            b.period = 4.0 * std::numbers::pi;
            if (cfg.zalesak_config == 'A') {
                b.shape = zalesak_config_a();
                b.field = RigidRotation{{2.0, 2.0}, 0.5};
                b.domain = Rect{0.0, 0.0, 4.0, 4.0};
            } else {
                b.shape = zalesak_config_b();
                b.field = RigidRotation{{0.0, 0.0}, 0.5};
                b.domain = Rect{-0.5, -0.5, 0.5, 0.5};
            }
            break;
        case Command::Convergence:
            throw ConfigError("convergence is not a single run");
    }
    return b;
}

std::shared_ptr<const TriMesh> make_mesh(const RunConfig& cfg, const Benchmark& b) {
    if (cfg.n) return std::make_shared<const TriMesh>(build_lattice(*cfg.n, b.domain));
    return std::make_shared<const TriMesh>(load_mesh(cfg.node_file, cfg.ele_file));
}

std::vector<double> default_snapshots(Command c) {
    switch (c) {
        case Command::Zalesak: return {0.0, 0.25, 0.5, 0.75, 1.0};
        case Command::Vortex:
        case Command::Deform: return {0.0, 0.5, 1.0};
        default: return {0.0};
    }
}

std::string time_tag(double t) { return fmt::format("{:.4f}", t); }

void emit_snapshot(const RunConfig& cfg, const InterfaceState& st, const Snapshot& s, const SnapshotHook& hook,
                   RunResult& res) {
    res.snapshots.push_back(s);
    if (hook) hook(st, s);
    if (!cfg.write_files) return;
    const std::string tag = time_tag(s.time);
    write_state(cfg.out_dir / ("state_" + tag + ".bin"), st);
    write_svg(cfg.out_dir / ("interface_" + tag + ".svg"), st, {800.0, cfg.n && *cfg.n <= 32, true});
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const char* to_string(Command c) {
    switch (c) {
        case Command::StaticRecon: return "static-recon";
        case Command::Vortex: return "vortex";
        case Command::Zalesak: return "zalesak";
        case Command::Deform: return "deform";
        case Command::Convergence: return "convergence";
    }
    return "?";
}

std::optional<Command> parse_command(const std::string& s) {
    for (Command c : {Command::StaticRecon, Command::Vortex, Command::Zalesak, Command::Deform, Command::Convergence})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

void validate(const RunConfig& cfg) {
    if (!(cfg.cr > 0.0)) throw ConfigError("--cr must be positive");
    if (cfg.dense < 64 || cfg.truth_dense < 64) throw ConfigError("--dense and --truth-dense must be at least 64");
    if (cfg.zalesak_config != 'A' && cfg.zalesak_config != 'B') throw ConfigError("--config must be A or B");
    if (!(cfg.deform_radius > 0.0 && cfg.deform_radius < 0.5)) throw ConfigError("--radius must lie in (0, 0.5)");
    if (cfg.snapshots)
        for (double f : *cfg.snapshots)
            if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("snapshot fractions must lie in [0, 1]");
    if (cfg.command == Command::Convergence) {
        if (cfg.sweep == Command::Convergence) throw ConfigError("--test cannot be convergence");
        if (cfg.levels.empty()) throw ConfigError("convergence needs --levels");
        if (cfg.n || !cfg.node_file.empty()) throw ConfigError("convergence takes --levels, not --n or --mesh");
        for (int l : cfg.levels)
            if (l < (cfg.mesh_pattern.empty() ? 1 : 0)) throw ConfigError("levels must be positive");
        if (cfg.sweep == Command::StaticRecon) static_shape(cfg.shape);
        return;
    }
    const bool lattice = cfg.n.has_value();
    const bool files = !cfg.node_file.empty() || !cfg.ele_file.empty();
    if (lattice == files) throw ConfigError("exactly one mesh source is required: --n or --mesh");
    if (lattice && *cfg.n < 1) throw ConfigError("--n must be positive");
    if (files && (cfg.node_file.empty() || cfg.ele_file.empty())) throw ConfigError("--mesh needs both .node and .ele");
    if (cfg.command == Command::StaticRecon) static_shape(cfg.shape);
}

RunResult run(const RunConfig& cfg, const SnapshotHook& hook) {
    validate(cfg);
    if (cfg.command == Command::Convergence) throw ConfigError("use convergence() for sweeps");
    const auto t0 = std::chrono::steady_clock::now();
    const Benchmark b = benchmark_for(cfg, cfg.command);
    const auto mesh = make_mesh(cfg, b);
    if (cfg.write_files) std::filesystem::create_directories(cfg.out_dir);

    const bool dynamic = cfg.command != Command::StaticRecon;
    InitOptions init;
    init.n_dense = cfg.dense;
    init.area_correct = cfg.init_area_correct.value_or(dynamic);
    init.workers = cfg.workers;
    InterfaceState st = init_state(mesh, b.shape, init);
    const DensePolygon truth = polygonize(b.shape, cfg.truth_dense);

    RunResult res;
    res.A0 = total_liquid_area(st);
    if (dynamic) {
        res.initial = error_report(st, truth, res.A0);
    } else {
        // Static: mass error against the true shape area.
        res.initial = error_report(st, truth, truth.area());
        res.initial.E_m = mass_error(st, truth.area());
        if (const auto* c = std::get_if<Circle>(&b.shape)) {
            const CurvatureResult k = curvature(st);
            const double k_true = 1.0 / c->radius;
            if (!k.samples.empty()) res.E_kappa = curvature_error(k.samples, [&](Point2) { return k_true; });
        }
    }
    res.rows.push_back({0, 0.0, res.initial.E_m, res.initial.E_g, res.initial.E_r, 0});

    const std::vector<double> fractions = cfg.snapshots.value_or(default_snapshots(cfg.command));
    if (!dynamic) {
        for (double f : fractions)
            if (f == 0.0) emit_snapshot(cfg, st, {0.0, 0, 0.0}, hook, res);
        res.final = res.initial;
        res.final_state = std::move(st);
        res.seconds = elapsed(t0);
        return res;
    }

    const StepPlan plan = timestep(b.field, *mesh, cfg.cr, b.period);
    std::vector<std::pair<std::int64_t, double>> snap_steps;
    for (double f : fractions) snap_steps.emplace_back(std::llround(f * static_cast<double>(plan.steps)), f);
    auto snap_at = [&](std::int64_t step) {
        for (const auto& [s, f] : snap_steps)
            if (s == step) emit_snapshot(cfg, st, {f, step, st.time}, hook, res);
    };
    snap_at(0);

    AdvectOptions opts;
    opts.seed = cfg.seed;
    opts.workers = cfg.workers;
    double area = res.A0;
    for (std::int64_t s = 0; s < plan.steps; ++s) {
        StepResult r = advect_step(st, b.field, plan.dt, opts);
        st = std::move(r.state);
        // Land exactly on the benchmark times.
        st.time = static_cast<double>(s + 1) * plan.dt;
        const double next = total_liquid_area(st);
        MetricsRow row;
        row.step = s + 1;
        row.time = st.time;
        row.E_m = mass_error(st, res.A0);
        row.failed_triangles = r.report.failed_triangles();
        if (row.failed_triangles == 0) {
            res.max_clean_mass_jump = std::max(res.max_clean_mass_jump, std::abs(next - area) / res.A0);
            ++res.clean_steps;
        }
        if (const auto off = r.report.off_target_area(*st.mesh)) {
            res.max_accounted_mass_jump = std::max(res.max_accounted_mass_jump, std::abs(next - area - *off) / res.A0);
            ++res.accounted_steps;
        }
        area = next;
        if (s + 1 == plan.steps) {
            res.final = error_report(st, truth, res.A0);
            row.E_g = res.final.E_g;
            row.E_r = res.final.E_r;
        }
        res.rows.push_back(row);
        snap_at(s + 1);
    }
    if (plan.steps == 0) res.final = res.initial;
    res.steps = static_cast<std::size_t>(plan.steps);
    res.final_state = std::move(st);
    res.seconds = elapsed(t0);
    return res;
}

SweepResult convergence(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.command != Command::Convergence) throw ConfigError("not a convergence config");
    SweepResult out;
    std::vector<std::pair<double, double>> pairs;
    for (int l : cfg.levels) {
        RunConfig c = cfg;
        c.command = cfg.sweep;
        c.write_files = false;
        c.snapshots = std::vector<double>{};
        SweepLevel lv;
        lv.level = l;
        if (cfg.mesh_pattern.empty()) {
            c.n = l;
            lv.resolution = l;
        } else {
            std::string stem = cfg.mesh_pattern;
            const auto at = stem.find("{}");
            if (at == std::string::npos) throw ConfigError("--mesh-pattern needs a {} placeholder");
            stem.replace(at, 2, std::to_string(l));
            c.node_file = stem + ".node";
            c.ele_file = stem + ".ele";
            lv.resolution = std::ldexp(1.0, l);
        }
        const RunResult r = run(c);
        lv.error = cfg.sweep == Command::Zalesak ? r.final.E_r : r.final.E_g;
        lv.E_kappa = r.E_kappa;
        lv.seconds = r.seconds;
        out.levels.push_back(lv);
        pairs.emplace_back(lv.resolution, lv.error);
    }
    const ConvergenceResult cr = convergence_order(pairs);
    for (std::size_t i = 0; i < cr.orders.size(); ++i) out.levels[i + 1].order = cr.orders[i];
    out.slope = cr.slope;
    return out;
}

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string(); }

}  // namespace

void write_metrics_csv(const std::filesystem::path& file, const std::vector<MetricsRow>& rows) {
    auto out = fmt::output_file(file.string());
    out.print("step,time,E_m,E_g,E_r,failed_triangles\n");
    for (const auto& r : rows)
        out.print("{},{:.17g},{:.17g},{},{},{}\n", r.step, r.time, r.E_m, opt_field(r.E_g), opt_field(r.E_r),
                  r.failed_triangles);
}

void write_convergence_csv(const std::filesystem::path& file, const SweepResult& sweep) {
    auto out = fmt::output_file(file.string());
    out.print("level,resolution,error,order,E_kappa\n");
    for (const auto& l : sweep.levels)
        out.print("{},{:.17g},{:.17g},{},{}\n", l.level, l.resolution, l.error, opt_field(l.order),
                  opt_field(l.E_kappa));
    out.print("# slope,{}\n", opt_field(sweep.slope));
}

void write_manifest(const std::filesystem::path& file, const RunConfig& cfg) {
    nlohmann::json j;
    j["command"] = to_string(cfg.command);
    if (cfg.n) j["n"] = *cfg.n;
    if (!cfg.node_file.empty()) j["mesh"] = {cfg.node_file.string(), cfg.ele_file.string()};
    j["cr"] = cfg.cr;
    j["shape"] = cfg.shape;
    j["zalesak_config"] = std::string(1, cfg.zalesak_config);
    j["deform_radius"] = cfg.deform_radius;
    j["seed"] = cfg.seed;
    j["dense"] = cfg.dense;
    j["truth_dense"] = cfg.truth_dense;
    j["init_area_correct"] = cfg.init_area_correct.value_or(cfg.command != Command::StaticRecon);
    j["snapshots"] = cfg.snapshots.value_or(default_snapshots(cfg.command));
    if (cfg.command == Command::Convergence) {
        j["test"] = to_string(cfg.sweep);
        j["levels"] = cfg.levels;
        if (!cfg.mesh_pattern.empty()) j["mesh_pattern"] = cfg.mesh_pattern;
    }
    j["library_version"] = TEC_VERSION;
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << j.dump(2) << '\n';
}

}  // namespace tec::cli
