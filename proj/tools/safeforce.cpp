#include "safeforce/io.hpp"
#include "safeforce/scenario.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace safeforce;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAudit = 1;
constexpr int kExitConfig = 2;

struct Manifest {
    std::string preset;
    std::string scenario;
    std::string out = "out";
    double dt = 0.0;
    bool emit_svg = false;
    bool emit_qp_dumps = false;
    unsigned workers = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> grid;
};

json base_json(const Manifest& m) {
    if (m.preset.empty() == m.scenario.empty()) throw ConfigError("", "give exactly one of --preset or --scenario");
    json j = m.preset.empty() ? load_scenario_json(m.scenario) : preset_json(m.preset);
    if (m.dt > 0) {
        j["dt"] = m.dt;
        j["dt_auto"] = false;
    }
    return j;
}

struct RunOutcome {
    AuditReport audit;
    Trajectory traj;
};

RunOutcome run_one(const ScenarioConfig& cfg, const fs::path& dir, const Manifest& m, const json& resolved) {
    fs::create_directories(dir);
    Simulator sim(cfg);
    std::ofstream dumps;
    SolveObserver obs;
    if (m.emit_qp_dumps) {
        dumps.open(dir / "qp_dumps.jsonl");
        obs = [&dumps](double t, const ControlEval& ev) { dumps << qp_dump_line(t, ev) << '\n'; };
    }
    RunOutcome r;
    r.traj = sim.run(obs);
    r.audit = audit_trajectory(r.traj, sim.shaping());

    std::ofstream csv(dir / "trajectory.csv");
    write_csv(csv, r.traj);
    std::ofstream audit(dir / "audit.txt");
    write_audit(audit, r.traj, r.audit);
    if (m.emit_svg) {
        std::ofstream svg(dir / "barrier.svg");
        write_svg(svg, r.traj, sim.shaping());
    }
    json manifest = {{"scenario", resolved}, {"seed", m.seed}, {"emit_svg", m.emit_svg},
                     {"emit_qp_dumps", m.emit_qp_dumps}, {"effective_dt", r.traj.meta.dt}};
    if (!m.preset.empty()) manifest["preset"] = m.preset;
    if (!m.scenario.empty()) manifest["scenario_path"] = m.scenario;
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
    return r;
}

int cmd_run(const Manifest& m) {
    json j;
    ScenarioConfig cfg;
    try {
        j = base_json(m);
        cfg = parse_scenario(j);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    const RunOutcome r = run_one(cfg, m.out, m, j);
    std::cout << cfg.name << ": " << (r.audit.pass() ? "PASS" : "FAIL")
              << "  |F-F_d|=" << r.audit.terminal_force_error << " N  A=" << r.audit.terminal_A
              << "  min B=" << r.audit.min_B << "  -> " << m.out << '\n';
    return r.audit.pass() ? kExitPass : kExitAudit;
}

struct GridPoint {
    std::vector<std::pair<std::string, json>> assignment;
    json scenario;
};

std::string label(const GridPoint& g) {
    std::string s;
    for (const auto& [p, v] : g.assignment) s += (s.empty() ? "" : " ") + p + "=" + v.dump();
    return s;
}

int cmd_sweep(const Manifest& m) {
    std::vector<GridPoint> points;
    try {
        if (m.grid.empty()) throw ConfigError("grid", "sweep needs at least one --grid axis");
        points.push_back({{}, base_json(m)});
        for (const auto& spec : m.grid) {
            const GridAxis axis = parse_grid(spec);
            std::vector<GridPoint> next;
            for (const auto& g : points)
                for (const auto& v : axis.values) {
                    GridPoint h = g;
                    try {
                        h.scenario[json::json_pointer(axis.pointer)] = v;
                    } catch (const json::exception& e) {
                        throw ConfigError(axis.pointer, e.what());
                    }
                    h.assignment.emplace_back(axis.pointer, v);
                    next.push_back(std::move(h));
                }
            points = std::move(next);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    struct Row {
        bool ok = false;
        std::string error;
        AuditReport audit;
        double dt = 0;
    };
    std::vector<Row> rows(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex log;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < points.size();) {
            const fs::path dir = fs::path(m.out) / ("run_" + std::to_string(i));
            try {
                const ScenarioConfig cfg = parse_scenario(points[i].scenario);
                const RunOutcome r = run_one(cfg, dir, m, points[i].scenario);
                rows[i].ok = true;
                rows[i].audit = r.audit;
                rows[i].dt = r.traj.meta.dt;
            } catch (const std::exception& e) {
                rows[i].error = e.what();
            }
            std::lock_guard<std::mutex> lk(log);
            std::cout << "[" << i << "] " << label(points[i]) << ": "
                      << (rows[i].ok ? (rows[i].audit.pass() ? "PASS" : "FAIL") : "ERROR " + rows[i].error) << '\n';
        }
    };
    const unsigned nw = std::max(1u, std::min<unsigned>(m.workers, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    fs::create_directories(m.out);
    std::ofstream csv(fs::path(m.out) / "summary.csv");
    csv << "run";
    for (const auto& [p, v] : points.front().assignment) csv << ',' << p;
    csv << ",dt,terminal_force_error,terminal_A,alignment_bound,min_B,audit_pass,error\n";
    csv << std::setprecision(9) << std::fixed;
    bool all = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        csv << i;
        for (const auto& [p, v] : points[i].assignment) csv << ',' << v.dump();
        const Row& r = rows[i];
        if (r.ok) {
            csv << ',' << r.dt << ',' << r.audit.terminal_force_error << ',' << r.audit.terminal_A << ','
                << r.audit.alignment_bound << ',' << r.audit.min_B << ',' << (r.audit.pass() ? "true" : "false")
                << ",\n";
        } else {
            std::string err = r.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            csv << ",,,,,,false," << err << '\n';
        }
        all = all && r.ok && r.audit.pass();
    }
    return all ? kExitPass : kExitAudit;
}

int cmd_presets(const std::string& dump_dir) {
    for (const auto& n : preset_names()) {
        const json j = preset_json(n);
        std::cout << n << "  " << j.value("description", "") << '\n';
        if (!dump_dir.empty()) {
            fs::create_directories(dump_dir);
            std::ofstream(fs::path(dump_dir) / (n + ".json")) << j.dump(2) << '\n';
        }
    }
    return kExitPass;
}

void add_source_flags(CLI::App* app, Manifest& m) {
    app->add_option("--preset", m.preset, "named preset (see `presets`)");
    app->add_option("--scenario", m.scenario, "scenario JSON file");
    app->add_option("--out", m.out, "output directory");
    app->add_option("--dt", m.dt, "fixed step size in seconds (disables automatic reduction)")
        ->check(CLI::PositiveNumber);
    app->add_flag("--emit-svg", m.emit_svg, "write barrier.svg");
    app->add_flag("--emit-qp-dumps", m.emit_qp_dumps, "write qp_dumps.jsonl");
    app->add_option("--seed", m.seed, "seed recorded in manifest.json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe normal-force controller simulator"};
    app.require_subcommand(1);
    Manifest m;
    std::string dump_dir;

    auto* run = app.add_subcommand("run", "simulate one scenario and audit it");
    add_source_flags(run, m);
    auto* sweep = app.add_subcommand("sweep", "simulate a parameter grid");
    add_source_flags(sweep, m);
    sweep->add_option("--grid", m.grid, "axis as /json/pointer=v1,v2,...; repeat for a product grid");
    sweep->add_option("--workers", m.workers, "parallel runs")->check(CLI::PositiveNumber);
    auto* presets = app.add_subcommand("presets", "list presets");
    presets->add_option("--dump", dump_dir, "write each preset as <dir>/<name>.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    try {
        if (*run) return cmd_run(m);
        if (*sweep) return cmd_sweep(m);
        return cmd_presets(dump_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAudit;
    }
}
