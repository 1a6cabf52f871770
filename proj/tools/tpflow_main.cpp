#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tpflow/config.hpp"
#include "tpflow/export.hpp"
#include "tpflow/identities.hpp"

namespace {

using namespace tpflow;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

std::string snapshot_path(const RunConfig& cfg, int step) {
    char name[64];
    std::snprintf(name, sizeof(name), "fields_%06d.%s", step, cfg.fields_format.c_str());
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

int cmd_run(const std::string& config_path) {
    const RunConfig cfg = parse_config_file(config_path);
    auto run_setup = configure(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string provenance = provenance_line(cfg.raw_text);

    RunHooks hooks;
    hooks.on_step = [&](const TimeState& st, const RunLogRow&) {
        if (cfg.snapshot_every > 0 && st.n % cfg.snapshot_every == 0) {
            const std::string body = cfg.fields_format == "vtk"
                                         ? fields_to_vtk(st, run_setup->geom, provenance)
                                         : fields_to_csv(st, run_setup->geom, provenance);
            write_file(snapshot_path(cfg, st.n), body);
        }
    };

    const RunResult result = run(run_setup->prob, initial_state(*run_setup), run_setup->solver, hooks);

    write_file((std::filesystem::path(cfg.out_dir) / cfg.run_log).string(),
               runlog_to_csv(result.log, provenance));
    const std::string final_body = cfg.fields_format == "vtk"
                                       ? fields_to_vtk(result.state, run_setup->geom, provenance)
                                       : fields_to_csv(result.state, run_setup->geom, provenance);
    write_file((std::filesystem::path(cfg.out_dir) / ("fields_final." + cfg.fields_format)).string(),
               final_body);

    const RunLogRow& last = result.log.rows.back();
    std::printf("completed %d steps to t=%.6g: S in [%.6g, %.6g], mean Pw %.6g\n", last.step,
                last.t, last.min_s, last.max_s, last.mean_pw);
    std::printf("outputs written to %s\n", cfg.out_dir.c_str());
    return kExitOk;
}

int cmd_mms(const std::string& config_path) {
    const RunConfig cfg = parse_config_file(config_path);
    if (cfg.source_mode != "mms")
        throw ConfigError("the mms subcommand requires sources.mode = mms");
    auto run_setup = configure(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string provenance = provenance_line(cfg.raw_text);

    StudyConfig study;
    study.levels = cfg.levels;
    study.final_time = cfg.final_time;
    study.scheme = run_setup->solver.scheme;
    study.solver = run_setup->solver;

    SpaceFn porosity;
    if (cfg.porosity == "validation") {
        porosity = validation_porosity();
    } else {
        const double value = cfg.porosity_value;
        porosity = [value](double, double) { return value; };
    }
    const StudyResult result =
        convergence_study(study, run_setup->model, porosity, *run_setup->exact);

    const std::string csv = provenance + "\n" + table_to_csv(result.table);
    write_file((std::filesystem::path(cfg.out_dir) / "convergence.csv").string(), csv);
    write_file((std::filesystem::path(cfg.out_dir) / "convergence.txt").string(),
               provenance + "\n" + table_to_text(result.table));
    std::fputs(table_to_text(result.table).c_str(), stdout);
    if (!result.completed) {
        std::fprintf(stderr, "study aborted: %s\n", result.error.c_str());
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_check_mesh(const std::string& mesh_path) {
    const SimplicialMesh mesh = load_mesh_file(mesh_path);
    const AcutenessReport report = check_acuteness(mesh);
    std::printf("nodes %d, elements %d, boundary nodes %zu\n", mesh.node_count(),
                mesh.element_count(), mesh.boundary_nodes.size());
    std::printf("worst angle %.12g rad (%.6g deg)\n", report.worst_angle,
                report.worst_angle * 180.0 / 3.14159265358979323846);
    if (!report.ok) {
        std::printf("angle condition VIOLATED in %zu element(s); first offender %d\n",
                    report.offenders.size(), report.offenders.front());
        return kExitNumerical;
    }
    const Geometry geom = build_geometry(mesh);
    double mass = 0.0;
    for (double m : geom.lumped_mass) mass += m;
    std::printf("angle condition ok; mesh size h=%.12g, |Omega|=%.12g, sum m_i=%.12g\n",
                geom.mesh_size, geom.domain_area, mass);
    return kExitOk;
}

int cmd_identities(std::uint64_t seed) {
    const IdentityReport report = run_identity_suite(seed);
    for (const auto& c : report.checks)
        std::printf("%s %s worst=%.3e tol=%.0e\n", c.ok ? "PASS" : "FAIL", c.name.c_str(),
                    c.worst, c.tol);
    std::printf("%s (%d meshes, seed %llu)\n", report.all_ok ? "ALL PASS" : "FAILURES", report.meshes,
                static_cast<unsigned long long>(seed));
    return report.all_ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mass-lumped upwind P1 finite element solver for incompressible two-phase "
                 "porous-media flow"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mesh_path;
    std::uint64_t seed = 20240501;

    auto* run_cmd = app.add_subcommand("run", "run a single simulation from a config file");
    run_cmd->add_option("config", config_path, "config file")->required();
    auto* mms_cmd = app.add_subcommand("mms", "manufactured-solution convergence study");
    mms_cmd->add_option("config", config_path, "config file")->required();
    auto* check_cmd = app.add_subcommand("check-mesh", "acuteness and geometry report");
    check_cmd->add_option("mesh", mesh_path, "mesh file")->required();
    auto* id_cmd = app.add_subcommand("identities", "discrete-identity property suite");
    id_cmd->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // 0 for --help/--version
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config_path);
        if (mms_cmd->parsed()) return cmd_mms(config_path);
        if (check_cmd->parsed()) return cmd_check_mesh(mesh_path);
        if (id_cmd->parsed()) return cmd_identities(seed);
    } catch (const tpflow::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const tpflow::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitUsage;
}
