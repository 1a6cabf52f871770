#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tpflow/mms.hpp"
#include "tpflow/stepper.hpp"

namespace tpflow {

/// Parsed run configuration (key = value lines in [mesh] [model] [sources]
/// [solver] [output] sections; unknown keys are errors).
struct RunConfig {
    // mesh
    std::string mesh_source = "structured";  // structured | file
    int mesh_n = 10;
    std::string mesh_file;

    // model
    std::string model_preset = "validation";  // validation | power_law
    double theta_w = 2.0, theta_o = 2.0;
    double alpha_w = 0.125, alpha_o = 0.8;
    double beta3 = 1.5, beta4 = 1.0, alpha3 = 1.0;
    std::optional<double> k_w, k_o;
    double pc_scale = 0.0, pc_offset = 0.0;
    std::string porosity = "validation";  // validation | constant
    double porosity_value = 0.2;

    // sources
    std::string source_mode = "mms";  // mms | wells
    std::string bc = "dirichlet";     // dirichlet | no_flux
    double qbar_amp = 1.0;
    double sin_value = 1.0;
    double s0_value = 0.5;

    // solver
    std::string scheme = "semi_implicit";  // semi_implicit | implicit
    double tau = 0.0;
    double final_time = 1.0;
    double newton_tol = 1e-10;
    int newton_max_iters = 50;
    std::string linear_solver = "direct";  // direct | bicgstab
    double linear_tol = 1e-12;
    bool strict_acute = true;
    std::vector<int> levels = {5, 10, 20, 40, 80};

    // output
    std::string out_dir = "out";
    std::string run_log = "runlog.csv";
    std::string fields_format = "csv";  // csv | vtk
    int snapshot_every = 0;             // 0: final state only
    std::uint64_t seed = 42;

    std::string raw_text;  // original file contents (hashed for provenance)
};

/// Parse and validate; every semantic problem is listed in the error message.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Everything a run needs, with stable addresses for the Problem's references.
struct ConfiguredRun {
    RunConfig cfg;
    Geometry geom;
    FluidModel model;
    std::optional<ExactSolution> exact;
    Problem prob;
    SolverConfig solver;

    ConfiguredRun(RunConfig c, Geometry g, FluidModel m)
        : cfg(std::move(c)), geom(std::move(g)), model(std::move(m)) {}
};

std::unique_ptr<ConfiguredRun> configure(const RunConfig& cfg);

/// Initial state: interpolated exact fields in manufactured mode, patch
/// averages of the configured constant saturation and zero-mean pressure in
/// wells mode.
TimeState initial_state(const ConfiguredRun& run);

}  // namespace tpflow
