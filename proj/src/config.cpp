#include "tpflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tpflow {

namespace {

struct KeyValue {
    std::string section, key, value;
    int line;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<KeyValue> tokenize(const std::string& text, std::vector<std::string>& errors) {
    std::vector<KeyValue> items;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(number) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(number) + ": expected 'key = value'");
            continue;
        }
        items.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), number});
    }
    return items;
}

bool parse_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        out = true;
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        out = false;
        return true;
    }
    return false;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    std::vector<std::string> errors;
    RunConfig cfg;
    cfg.raw_text = text;
    bool tau_given = false;

    auto num = [&errors](const KeyValue& kv, double& out) {
        try {
            std::size_t pos = 0;
            out = std::stod(kv.value, &pos);
            if (pos != kv.value.size()) throw std::invalid_argument("");
        } catch (...) {
            errors.push_back("line " + std::to_string(kv.line) + ": " + kv.section + "." + kv.key +
                             " expects a number, got '" + kv.value + "'");
        }
    };
    auto integer = [&errors](const KeyValue& kv, int& out) {
        try {
            std::size_t pos = 0;
            out = std::stoi(kv.value, &pos);
            if (pos != kv.value.size()) throw std::invalid_argument("");
        } catch (...) {
            errors.push_back("line " + std::to_string(kv.line) + ": " + kv.section + "." + kv.key +
                             " expects an integer, got '" + kv.value + "'");
        }
    };

    for (const KeyValue& kv : tokenize(text, errors)) {
        const std::string id = kv.section + "." + kv.key;
        auto unknown = [&]() {
            errors.push_back("line " + std::to_string(kv.line) + ": unknown key '" + id + "'");
        };
        if (kv.section == "mesh") {
            if (kv.key == "source") cfg.mesh_source = kv.value;
            else if (kv.key == "n") integer(kv, cfg.mesh_n);
            else if (kv.key == "file") cfg.mesh_file = kv.value;
            else unknown();
        } else if (kv.section == "model") {
            if (kv.key == "preset") cfg.model_preset = kv.value;
            else if (kv.key == "theta_w") num(kv, cfg.theta_w);
            else if (kv.key == "theta_o") num(kv, cfg.theta_o);
            else if (kv.key == "alpha_w") num(kv, cfg.alpha_w);
            else if (kv.key == "alpha_o") num(kv, cfg.alpha_o);
            else if (kv.key == "beta3") num(kv, cfg.beta3);
            else if (kv.key == "beta4") num(kv, cfg.beta4);
            else if (kv.key == "alpha3") num(kv, cfg.alpha3);
            else if (kv.key == "k_w") { double v = 0; num(kv, v); cfg.k_w = v; }
            else if (kv.key == "k_o") { double v = 0; num(kv, v); cfg.k_o = v; }
            else if (kv.key == "pc_scale") num(kv, cfg.pc_scale);
            else if (kv.key == "pc_offset") num(kv, cfg.pc_offset);
            else if (kv.key == "porosity") cfg.porosity = kv.value;
            else if (kv.key == "porosity_value") num(kv, cfg.porosity_value);
            else unknown();
        } else if (kv.section == "sources") {
            if (kv.key == "mode") cfg.source_mode = kv.value;
            else if (kv.key == "bc") cfg.bc = kv.value;
            else if (kv.key == "qbar_amp") num(kv, cfg.qbar_amp);
            else if (kv.key == "sin_value") num(kv, cfg.sin_value);
            else if (kv.key == "s0_value") num(kv, cfg.s0_value);
            else unknown();
        } else if (kv.section == "solver") {
            if (kv.key == "scheme") cfg.scheme = kv.value;
            else if (kv.key == "tau") { num(kv, cfg.tau); tau_given = true; }
            else if (kv.key == "T") num(kv, cfg.final_time);
            else if (kv.key == "newton_tol") num(kv, cfg.newton_tol);
            else if (kv.key == "newton_max_iters") integer(kv, cfg.newton_max_iters);
            else if (kv.key == "linear_solver") cfg.linear_solver = kv.value;
            else if (kv.key == "linear_tol") num(kv, cfg.linear_tol);
            else if (kv.key == "strict_acute") {
                if (!parse_bool(kv.value, cfg.strict_acute))
                    errors.push_back("line " + std::to_string(kv.line) +
                                     ": solver.strict_acute expects a boolean");
            } else if (kv.key == "levels") {
                cfg.levels.clear();
                std::string item;
                std::istringstream ss(kv.value);
                while (std::getline(ss, item, ',')) {
                    try {
                        cfg.levels.push_back(std::stoi(trim(item)));
                    } catch (...) {
                        errors.push_back("line " + std::to_string(kv.line) +
                                         ": solver.levels expects comma-separated integers");
                        break;
                    }
                }
            } else unknown();
        } else if (kv.section == "output") {
            if (kv.key == "dir") cfg.out_dir = kv.value;
            else if (kv.key == "run_log") cfg.run_log = kv.value;
            else if (kv.key == "fields_format") cfg.fields_format = kv.value;
            else if (kv.key == "snapshot_every") integer(kv, cfg.snapshot_every);
            else if (kv.key == "seed") {
                try {
                    cfg.seed = std::stoull(kv.value);
                } catch (...) {
                    errors.push_back("line " + std::to_string(kv.line) +
                                     ": output.seed expects an unsigned integer");
                }
            } else unknown();
        } else {
            errors.push_back("line " + std::to_string(kv.line) + ": unknown section '" +
                             kv.section + "'");
        }
    }

    // semantic validation, exhaustively listed
    if (cfg.mesh_source != "structured" && cfg.mesh_source != "file")
        errors.push_back("mesh.source must be 'structured' or 'file'");
    if (cfg.mesh_source == "structured" && cfg.mesh_n < 1)
        errors.push_back("mesh.n must be >= 1");
    if (cfg.mesh_source == "file" && cfg.mesh_file.empty())
        errors.push_back("mesh.file required when mesh.source = file");
    if (cfg.model_preset != "validation" && cfg.model_preset != "power_law")
        errors.push_back("model.preset must be 'validation' or 'power_law'");
    if (cfg.porosity != "validation" && cfg.porosity != "constant")
        errors.push_back("model.porosity must be 'validation' or 'constant'");
    if (cfg.porosity == "constant" && !(cfg.porosity_value > 0.0))
        errors.push_back("model.porosity_value must be positive");
    if (cfg.source_mode != "mms" && cfg.source_mode != "wells")
        errors.push_back("sources.mode must be 'mms' or 'wells'");
    if (cfg.bc != "dirichlet" && cfg.bc != "no_flux")
        errors.push_back("sources.bc must be 'dirichlet' or 'no_flux'");
    if (cfg.source_mode == "mms" && cfg.bc != "dirichlet")
        errors.push_back("sources.mode = mms requires sources.bc = dirichlet");
    if (cfg.source_mode == "wells" && cfg.bc != "no_flux")
        errors.push_back("sources.mode = wells requires sources.bc = no_flux "
                         "(no trace functions available)");
    if (cfg.source_mode == "wells" && cfg.qbar_amp < 0.0)
        errors.push_back("sources.qbar_amp must be nonnegative");
    if (cfg.source_mode == "wells" && (cfg.sin_value < 0.0 || cfg.sin_value > 1.0))
        errors.push_back("sources.sin_value must lie in [0,1]");
    if (cfg.source_mode == "wells" && (cfg.s0_value < 0.0 || cfg.s0_value > 1.0))
        errors.push_back("sources.s0_value must lie in [0,1]");
    if (cfg.scheme != "semi_implicit" && cfg.scheme != "implicit")
        errors.push_back("solver.scheme must be 'semi_implicit' or 'implicit'");
    if (!tau_given)
        errors.push_back("solver.tau required");
    else if (!(cfg.tau > 0.0))
        errors.push_back("solver.tau must be positive");
    if (tau_given && cfg.tau > 0.0 && !(cfg.final_time >= cfg.tau))
        errors.push_back("solver.T must be >= solver.tau");
    if (!(cfg.newton_tol > 0.0)) errors.push_back("solver.newton_tol must be positive");
    if (cfg.newton_max_iters < 1) errors.push_back("solver.newton_max_iters must be >= 1");
    if (cfg.linear_solver != "direct" && cfg.linear_solver != "bicgstab")
        errors.push_back("solver.linear_solver must be 'direct' or 'bicgstab'");
    if (cfg.levels.empty()) errors.push_back("solver.levels must not be empty");
    for (int n : cfg.levels)
        if (n < 1) errors.push_back("solver.levels entries must be >= 1");
    if (cfg.fields_format != "csv" && cfg.fields_format != "vtk")
        errors.push_back("output.fields_format must be 'csv' or 'vtk'");
    if (cfg.snapshot_every < 0) errors.push_back("output.snapshot_every must be >= 0");

    if (!errors.empty()) {
        std::string msg = "configuration invalid:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::unique_ptr<ConfiguredRun> configure(const RunConfig& cfg) {
    SimplicialMesh mesh = cfg.mesh_source == "structured"
                              ? generate_structured_unit_square(cfg.mesh_n)
                              : load_mesh_file(cfg.mesh_file);
    FluidModel model = cfg.model_preset == "validation"
                           ? validation_model()
                           : make_power_law_model(cfg.theta_w, cfg.theta_o, cfg.alpha_w,
                                                  cfg.alpha_o, cfg.beta3, cfg.beta4, cfg.alpha3,
                                                  cfg.k_w, cfg.k_o, cfg.pc_scale, cfg.pc_offset);
    auto out = std::make_unique<ConfiguredRun>(
        cfg, build_geometry(std::move(mesh), cfg.strict_acute), std::move(model));

    SpaceFn porosity;
    if (cfg.porosity == "validation") {
        porosity = validation_porosity();
    } else {
        const double value = cfg.porosity_value;
        porosity = [value](double, double) { return value; };
    }

    SourceModel src;
    if (cfg.source_mode == "mms") {
        out->exact = mms_exact_solution();
        auto [f1, f2] = manufactured_sources(out->model, porosity, *out->exact);
        src.mode = SourceMode::manufactured;
        src.bc = BcMode::dirichlet;
        src.f1 = f1;
        src.f2 = f2;
        src.trace_S = out->exact->s;
        src.trace_Pw = out->exact->pw;
    } else {
        // degree-4 polynomial injection bump, constant production with the
        // same analytic mean, constant input saturation
        const double amp = cfg.qbar_amp;
        const double sin_value = cfg.sin_value;
        src.mode = SourceMode::wells;
        src.bc = BcMode::no_flux;
        src.qbar = [amp](double, double x, double y) {
            return amp * 16.0 * x * (1.0 - x) * y * (1.0 - y);
        };
        src.qbar_mean = [amp](double) { return amp * 16.0 / 36.0; };
        src.qunder = [amp](double, double, double) { return amp * 16.0 / 36.0; };
        src.qunder_mean = [amp](double) { return amp * 16.0 / 36.0; };
        src.s_in = [sin_value](double, double, double) { return sin_value; };
    }
    out->prob = make_problem(out->geom, out->model, std::move(src), porosity);

    out->solver.tau = cfg.tau;
    out->solver.T = cfg.final_time;
    out->solver.scheme = cfg.scheme == "implicit" ? Scheme::implicit : Scheme::semi_implicit;
    out->solver.newton_tol = cfg.newton_tol;
    out->solver.newton_max_iters = cfg.newton_max_iters;
    out->solver.linear.kind = cfg.linear_solver == "bicgstab" ? LinearSolverKind::bicgstab
                                                              : LinearSolverKind::direct_sparse;
    out->solver.linear.tol = cfg.linear_tol;
    out->solver.strict_acute = cfg.strict_acute;
    return out;
}

TimeState initial_state(const ConfiguredRun& run) {
    const Geometry& g = run.geom;
    TimeState st;
    st.n = 0;
    st.t = 0.0;
    if (run.exact.has_value()) {
        const ExactSolution& e = *run.exact;
        st.S = interpolate_nodal(g, [&](double x, double y) { return e.s(0.0, x, y); });
        st.Pw = interpolate_nodal(g, [&](double x, double y) { return e.pw(0.0, x, y); });
    } else {
        const double s0 = run.cfg.s0_value;
        st.S = project_patch_average(g, [s0](double, double) { return s0; });
        st.Pw = NodalField(g, 0.0);
    }
    st.Po = NodalField(g);
    for (std::size_t i = 0; i < st.Po.size(); ++i)
        st.Po[i] = st.Pw[i] + run.model.pc(st.S[i]);
    return st;
}

}  // namespace tpflow
