#include "tpflow/export.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tpflow {

std::uint64_t fnv1a_hash(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string provenance_line(std::string_view config_text) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# tpflow %s config=%016llx", kVersion,
                  static_cast<unsigned long long>(fnv1a_hash(config_text)));
    return buf;
}

std::string fields_to_csv(const TimeState& state, const Geometry& geom,
                          const std::string& provenance) {
    std::ostringstream out;
    out << provenance << "\n";
    out << "node_id,x,y,S,Pw,Po\n";
    for (int i = 0; i < geom.node_count(); ++i) {
        const std::size_t iu = static_cast<std::size_t>(i);
        const Vec2 p = geom.mesh.nodes[iu];
        out << i << "," << g17(p.x) << "," << g17(p.y) << "," << g17(state.S[iu]) << ","
            << g17(state.Pw[iu]) << "," << g17(state.Po[iu]) << "\n";
    }
    return out.str();
}

std::string fields_to_vtk(const TimeState& state, const Geometry& geom,
                          const std::string& provenance) {
    std::ostringstream out;
    const int m = geom.node_count();
    const int e = geom.element_count();
    out << "# vtk DataFile Version 3.0\n";
    // title line carries the provenance (comment prefix stripped)
    out << (provenance.size() > 2 ? provenance.substr(2) : provenance) << "\n";
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << m << " double\n";
    for (int i = 0; i < m; ++i) {
        const Vec2 p = geom.mesh.nodes[static_cast<std::size_t>(i)];
        out << g17(p.x) << " " << g17(p.y) << " 0\n";
    }
    out << "CELLS " << e << " " << 4 * e << "\n";
    for (const auto& el : geom.mesh.elements)
        out << "3 " << el[0] << " " << el[1] << " " << el[2] << "\n";
    out << "CELL_TYPES " << e << "\n";
    for (int k = 0; k < e; ++k) out << "5\n";
    out << "POINT_DATA " << m << "\n";
    auto array = [&](const char* name, const NodalField& f) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int i = 0; i < m; ++i) out << g17(f[static_cast<std::size_t>(i)]) << "\n";
    };
    array("S", state.S);
    array("Pw", state.Pw);
    array("Po", state.Po);
    return out.str();
}

std::string runlog_to_csv(const RunLog& log, const std::string& provenance) {
    std::ostringstream out;
    out << provenance << "\n";
    out << "step,t,min_S,max_S,mean_Pw,energy_acc,flux_imbalance,newton_iters\n";
    for (const auto& r : log.rows) {
        out << r.step << "," << g17(r.t) << "," << g17(r.min_s) << "," << g17(r.max_s) << ","
            << g17(r.mean_pw) << "," << g17(r.energy_acc) << "," << g17(r.flux_imbalance) << ","
            << r.newton_iters << "\n";
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    out << contents;
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace tpflow
