#include "tpflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tpflow/parallel.hpp"

namespace tpflow {

double triangle_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

namespace {

void orient_ccw(SimplicialMesh& mesh) {
    for (auto& e : mesh.elements) {
        const double area =
            triangle_area(mesh.nodes[e[0]], mesh.nodes[e[1]], mesh.nodes[e[2]]);
        if (area < 0.0) std::swap(e[1], e[2]);
    }
}

void rebuild_boundary_flags(SimplicialMesh& mesh) {
    std::sort(mesh.boundary_nodes.begin(), mesh.boundary_nodes.end());
    mesh.boundary_nodes.erase(
        std::unique(mesh.boundary_nodes.begin(), mesh.boundary_nodes.end()),
        mesh.boundary_nodes.end());
    mesh.is_boundary.assign(mesh.nodes.size(), 0);
    for (int i : mesh.boundary_nodes) mesh.is_boundary[static_cast<std::size_t>(i)] = 1;
}

}  // namespace

SimplicialMesh generate_structured_rect(int nx, int ny, Vec2 lo, Vec2 hi, bool diagonal_up) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("structured mesh requires n >= 1");
    if (!(hi.x > lo.x) || !(hi.y > lo.y))
        throw std::invalid_argument("structured mesh requires a nondegenerate rectangle");
    SimplicialMesh mesh;
    mesh.dim = 2;
    mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double x = (i == nx) ? hi.x : lo.x + (hi.x - lo.x) * (double(i) / nx);
            const double y = (j == ny) ? hi.y : lo.y + (hi.y - lo.y) * (double(j) / ny);
            mesh.nodes.push_back({x, y});
        }
    }
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    mesh.elements.reserve(static_cast<std::size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = id(i, j), v10 = id(i + 1, j);
            const int v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
            if (diagonal_up) {
                mesh.elements.push_back({v00, v10, v11});
                mesh.elements.push_back({v00, v11, v01});
            } else {
                mesh.elements.push_back({v00, v10, v01});
                mesh.elements.push_back({v10, v11, v01});
            }
        }
    }
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            if (i == 0 || i == nx || j == 0 || j == ny) mesh.boundary_nodes.push_back(id(i, j));
    rebuild_boundary_flags(mesh);
    validate_mesh(mesh);
    return mesh;
}

SimplicialMesh generate_structured_unit_square(int n) {
    if (n < 1) throw std::invalid_argument("structured unit square requires n >= 1");
    return generate_structured_rect(n, n, {0.0, 0.0}, {1.0, 1.0}, true);
}

AcutenessReport check_acuteness(const SimplicialMesh& mesh) {
    AcutenessReport report;
    const int ne = mesh.element_count();
    std::vector<double> worst(static_cast<std::size_t>(ne), 0.0);
    std::vector<char> bad(static_cast<std::size_t>(ne), 0);
    par::parallel_for(static_cast<std::size_t>(ne), [&](std::size_t k) {
        const auto& e = mesh.elements[k];
        const Vec2 p[3] = {mesh.nodes[e[0]], mesh.nodes[e[1]], mesh.nodes[e[2]]};
        double w = 0.0;
        bool offends = false;
        for (int v = 0; v < 3; ++v) {
            const Vec2 a = p[(v + 1) % 3] - p[v];
            const Vec2 b = p[(v + 2) % 3] - p[v];
            const double na = norm(a), nb = norm(b);
            const double c = dot(a, b) / (na * nb);
            w = std::max(w, std::acos(std::clamp(c, -1.0, 1.0)));
            // angle > pi/2 iff dot < 0; same sign test as the gradient
            // products of the opposite node pair
            if (dot(a, b) < -1e-12 * na * nb) offends = true;
        }
        worst[k] = w;
        bad[k] = offends ? 1 : 0;
    });
    for (int k = 0; k < ne; ++k) {
        report.worst_angle = std::max(report.worst_angle, worst[static_cast<std::size_t>(k)]);
        if (bad[static_cast<std::size_t>(k)]) {
            report.ok = false;
            report.offenders.push_back(k);
        }
    }
    return report;
}

void validate_mesh(const SimplicialMesh& mesh) {
    const int m = mesh.node_count();
    if (mesh.dim != 2) throw MeshError("only dim 2 meshes are supported");
    if (m < 3 || mesh.elements.empty()) throw MeshError("mesh needs at least one triangle");
    for (const auto& e : mesh.elements) {
        for (int v : e)
            if (v < 0 || v >= m) throw MeshError("element node index out of range");
        if (e[0] == e[1] || e[1] == e[2] || e[0] == e[2])
            throw MeshError("element with repeated node");
        const double area = triangle_area(mesh.nodes[e[0]], mesh.nodes[e[1]], mesh.nodes[e[2]]);
        if (!(area > 0.0)) throw MeshError("element with non-positive area");
    }
    // Conformity: an undirected edge may be used by at most two elements, and
    // exactly once by each.
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& e : mesh.elements) {
        for (int v = 0; v < 3; ++v) {
            int a = e[v], b = e[(v + 1) % 3];
            if (a > b) std::swap(a, b);
            if (++edge_use[{a, b}] > 2) throw MeshError("non-conforming: edge shared by more than two elements");
        }
    }
    // Edges used once are boundary edges; the boundary node set must be
    // exactly the set of their endpoints.
    if (static_cast<int>(mesh.is_boundary.size()) != m)
        throw MeshError("boundary flags not initialized");
    std::vector<char> on_boundary_edge(static_cast<std::size_t>(m), 0);
    for (const auto& [edge, uses] : edge_use) {
        if (uses == 1) {
            if (!mesh.is_boundary[static_cast<std::size_t>(edge.first)] ||
                !mesh.is_boundary[static_cast<std::size_t>(edge.second)])
                throw MeshError("boundary set inconsistent with single-use edges");
            on_boundary_edge[static_cast<std::size_t>(edge.first)] = 1;
            on_boundary_edge[static_cast<std::size_t>(edge.second)] = 1;
        }
    }
    for (int i : mesh.boundary_nodes)
        if (!on_boundary_edge[static_cast<std::size_t>(i)])
            throw MeshError("boundary set lists a node not on any boundary edge");
}

namespace {

struct Line {
    int number;
    std::string text;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        ++number;
        const std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos) raw = raw.substr(0, hash);
        std::string trimmed(raw);
        const auto first = trimmed.find_first_not_of(" \t\r");
        if (first != std::string::npos) {
            const auto last = trimmed.find_last_not_of(" \t\r");
            lines.push_back({number, trimmed.substr(first, last - first + 1)});
        }
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return lines;
}

}  // namespace

SimplicialMesh load_mesh(std::string_view text) {
    const std::vector<Line> lines = split_lines(text);
    std::size_t at = 0;
    auto next = [&]() -> const Line& {
        if (at >= lines.size()) throw ParseError("unexpected end of mesh file", lines.empty() ? 1 : lines.back().number);
        return lines[at++];
    };
    auto expect_header = [&](const char* key) -> long {
        const Line& ln = next();
        std::istringstream ss(ln.text);
        std::string word;
        long value = -1;
        if (!(ss >> word >> value) || word != key || value < 0)
            throw ParseError(std::string("expected '") + key + " <count>'", ln.number);
        std::string rest;
        if (ss >> rest) throw ParseError("trailing tokens after header", ln.number);
        return value;
    };

    SimplicialMesh mesh;
    {
        const Line& ln = next();
        std::istringstream ss(ln.text);
        std::string word;
        int d = 0;
        if (!(ss >> word >> d) || word != "dim") throw ParseError("expected 'dim <d>'", ln.number);
        if (d != 2) throw ParseError("only dim 2 is supported", ln.number);
        mesh.dim = d;
    }
    const long n_nodes = expect_header("nodes");
    mesh.nodes.reserve(static_cast<std::size_t>(n_nodes));
    for (long i = 0; i < n_nodes; ++i) {
        const Line& ln = next();
        std::istringstream ss(ln.text);
        double x = 0.0, y = 0.0;
        if (!(ss >> x >> y)) throw ParseError("expected '<x> <y>'", ln.number);
        std::string rest;
        if (ss >> rest) throw ParseError("trailing tokens after coordinates", ln.number);
        mesh.nodes.push_back({x, y});
    }
    const long n_elems = expect_header("elements");
    mesh.elements.reserve(static_cast<std::size_t>(n_elems));
    for (long k = 0; k < n_elems; ++k) {
        const Line& ln = next();
        std::istringstream ss(ln.text);
        long a = 0, b = 0, c = 0;
        if (!(ss >> a >> b >> c)) throw ParseError("expected '<i> <j> <k>'", ln.number);
        for (long v : {a, b, c})
            if (v < 0 || v >= n_nodes) throw ParseError("index out of range", ln.number);
        const double area = triangle_area(mesh.nodes[static_cast<std::size_t>(a)],
                                          mesh.nodes[static_cast<std::size_t>(b)],
                                          mesh.nodes[static_cast<std::size_t>(c)]);
        if (area == 0.0) throw ParseError("zero-area element", ln.number);
        mesh.elements.push_back({static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)});
    }
    if (at >= lines.size())
        throw ParseError("boundary section is required for loaded meshes",
                         lines.empty() ? 1 : lines.back().number);
    const long n_bdry = expect_header("boundary");
    for (long i = 0; i < n_bdry; ++i) {
        const Line& ln = next();
        std::istringstream ss(ln.text);
        long v = 0;
        if (!(ss >> v)) throw ParseError("expected '<i>'", ln.number);
        if (v < 0 || v >= n_nodes) throw ParseError("index out of range", ln.number);
        mesh.boundary_nodes.push_back(static_cast<int>(v));
    }
    if (at != lines.size()) throw ParseError("trailing content after boundary section", lines[at].number);

    orient_ccw(mesh);
    rebuild_boundary_flags(mesh);
    try {
        validate_mesh(mesh);
    } catch (const MeshError& err) {
        throw ParseError(err.what(), lines.back().number);
    }
    return mesh;
}

SimplicialMesh load_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open mesh file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_mesh(ss.str());
}

std::string save_mesh(const SimplicialMesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    out << "dim " << mesh.dim << "\n";
    out << "nodes " << mesh.node_count() << "\n";
    for (const Vec2& p : mesh.nodes) out << p.x << " " << p.y << "\n";
    out << "elements " << mesh.element_count() << "\n";
    for (const auto& e : mesh.elements) out << e[0] << " " << e[1] << " " << e[2] << "\n";
    out << "boundary " << mesh.boundary_nodes.size() << "\n";
    for (int v : mesh.boundary_nodes) out << v << "\n";
    return out.str();
}

}  // namespace tpflow
