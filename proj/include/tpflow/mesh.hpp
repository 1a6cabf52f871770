#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "tpflow/common.hpp"

namespace tpflow {

/// Conforming triangulation. Elements are stored counterclockwise; node and
/// element indices are 0-based everywhere, including the text format.
struct SimplicialMesh {
    int dim = 2;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> elements;
    std::vector<int> boundary_nodes;  // sorted, unique
    std::vector<char> is_boundary;    // size node_count()

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }
};

struct AcutenessReport {
    bool ok = true;
    double worst_angle = 0.0;          // radians
    std::vector<int> offenders;        // elements with an angle beyond pi/2
};

/// Uniform criss triangulation of [0,1]^2: (n+1)^2 lattice nodes, every cell
/// split by the same diagonal. Lattice spacing 1/n; all angles <= pi/2.
SimplicialMesh generate_structured_unit_square(int n);

/// Criss triangulation of the rectangle [lo,hi] with nx-by-ny cells.
/// diagonal_up selects the split direction (both satisfy the angle condition).
SimplicialMesh generate_structured_rect(int nx, int ny, Vec2 lo, Vec2 hi, bool diagonal_up = true);

/// Parse the line-oriented mesh format ('#' starts a comment):
///   dim 2 / nodes M / <x> <y> ... / elements E / <i> <j> <k> ... / boundary B / <i> ...
/// The boundary section is mandatory for loaded meshes. Connectivity is
/// validated (positive areas, conforming edges, index ranges).
SimplicialMesh load_mesh(std::string_view text);
SimplicialMesh load_mesh_file(const std::string& path);

std::string save_mesh(const SimplicialMesh& mesh);

/// Angle condition: each triangle angle at most pi/2. Certified through the
/// sign of the basis-gradient products per element, with tolerance 1e-12 on
/// the normalized sign test. Never throws.
AcutenessReport check_acuteness(const SimplicialMesh& mesh);

/// Structural validation shared by the generator and loader: positive element
/// areas, conforming edge incidence, boundary set consistency. Throws MeshError.
void validate_mesh(const SimplicialMesh& mesh);

/// Signed area helpers (positive for counterclockwise triangles).
double triangle_area(Vec2 a, Vec2 b, Vec2 c);

}  // namespace tpflow
