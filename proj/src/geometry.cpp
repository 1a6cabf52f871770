#include "tpflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tpflow/parallel.hpp"

namespace tpflow {

int Geometry::edge_index(int i, int j) const {
    const auto lo = nbr_off[static_cast<std::size_t>(i)];
    const auto hi = nbr_off[static_cast<std::size_t>(i) + 1];
    const auto* begin = nbr_node.data() + lo;
    const auto* end = nbr_node.data() + hi;
    const auto* it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return -1;
    return nbr_edge[static_cast<std::size_t>(lo + (it - begin))];
}

Geometry build_geometry(SimplicialMesh mesh, bool strict_acute) {
    validate_mesh(mesh);
    const AcutenessReport acute = check_acuteness(mesh);
    if (strict_acute && !acute.ok) {
        std::ostringstream msg;
        msg << "angle condition violated (worst angle " << acute.worst_angle << " rad) in "
            << acute.offenders.size() << " element(s), first offender " << acute.offenders.front();
        throw MeshError(msg.str());
    }

    if (!strict_acute && !acute.ok) {
        std::fprintf(stderr,
                     "warning: angle condition violated in %zu element(s) (worst %.6g rad); "
                     "the coupling coefficients lose their sign structure\n",
                     acute.offenders.size(), acute.worst_angle);
    }

    Geometry g;
    g.mesh = std::move(mesh);
    const int m = g.node_count();
    const int ne = g.element_count();

    g.elem_area.resize(static_cast<std::size_t>(ne));
    g.elem_diam.resize(static_cast<std::size_t>(ne));
    g.elem_centroid.resize(static_cast<std::size_t>(ne));
    g.elem_grad.resize(static_cast<std::size_t>(ne));
    par::parallel_for(static_cast<std::size_t>(ne), [&](std::size_t k) {
        const auto& e = g.mesh.elements[k];
        const Vec2 p[3] = {g.mesh.nodes[e[0]], g.mesh.nodes[e[1]], g.mesh.nodes[e[2]]};
        const double area = triangle_area(p[0], p[1], p[2]);
        g.elem_area[k] = area;
        g.elem_centroid[k] = (1.0 / 3.0) * (p[0] + p[1] + p[2]);
        double diam = 0.0;
        for (int v = 0; v < 3; ++v) diam = std::max(diam, norm(p[(v + 1) % 3] - p[v]));
        g.elem_diam[k] = diam;
        for (int v = 0; v < 3; ++v)
            g.elem_grad[k][v] = (1.0 / (2.0 * area)) * perp(p[(v + 2) % 3] - p[(v + 1) % 3]);
    });

    // node -> element patches (counting sort keeps element ids ascending)
    g.patch_off.assign(static_cast<std::size_t>(m) + 1, 0);
    for (const auto& e : g.mesh.elements)
        for (int v : e) ++g.patch_off[static_cast<std::size_t>(v) + 1];
    for (int i = 0; i < m; ++i)
        g.patch_off[static_cast<std::size_t>(i) + 1] += g.patch_off[static_cast<std::size_t>(i)];
    g.patch_elem.resize(g.patch_off.back());
    {
        std::vector<int> cursor(g.patch_off.begin(), g.patch_off.end() - 1);
        for (int k = 0; k < ne; ++k)
            for (int v : g.mesh.elements[static_cast<std::size_t>(k)])
                g.patch_elem[static_cast<std::size_t>(cursor[static_cast<std::size_t>(v)]++)] = k;
    }

    g.lumped_mass.resize(static_cast<std::size_t>(m));
    par::parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        double patch_area = 0.0;
        for (int p = g.patch_off[i]; p < g.patch_off[i + 1]; ++p)
            patch_area += g.elem_area[static_cast<std::size_t>(g.patch_elem[static_cast<std::size_t>(p)])];
        g.lumped_mass[i] = patch_area / 3.0;
    });
    g.domain_area = par::det_sum(static_cast<std::size_t>(ne),
                                 [&](std::size_t k) { return g.elem_area[k]; });
    g.mesh_size = par::det_max(static_cast<std::size_t>(ne),
                               [&](std::size_t k) { return g.elem_diam[k]; });

    // undirected edge list
    std::vector<std::array<int, 2>> edges;
    edges.reserve(static_cast<std::size_t>(3) * ne);
    for (const auto& e : g.mesh.elements) {
        for (int v = 0; v < 3; ++v) {
            int a = e[v], b = e[(v + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.push_back({a, b});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edge_nodes = std::move(edges);
    const int nedge = g.edge_count();

    // per-edge contributing elements, deterministic ascending order
    g.edge_elem_off.assign(static_cast<std::size_t>(nedge) + 1, 0);
    g.edge_c.assign(static_cast<std::size_t>(nedge), 0.0);
    g.edge_len.resize(static_cast<std::size_t>(nedge));
    g.edge_cK.clear();
    g.edge_elem.clear();

    auto local_of = [&](int elem, int node) {
        const auto& e = g.mesh.elements[static_cast<std::size_t>(elem)];
        for (int v = 0; v < 3; ++v)
            if (e[v] == node) return v;
        return -1;
    };

    // Elements incident to an edge = intersection of the endpoint patches.
    std::vector<std::vector<int>> edge_elems(static_cast<std::size_t>(nedge));
    par::parallel_for(static_cast<std::size_t>(nedge), [&](std::size_t e) {
        const int a = g.edge_nodes[e][0], b = g.edge_nodes[e][1];
        const int* pa = g.patch_elem.data() + g.patch_off[static_cast<std::size_t>(a)];
        const int* pa_end = g.patch_elem.data() + g.patch_off[static_cast<std::size_t>(a) + 1];
        const int* pb = g.patch_elem.data() + g.patch_off[static_cast<std::size_t>(b)];
        const int* pb_end = g.patch_elem.data() + g.patch_off[static_cast<std::size_t>(b) + 1];
        std::set_intersection(pa, pa_end, pb, pb_end, std::back_inserter(edge_elems[e]));
        g.edge_len[e] = norm(g.mesh.nodes[b] - g.mesh.nodes[a]);
    });
    for (int e = 0; e < nedge; ++e)
        g.edge_elem_off[static_cast<std::size_t>(e) + 1] =
            g.edge_elem_off[static_cast<std::size_t>(e)] +
            static_cast<int>(edge_elems[static_cast<std::size_t>(e)].size());
    g.edge_elem.resize(g.edge_elem_off.back());
    g.edge_cK.resize(g.edge_elem_off.back());

    par::parallel_for(static_cast<std::size_t>(nedge), [&](std::size_t e) {
        const int a = g.edge_nodes[e][0], b = g.edge_nodes[e][1];
        double c_sum = 0.0;
        int slot = g.edge_elem_off[e];
        for (int k : edge_elems[e]) {
            const int la = local_of(k, a), lb = local_of(k, b);
            const double grad_dot = dot(g.elem_grad[static_cast<std::size_t>(k)][la],
                                        g.elem_grad[static_cast<std::size_t>(k)][lb]);
            const double area = g.elem_area[static_cast<std::size_t>(k)];
            const double c_k = area * std::abs(grad_dot);

            // cross-check against the face-normal formula
            const auto& el = g.mesh.elements[static_cast<std::size_t>(k)];
            const Vec2 p[3] = {g.mesh.nodes[el[0]], g.mesh.nodes[el[1]], g.mesh.nodes[el[2]]};
            const Vec2 fa = p[(la + 2) % 3] - p[(la + 1) % 3];  // face opposite a
            const Vec2 fb = p[(lb + 2) % 3] - p[(lb + 1) % 3];
            const Vec2 na = perp(fa), nb = perp(fb);
            const double c_formula =
                norm(fa) * norm(fb) * std::abs(dot(na, nb) / (norm(na) * norm(nb))) / (4.0 * area);
            if (std::abs(c_k - c_formula) > 1e-12 * std::max(1.0, std::abs(c_k)))
                throw MeshError("coupling coefficient disagrees with the face-normal formula");

            g.edge_elem[static_cast<std::size_t>(slot)] = k;
            g.edge_cK[static_cast<std::size_t>(slot)] = c_k;
            ++slot;
            c_sum += c_k;
        }
        g.edge_c[e] = c_sum;
    });

    // node adjacency with edge back-references
    g.nbr_off.assign(static_cast<std::size_t>(m) + 1, 0);
    for (const auto& en : g.edge_nodes) {
        ++g.nbr_off[static_cast<std::size_t>(en[0]) + 1];
        ++g.nbr_off[static_cast<std::size_t>(en[1]) + 1];
    }
    for (int i = 0; i < m; ++i)
        g.nbr_off[static_cast<std::size_t>(i) + 1] += g.nbr_off[static_cast<std::size_t>(i)];
    g.nbr_node.resize(g.nbr_off.back());
    g.nbr_edge.resize(g.nbr_off.back());
    {
        std::vector<int> cursor(g.nbr_off.begin(), g.nbr_off.end() - 1);
        // edge list is sorted, so per-node neighbor lists built in edge order
        // are ascending for the first endpoint; second-endpoint entries are
        // fixed up by a sort below.
        for (int e = 0; e < nedge; ++e) {
            const int a = g.edge_nodes[static_cast<std::size_t>(e)][0];
            const int b = g.edge_nodes[static_cast<std::size_t>(e)][1];
            int ca = cursor[static_cast<std::size_t>(a)]++;
            g.nbr_node[static_cast<std::size_t>(ca)] = b;
            g.nbr_edge[static_cast<std::size_t>(ca)] = e;
            int cb = cursor[static_cast<std::size_t>(b)]++;
            g.nbr_node[static_cast<std::size_t>(cb)] = a;
            g.nbr_edge[static_cast<std::size_t>(cb)] = e;
        }
    }
    par::parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        const int lo = g.nbr_off[i], hi = g.nbr_off[i + 1];
        std::vector<std::pair<int, int>> tmp;
        tmp.reserve(static_cast<std::size_t>(hi - lo));
        for (int p = lo; p < hi; ++p)
            tmp.emplace_back(g.nbr_node[static_cast<std::size_t>(p)],
                             g.nbr_edge[static_cast<std::size_t>(p)]);
        std::sort(tmp.begin(), tmp.end());
        for (int p = lo; p < hi; ++p) {
            g.nbr_node[static_cast<std::size_t>(p)] = tmp[static_cast<std::size_t>(p - lo)].first;
            g.nbr_edge[static_cast<std::size_t>(p)] = tmp[static_cast<std::size_t>(p - lo)].second;
        }
    });

    return g;
}

std::vector<double> lumped_mass_weighted(const Geometry& geom, const std::vector<double>& phi_elem) {
    if (phi_elem.size() != static_cast<std::size_t>(geom.element_count()))
        throw std::invalid_argument("porosity field size does not match element count");
    std::vector<double> mw(static_cast<std::size_t>(geom.node_count()));
    par::parallel_for(mw.size(), [&](std::size_t i) {
        double s = 0.0;
        for (int p = geom.patch_off[i]; p < geom.patch_off[i + 1]; ++p) {
            const int k = geom.patch_elem[static_cast<std::size_t>(p)];
            s += phi_elem[static_cast<std::size_t>(k)] * geom.elem_area[static_cast<std::size_t>(k)];
        }
        mw[i] = s / 3.0;
    });
    return mw;
}

}  // namespace tpflow
