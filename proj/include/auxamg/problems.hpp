/// @file problems.hpp
/// @brief Test problems: 5-point Poisson on the unit square, P1 finite
///        element assembly on triangle meshes, and the mesh text format.

#ifndef AUXAMG_PROBLEMS_HPP
#define AUXAMG_PROBLEMS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "auxgrid.hpp"
#include "errors.hpp"
#include "sparse.hpp"

namespace auxamg {

struct TriMesh {
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> boundary_nodes;   // sorted, unique
};

struct LinearSystem {
    CsrMatrix A;
    std::vector<double> b;
    std::vector<Point> coords;   // one per DoF
    std::vector<double> exact;   // reference solution when known, else empty
};

/// 5-point Poisson matrix on the interior of an n x n cell grid over the
/// unit square: stencil 4 on the diagonal, -1 to the four grid neighbors,
/// b = h^2 f, zero Dirichlet boundary. Interior nodes are numbered y-major.
/// With manufactured = true the source is chosen for u = sin(pi x) sin(pi y)
/// and `exact` carries that solution at the nodes.
inline LinearSystem gen_poisson_uniform2d(int n, bool manufactured = false) {
    if (n < 2) throw argument_error("gen_poisson_uniform2d: need n >= 2");
    const int m = n - 1;
    const int N = m * m;
    const double h = 1.0 / n;

    LinearSystem sys;
    sys.coords.resize(N);
    sys.b.resize(N);
    if (manufactured) sys.exact.resize(N);

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(5) * N);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const int idx = j * m + i;
            const double x = (i + 1) * h;
            const double y = (j + 1) * h;
            sys.coords[idx] = {x, y};
            entries.push_back({idx, idx, 4.0});
            if (i > 0) entries.push_back({idx, idx - 1, -1.0});
            if (i + 1 < m) entries.push_back({idx, idx + 1, -1.0});
            if (j > 0) entries.push_back({idx, idx - m, -1.0});
            if (j + 1 < m) entries.push_back({idx, idx + m, -1.0});
            if (manufactured) {
                const double s = std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
                sys.b[idx] = h * h * 2.0 * std::numbers::pi * std::numbers::pi * s;
                sys.exact[idx] = s;
            } else {
                sys.b[idx] = h * h;
            }
        }
    }
    sys.A = csr_from_triplets(N, N, std::move(entries));
    return sys;
}

/// Unit square split into n x n cells, each cut along the SW-NE diagonal.
/// The canonical structured mesh whose P1 matrix equals the 5-point stencil.
inline TriMesh structured_split_mesh(int n) {
    if (n < 1) throw argument_error("structured_split_mesh: need n >= 1");
    const int w = n + 1;
    const double h = 1.0 / n;
    TriMesh mesh;
    mesh.nodes.resize(static_cast<std::size_t>(w) * w);
    for (int j = 0; j < w; ++j)
        for (int i = 0; i < w; ++i)
            mesh.nodes[static_cast<std::size_t>(j) * w + i] = {i * h, j * h};
    mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = j * w + i;
            const int v10 = v00 + 1;
            const int v01 = v00 + w;
            const int v11 = v01 + 1;
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }
    for (int j = 0; j < w; ++j)
        for (int i = 0; i < w; ++i)
            if (i == 0 || j == 0 || i == n || j == n)
                mesh.boundary_nodes.push_back(j * w + i);
    return mesh;
}

namespace detail {

struct ElementGeometry {
    double area;
    std::array<double, 3> b;   // opposite-edge y differences
    std::array<double, 3> c;   // opposite-edge x differences
};

inline ElementGeometry element_geometry(const TriMesh& mesh, int e) {
    const auto& t = mesh.triangles[e];
    const Point p0 = mesh.nodes[t[0]];
    const Point p1 = mesh.nodes[t[1]];
    const Point p2 = mesh.nodes[t[2]];
    const double two_area = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    ElementGeometry g;
    g.area = std::abs(two_area) / 2.0;
    if (!(g.area > 1e-14))
        throw geometry_error("triangle " + std::to_string(e) + " is degenerate");
    g.b = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    g.c = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    return g;
}

} // namespace detail

/// P1 stiffness matrix with no boundary treatment; row sums vanish (the
/// element matrices annihilate constants).
inline CsrMatrix fem_stiffness(const TriMesh& mesh) {
    const int n = static_cast<int>(mesh.nodes.size());
    std::vector<Triplet> entries;
    entries.reserve(mesh.triangles.size() * 9);
    for (int e = 0; e < static_cast<int>(mesh.triangles.size()); ++e) {
        const auto g = detail::element_geometry(mesh, e);
        const auto& t = mesh.triangles[e];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                entries.push_back(
                    {t[a], t[b], (g.b[a] * g.b[b] + g.c[a] * g.c[b]) / (4.0 * g.area)});
    }
    return csr_from_triplets(n, n, std::move(entries));
}

/// Assembles the P1 Poisson system with constant source f and zero Dirichlet
/// values on mesh.boundary_nodes, eliminated symmetrically. DoFs are the
/// interior nodes in node order.
inline LinearSystem assemble_fem_triangle(const TriMesh& mesh, double f = 1.0) {
    const int n = static_cast<int>(mesh.nodes.size());
    for (const auto& t : mesh.triangles)
        for (int v : t)
            if (v < 0 || v >= n) throw argument_error("triangle vertex index out of range");

    std::vector<char> is_boundary(n, 0);
    for (int v : mesh.boundary_nodes) {
        if (v < 0 || v >= n) throw argument_error("boundary node index out of range");
        is_boundary[v] = 1;
    }
    std::vector<int> interior_of(n, -1);
    int n_interior = 0;
    for (int v = 0; v < n; ++v)
        if (!is_boundary[v]) interior_of[v] = n_interior++;

    LinearSystem sys;
    sys.b.assign(n_interior, 0.0);
    sys.coords.resize(n_interior);
    for (int v = 0; v < n; ++v)
        if (interior_of[v] >= 0) sys.coords[interior_of[v]] = mesh.nodes[v];

    std::vector<Triplet> entries;
    entries.reserve(mesh.triangles.size() * 9);
    for (int e = 0; e < static_cast<int>(mesh.triangles.size()); ++e) {
        const auto g = detail::element_geometry(mesh, e);
        const auto& t = mesh.triangles[e];
        for (int a = 0; a < 3; ++a) {
            const int row = interior_of[t[a]];
            if (row < 0) continue;
            sys.b[row] += f * g.area / 3.0;
            for (int b = 0; b < 3; ++b) {
                const int col = interior_of[t[b]];
                if (col < 0) continue;   // zero Dirichlet value: nothing moves to b
                entries.push_back(
                    {row, col, (g.b[a] * g.b[b] + g.c[a] * g.c[b]) / (4.0 * g.area)});
            }
        }
    }
    sys.A = csr_from_triplets(n_interior, n_interior, std::move(entries));
    return sys;
}

/// Reads the plain-text mesh format:
///   NODES <count>      followed by count lines  "id x y"      (1-based ids)
///   ELEMENTS <count>   followed by count lines  "id v1 v2 v3" (1-based ids)
///   BOUNDARY <count>   optional, followed by count node ids
/// Boundary nodes are the endpoints of edges used by exactly one triangle,
/// unioned with the explicit list.
inline TriMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);

    std::string line;
    long line_no = 0;
    auto next_line = [&](const char* what) {
        for (;;) {
            if (!std::getline(in, line)) throw parse_error(std::string("missing ") + what, line_no);
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return;
        }
    };

    TriMesh mesh;
    next_line("NODES header");
    std::istringstream head(line);
    std::string tag;
    long count = 0;
    if (!(head >> tag >> count) || tag != "NODES" || count < 1)
        throw parse_error("expected 'NODES <count>'", line_no);
    mesh.nodes.resize(count);
    std::vector<char> seen(count, 0);
    for (long i = 0; i < count; ++i) {
        next_line("node line");
        std::istringstream row(line);
        long id = 0;
        double x = 0.0, y = 0.0;
        if (!(row >> id >> x >> y)) throw parse_error("malformed node line", line_no);
        if (id < 1 || id > count) throw parse_error("node id out of range (ids are 1-based)", line_no);
        if (seen[id - 1]) throw parse_error("duplicate node id", line_no);
        seen[id - 1] = 1;
        mesh.nodes[id - 1] = {x, y};
    }

    next_line("ELEMENTS header");
    std::istringstream ehead(line);
    if (!(ehead >> tag >> count) || tag != "ELEMENTS" || count < 1)
        throw parse_error("expected 'ELEMENTS <count>'", line_no);
    mesh.triangles.resize(count);
    seen.assign(count, 0);
    for (long i = 0; i < count; ++i) {
        next_line("element line");
        std::istringstream row(line);
        long id = 0, v1 = 0, v2 = 0, v3 = 0;
        if (!(row >> id >> v1 >> v2 >> v3)) throw parse_error("malformed element line", line_no);
        if (id < 1 || id > count) throw parse_error("element id out of range (ids are 1-based)", line_no);
        if (seen[id - 1]) throw parse_error("duplicate element id", line_no);
        seen[id - 1] = 1;
        for (long v : {v1, v2, v3})
            if (v < 1 || v > static_cast<long>(mesh.nodes.size()))
                throw parse_error("vertex index out of range (ids are 1-based)", line_no);
        mesh.triangles[id - 1] = {static_cast<int>(v1 - 1), static_cast<int>(v2 - 1),
                                  static_cast<int>(v3 - 1)};
    }

    std::vector<int> explicit_boundary;
    bool have_more = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            have_more = true;
            break;
        }
    }
    if (have_more) {
        std::istringstream bhead(line);
        if (!(bhead >> tag) || tag != "BOUNDARY")
            throw parse_error("expected 'BOUNDARY <count>'", line_no);
        if (!(bhead >> count) || count < 0)
            throw parse_error("expected 'BOUNDARY <count>'", line_no);
        long got = 0;
        while (got < count) {
            next_line("boundary ids");
            std::istringstream row(line);
            long id = 0;
            while (got < count && row >> id) {
                if (id < 1 || id > static_cast<long>(mesh.nodes.size()))
                    throw parse_error("boundary node id out of range", line_no);
                explicit_boundary.push_back(static_cast<int>(id - 1));
                ++got;
            }
        }
    }

    // Free boundary: endpoints of edges owned by exactly one triangle.
    std::vector<std::pair<int, int>> edges;
    edges.reserve(mesh.triangles.size() * 3);
    for (const auto& t : mesh.triangles)
        for (int s = 0; s < 3; ++s) {
            const int a = t[s], b = t[(s + 1) % 3];
            edges.emplace_back(std::min(a, b), std::max(a, b));
        }
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i < edges.size();) {
        std::size_t j = i;
        while (j < edges.size() && edges[j] == edges[i]) ++j;
        if (j - i == 1) {
            explicit_boundary.push_back(edges[i].first);
            explicit_boundary.push_back(edges[i].second);
        }
        i = j;
    }
    std::sort(explicit_boundary.begin(), explicit_boundary.end());
    explicit_boundary.erase(std::unique(explicit_boundary.begin(), explicit_boundary.end()),
                            explicit_boundary.end());
    mesh.boundary_nodes = std::move(explicit_boundary);

    for (int e = 0; e < static_cast<int>(mesh.triangles.size()); ++e)
        detail::element_geometry(mesh, e);   // validates non-degeneracy
    return mesh;
}

/// Plain-text coordinates, one "x y" per line, one line per DoF.
inline std::vector<Point> read_coords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::vector<Point> coords;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        double x = 0.0, y = 0.0;
        if (!(row >> x >> y)) throw parse_error("malformed coordinate line", line_no);
        coords.push_back({x, y});
    }
    return coords;
}

} // namespace auxamg

#endif // AUXAMG_PROBLEMS_HPP
