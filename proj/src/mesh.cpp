#include "wg/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace wg {

namespace {

double polygon_signed_area(const std::vector<Vec2>& vs, const std::vector<int>& loop) {
    double a = 0.0;
    const std::size_t k = loop.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 p = vs[loop[i]];
        const Vec2 q = vs[loop[(i + 1) % k]];
        a += cross(p, q);
    }
    return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2>& vs, const std::vector<int>& loop, double area) {
    double cx = 0.0, cy = 0.0;
    const std::size_t k = loop.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 p = vs[loop[i]];
        const Vec2 q = vs[loop[(i + 1) % k]];
        const double w = cross(p, q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (6.0 * area), cy / (6.0 * area)};
}

double polygon_diameter(const std::vector<Vec2>& vs, const std::vector<int>& loop) {
    double d = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i)
        for (std::size_t j = i + 1; j < loop.size(); ++j)
            d = std::max(d, norm(vs[loop[i]] - vs[loop[j]]));
    return d;
}

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool polygon_is_simple(const std::vector<Vec2>& vs, const std::vector<int>& loop) {
    const std::size_t k = loop.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Vec2 a = vs[loop[i]], b = vs[loop[(i + 1) % k]];
        for (std::size_t j = i + 1; j < k; ++j) {
            if (j == i || (j + 1) % k == i || (i + 1) % k == j) continue;  // adjacent edges share a vertex
            const Vec2 c = vs[loop[j]], d = vs[loop[(j + 1) % k]];
            if (segments_properly_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

}  // namespace

WeakMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cell_loops) {
    WeakMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.cells = std::move(cell_loops);

    const int nv = static_cast<int>(mesh.vertices.size());
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        auto& loop = mesh.cells[c];
        if (loop.size() < 3) throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        for (int v : loop)
            if (v < 0 || v >= nv)
                throw MeshError("cell " + std::to_string(c) + " references vertex " + std::to_string(v) +
                                " out of range");
        const double a = polygon_signed_area(mesh.vertices, loop);
        if (a == 0.0) throw MeshError("cell " + std::to_string(c) + " has zero area");
        if (a < 0.0) std::reverse(loop.begin(), loop.end());
    }

    mesh.cell_meta.resize(mesh.cells.size());
    mesh.h = 0.0;
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        const auto& loop = mesh.cells[c];
        CellMeta meta;
        meta.area = polygon_signed_area(mesh.vertices, loop);
        meta.centroid = polygon_centroid(mesh.vertices, loop, meta.area);
        meta.diameter = polygon_diameter(mesh.vertices, loop);
        mesh.cell_meta[c] = meta;
        mesh.h = std::max(mesh.h, meta.diameter);
    }

    // Derive edges; the first (lower-index) incident cell becomes the left cell
    // and fixes the stored orientation.
    std::map<std::pair<int, int>, int> edge_of;
    mesh.cell_edges.resize(mesh.cells.size());
    for (std::size_t c = 0; c < mesh.cells.size(); ++c) {
        const auto& loop = mesh.cells[c];
        const std::size_t k = loop.size();
        mesh.cell_edges[c].resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % k];
            if (a == b) throw MeshError("cell " + std::to_string(c) + " repeats vertex " + std::to_string(a));
            const auto key = std::minmax(a, b);
            auto it = edge_of.find(key);
            if (it == edge_of.end()) {
                MeshEdge e;
                e.v0 = a;
                e.v1 = b;
                e.left_cell = static_cast<int>(c);
                const Vec2 t = mesh.vertices[b] - mesh.vertices[a];
                e.length = norm(t);
                if (e.length == 0.0) throw MeshError("zero-length edge in cell " + std::to_string(c));
                e.normal = {t.y / e.length, -t.x / e.length};  // outward for a CCW loop
                const int idx = static_cast<int>(mesh.edges.size());
                mesh.edges.push_back(e);
                edge_of.emplace(key, idx);
                mesh.cell_edges[c][i] = idx;
            } else {
                MeshEdge& e = mesh.edges[it->second];
                if (e.right_cell >= 0)
                    throw MeshError("non-manifold edge (" + std::to_string(key.first) + "," +
                                    std::to_string(key.second) + ") used by 3 cells");
                if (e.v0 != b || e.v1 != a)
                    throw MeshError("inconsistent orientation on edge (" + std::to_string(key.first) + "," +
                                    std::to_string(key.second) + ")");
                e.right_cell = static_cast<int>(c);
                mesh.cell_edges[c][i] = it->second;
            }
        }
    }
    return mesh;
}

WeakMesh square_grid(int level, const Rect& domain) {
    if (level < 1) throw MeshError("square_grid: level must be >= 1");
    const double w = domain.hi.x - domain.lo.x;
    const double hgt = domain.hi.y - domain.lo.y;
    if (w <= 0.0 || hgt <= 0.0) throw MeshError("square_grid: degenerate rectangle");

    const int n = 1 << (level - 1);
    std::vector<Vec2> verts;
    verts.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            verts.push_back({domain.lo.x + w * i / n, domain.lo.y + hgt * j / n});

    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::vector<int>> loops;
    loops.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    return build_mesh(std::move(verts), std::move(loops));
}

namespace {

// Macro-square pattern offsets for the polygonal grids: sides are cut at
// kSideCut and 1/2, the central 12-gon has circumradius kRingRadius about the
// macro-square center with vertices every 30 degrees starting at 15.
constexpr double kSideCut = 0.25;
constexpr double kRingRadius = 0.30;

}  // namespace

WeakMesh polygonal_grid(int level) {
    if (level < 1) throw MeshError("polygonal_grid: level must be >= 1");
    const int n = 1 << (level - 1);
    const double a = kSideCut;

    std::vector<Vec2> verts;
    std::map<std::pair<std::int64_t, std::int64_t>, int> vert_of;
    auto add_vertex = [&](double x, double y) {
        const double snap = 1e12;
        const auto key = std::make_pair(static_cast<std::int64_t>(std::llround(x * snap)),
                                        static_cast<std::int64_t>(std::llround(y * snap)));
        auto it = vert_of.find(key);
        if (it != vert_of.end()) return it->second;
        const int idx = static_cast<int>(verts.size());
        verts.push_back({x, y});
        vert_of.emplace(key, idx);
        return idx;
    };

    std::vector<std::vector<int>> loops;
    loops.reserve(static_cast<std::size_t>(n) * n * 9);
    const double pi = std::acos(-1.0);
    for (int mj = 0; mj < n; ++mj) {
        for (int mi = 0; mi < n; ++mi) {
            const double x0 = static_cast<double>(mi) / n;
            const double y0 = static_cast<double>(mj) / n;
            const double s = 1.0 / n;
            auto local = [&](double u, double v) { return add_vertex(x0 + u * s, y0 + v * s); };

            const int c00 = local(0, 0), c10 = local(1, 0), c11 = local(1, 1), c01 = local(0, 1);
            const int b1 = local(a, 0), b2 = local(0.5, 0), b3 = local(1 - a, 0);
            const int r1 = local(1, a), r2 = local(1, 0.5), r3 = local(1, 1 - a);
            const int t1 = local(1 - a, 1), t2 = local(0.5, 1), t3 = local(a, 1);
            const int l1 = local(0, 1 - a), l2 = local(0, 0.5), l3 = local(0, a);

            int ring[12];
            for (int k = 0; k < 12; ++k) {
                const double th = (15.0 + 30.0 * k) * pi / 180.0;
                ring[k] = local(0.5 + kRingRadius * std::cos(th), 0.5 + kRingRadius * std::sin(th));
            }

            loops.push_back({ring[0], ring[1], ring[2], ring[3], ring[4], ring[5], ring[6], ring[7], ring[8],
                             ring[9], ring[10], ring[11]});
            loops.push_back({b1, b2, b3, ring[10], ring[9], ring[8], ring[7]});   // bottom 7-gon
            loops.push_back({r1, r2, r3, ring[1], ring[0], ring[11], ring[10]});  // right 7-gon
            loops.push_back({t1, t2, t3, ring[4], ring[3], ring[2], ring[1]});    // top 7-gon
            loops.push_back({l1, l2, l3, ring[7], ring[6], ring[5], ring[4]});    // left 7-gon
            loops.push_back({c00, b1, ring[7], l3});                              // corner quads
            loops.push_back({b3, c10, r1, ring[10]});
            loops.push_back({r3, c11, t1, ring[1]});
            loops.push_back({t3, c01, l1, ring[4]});
        }
    }
    return build_mesh(std::move(verts), std::move(loops));
}

WeakMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("load_mesh: cannot open '" + path + "'");

    int lineno = 0;
    std::string line;
    auto next_line = [&](const char* what) {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') continue;
            return;
        }
        throw MeshError("load_mesh: " + path + ":" + std::to_string(lineno + 1) + ": expected " + what);
    };

    next_line("header 'wgmesh 1'");
    {
        std::istringstream hs(line);
        std::string magic;
        int version = 0;
        if (!(hs >> magic >> version) || magic != "wgmesh" || version != 1)
            throw MeshError("load_mesh: " + path + ":" + std::to_string(lineno) + ": bad header, expected 'wgmesh 1'");
    }

    next_line("vertex/cell counts");
    std::size_t nv = 0, nc = 0;
    {
        std::istringstream cs(line);
        if (!(cs >> nv >> nc) || nv < 3 || nc < 1)
            throw MeshError("load_mesh: " + path + ":" + std::to_string(lineno) + ": bad counts line");
    }

    std::vector<Vec2> verts(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        next_line("vertex coordinates");
        std::istringstream vs(line);
        if (!(vs >> verts[i].x >> verts[i].y))
            throw MeshError("load_mesh: " + path + ":" + std::to_string(lineno) + ": bad vertex line");
    }

    std::vector<std::vector<int>> loops(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        next_line("cell vertex list");
        std::istringstream cs(line);
        int k = 0;
        if (!(cs >> k) || k < 3)
            throw MeshError("load_mesh: " + path + ":" + std::to_string(lineno) + ": bad cell size");
        loops[c].resize(k);
        for (int i = 0; i < k; ++i)
            if (!(cs >> loops[c][i]))
                throw MeshError("load_mesh: " + path + ":" + std::to_string(lineno) + ": truncated cell line");
    }

    WeakMesh mesh = build_mesh(std::move(verts), std::move(loops));
    const MeshDiagnostic diag = validate(mesh);
    if (!diag.ok) throw MeshError("load_mesh: " + path + ": " + diag.message);
    return mesh;
}

MeshDiagnostic validate(const WeakMesh& mesh) {
    auto fail = [](std::string msg) { return MeshDiagnostic{false, std::move(msg)}; };

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double a = polygon_signed_area(mesh.vertices, mesh.cells[c]);
        if (a <= 0.0) return fail("cell " + std::to_string(c) + " has non-positive area");
        if (!polygon_is_simple(mesh.vertices, mesh.cells[c]))
            return fail("cell " + std::to_string(c) + " is self-intersecting");
        if (std::abs(mesh.cell_meta[c].area - a) > 1e-12 * std::max(1.0, a))
            return fail("cell " + std::to_string(c) + " has stale area metadata");
    }

    double hmax = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) hmax = std::max(hmax, mesh.cell_meta[c].diameter);
    if (std::abs(mesh.h - hmax) > 1e-12 * std::max(1.0, hmax)) return fail("mesh.h is not the max cell diameter");

    std::map<int, int> boundary_degree;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const MeshEdge& edge = mesh.edges[e];
        if (edge.left_cell < 0) return fail("edge " + std::to_string(e) + " has no incident cell");
        if (std::abs(norm(edge.normal) - 1.0) > 1e-12) return fail("edge " + std::to_string(e) + " normal is not unit");
        const Vec2 t = mesh.vertices[edge.v1] - mesh.vertices[edge.v0];
        const Vec2 expect = {t.y / edge.length, -t.x / edge.length};
        if (norm(edge.normal - expect) > 1e-12)
            return fail("edge " + std::to_string(e) + " normal disagrees with left-cell orientation");
        if (edge.right_cell < 0) {
            boundary_degree[edge.v0]++;
            boundary_degree[edge.v1]++;
        }
    }
    for (const auto& [v, deg] : boundary_degree)
        if (deg != 2) return fail("open boundary at vertex " + std::to_string(v));

    // Domain area from the divergence theorem over boundary edges; both sums
    // are compensated so the 1e-12 tolerance survives large meshes.
    auto kahan_add = [](double& sum, double& carry, double term) {
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    };
    double boundary_area = 0.0, bc = 0.0;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.boundary_edge(e)) continue;
        const MeshEdge& edge = mesh.edges[e];
        const Vec2 mid = (mesh.vertices[edge.v0] + mesh.vertices[edge.v1]) * 0.5;
        kahan_add(boundary_area, bc, 0.5 * dot(mid, edge.normal) * edge.length);
    }
    double cell_area = 0.0, cc = 0.0;
    for (const CellMeta& meta : mesh.cell_meta) kahan_add(cell_area, cc, meta.area);
    if (std::abs(cell_area - boundary_area) > 1e-12 * std::max(1.0, std::abs(boundary_area)))
        return fail("sum of cell areas does not match domain area");

    return {};
}

CellGeometry cell_geometry(const WeakMesh& mesh, int cell) {
    if (cell < 0 || cell >= mesh.num_cells()) throw MeshError("cell_geometry: cell index out of range");
    const auto& loop = mesh.cells[cell];
    const CellMeta& meta = mesh.cell_meta[cell];
    CellGeometry geo;
    geo.centroid = meta.centroid;
    geo.area = meta.area;
    geo.diameter = meta.diameter;
    geo.fan.reserve(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec2 p = mesh.vertices[loop[i]];
        const Vec2 q = mesh.vertices[loop[(i + 1) % loop.size()]];
        const double twice_area = cross(p - meta.centroid, q - meta.centroid);
        if (twice_area <= 1e-14 * meta.area)
            throw MeshError("fan triangulation invalid: cell " + std::to_string(cell) +
                            " is not star-shaped about its centroid");
        geo.fan.push_back({meta.centroid, p, q});
    }
    return geo;
}

}  // namespace wg
