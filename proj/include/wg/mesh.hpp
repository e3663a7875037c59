#ifndef WG_MESH_HPP
#define WG_MESH_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Rect {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{1.0, 1.0};
};

/// Oriented mesh edge. The stored vertex order (v0, v1) is the traversal
/// direction of the left cell, so `normal` points from the left cell into the
/// right cell, or outward when the edge lies on the domain boundary.
struct MeshEdge {
    int v0 = -1;
    int v1 = -1;
    int left_cell = -1;
    int right_cell = -1;  // -1 on the boundary
    Vec2 normal;
    double length = 0.0;
};

struct CellMeta {
    Vec2 centroid;
    double area = 0.0;
    double diameter = 0.0;
};

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A polygonal partition with full edge-cell adjacency. Immutable once built.
struct WeakMesh {
    std::vector<Vec2> vertices;
    std::vector<std::vector<int>> cells;       // counter-clockwise vertex loops
    std::vector<MeshEdge> edges;
    std::vector<std::vector<int>> cell_edges;  // per cell, edge indices in loop order
    std::vector<CellMeta> cell_meta;
    double h = 0.0;

    int num_cells() const { return static_cast<int>(cells.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    bool boundary_edge(int e) const { return edges[e].right_cell < 0; }

    /// +1 when `cell` is the left cell of `edge`, -1 when it is the right one.
    double outward_sign(int cell, int edge) const {
        return edges[edge].left_cell == cell ? 1.0 : -1.0;
    }
    Vec2 outward_normal(int cell, int edge) const {
        const double s = outward_sign(cell, edge);
        return edges[edge].normal * s;
    }
};

/// Assemble a mesh from vertex coordinates and cell loops (any orientation;
/// loops get normalized to counter-clockwise). Throws MeshError on broken
/// topology such as an edge shared by more than two cells.
WeakMesh build_mesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cell_loops);

/// Uniform grid of 2^(level-1) x 2^(level-1) squares covering `domain`.
WeakMesh square_grid(int level, const Rect& domain = {});

/// Hierarchy of polygonal meshes of the unit square: each macro-square carries
/// a fixed 9-cell pattern (central 12-gon, four 7-gon side cells, four corner
/// quads), and level l uses a 2^(l-1) x 2^(l-1) array of macro-squares.
WeakMesh polygonal_grid(int level);

/// Parse the `wgmesh 1` text format and validate the result.
WeakMesh load_mesh(const std::string& path);

struct MeshDiagnostic {
    bool ok = true;
    std::string message;  // first violated invariant, with cell/edge index
};

MeshDiagnostic validate(const WeakMesh& mesh);

struct CellGeometry {
    Vec2 centroid;
    double area = 0.0;
    double diameter = 0.0;
    std::vector<std::array<Vec2, 3>> fan;  // triangles (centroid, v_i, v_{i+1})
};

/// Geometry of one cell plus its centroid-fan triangulation. Throws MeshError
/// ("fan triangulation invalid") when the cell is not star-shaped about its
/// centroid.
CellGeometry cell_geometry(const WeakMesh& mesh, int cell);

}  // namespace wg

#endif
