#ifndef WG_POLYSPACE_HPP
#define WG_POLYSPACE_HPP

#include <functional>
#include <utility>
#include <vector>

#include "wg/linalg.hpp"
#include "wg/mesh.hpp"

namespace wg {

struct QuadratureRule {
    std::vector<Vec2> points;    // physical coordinates
    std::vector<double> weights; // sum equals the cell area / edge length
    int exactness = 0;

    std::size_t size() const { return points.size(); }
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
std::pair<Vector, Vector> gauss_legendre(int n);

/// Quadrature on a cell, exact for polynomials of total degree <= exactness.
/// Axis-aligned rectangles get a tensor-product Gauss rule; general polygons
/// are integrated over the centroid fan with a collapsed tensor rule per
/// triangle. All weights are positive.
QuadratureRule cell_quadrature(const WeakMesh& mesh, int cell, int exactness);

/// Gauss-Legendre rule mapped to the edge, ceil((exactness+1)/2) points.
QuadratureRule edge_quadrature(const WeakMesh& mesh, int edge, int exactness);

/// Scaled monomials ((x-c)/h)^a ((y-c)/h)^b, a+b <= k, ordered by total degree
/// then descending x-exponent: 1, X, Y, X^2, XY, Y^2, ...
class CellBasis {
public:
    CellBasis(int degree, Vec2 center, double scale);
    CellBasis(const WeakMesh& mesh, int cell, int degree);

    int degree() const { return k_; }
    int dim() const { return static_cast<int>(exps_.size()); }
    Vec2 center() const { return center_; }
    double scale() const { return scale_; }

    void eval(Vec2 x, std::span<double> values) const;
    void eval_grad(Vec2 x, std::span<double> dx, std::span<double> dy) const;

    /// values(p, i) = phi_i(points[p])
    DenseMatrix eval_at(const std::vector<Vec2>& points) const;

private:
    int k_;
    Vec2 center_;
    double scale_;
    std::vector<std::pair<int, int>> exps_;
};

/// Monomials t^j in the signed arc-length parameter t in [-1, 1]; the
/// parameter direction follows the edge's stored (global) orientation, so both
/// incident cells see the same basis.
class EdgeBasis {
public:
    EdgeBasis(const WeakMesh& mesh, int edge, int degree);

    int degree() const { return k_; }
    int dim() const { return k_ + 1; }
    double param(Vec2 x) const;

    void eval(Vec2 x, std::span<double> values) const;
    DenseMatrix eval_at(const std::vector<Vec2>& points) const;

private:
    int k_;
    Vec2 mid_;
    Vec2 dir_;  // (p1 - p0) / |p1 - p0|
    double half_length_;
};

/// M_ij = integral of phi_i phi_j over the cell; symmetric positive definite.
DenseMatrix cell_mass_matrix(const CellBasis& basis, const QuadratureRule& quad);
DenseMatrix edge_mass_matrix(const EdgeBasis& basis, const QuadratureRule& quad);

/// L2 projection of f onto P_k of the cell (operator P_h). The default rule
/// has exactness 2k+6; pass a rule explicitly to control sampling.
Vector project_cell(const std::function<double(Vec2)>& f, const WeakMesh& mesh, int cell, int k);
Vector project_cell(const std::function<double(Vec2)>& f, const CellBasis& basis, const QuadratureRule& quad);

/// L2 projection of f onto P_k of the edge (operator P_dK).
Vector project_edge(const std::function<double(Vec2)>& f, const WeakMesh& mesh, int edge, int k);
Vector project_edge(const std::function<double(Vec2)>& f, const EdgeBasis& basis, const QuadratureRule& quad);

}  // namespace wg

#endif
