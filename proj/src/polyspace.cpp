#include "wg/polyspace.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace wg {

namespace {

constexpr int kMaxExactness = 40;

}  // namespace

std::pair<Vector, Vector> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Vector nodes(n), weights(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev-based initial guess.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return {nodes, weights};
}

namespace {

bool is_axis_aligned_rectangle(const WeakMesh& mesh, int cell) {
    const auto& loop = mesh.cells[cell];
    if (loop.size() != 4) return false;
    const double tol = 1e-13 * mesh.cell_meta[cell].diameter;
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 d = mesh.vertices[loop[(i + 1) % 4]] - mesh.vertices[loop[i]];
        if (std::abs(d.x) > tol && std::abs(d.y) > tol) return false;
    }
    return true;
}

QuadratureRule tensor_rectangle_rule(const WeakMesh& mesh, int cell, int exactness) {
    const auto& loop = mesh.cells[cell];
    double xmin = mesh.vertices[loop[0]].x, xmax = xmin;
    double ymin = mesh.vertices[loop[0]].y, ymax = ymin;
    for (int v : loop) {
        xmin = std::min(xmin, mesh.vertices[v].x);
        xmax = std::max(xmax, mesh.vertices[v].x);
        ymin = std::min(ymin, mesh.vertices[v].y);
        ymax = std::max(ymax, mesh.vertices[v].y);
    }
    const int n = (exactness + 2) / 2;  // 2n-1 >= exactness
    const auto [nodes, weights] = gauss_legendre(n);
    QuadratureRule rule;
    rule.exactness = exactness;
    rule.points.reserve(static_cast<std::size_t>(n) * n);
    rule.weights.reserve(static_cast<std::size_t>(n) * n);
    const double hx = 0.5 * (xmax - xmin), hy = 0.5 * (ymax - ymin);
    const double cx = 0.5 * (xmax + xmin), cy = 0.5 * (ymax + ymin);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            rule.points.push_back({cx + hx * nodes[i], cy + hy * nodes[j]});
            rule.weights.push_back(hx * hy * weights[i] * weights[j]);
        }
    return rule;
}

// Collapsed tensor rule on a triangle (apex a, base b-c); exact for total
// degree 2n-2 including the linear Jacobian factor.
void append_triangle_rule(QuadratureRule& rule, Vec2 a, Vec2 b, Vec2 c, const Vector& nodes01,
                          const Vector& weights01, double area) {
    const int n = static_cast<int>(nodes01.size());
    for (int i = 0; i < n; ++i) {
        const double u = nodes01[i];
        for (int j = 0; j < n; ++j) {
            const double v = nodes01[j];
            const Vec2 p = a + ((b - a) * (1.0 - v) + (c - a) * v) * u;
            rule.points.push_back(p);
            rule.weights.push_back(2.0 * area * u * weights01[i] * weights01[j]);
        }
    }
}

}  // namespace

QuadratureRule cell_quadrature(const WeakMesh& mesh, int cell, int exactness) {
    if (exactness < 0) throw std::invalid_argument("cell_quadrature: negative exactness");
    if (exactness > kMaxExactness)
        throw std::invalid_argument("cell_quadrature: exactness " + std::to_string(exactness) +
                                    " above the built-in rule limit " + std::to_string(kMaxExactness));
    if (is_axis_aligned_rectangle(mesh, cell)) return tensor_rectangle_rule(mesh, cell, exactness);

    const CellGeometry geo = cell_geometry(mesh, cell);  // rejects non-star-shaped cells
    const int n = (exactness + 3) / 2;                   // 2n-1 >= exactness + 1 (Jacobian)
    auto [nodes, weights] = gauss_legendre(n);
    Vector nodes01(n), weights01(n);
    for (int i = 0; i < n; ++i) {
        nodes01[i] = 0.5 * (nodes[i] + 1.0);
        weights01[i] = 0.5 * weights[i];
    }
    QuadratureRule rule;
    rule.exactness = exactness;
    rule.points.reserve(geo.fan.size() * n * n);
    rule.weights.reserve(geo.fan.size() * n * n);
    for (const auto& tri : geo.fan) {
        const double area = 0.5 * cross(tri[1] - tri[0], tri[2] - tri[0]);
        append_triangle_rule(rule, tri[0], tri[1], tri[2], nodes01, weights01, area);
    }
    return rule;
}

QuadratureRule edge_quadrature(const WeakMesh& mesh, int edge, int exactness) {
    if (exactness < 0) throw std::invalid_argument("edge_quadrature: negative exactness");
    const MeshEdge& e = mesh.edges[edge];
    const Vec2 p0 = mesh.vertices[e.v0], p1 = mesh.vertices[e.v1];
    const int n = (exactness + 2) / 2;
    const auto [nodes, weights] = gauss_legendre(n);
    QuadratureRule rule;
    rule.exactness = exactness;
    rule.points.resize(n);
    rule.weights.resize(n);
    const Vec2 mid = (p0 + p1) * 0.5;
    const Vec2 half = (p1 - p0) * 0.5;
    for (int i = 0; i < n; ++i) {
        rule.points[i] = mid + half * nodes[i];
        rule.weights[i] = 0.5 * e.length * weights[i];
    }
    return rule;
}

CellBasis::CellBasis(int degree, Vec2 center, double scale) : k_(degree), center_(center), scale_(scale) {
    if (degree < 0 || degree > 30) throw std::invalid_argument("CellBasis: degree out of supported range");
    for (int d = 0; d <= degree; ++d)
        for (int a = d; a >= 0; --a) exps_.emplace_back(a, d - a);
}

CellBasis::CellBasis(const WeakMesh& mesh, int cell, int degree)
    : CellBasis(degree, mesh.cell_meta[cell].centroid, mesh.cell_meta[cell].diameter) {}

void CellBasis::eval(Vec2 x, std::span<double> values) const {
    assert(values.size() == exps_.size());
    const double X = (x.x - center_.x) / scale_;
    const double Y = (x.y - center_.y) / scale_;
    double px[32], py[32];
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= k_; ++d) {
        px[d] = px[d - 1] * X;
        py[d] = py[d - 1] * Y;
    }
    for (std::size_t i = 0; i < exps_.size(); ++i) values[i] = px[exps_[i].first] * py[exps_[i].second];
}

void CellBasis::eval_grad(Vec2 x, std::span<double> dx, std::span<double> dy) const {
    assert(dx.size() == exps_.size() && dy.size() == exps_.size());
    const double X = (x.x - center_.x) / scale_;
    const double Y = (x.y - center_.y) / scale_;
    const double inv = 1.0 / scale_;
    double px[32], py[32];
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= k_; ++d) {
        px[d] = px[d - 1] * X;
        py[d] = py[d - 1] * Y;
    }
    for (std::size_t i = 0; i < exps_.size(); ++i) {
        const auto [a, b] = exps_[i];
        dx[i] = a == 0 ? 0.0 : a * inv * px[a - 1] * py[b];
        dy[i] = b == 0 ? 0.0 : b * inv * px[a] * py[b - 1];
    }
}

DenseMatrix CellBasis::eval_at(const std::vector<Vec2>& points) const {
    DenseMatrix m(static_cast<int>(points.size()), dim());
    std::vector<double> row(dim());
    for (std::size_t p = 0; p < points.size(); ++p) {
        eval(points[p], row);
        for (int i = 0; i < dim(); ++i) m(static_cast<int>(p), i) = row[i];
    }
    return m;
}

EdgeBasis::EdgeBasis(const WeakMesh& mesh, int edge, int degree) : k_(degree) {
    if (degree < 0) throw std::invalid_argument("EdgeBasis: degree must be >= 0");
    const MeshEdge& e = mesh.edges[edge];
    const Vec2 p0 = mesh.vertices[e.v0], p1 = mesh.vertices[e.v1];
    mid_ = (p0 + p1) * 0.5;
    half_length_ = 0.5 * e.length;
    dir_ = (p1 - p0) * (1.0 / e.length);
}

double EdgeBasis::param(Vec2 x) const { return dot(x - mid_, dir_) / half_length_; }

void EdgeBasis::eval(Vec2 x, std::span<double> values) const {
    assert(static_cast<int>(values.size()) == k_ + 1);
    const double t = param(x);
    double p = 1.0;
    for (int j = 0; j <= k_; ++j) {
        values[j] = p;
        p *= t;
    }
}

DenseMatrix EdgeBasis::eval_at(const std::vector<Vec2>& points) const {
    DenseMatrix m(static_cast<int>(points.size()), dim());
    std::vector<double> row(dim());
    for (std::size_t p = 0; p < points.size(); ++p) {
        eval(points[p], row);
        for (int i = 0; i < dim(); ++i) m(static_cast<int>(p), i) = row[i];
    }
    return m;
}

namespace {

DenseMatrix gram_matrix(const DenseMatrix& values, const std::vector<double>& weights) {
    const int npts = values.rows(), dim = values.cols();
    DenseMatrix m(dim, dim);
    for (int p = 0; p < npts; ++p) {
        const double w = weights[p];
        for (int i = 0; i < dim; ++i) {
            const double wi = w * values(p, i);
            for (int j = i; j < dim; ++j) m(i, j) += wi * values(p, j);
        }
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < i; ++j) m(i, j) = m(j, i);
    return m;
}

template <typename Basis>
Vector project_impl(const std::function<double(Vec2)>& f, const Basis& basis, const QuadratureRule& quad) {
    const DenseMatrix values = basis.eval_at(quad.points);
    const DenseMatrix mass = gram_matrix(values, quad.weights);
    Vector moments(basis.dim(), 0.0);
    for (std::size_t p = 0; p < quad.size(); ++p) {
        const double wf = quad.weights[p] * f(quad.points[p]);
        for (int i = 0; i < basis.dim(); ++i) moments[i] += wf * values(static_cast<int>(p), i);
    }
    return CholeskyFactor(mass).solve(moments);
}

}  // namespace

DenseMatrix cell_mass_matrix(const CellBasis& basis, const QuadratureRule& quad) {
    return gram_matrix(basis.eval_at(quad.points), quad.weights);
}

DenseMatrix edge_mass_matrix(const EdgeBasis& basis, const QuadratureRule& quad) {
    return gram_matrix(basis.eval_at(quad.points), quad.weights);
}

Vector project_cell(const std::function<double(Vec2)>& f, const WeakMesh& mesh, int cell, int k) {
    const CellBasis basis(mesh, cell, k);
    return project_impl(f, basis, cell_quadrature(mesh, cell, 2 * k + 6));
}

Vector project_cell(const std::function<double(Vec2)>& f, const CellBasis& basis, const QuadratureRule& quad) {
    return project_impl(f, basis, quad);
}

Vector project_edge(const std::function<double(Vec2)>& f, const WeakMesh& mesh, int edge, int k) {
    const EdgeBasis basis(mesh, edge, k);
    return project_impl(f, basis, edge_quadrature(mesh, edge, 2 * k + 3));
}

Vector project_edge(const std::function<double(Vec2)>& f, const EdgeBasis& basis, const QuadratureRule& quad) {
    return project_impl(f, basis, quad);
}

}  // namespace wg
